#pragma once

// Banach-Mazur game on X^omega and Laflamme's game on omega, each with the
// Player II strategy built from an interval witness, pluggable Player I
// adversaries, and JSON-lines transcripts.
//
// Adversary grammar:
//   (pass)              Banach-Mazur: return the previous set unchanged
//   (pin-far)           Banach-Mazur: pin coordinates 0..9 near the point farthest from eta
//   (random seed)       Banach-Mazur: seeded random refinements
//   (gap-step s)        Laflamme: c_k = m(B_{k-1}) + s
//   (fixed c...)        Laflamme: explicit thresholds, last one repeated
//   (random-threshold seed)   Laflamme: seeded legal thresholds

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "maldist/diffuse.hpp"
#include "maldist/sequence_space.hpp"
#include "maldist/witness.hpp"

namespace maldist {

// ---- Banach-Mazur --------------------------------------------------------------

struct BMRound {
  Natural round = 0;
  Cylinder u;  // Player I
  std::int64_t kappa = -1;  // support bound of U_n
  Natural j = 0;            // least j with min I_j > kappa
  Cylinder v;               // Player II
};

struct BMState {
  std::vector<BMRound> rounds;
  const Cylinder& last_v() const;
};

// Player I: given the round and the state so far, return U_n ⊆ V_{n-1}.
class BMAdversary {
 public:
  virtual ~BMAdversary() = default;
  virtual Cylinder move(const Space& space, const Point& eta, const BMState& state) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<BMAdversary> make_bm_adversary(const std::string& descriptor);
std::unique_ptr<BMAdversary> bm_pass();
std::unique_ptr<BMAdversary> bm_pin_far();
std::unique_ptr<BMAdversary> bm_random(std::uint64_t seed);
// Reads one cylinder per line from `in`, re-prompting on `out` after illegal moves.
std::unique_ptr<BMAdversary> bm_interactive(std::istream& in, std::ostream& out);

// Player II's reply: V_n constrains I_{j_n} into B(eta, 2^-n).
BMRound bm_respond(const Space& space, const IntervalWitness& w, const Point& eta, Natural round, Cylinder u);

struct BMResult {
  std::string space;
  std::string witness;
  Point eta;
  std::string adversary;
  BMState state;
  std::vector<Point> prefix;  // a point of the final V, coordinates 0..support

  nlohmann::json to_json(const Space& space) const;
  void write_transcript(std::ostream& out, const Space& space) const;
};

// Throws IllegalMove when Player I leaves the chain.
BMResult bm_play(const Space& space, const IntervalWitness& w, const Point& eta, BMAdversary& adversary,
                 Natural rounds);

struct BMInvariantCheck {
  Natural violations = 0;
  std::vector<std::string> details;
  bool ok() const { return violations == 0; }
};
// Chain containment, min I_{j_n} > kappa_n, and d(x_i, eta) < 2^-n on I_{j_n}.
BMInvariantCheck check_bm_invariants(const Space& space, const IntervalWitness& w, const Point& eta,
                                     const BMResult& result);

// ---- dense open family ---------------------------------------------------------

// G_n = {x : exists k >= n with d(x_i, eta) < 2^-n for all i in I_k}.
class DenseOpenFamily {
 public:
  DenseOpenFamily(Space space, IntervalWitness w, Point eta);

  const Space& space() const { return space_; }
  const IntervalWitness& witness() const { return witness_; }
  const Point& eta() const { return eta_; }

  // Least k >= n with min I_k > m(D).
  Natural refinement_index(Natural n, const Cylinder& d) const;
  // Sub-cylinder of D inside G_n: I_k pinned into B(eta, 2^-n).
  Cylinder refine(Natural n, const Cylinder& d) const;
  // A k witnessing x ∈ G_n from the prefix, with max I_k < prefix length.
  std::optional<Natural> membership_witness(Natural n, const std::vector<Point>& prefix) const;

 private:
  Space space_;
  IntervalWitness witness_;
  Point eta_;
};

// ---- Laflamme ------------------------------------------------------------------

struct LaflammeRound {
  Natural round = 0;
  Natural c = 0;              // Player I threshold c_k
  Cylinder a;                 // A_k
  Natural pinned_index = 0;   // the witness index the family pinned
  Interval pinned;            // its interval
  Cylinder b;                 // B_k after the dichotomy step
  std::vector<Natural> f;     // F_k
};

struct LaflammeState {
  std::vector<LaflammeRound> rounds;
  std::int64_t support() const;  // m(B_{k}) of the last round, -1 before play
};

class LaflammeAdversary {
 public:
  virtual ~LaflammeAdversary() = default;
  virtual Natural threshold(const LaflammeState& state) = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<LaflammeAdversary> make_laflamme_adversary(const std::string& descriptor);
std::unique_ptr<LaflammeAdversary> laflamme_gap_step(Natural step);
std::unique_ptr<LaflammeAdversary> laflamme_fixed(std::vector<Natural> thresholds);
std::unique_ptr<LaflammeAdversary> laflamme_random(std::uint64_t seed);
std::unique_ptr<LaflammeAdversary> laflamme_interactive(std::istream& in, std::ostream& out);

struct LaflammeResult {
  std::string space;
  std::string witness;
  Point eta;
  Ball u;
  Ball v;
  std::string adversary;
  LaflammeState state;
  std::vector<Point> prefix;  // a point of the last B_k, coordinates 0..m(B_k)

  std::vector<Natural> union_f() const;
  nlohmann::json to_json(const Space& space) const;
  void write_transcript(std::ostream& out, const Space& space) const;
};

// Throws IllegalAdversaryMove on a regressing threshold or one not above max F_{k-1}.
LaflammeResult laflamme_play(const DenseOpenFamily& family, const Ball& u, const Ball& v,
                             LaflammeAdversary& adversary, Natural rounds);

struct LaflammeInvariantCheck {
  Natural violations = 0;
  std::vector<std::string> details;
  Natural rounds_with_full_pinned_interval = 0;  // rounds k >= 1 whose pinned I_j ⊆ union F
  bool ok() const { return violations == 0; }
};
LaflammeInvariantCheck check_laflamme_invariants(const DenseOpenFamily& family, const LaflammeResult& result);

struct AdjudicationReport {
  Natural rounds = 0;
  std::int64_t decided = -1;  // coordinates 0..decided are fixed by the play
  std::vector<Natural> union_f;
  std::vector<Natural> hitting;  // {n <= decided : x_n ∈ u}
  bool sets_equal = true;
  Natural pinned_contained = 0;  // rounds whose pinned interval lies in union F
  std::string oracle;
  OracleVerdict finite_union;  // the oracle on the finite union itself
  nlohmann::json to_json() const;
};

AdjudicationReport adjudicate_laflamme(const LaflammeResult& result, const Space& space,
                                       const PositivityOracle& oracle);

}  // namespace maldist
