#pragma once

// Gap functions, interval witnesses and the window condition tying them to
// sets of naturals.
//
// A gap function g : N -> N is either affine, g(n) = max(0, a*n + b), a finite
// table extended by an affine rule, or derived (an arbitrary callable, e.g.
// the function obtained from a submeasure). An interval witness is a sequence
// of pairwise disjoint, increasing finite intervals I_0 < I_1 < ...
//
// Grammar:
//
//   (gap affine a b) | (affine a b)        max(0, a*n + b), a >= 0
//   (gap const c)    | (const c)
//   (gap table (v0 v1 ...) (affine a b))   v_n for n < len, affine afterwards
//
//   (witness dyadic)                       [2^k, 2^{k+1} - 1]
//   (witness unit)                         [k, k]
//   (witness linear s b L)                 [s*k + b, s*k + b + L - 1], 1 <= L <= s
//   (witness gap G)                        I_0 = [0, G(0)], I_{k+1} = [m, m + G(m)], m = max I_k + 1
//   (witness table (lo hi)... [(extend G)]) explicit prefix, continued as for (witness gap G)

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maldist/omega_set.hpp"
#include "maldist/rational.hpp"
#include "maldist/sexpr.hpp"
#include "maldist/submeasure.hpp"

namespace maldist {

class GapFunction {
 public:
  enum class Kind { Affine, Table, Derived };

  struct AffineTail {
    Natural from = 0;  // the rule holds for all n >= from
    Natural slope = 0;
    std::int64_t intercept = 0;
  };

  GapFunction();  // constant 0
  static GapFunction affine(Natural slope, std::int64_t intercept);
  static GapFunction constant(Natural c);
  static GapFunction table(std::vector<Natural> values, Natural slope, std::int64_t intercept);
  // Results are memoized; the callable must be deterministic.
  static GapFunction derived(std::string description, std::function<Natural(Natural)> fn);

  static GapFunction parse(std::string_view text);
  static GapFunction from_sexpr(const SExpr& e);
  // Derived functions print as (gap derived "description") and do not parse back.
  std::string to_string() const;

  Kind kind() const;
  Natural operator()(Natural n) const;
  // The affine rule beyond some point, when known in closed form.
  std::optional<AffineTail> eventually_affine() const;

  struct State;  // implementation detail

 private:
  explicit GapFunction(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

struct Interval {
  Natural lo = 0;
  Natural hi = 0;  // inclusive
  Natural length() const { return hi - lo + 1; }
  std::string to_string() const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

class IntervalWitness {
 public:
  enum class Kind { Dyadic, Unit, Linear, Recurrence };

  static IntervalWitness dyadic();
  static IntervalWitness unit();
  static IntervalWitness linear(Natural stride, Natural offset, Natural length);
  static IntervalWitness from_gap(GapFunction g);
  static IntervalWitness table(std::vector<Interval> prefix, GapFunction extension);

  static IntervalWitness parse(std::string_view text);
  static IntervalWitness from_sexpr(const SExpr& e);
  std::string to_string() const;

  Kind kind() const;
  // Throws InvalidArgument when I_k would exceed the representable range.
  Interval at(Natural k) const;
  std::vector<Interval> prefix(Natural count) const;
  // All I_k with max I_k <= horizon.
  std::vector<Interval> up_to(Natural horizon) const;
  std::optional<Natural> index_containing(Natural n) const;
  // Least k with min I_k >= n.
  Natural first_index_at_or_after(Natural n) const;

  // Residue dynamics of min I_k modulo p from some index on, used to decide
  // statements about infinitely many k. See certify_infinitude.
  struct ModularOrbit {
    Natural start_index = 0;
    Natural start_residue = 0;
    Natural window = 0;  // every I_k (k >= start_index) covers at least this many consecutive residues
    bool exact_window = false;  // |I_k| == window for all k >= start_index
    std::function<Natural(Natural)> step;
  };
  // nullopt when the witness has no closed-form residue dynamics.
  std::optional<ModularOrbit> modular_orbit(Natural period, Natural threshold) const;

  struct State;  // implementation detail

 private:
  explicit IntervalWitness(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

struct InfinitudeCertificate {
  bool certified = false;
  bool contained_infinitely_often = false;  // I_k ⊆ S for infinitely many k
  bool meets_infinitely_often = false;      // I_k ∩ S ≠ ∅ for infinitely many k
  nlohmann::json to_json() const;
};

InfinitudeCertificate certify_infinitude(const IntervalWitness& w, const CanonicalSet& s);

// I_0 = [0, g(0)], I_{k+1} = [max I_k + 1, max I_k + 1 + g(max I_k + 1)].
IntervalWitness gap_to_intervals(const GapFunction& g);
// g(n) = max I_k for the least k with min I_k >= n.
GapFunction intervals_to_gap(const IntervalWitness& w);

// Does [n, n + g(n)] meet A for all n beyond some n_A?
struct ConditionCheckResult {
  enum class Outcome { Holds, FailsAtHorizon, Inconclusive };
  Outcome outcome = Outcome::Inconclusive;
  Natural threshold = 0;  // n_A when the outcome is Holds
  std::vector<Natural> witnesses;  // failing n <= horizon (at most kMaxWitnesses listed)
  Natural failure_count = 0;
  Natural horizon = 0;
  Natural max_gap = 0;
  // Set when the eventual behaviour is decided exactly: true if the windows
  // miss A infinitely often.
  std::optional<bool> fails_infinitely_often;

  static constexpr std::size_t kMaxWitnesses = 10000;
  bool holds() const { return outcome == Outcome::Holds; }
  nlohmann::json to_json() const;
};

std::string to_string(ConditionCheckResult::Outcome o);

ConditionCheckResult check_condition2(const GapFunction& g, const SetExpr& a, Natural horizon);

// g_alpha(n) = least k with phi([n, n + k]) >= 1 - alpha/4.
// Requires ||omega||_phi = 1 (HypothesisNotCertified otherwise) and alpha in
// (0, 1) (InvalidArgument). Evaluation throws NoFiniteWitness(n) when no
// k <= search_cap works.
inline constexpr Natural kGapSearchCap = 1000000;
GapFunction gap_from_lscsm(const Lscsm& phi, const Rational& alpha, Natural search_cap = kGapSearchCap);

struct LscsmVerification {
  std::string phi;
  Rational alpha;
  std::string set;
  Natural horizon = 0;
  Extended complement_mass;
  Natural n_a = 0;
  Natural windows_checked = 0;
  Extended min_window_mass;  // min over n of phi(A ∩ [n, n + g_alpha(n)])
  Natural min_window_at = 0;
  Rational required;  // alpha / 4
  std::vector<Natural> failures;
  Natural max_gap = 0;

  bool ok() const { return failures.empty(); }
  nlohmann::json to_json() const;
};

// For A with ||omega \ A||_phi <= 1 - alpha: finds n_A with
// phi((omega \ A) ∩ [n_A, inf)) <= 1 - alpha/2 and checks
// phi(A ∩ [n, n + g_alpha(n)]) >= alpha/4 for n_A <= n <= horizon.
LscsmVerification verify_prop_lscsm(const Lscsm& phi, const Rational& alpha, const SetExpr& a, Natural horizon);

}  // namespace maldist
