#pragma once

// Diffuse submeasures on the naturals, positivity oracles, and the check that
// sets containing infinitely many witness intervals are positive.
//
// Grammar:
//
//   (diffuse mass PHI)          nu(S) = ||S||_phi
//   (diffuse witness W)         nu(S) = 1 if S meets infinitely many I_k of W, else 0
//   (density-above q)           positive iff the upper density of S exceeds q
//
//   (blocks W INDEX-SET)        union of the intervals I_k of W over k in INDEX-SET

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "maldist/omega_set.hpp"
#include "maldist/submeasure.hpp"
#include "maldist/witness.hpp"

namespace maldist {

// Union of witness intervals over an index set. Lets targets such as the
// union of the even dyadic blocks, which is not eventually periodic, reach
// the oracles.
class BlockUnion {
 public:
  BlockUnion(IntervalWitness witness, SetExpr indices);
  static BlockUnion parse(std::string_view text);
  static BlockUnion from_sexpr(const SExpr& e);
  std::string to_string() const;

  const IntervalWitness& witness() const { return witness_; }
  const SetExpr& indices() const { return indices_; }
  bool contains(Natural n) const;
  // The union as an eventually periodic set, when it is one in closed form
  // (unit and linear witnesses, or finitely many indices).
  std::optional<CanonicalSet> as_canonical() const;
  // limsup of |S ∩ [0, n]| / n, exact for the dyadic witness and whenever
  // as_canonical() applies.
  std::optional<Rational> limit_upper_density() const;

 private:
  IntervalWitness witness_;
  SetExpr indices_;
};

using PositivityTarget = std::variant<SetExpr, BlockUnion>;
std::string to_string(const PositivityTarget& t);
PositivityTarget parse_target(std::string_view text);

class DiffuseSubmeasure {
 public:
  enum class Mode { FromLscsmMass, IndicatorOfWitness };

  static DiffuseSubmeasure from_lscsm(Lscsm phi);
  static DiffuseSubmeasure indicator_of_witness(IntervalWitness w);
  static DiffuseSubmeasure parse(std::string_view text);
  static DiffuseSubmeasure from_sexpr(const SExpr& e);
  std::string to_string() const;

  Mode mode() const { return mode_; }
  // nullopt when the value cannot be certified.
  std::optional<Extended> evaluate(const CanonicalSet& s) const;
  std::optional<Extended> evaluate(const SetExpr& s) const { return evaluate(s.canonical()); }
  std::optional<Extended> evaluate(const PositivityTarget& t) const;

 private:
  DiffuseSubmeasure(Mode mode, std::optional<Lscsm> phi, std::optional<IntervalWitness> w);
  Mode mode_;
  std::optional<Lscsm> phi_;
  std::optional<IntervalWitness> witness_;
};

struct DensityThreshold {
  Rational threshold{0};
};

using PositivityOracle = std::variant<DiffuseSubmeasure, DensityThreshold>;
PositivityOracle parse_oracle(std::string_view text);
std::string to_string(const PositivityOracle& o);

struct OracleVerdict {
  std::optional<Extended> value;  // nu(S), or the upper density for a density threshold
  std::optional<bool> positive;   // nullopt when uncertified
};
OracleVerdict evaluate_oracle(const PositivityOracle& o, const PositivityTarget& t);

struct TalagrandReport {
  std::string witness;
  std::string target;
  std::string oracle;
  Natural horizon = 0;
  Natural intervals_examined = 0;  // I_k with max I_k <= horizon
  Natural contained_count = 0;     // among those, I_k ⊆ S
  std::optional<bool> contained_infinitely_often;
  bool oracle_evaluated = false;  // only when containment is certified infinite
  OracleVerdict verdict;

  // False only if S certifiably contains infinitely many I_k yet the oracle
  // certifies it is not positive.
  bool consistent() const;
  nlohmann::json to_json() const;
};

TalagrandReport talagrand_positivity_check(const IntervalWitness& w, const PositivityTarget& s,
                                           const PositivityOracle& oracle, Natural horizon);

}  // namespace maldist
