#pragma once

// Lower semicontinuous submeasures on the naturals.
//
// Every evaluation works on the canonical form of a SetExpr and is exact
// rational arithmetic. Truncated values phi(S ∩ [0, h]) are always available
// and are certified lower bounds of phi(S); full values and masses at
// infinity are flagged exact only when a closed form applies.
//
// Descriptor grammar:
//
//   counting | (counting)
//   harmonic | (harmonic)               weights 1/(n+1)
//   (geometric r)                       weights r^n, 0 < r < 1
//   upper-density | (upper-density)     sup_{n>=1} |A ∩ [0,n]| / n
//   (partition dyadic)                  sup_k |A ∩ J_k| / |J_k|, J_k = [2^k, 2^{k+1})
//   (partition linear c)                blocks of length c(k+1) tiling [0, inf)
//   (table v0 v1 ...)                   v[min(|A ∩ [0,h]|, len-1)], for adversarial tests
//   (cap c PHI)                         min(c, PHI)
// An optional leading "phi" keyword is accepted: (phi upper-density).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "maldist/omega_set.hpp"
#include "maldist/rational.hpp"
#include "maldist/sexpr.hpp"

namespace maldist {

inline constexpr Natural kDefaultHorizon = 100000;

struct Counting {};
struct WeightedSum {
  enum class Weights { Harmonic, Geometric };
  Weights weights = Weights::Harmonic;
  Rational ratio{0};  // geometric only
};
struct UpperDensity {};
struct PartitionDensity {
  enum class Blocks { Dyadic, Linear };
  Blocks blocks = Blocks::Dyadic;
  Natural scale = 1;  // linear only
};
struct CardinalityTable {
  std::vector<Rational> values;
};

class Lscsm {
 public:
  using Family = std::variant<Counting, WeightedSum, UpperDensity, PartitionDensity, CardinalityTable>;

  explicit Lscsm(Family family, std::optional<Rational> cap = std::nullopt);
  static Lscsm counting();
  static Lscsm harmonic();
  static Lscsm geometric(Rational ratio);
  static Lscsm upper_density();
  static Lscsm partition_dyadic();
  static Lscsm partition_linear(Natural scale);
  static Lscsm table(std::vector<Rational> values);
  Lscsm capped(Rational cap) const;

  static Lscsm parse(std::string_view text);
  static Lscsm from_sexpr(const SExpr& e);
  std::string to_string() const;

  const Family& family() const { return family_; }
  const std::optional<Rational>& cap() const { return cap_; }
  std::string name() const;

 private:
  Family family_;
  std::optional<Rational> cap_;
};

// A measured quantity with a certified bracket [lower, upper]; `upper` absent
// means unknown. When `exact` is set, `upper` is the exact value and `lower`
// is still the value observed at the horizon.
struct MassValue {
  Extended lower;
  std::optional<Extended> upper;
  bool exact = false;
  Natural horizon = 0;
  // For uncertified masses: phi(S ∩ (floor(sqrt h), h]), growth evidence.
  std::optional<Extended> tail_evidence;

  const Extended& value() const;  // the exact value; throws Uncertifiable otherwise
  nlohmann::json to_json() const;
};

// phi(S ∩ [0, horizon]) and, when available, the exact phi(S).
MassValue eval_phi(const Lscsm& phi, const SetExpr& s, Natural horizon = kDefaultHorizon);
MassValue eval_phi(const Lscsm& phi, const CanonicalSet& s, Natural horizon = kDefaultHorizon);
// phi(S ∩ [0, horizon]) only.
Extended eval_truncated(const Lscsm& phi, const CanonicalSet& s, Natural horizon);
// phi(S ∩ [lo, hi]), exact.
Extended eval_window(const Lscsm& phi, const CanonicalSet& s, Natural lo, Natural hi);
// Exact phi(S ∩ [lo, inf)) when a closed form exists.
std::optional<Extended> eval_tail(const Lscsm& phi, const CanonicalSet& s, Natural lo);
// phi(S) for finite S (exact, always available).
Extended eval_finite(const Lscsm& phi, const CanonicalSet& finite_set);
// Exact phi(S) when a closed form exists.
std::optional<Extended> eval_exact(const Lscsm& phi, const CanonicalSet& s);

MassValue mass_at_infinity(const Lscsm& phi, const SetExpr& s, Natural horizon = kDefaultHorizon);
MassValue mass_at_infinity(const Lscsm& phi, const CanonicalSet& s, Natural horizon = kDefaultHorizon);
std::optional<Extended> exact_mass(const Lscsm& phi, const CanonicalSet& s);

// Membership in Exh(phi); throws Uncertifiable without a closed-form mass.
bool exh_member(const Lscsm& phi, const SetExpr& s);

struct AxiomViolation {
  std::string axiom;  // "monotone", "subadditive", "lsc"
  std::string a;
  std::string b;
  Natural horizon = 0;
  std::string detail;
};

struct AxiomReport {
  std::string phi;
  Natural samples = 0;
  Natural horizon = 0;
  std::uint64_t seed = 0;
  Natural checks = 0;
  std::vector<AxiomViolation> violations;

  bool ok() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

// Randomized check of monotonicity, subadditivity and horizon monotonicity on
// `samples` seeded pairs plus a fixed family of small finite sets.
AxiomReport check_submeasure_axioms(const Lscsm& phi, Natural samples, Natural horizon, std::uint64_t seed);

}  // namespace maldist
