#pragma once

// Eventually periodic subsets of the naturals.
//
// A SetExpr is an immutable expression tree over a few atoms (finite lists,
// intervals, arithmetic progressions, tails) closed under boolean operations
// and finite edits. Every expression normalizes to a CanonicalSet: a
// threshold t, a period p and a residue mask mod p describing membership for
// n >= t, plus the exact member runs below t.
//
// Textual grammar (round-trips through to_string/parse):
//
//   (empty) (full)            the empty set, all of the naturals
//   (fin n...)                explicit finite set
//   (iv a b)                  [a, b], a <= b
//   (ap a d)                  {a, a+d, a+2d, ...}, d >= 1
//   (tail a)                  [a, infinity)
//   (union s...) (inter s...) n-ary union / intersection
//   (not s)                   complement
//   (edit s n...)             symmetric difference with {n...}
//   (periodic t p (r...) ((lo hi)...))   a CanonicalSet verbatim

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "maldist/rational.hpp"
#include "maldist/sexpr.hpp"

namespace maldist {

// Atom parameters and thresholds are kept below this bound so that all
// counting fits in 64 bits.
inline constexpr Natural kMaxAtomValue = Natural{1} << 62;
inline constexpr Natural kMaxPeriod = Natural{1} << 22;

struct Run {
  Natural lo = 0;
  Natural hi = 0;  // inclusive
  friend bool operator==(const Run&, const Run&) = default;
};

class CanonicalSet {
 public:
  CanonicalSet();  // the empty set
  // Runs may be unsorted or touching; they are merged. Every run must lie below the threshold.
  CanonicalSet(Natural threshold, Natural period, std::vector<bool> residues, std::vector<Run> exceptional);

  Natural threshold() const { return threshold_; }
  Natural period() const { return period_; }
  const std::vector<bool>& residue_mask() const { return residues_; }
  std::vector<Natural> residues() const;
  Natural residue_count() const { return residue_count_; }
  // Members below the threshold, as sorted disjoint non-adjacent runs.
  const std::vector<Run>& exceptional() const { return exceptional_; }
  std::vector<Natural> exceptional_members() const;

  bool contains(Natural n) const;
  bool is_finite() const { return residue_count_ == 0; }
  bool is_full_eventually() const { return residue_count_ == period_; }
  // |S ∩ [0, n]|
  Natural count_upto(Natural n) const;
  // |S ∩ [lo, hi]|, zero when lo > hi.
  Natural count_in(Natural lo, Natural hi) const;
  std::optional<Natural> next_member(Natural from) const;
  std::optional<Natural> max_member() const;  // nullopt for empty or infinite sets
  Rational density() const;
  // Member runs intersected with [lo, hi].
  std::vector<Run> runs_in(Natural lo, Natural hi) const;
  std::vector<Natural> members_upto(Natural n) const;

  // Minimal period and threshold; two sets are equal iff their reduced forms are.
  CanonicalSet reduced() const;
  CanonicalSet complement() const;

  friend bool operator==(const CanonicalSet& a, const CanonicalSet& b) {
    return a.threshold_ == b.threshold_ && a.period_ == b.period_ && a.residues_ == b.residues_ &&
           a.exceptional_ == b.exceptional_;
  }

 private:
  bool periodic_member(Natural n) const { return residues_[n % period_]; }
  Natural periodic_count_upto(Natural n) const;  // #{m <= n : residue rule holds}

  Natural threshold_ = 0;
  Natural period_ = 1;
  std::vector<bool> residues_;
  Natural residue_count_ = 0;
  std::vector<Run> exceptional_;
  std::vector<Natural> run_prefix_;      // run_prefix_[i] = members in runs [0, i)
  std::vector<Natural> residue_prefix_;  // residue_prefix_[r] = set residues below r
  std::vector<Natural> next_offset_;     // distance to next set residue, period_ if none
  std::vector<Natural> run_length_;      // consecutive set residues starting at r (capped at period_)
};

bool equivalent(const CanonicalSet& a, const CanonicalSet& b);
CanonicalSet set_union(const CanonicalSet& a, const CanonicalSet& b);
CanonicalSet set_intersection(const CanonicalSet& a, const CanonicalSet& b);
CanonicalSet set_xor(const CanonicalSet& a, const CanonicalSet& b);
CanonicalSet set_difference(const CanonicalSet& a, const CanonicalSet& b);

class SetExpr {
 public:
  enum class Kind { Empty, Full, Finite, Interval, Progression, Tail, Union, Intersection, Complement, Edit, Periodic };

  SetExpr();  // (empty)
  static SetExpr empty();
  static SetExpr full();
  static SetExpr finite(std::vector<Natural> members);
  static SetExpr interval(Natural a, Natural b);
  static SetExpr progression(Natural offset, Natural period);
  static SetExpr tail(Natural a);
  static SetExpr unite(std::vector<SetExpr> parts);
  static SetExpr intersect(std::vector<SetExpr> parts);
  static SetExpr complement(SetExpr s);
  static SetExpr edit(SetExpr s, std::vector<Natural> toggled);
  static SetExpr from_canonical(CanonicalSet c);

  static SetExpr parse(std::string_view text);
  static SetExpr from_sexpr(const SExpr& e);

  Kind kind() const;
  // Evaluated directly on the tree, independent of normalization.
  bool contains(Natural n) const;
  // Cached; safe to call concurrently.
  const CanonicalSet& canonical() const;
  std::string to_string() const;
  SExpr to_sexpr() const;

  friend bool operator==(const SetExpr& a, const SetExpr& b) { return a.to_string() == b.to_string(); }

  struct Node;  // implementation detail

 private:
  explicit SetExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

bool member(const SetExpr& s, Natural n);
CanonicalSet normalize(const SetExpr& s);
Natural prefix_count(const SetExpr& s, Natural n);
Rational exact_density(const SetExpr& s);
// Throws InvalidArgument when a > b.
bool intersects_interval(const SetExpr& s, Natural a, Natural b);

struct RandomSetOptions {
  int depth = 6;
  Natural max_period = 12;
  Natural max_value = 200;
};

// Seeded random expression tree of bounded depth.
SetExpr random_set_expr(std::mt19937_64& rng, const RandomSetOptions& options = {});

}  // namespace maldist
