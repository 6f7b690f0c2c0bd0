#pragma once

// Desk-scale metric spaces X, cylinders of X^omega, point sequences and the
// maldistribution reports.
//
// Spaces:   (cube d)      [0,1]^d with the Euclidean metric
//           (discrete m)  m points {0, ..., m-1} with the 0/1 metric
// Points:   (c1 ... cd) rationals for the cube; a single index for discrete spaces
// Cylinder: (cylinder (ball i (c...) r) ...)   constraints on coordinates i; others free
// Sequence: (seq generated W) | (seq constant (c...)) | (seq enumeration) | (seq explicit (c...)...)
//
// Ball membership is strict, d(x, c) < r, throughout.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "maldist/omega_set.hpp"
#include "maldist/rational.hpp"
#include "maldist/sexpr.hpp"
#include "maldist/witness.hpp"

namespace maldist {

using Point = std::vector<Rational>;

struct Ball {
  Point center;
  Rational radius;
  friend bool operator==(const Ball&, const Ball&) = default;
};

class Space {
 public:
  enum class Kind { UnitCube, DiscreteFinite };

  static Space unit_cube(Natural dimension);
  static Space discrete(Natural points);
  static Space parse(std::string_view text);
  static Space from_sexpr(const SExpr& e);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  Natural dimension() const { return kind_ == Kind::UnitCube ? size_ : 1; }
  Natural point_count() const { return size_; }  // discrete only

  // Throws InvalidArgument for points outside the space or nonpositive radii.
  void validate(const Point& p) const;
  void validate(const Ball& b) const;

  // d(a, b)^2 for the cube, d(a, b) for discrete spaces.
  Rational distance_squared(const Point& a, const Point& b) const;
  bool distance_less(const Point& a, const Point& b, const Rational& r) const;
  bool in_ball(const Point& x, const Ball& b) const { return distance_less(x, b.center, b.radius); }
  // Inner ⊆ outer. Cube: the sufficient test d(c, c') + r <= r'. Discrete: exact.
  bool ball_subsumes(const Ball& outer, const Ball& inner) const;
  // Exact nonemptiness of the intersection.
  bool balls_meet(const Ball& a, const Ball& b) const;
  // A ball contained (by ball_subsumes) in both, when they meet.
  std::optional<Ball> intersection_subball(const Ball& a, const Ball& b) const;

  // a_0 = origin (cube) or point 0; every basic ball contains some a_n.
  Point dense_point(Natural n) const;
  // Index of a dyadic grid point inside the ball (coarsest level first).
  std::optional<Natural> dense_index_in(const Ball& b) const;
  Point farthest_point(const Point& eta) const;
  // Cube: centers i / 2^g, radius 3/2 * 2^-g. Discrete: every point, radius 1/2.
  std::vector<Ball> grid(Natural resolution) const;

  std::string point_to_string(const Point& p) const;
  Point point_from_sexpr(const SExpr& e) const;
  Point parse_point(std::string_view text) const;
  nlohmann::json point_to_json(const Point& p) const;

  friend bool operator==(const Space&, const Space&) = default;

 private:
  Space(Kind kind, Natural size);
  Kind kind_;
  Natural size_;
};

// Basic open subset of X^omega: finitely many coordinates constrained to balls.
class Cylinder {
 public:
  Cylinder() = default;  // X^omega
  static Cylinder parse(const Space& space, std::string_view text);
  static Cylinder from_sexpr(const Space& space, const SExpr& e);
  std::string to_string(const Space& space) const;

  // Largest constrained coordinate, -1 for X^omega.
  std::int64_t support() const { return static_cast<std::int64_t>(constraints_.size()) - 1; }
  const std::optional<Ball>& at(Natural i) const;
  Cylinder with(Natural i, Ball b) const;
  void set(Natural i, Ball b);  // in place
  Cylinder without(Natural i) const;
  std::vector<Natural> constrained() const;

  // Coordinate-wise subsumption against every constraint of `outer`.
  bool subset_of(const Space& space, const Cylinder& outer) const;
  // prefix must cover coordinates 0..support().
  bool contains(const Space& space, const std::vector<Point>& prefix) const;
  // Ball centers on constrained coordinates, `fill` elsewhere, up to `length`.
  std::vector<Point> materialize(const Space& space, Natural length, const Point& fill) const;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;

 private:
  std::vector<std::optional<Ball>> constraints_;  // last entry, if any, is a ball
};

// Cantor unpairing k -> (j, t): interval I_k goes to dense point a_j at
// precision 2^-t. Every pair occurs exactly once.
struct SchedulePair {
  Natural point = 0;      // sigma(k)
  Natural precision = 0;  // tau(k)
};
SchedulePair schedule(Natural k);

class PointSeq {
 public:
  enum class Kind { Generated, Constant, Enumeration, Explicit };

  // x_i = a_sigma(k) for i in I_k, a_0 off the witness intervals.
  static PointSeq generated(const Space& space, IntervalWitness w);
  static PointSeq constant(const Space& space, Point p);
  static PointSeq enumeration(const Space& space);  // x_n = a_n
  static PointSeq explicit_prefix(const Space& space, std::vector<Point> prefix);  // a_0 afterwards
  static PointSeq parse(const Space& space, std::string_view text);
  static PointSeq from_sexpr(const Space& space, const SExpr& e);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  const Space& space() const { return space_; }
  const std::optional<IntervalWitness>& witness() const { return witness_; }
  Point at(Natural n) const;
  std::vector<Point> prefix(Natural length) const;
  // Full hitting set {n : x_n in b}, when it has a closed eventually periodic form.
  std::optional<CanonicalSet> exact_hitting_set(const Ball& b) const;
  // One JSON record per line: {"index": n, "point": [...]}.
  void write_jsonl(std::ostream& out, Natural length) const;

 private:
  PointSeq(Space space, Kind kind);
  Space space_;
  Kind kind_;
  std::optional<IntervalWitness> witness_;
  std::vector<Point> points_;  // constant: one point; explicit: the prefix
};

// {n <= horizon : d(x_n, center) < radius}.
CanonicalSet hitting_canonical(const PointSeq& x, const Ball& b, Natural horizon);
SetExpr hitting_set(const PointSeq& x, const Ball& b, Natural horizon);

struct BallReport {
  Ball ball;
  Natural hits = 0;
  Rational prefix_density;           // hits / (horizon + 1)
  Natural intervals_examined = 0;    // I_k with max I_k <= horizon
  Natural contained = 0;             // I_k ⊆ hitting set
  Natural promised = 0;              // scheduled I_k whose dense point lies in the ball
  Natural promised_contained = 0;
  bool recurrence_certified = false;  // infinitely many contained I_k, certified
  bool positive() const { return recurrence_certified && promised_contained == promised; }
};

struct MaldistributionReport {
  std::string space;
  std::string sequence;
  std::string witness;
  Natural grid_resolution = 0;
  Natural horizon = 0;
  std::vector<BallReport> balls;

  bool all_positive() const;
  nlohmann::json to_json(const Space& space) const;
};

BallReport ball_report(const PointSeq& x, const IntervalWitness& w, const Ball& b, Natural horizon);
MaldistributionReport maldistribution_check(const PointSeq& x, const IntervalWitness& w, Natural grid_resolution,
                                            Natural horizon);

struct ClusterReport {
  std::string space;
  std::string sequence;
  std::string witness;
  Point eta;
  Natural horizon = 0;
  std::vector<BallReport> radii;  // B(eta, 2^-t), t = 1..floor(log2 horizon)

  bool positive_evidence() const;  // every radius certified recurrent
  nlohmann::json to_json(const Space& space) const;
};

ClusterReport cluster_point_report(const PointSeq& x, const Point& eta, const IntervalWitness& w, Natural horizon);

nlohmann::json ball_to_json(const Space& space, const Ball& b);

}  // namespace maldist
