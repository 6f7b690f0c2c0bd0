#include "maldist/sequence_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

using u128 = unsigned __int128;

constexpr Natural kMaxCubeDimension = 8;

Natural isqrt(Natural n) {
  Natural r = static_cast<Natural>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

u128 upow(u128 base, Natural e) {
  u128 out = 1;
  while (e-- > 0) out *= base;
  return out;
}

// ---- dyadic enumeration of the cube --------------------------------------------
//
// Level 0 lists the corners {0,1}^d; level L >= 1 lists, in lexicographic
// order, the points i / 2^L (i in [0, 2^L]^d) with at least one odd i.

struct Level {
  Natural level;
  u128 offset;  // index of the first point of this level
  u128 count;
};

u128 level_count(Natural d, Natural level) {
  if (level == 0) return upow(2, d);
  u128 g = (u128{1} << level) + 1;
  u128 e = (u128{1} << (level - 1)) + 1;
  return upow(g, d) - upow(e, d);
}

// Highest level whose counting stays within 128 bits.
Natural max_level(Natural d) { return std::min<Natural>(60, 120 / d); }

Level find_level(Natural d, Natural n) {
  u128 offset = 0;
  for (Natural level = 0;; ++level) {
    u128 c = level_count(d, level);
    if (n < offset + c) return {level, offset, c};
    offset += c;
  }
}

// Number of tuples for the remaining `rem` digits given whether an odd digit
// has already been seen.
u128 completions(bool odd_seen, Natural level, Natural rem) {
  u128 g = (u128{1} << level) + 1;
  if (odd_seen) return upow(g, rem);
  u128 e = (u128{1} << (level - 1)) + 1;
  return upow(g, rem) - upow(e, rem);
}

// Tuples whose current digit is < v, digits after it free (subject to the odd rule).
u128 cumulative(bool odd_seen, Natural level, Natural rem, Natural v) {
  u128 odd_below = v / 2;
  u128 even_below = v - v / 2;
  u128 free = completions(true, level, rem);
  if (odd_seen) return u128{v} * free;
  return odd_below * free + even_below * completions(false, level, rem);
}

std::vector<Natural> unrank_level(Natural d, Natural level, u128 rank) {
  std::vector<Natural> digits(d);
  if (level == 0) {
    for (Natural q = 0; q < d; ++q) digits[q] = static_cast<Natural>((rank >> (d - 1 - q)) & 1);
    return digits;
  }
  const Natural g = (Natural{1} << level) + 1;
  bool odd_seen = false;
  for (Natural q = 0; q < d; ++q) {
    const Natural rem = d - 1 - q;
    // Largest v with cumulative(v) <= rank.
    Natural lo = 0, hi = g - 1;
    while (lo < hi) {
      Natural mid = lo + (hi - lo + 1) / 2;
      if (cumulative(odd_seen, level, rem, mid) <= rank) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    rank -= cumulative(odd_seen, level, rem, lo);
    digits[q] = lo;
    odd_seen = odd_seen || (lo % 2 == 1);
  }
  return digits;
}

u128 rank_level(Natural level, const std::vector<Natural>& digits) {
  const Natural d = digits.size();
  if (level == 0) {
    u128 r = 0;
    for (Natural q = 0; q < d; ++q) r = (r << 1) | digits[q];
    return r;
  }
  u128 rank = 0;
  bool odd_seen = false;
  for (Natural q = 0; q < d; ++q) {
    rank += cumulative(odd_seen, level, d - 1 - q, digits[q]);
    odd_seen = odd_seen || (digits[q] % 2 == 1);
  }
  return rank;
}

// Least upper bound D >= sqrt(x) of the form m / (den * 2^k).
Rational sqrt_upper(const Rational& x, unsigned k) {
  Integer num = x.get_num() * x.get_den();
  num <<= 2 * k;
  Integer root;
  mpz_sqrt(root.get_mpz_t(), num.get_mpz_t());
  if (root * root < num) root += 1;
  Integer den = x.get_den();
  den <<= k;
  Rational out(root, den);
  out.canonicalize();
  return out;
}

Rational power_of_half(Natural t) { return pow(Rational(1, 2), t); }

}  // namespace

// ---- Space ---------------------------------------------------------------------

Space::Space(Kind kind, Natural size) : kind_(kind), size_(size) {}

Space Space::unit_cube(Natural dimension) {
  if (dimension == 0 || dimension > kMaxCubeDimension) throw InvalidArgument("cube dimension must lie in [1, 8]");
  return Space(Kind::UnitCube, dimension);
}

Space Space::discrete(Natural points) {
  if (points < 2) throw InvalidArgument("a discrete space needs at least 2 points");
  return Space(Kind::DiscreteFinite, points);
}

Space Space::from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.size() != 2) throw ParseError("expected (cube d) or (discrete m), got " + e.to_string());
  try {
    if (e.head() == "cube") return unit_cube(e[1].as_natural());
    if (e.head() == "discrete") return discrete(e[1].as_natural());
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  throw ParseError("unknown space " + e.to_string());
}

Space Space::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string Space::to_string() const {
  return std::string(kind_ == Kind::UnitCube ? "(cube " : "(discrete ") + std::to_string(size_) + ")";
}

void Space::validate(const Point& p) const {
  if (p.size() != dimension()) throw InvalidArgument("point " + point_to_string(p) + " has the wrong dimension");
  for (const Rational& c : p) {
    if (kind_ == Kind::UnitCube) {
      if (c < 0 || c > 1) throw InvalidArgument("point " + point_to_string(p) + " lies outside the cube");
    } else if (c < 0 || c >= Rational(to_integer(size_)) || c.get_den() != 1) {
      throw InvalidArgument("point " + point_to_string(p) + " is not in the discrete space");
    }
  }
}

void Space::validate(const Ball& b) const {
  validate(b.center);
  if (b.radius <= 0) throw InvalidArgument("ball radius must be positive");
}

Rational Space::distance_squared(const Point& a, const Point& b) const {
  if (kind_ == Kind::DiscreteFinite) return Rational(a == b ? 0 : 1);
  Rational sum(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

bool Space::distance_less(const Point& a, const Point& b, const Rational& r) const {
  if (r <= 0) return false;
  if (kind_ == Kind::DiscreteFinite) return Rational(a == b ? 0 : 1) < r;
  return distance_squared(a, b) < r * r;
}

bool Space::ball_subsumes(const Ball& outer, const Ball& inner) const {
  if (kind_ == Kind::DiscreteFinite) {
    if (outer.radius > 1) return true;
    return inner.radius <= 1 && inner.center == outer.center;
  }
  if (inner.radius > outer.radius) return false;
  Rational slack = outer.radius - inner.radius;
  return distance_squared(outer.center, inner.center) <= slack * slack;
}

bool Space::balls_meet(const Ball& a, const Ball& b) const {
  if (kind_ == Kind::DiscreteFinite) return a.radius > 1 || b.radius > 1 || a.center == b.center;
  // The segment between the centers lies in the cube.
  Rational sum = a.radius + b.radius;
  return distance_squared(a.center, b.center) < sum * sum;
}

std::optional<Ball> Space::intersection_subball(const Ball& a, const Ball& b) const {
  if (!balls_meet(a, b)) return std::nullopt;
  if (ball_subsumes(b, a)) return a;
  if (ball_subsumes(a, b)) return b;
  // Cube, distinct centers, neither ball inside the other: a ball centered on
  // the segment, sized against a rational upper bound D of the distance.
  const Rational d2 = distance_squared(a.center, b.center);
  for (unsigned k = 0; k <= 512; k += 8) {
    Rational dist = sqrt_upper(d2, k);
    if (dist >= a.radius + b.radius) continue;
    Rational lambda = (a.radius - b.radius + dist) / (2 * dist);
    lambda = std::clamp(lambda, Rational(0), Rational(1));
    Rational rho_a = a.radius - lambda * dist;
    Rational rho_b = b.radius - (1 - lambda) * dist;
    Rational rho = std::min(rho_a, rho_b);
    if (rho <= 0) continue;
    Ball out{a.center, rho};
    for (std::size_t i = 0; i < out.center.size(); ++i) out.center[i] += lambda * (b.center[i] - a.center[i]);
    return out;
  }
  throw InvalidArgument("ball intersection is too thin to resolve");
}

Point Space::dense_point(Natural n) const {
  if (kind_ == Kind::DiscreteFinite) return {Rational(to_integer(n % size_))};
  Level lv = find_level(size_, n);
  std::vector<Natural> digits = unrank_level(size_, lv.level, static_cast<u128>(n) - lv.offset);
  Point p;
  for (Natural v : digits) {
    Rational c(to_integer(v), to_integer(Natural{1} << lv.level));
    c.canonicalize();
    p.push_back(c);
  }
  return p;
}

std::optional<Natural> Space::dense_index_in(const Ball& b) const {
  if (kind_ == Kind::DiscreteFinite) {
    return b.radius > 1 ? Natural{0} : static_cast<Natural>(b.center[0].get_num().get_ui());
  }
  const Natural d = size_;
  for (Natural level = 0; level <= max_level(d); ++level) {
    // Nearest grid point of this level to the center.
    const Natural scale = Natural{1} << level;
    std::vector<Natural> digits(d);
    Point p;
    for (Natural q = 0; q < d; ++q) {
      Rational scaled = b.center[q] * Rational(to_integer(scale)) + Rational(1, 2);
      Integer f;
      mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      digits[q] = std::min<Natural>(f.get_ui(), scale);
      Rational c(to_integer(digits[q]), to_integer(scale));
      c.canonicalize();
      p.push_back(c);
    }
    if (!in_ball(p, b)) continue;
    // Reduce to the level at which the point first appears.
    Natural first = level;
    while (first > 0 && std::all_of(digits.begin(), digits.end(), [](Natural v) { return v % 2 == 0; })) {
      for (auto& v : digits) v /= 2;
      --first;
    }
    u128 offset = 0;
    for (Natural l = 0; l < first; ++l) offset += level_count(d, l);
    u128 index = offset + rank_level(first, digits);
    if (index >= u128{kMaxAtomValue}) return std::nullopt;
    return static_cast<Natural>(index);
  }
  return std::nullopt;
}

Point Space::farthest_point(const Point& eta) const {
  if (kind_ == Kind::DiscreteFinite) {
    return {Rational(to_integer((eta[0].get_num().get_ui() + 1) % size_))};
  }
  Point p;
  for (const Rational& c : eta) p.push_back(Rational(c >= Rational(1, 2) ? 0 : 1));
  return p;
}

std::vector<Ball> Space::grid(Natural resolution) const {
  std::vector<Ball> out;
  if (kind_ == Kind::DiscreteFinite) {
    for (Natural i = 0; i < size_; ++i) out.push_back({{Rational(to_integer(i))}, Rational(1, 2)});
    return out;
  }
  if (resolution > 20) throw InvalidArgument("grid resolution must be <= 20");
  const Natural side = (Natural{1} << resolution) + 1;
  if (upow(side, size_) > u128{1} << 24) throw InvalidArgument("grid too large");
  const Rational step = power_of_half(resolution);
  const Rational radius = Rational(3, 2) * step;
  std::vector<Natural> digits(size_, 0);
  while (true) {
    Point c;
    for (Natural v : digits) c.push_back(Rational(to_integer(v)) * step);
    out.push_back({c, radius});
    Natural q = size_;
    while (q > 0 && digits[q - 1] + 1 == side) digits[--q] = 0;
    if (q == 0) break;
    ++digits[q - 1];
  }
  return out;
}

std::string Space::point_to_string(const Point& p) const {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? " " : "") + maldist::to_string(p[i]);
  return out + ")";
}

Point Space::point_from_sexpr(const SExpr& e) const {
  Point p;
  if (e.is_atom()) {
    p.push_back(e.as_rational());
  } else {
    for (const SExpr& c : e.items()) p.push_back(c.as_rational());
  }
  try {
    validate(p);
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  return p;
}

Point Space::parse_point(std::string_view text) const { return point_from_sexpr(parse_sexpr(text)); }

nlohmann::json Space::point_to_json(const Point& p) const {
  if (kind_ == Kind::DiscreteFinite) return p[0].get_num().get_ui();
  nlohmann::json j = nlohmann::json::array();
  for (const Rational& c : p) j.push_back(maldist::to_string(c));
  return j;
}

nlohmann::json ball_to_json(const Space& space, const Ball& b) {
  return {{"center", space.point_to_json(b.center)}, {"radius", to_string(b.radius)}};
}

// ---- Cylinder ------------------------------------------------------------------

namespace {
const std::optional<Ball> kWhole;
}

Cylinder Cylinder::from_sexpr(const Space& space, const SExpr& e) {
  if (!e.is_list() || e.size() == 0 || e.head() != "cylinder") {
    throw ParseError("expected (cylinder (ball i (c...) r) ...), got " + e.to_string());
  }
  Cylinder out;
  for (std::size_t k = 1; k < e.size(); ++k) {
    const SExpr& b = e[k];
    if (!b.is_list() || b.size() != 4 || b.head() != "ball") {
      throw ParseError("expected (ball i (c...) r), got " + b.to_string());
    }
    Natural i = b[1].as_natural();
    if (i >= (Natural{1} << 24)) throw ParseError("coordinate index too large");
    Ball ball{space.point_from_sexpr(b[2]), b[3].as_rational()};
    if (ball.radius <= 0) throw ParseError("ball radius must be positive");
    if (out.at(i)) throw ParseError("coordinate " + std::to_string(i) + " constrained twice");
    out.set(i, std::move(ball));
  }
  return out;
}

Cylinder Cylinder::parse(const Space& space, std::string_view text) { return from_sexpr(space, parse_sexpr(text)); }

std::string Cylinder::to_string(const Space& space) const {
  std::string out = "(cylinder";
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (!constraints_[i]) continue;
    out += " (ball " + std::to_string(i) + " " + space.point_to_string(constraints_[i]->center) + " " +
           maldist::to_string(constraints_[i]->radius) + ")";
  }
  return out + ")";
}

const std::optional<Ball>& Cylinder::at(Natural i) const {
  if (i >= constraints_.size()) return kWhole;
  return constraints_[i];
}

Cylinder Cylinder::with(Natural i, Ball b) const {
  Cylinder out = *this;
  out.set(i, std::move(b));
  return out;
}

void Cylinder::set(Natural i, Ball b) {
  if (constraints_.size() <= i) constraints_.resize(i + 1);
  constraints_[i] = std::move(b);
}

Cylinder Cylinder::without(Natural i) const {
  Cylinder out = *this;
  if (i < out.constraints_.size()) out.constraints_[i].reset();
  while (!out.constraints_.empty() && !out.constraints_.back()) out.constraints_.pop_back();
  return out;
}

std::vector<Natural> Cylinder::constrained() const {
  std::vector<Natural> out;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (constraints_[i]) out.push_back(i);
  }
  return out;
}

bool Cylinder::subset_of(const Space& space, const Cylinder& outer) const {
  for (std::size_t i = 0; i < outer.constraints_.size(); ++i) {
    if (!outer.constraints_[i]) continue;
    const auto& mine = at(i);
    if (!mine || !space.ball_subsumes(*outer.constraints_[i], *mine)) return false;
  }
  return true;
}

bool Cylinder::contains(const Space& space, const std::vector<Point>& prefix) const {
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (!constraints_[i]) continue;
    if (i >= prefix.size() || !space.in_ball(prefix[i], *constraints_[i])) return false;
  }
  return true;
}

std::vector<Point> Cylinder::materialize(const Space&, Natural length, const Point& fill) const {
  std::vector<Point> out(length, fill);
  for (std::size_t i = 0; i < constraints_.size() && i < length; ++i) {
    if (constraints_[i]) out[i] = constraints_[i]->center;
  }
  return out;
}

// ---- schedule and sequences ----------------------------------------------------

SchedulePair schedule(Natural k) {
  Natural w = (isqrt(8 * k + 1) - 1) / 2;
  Natural t = k - w * (w + 1) / 2;
  return {w - t, t};
}

PointSeq::PointSeq(Space space, Kind kind) : space_(std::move(space)), kind_(kind) {}

PointSeq PointSeq::generated(const Space& space, IntervalWitness w) {
  PointSeq s(space, Kind::Generated);
  s.witness_ = std::move(w);
  return s;
}

PointSeq PointSeq::constant(const Space& space, Point p) {
  space.validate(p);
  PointSeq s(space, Kind::Constant);
  s.points_.push_back(std::move(p));
  return s;
}

PointSeq PointSeq::enumeration(const Space& space) { return PointSeq(space, Kind::Enumeration); }

PointSeq PointSeq::explicit_prefix(const Space& space, std::vector<Point> prefix) {
  for (const Point& p : prefix) space.validate(p);
  PointSeq s(space, Kind::Explicit);
  s.points_ = std::move(prefix);
  return s;
}

PointSeq PointSeq::from_sexpr(const Space& space, const SExpr& e) {
  if (!e.is_list() || e.size() < 2 || e.head() != "seq") throw ParseError("expected (seq ...), got " + e.to_string());
  const std::string kind = e[1].text();
  if (kind == "generated" && e.size() == 3) return generated(space, IntervalWitness::from_sexpr(e[2]));
  if (kind == "constant" && e.size() == 3) return constant(space, space.point_from_sexpr(e[2]));
  if (kind == "enumeration" && e.size() == 2) return enumeration(space);
  if (kind == "explicit") {
    std::vector<Point> pts;
    for (std::size_t i = 2; i < e.size(); ++i) pts.push_back(space.point_from_sexpr(e[i]));
    return explicit_prefix(space, std::move(pts));
  }
  throw ParseError("unknown sequence form " + e.to_string());
}

PointSeq PointSeq::parse(const Space& space, std::string_view text) { return from_sexpr(space, parse_sexpr(text)); }

std::string PointSeq::to_string() const {
  switch (kind_) {
    case Kind::Generated:
      return "(seq generated " + witness_->to_string() + ")";
    case Kind::Constant:
      return "(seq constant " + space_.point_to_string(points_[0]) + ")";
    case Kind::Enumeration:
      return "(seq enumeration)";
    case Kind::Explicit: {
      std::string out = "(seq explicit";
      for (const Point& p : points_) out += " " + space_.point_to_string(p);
      return out + ")";
    }
  }
  return "";
}

Point PointSeq::at(Natural n) const {
  switch (kind_) {
    case Kind::Generated: {
      auto k = witness_->index_containing(n);
      return space_.dense_point(k ? schedule(*k).point : 0);
    }
    case Kind::Constant:
      return points_[0];
    case Kind::Enumeration:
      return space_.dense_point(n);
    case Kind::Explicit:
      return n < points_.size() ? points_[n] : space_.dense_point(0);
  }
  return {};
}

std::vector<Point> PointSeq::prefix(Natural length) const {
  std::vector<Point> out;
  out.reserve(length);
  for (Natural n = 0; n < length; ++n) out.push_back(at(n));
  return out;
}

std::optional<CanonicalSet> PointSeq::exact_hitting_set(const Ball& b) const {
  switch (kind_) {
    case Kind::Constant:
      return CanonicalSet(0, 1, {space_.in_ball(points_[0], b)}, {});
    case Kind::Enumeration: {
      if (space_.kind() != Space::Kind::DiscreteFinite) return std::nullopt;
      const Natural m = space_.point_count();
      std::vector<bool> mask(m);
      for (Natural i = 0; i < m; ++i) mask[i] = space_.in_ball(space_.dense_point(i), b);
      return CanonicalSet(0, m, std::move(mask), {});
    }
    case Kind::Explicit: {
      std::vector<Run> runs;
      for (Natural n = 0; n < points_.size(); ++n) {
        if (space_.in_ball(points_[n], b)) runs.push_back({n, n});
      }
      return CanonicalSet(points_.size(), 1, {space_.in_ball(space_.dense_point(0), b)}, std::move(runs));
    }
    case Kind::Generated:
      return std::nullopt;
  }
  return std::nullopt;
}

void PointSeq::write_jsonl(std::ostream& out, Natural length) const {
  for (Natural n = 0; n < length; ++n) {
    nlohmann::json j{{"index", n}, {"point", space_.point_to_json(at(n))}};
    out << j.dump() << "\n";
  }
}

CanonicalSet hitting_canonical(const PointSeq& x, const Ball& b, Natural horizon) {
  const Space& space = x.space();
  std::vector<Run> runs;
  if (x.kind() == PointSeq::Kind::Generated) {
    // Constant on each witness interval and equal to a_0 in between.
    const IntervalWitness& w = *x.witness();
    const bool base = space.in_ball(space.dense_point(0), b);
    Natural next = 0;  // first position not yet classified
    for (Natural k = 0; next <= horizon; ++k) {
      Interval iv = w.at(k);
      if (iv.lo > next && base) runs.push_back({next, std::min(iv.lo - 1, horizon)});
      if (iv.lo > horizon) break;
      if (space.in_ball(space.dense_point(schedule(k).point), b)) runs.push_back({iv.lo, std::min(iv.hi, horizon)});
      next = iv.hi + 1;
    }
  } else if (auto exact = x.exact_hitting_set(b)) {
    runs = exact->runs_in(0, horizon);
  } else {
    for (Natural n = 0; n <= horizon; ++n) {
      if (space.in_ball(x.at(n), b)) runs.push_back({n, n});
    }
  }
  return CanonicalSet(horizon + 1, 1, {false}, std::move(runs));
}

SetExpr hitting_set(const PointSeq& x, const Ball& b, Natural horizon) {
  if (b.radius <= 0) throw InvalidArgument("ball radius must be positive");
  return SetExpr::from_canonical(hitting_canonical(x, b, horizon));
}

// ---- reports -------------------------------------------------------------------

BallReport ball_report(const PointSeq& x, const IntervalWitness& w, const Ball& b, Natural horizon) {
  const Space& space = x.space();
  BallReport r;
  r.ball = b;
  CanonicalSet hits = hitting_canonical(x, b, horizon);
  r.hits = hits.count_upto(horizon);
  r.prefix_density = Rational(to_integer(r.hits), to_integer(horizon + 1));
  r.prefix_density.canonicalize();

  const bool scheduled = x.kind() == PointSeq::Kind::Generated && x.witness()->to_string() == w.to_string();
  std::vector<Interval> intervals = w.up_to(horizon);
  r.intervals_examined = intervals.size();
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const bool inside = hits.count_in(intervals[k].lo, intervals[k].hi) == intervals[k].length();
    if (inside) ++r.contained;
    if (scheduled && space.in_ball(space.dense_point(schedule(k).point), b)) {
      ++r.promised;
      if (inside) ++r.promised_contained;
    }
  }

  if (auto exact = x.exact_hitting_set(b)) {
    InfinitudeCertificate cert = certify_infinitude(w, *exact);
    r.recurrence_certified = cert.certified && cert.contained_infinitely_often;
  } else if (scheduled) {
    // Some dense point a_j lies in the ball; every pair (j, t) is scheduled,
    // so infinitely many intervals are filled with a_j.
    r.recurrence_certified = space.dense_index_in(b).has_value();
  }
  return r;
}

namespace {

nlohmann::json ball_report_json(const Space& space, const BallReport& r) {
  nlohmann::json j = ball_to_json(space, r.ball);
  j["hits"] = r.hits;
  j["prefix_density"] = to_string(r.prefix_density);
  j["intervals_examined"] = r.intervals_examined;
  j["contained"] = r.contained;
  j["promised"] = r.promised;
  j["promised_contained"] = r.promised_contained;
  j["recurrence_certified"] = r.recurrence_certified;
  j["verdict"] = r.positive() ? "positive" : "not-certified";
  return j;
}

}  // namespace

bool MaldistributionReport::all_positive() const {
  return std::all_of(balls.begin(), balls.end(), [](const BallReport& b) { return b.positive(); });
}

nlohmann::json MaldistributionReport::to_json(const Space& sp) const {
  nlohmann::json j;
  j["space"] = space;
  j["sequence"] = sequence;
  j["witness"] = witness;
  j["grid_resolution"] = grid_resolution;
  j["horizon"] = horizon;
  j["all_positive"] = all_positive();
  auto& bs = j["balls"] = nlohmann::json::array();
  for (const auto& b : balls) bs.push_back(ball_report_json(sp, b));
  return j;
}

MaldistributionReport maldistribution_check(const PointSeq& x, const IntervalWitness& w, Natural grid_resolution,
                                            Natural horizon) {
  if (grid_resolution == 0) throw InvalidArgument("grid resolution must be >= 1");
  MaldistributionReport out;
  out.space = x.space().to_string();
  out.sequence = x.to_string();
  out.witness = w.to_string();
  out.grid_resolution = grid_resolution;
  out.horizon = horizon;
  for (const Ball& b : x.space().grid(grid_resolution)) out.balls.push_back(ball_report(x, w, b, horizon));
  return out;
}

bool ClusterReport::positive_evidence() const {
  return !radii.empty() &&
         std::all_of(radii.begin(), radii.end(), [](const BallReport& b) { return b.recurrence_certified; });
}

nlohmann::json ClusterReport::to_json(const Space& sp) const {
  nlohmann::json j;
  j["space"] = space;
  j["sequence"] = sequence;
  j["witness"] = witness;
  j["eta"] = sp.point_to_json(eta);
  j["horizon"] = horizon;
  j["positive_evidence"] = positive_evidence();
  auto& rs = j["radii"] = nlohmann::json::array();
  for (const auto& r : radii) rs.push_back(ball_report_json(sp, r));
  return j;
}

ClusterReport cluster_point_report(const PointSeq& x, const Point& eta, const IntervalWitness& w, Natural horizon) {
  x.space().validate(eta);
  ClusterReport out;
  out.space = x.space().to_string();
  out.sequence = x.to_string();
  out.witness = w.to_string();
  out.eta = eta;
  out.horizon = horizon;
  const Natural top = horizon < 2 ? 0 : static_cast<Natural>(std::bit_width(horizon) - 1);
  for (Natural t = 1; t <= top; ++t) out.radii.push_back(ball_report(x, w, Ball{eta, power_of_half(t)}, horizon));
  return out;
}

}  // namespace maldist
