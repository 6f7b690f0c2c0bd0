#include "maldist/games.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

// Coordinates pinned in a single move are bounded to keep cylinders small.
constexpr Natural kMaxPinnedLength = Natural{1} << 22;

Rational power_of_half(Natural t) { return pow(Rational(1, 2), t); }

void validate_cylinder(const Space& space, const Cylinder& c) {
  for (Natural i : c.constrained()) space.validate(*c.at(i));
}

Cylinder pin_interval(const Cylinder& base, const Interval& iv, const Ball& ball) {
  if (iv.length() > kMaxPinnedLength) throw InvalidArgument("interval " + iv.to_string() + " is too long to pin");
  Cylinder out = base;
  for (Natural i = iv.lo;; ++i) {
    out.set(i, ball);
    if (i == iv.hi) break;
  }
  return out;
}

const Cylinder kWholeSpace;

Point random_cube_point(const Space& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<Natural> digit(0, 16);
  Point p;
  for (Natural q = 0; q < space.dimension(); ++q) p.push_back(Rational(to_integer(digit(rng)), 16));
  for (auto& c : p) c.canonicalize();
  return p;
}

}  // namespace

// ---- Banach-Mazur --------------------------------------------------------------

const Cylinder& BMState::last_v() const { return rounds.empty() ? kWholeSpace : rounds.back().v; }

namespace {

class PassAdversary : public BMAdversary {
 public:
  Cylinder move(const Space&, const Point&, const BMState& state) override { return state.last_v(); }
  std::string name() const override { return "(pass)"; }
};

class PinFarAdversary : public BMAdversary {
 public:
  Cylinder move(const Space& space, const Point& eta, const BMState& state) override {
    if (!state.rounds.empty()) return state.last_v();
    Rational r = space.kind() == Space::Kind::DiscreteFinite ? Rational(1, 2) : Rational(1, 8);
    Ball far{space.farthest_point(eta), r};
    Cylinder c;
    for (Natural i = 0; i < 10; ++i) c.set(i, far);
    return c;
  }
  std::string name() const override { return "(pin-far)"; }
};

class RandomAdversary : public BMAdversary {
 public:
  explicit RandomAdversary(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  Cylinder move(const Space& space, const Point&, const BMState& state) override {
    Cylinder c = state.last_v();
    std::uniform_int_distribution<int> count(1, 3);
    const int moves = count(rng_);
    for (int m = 0; m < moves; ++m) {
      std::uniform_int_distribution<Natural> coord(0, static_cast<Natural>(c.support() + 5));
      Natural i = coord(rng_);
      c.set(i, refine(space, c.at(i)));
    }
    return c;
  }
  std::string name() const override { return "(random " + std::to_string(seed_) + ")"; }

 private:
  Ball refine(const Space& space, const std::optional<Ball>& current) {
    if (space.kind() == Space::Kind::DiscreteFinite) {
      if (current && current->radius <= 1) return *current;
      std::uniform_int_distribution<Natural> pt(0, space.point_count() - 1);
      return Ball{{Rational(to_integer(pt(rng_)))}, Rational(1, 2)};
    }
    if (!current) {
      std::uniform_int_distribution<Natural> exp(0, 4);
      return Ball{random_cube_point(space, rng_), power_of_half(exp(rng_))};
    }
    // Move the center toward a random target by at most r/2 (measured in the
    // L1 norm, which dominates the Euclidean one), then halve the radius.
    Point target = random_cube_point(space, rng_);
    Rational l1(0);
    for (std::size_t q = 0; q < target.size(); ++q) l1 += abs(target[q] - current->center[q]);
    Rational half = current->radius / 2;
    Rational lambda = l1 == 0 ? Rational(0) : std::min(Rational(1), Rational(half / l1));
    Ball out{current->center, half};
    for (std::size_t q = 0; q < target.size(); ++q) out.center[q] += lambda * (target[q] - current->center[q]);
    return out;
  }

  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

class InteractiveBMAdversary : public BMAdversary {
 public:
  InteractiveBMAdversary(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  Cylinder move(const Space& space, const Point&, const BMState& state) override {
    const Cylinder& prev = state.last_v();
    std::string line;
    while (true) {
      out_ << "round " << state.rounds.size() << ", Player I cylinder> " << std::flush;
      if (!std::getline(in_, line)) {
        out_ << "\nend of input: passing the previous set\n";
        return prev;
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        Cylinder c = Cylinder::parse(space, line);
        validate_cylinder(space, c);
        if (!c.subset_of(space, prev)) throw IllegalMove("the cylinder is not inside Player II's last set");
        return c;
      } catch (const Error& ex) {
        out_ << "illegal move: " << ex.what() << "\n";
      }
    }
  }
  std::string name() const override { return "(interactive)"; }

 private:
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace

std::unique_ptr<BMAdversary> bm_pass() { return std::make_unique<PassAdversary>(); }
std::unique_ptr<BMAdversary> bm_pin_far() { return std::make_unique<PinFarAdversary>(); }
std::unique_ptr<BMAdversary> bm_random(std::uint64_t seed) { return std::make_unique<RandomAdversary>(seed); }
std::unique_ptr<BMAdversary> bm_interactive(std::istream& in, std::ostream& out) {
  return std::make_unique<InteractiveBMAdversary>(in, out);
}

std::unique_ptr<BMAdversary> make_bm_adversary(const std::string& descriptor) {
  SExpr e = parse_sexpr(descriptor);
  const std::string head = e.head();
  if (head == "pass") return bm_pass();
  if (head == "pin-far") return bm_pin_far();
  if (head == "random" && e.is_list() && e.size() == 2) return bm_random(e[1].as_natural());
  throw ParseError("unknown Banach-Mazur adversary " + e.to_string());
}

BMRound bm_respond(const Space& space, const IntervalWitness& w, const Point& eta, Natural round, Cylinder u) {
  BMRound r;
  r.round = round;
  r.kappa = u.support();
  r.j = w.first_index_at_or_after(static_cast<Natural>(r.kappa + 1));
  Ball target{eta, power_of_half(round)};
  space.validate(target);
  r.v = pin_interval(u, w.at(r.j), target);
  r.u = std::move(u);
  return r;
}

BMResult bm_play(const Space& space, const IntervalWitness& w, const Point& eta, BMAdversary& adversary,
                 Natural rounds) {
  if (rounds == 0) throw InvalidArgument("rounds must be >= 1");
  space.validate(eta);
  BMResult out;
  out.space = space.to_string();
  out.witness = w.to_string();
  out.eta = eta;
  out.adversary = adversary.name();
  for (Natural n = 0; n < rounds; ++n) {
    Cylinder u = adversary.move(space, eta, out.state);
    try {
      validate_cylinder(space, u);
    } catch (const InvalidArgument& ex) {
      throw IllegalMove(std::string("round ") + std::to_string(n) + ": " + ex.what());
    }
    if (!u.subset_of(space, out.state.last_v())) {
      throw IllegalMove("round " + std::to_string(n) + ": Player I left the chain");
    }
    out.state.rounds.push_back(bm_respond(space, w, eta, n, std::move(u)));
  }
  const Cylinder& last = out.state.last_v();
  out.prefix = last.materialize(space, static_cast<Natural>(last.support() + 1), space.dense_point(0));
  return out;
}

nlohmann::json BMResult::to_json(const Space& sp) const {
  nlohmann::json j;
  j["space"] = space;
  j["witness"] = witness;
  j["eta"] = sp.point_to_json(eta);
  j["adversary"] = adversary;
  auto& rs = j["rounds"] = nlohmann::json::array();
  for (const BMRound& r : state.rounds) {
    rs.push_back({{"round", r.round},
                  {"kappa", r.kappa},
                  {"j", r.j},
                  {"u_support", r.u.support()},
                  {"v_support", r.v.support()}});
  }
  j["prefix_length"] = prefix.size();
  return j;
}

void BMResult::write_transcript(std::ostream& out, const Space& sp) const {
  for (const BMRound& r : state.rounds) {
    out << nlohmann::json{{"round", r.round}, {"mover", "I"}, {"move", r.u.to_string(sp)}}.dump() << "\n";
    out << nlohmann::json{{"round", r.round},
                          {"mover", "II"},
                          {"move", r.v.to_string(sp)},
                          {"kappa", r.kappa},
                          {"j", r.j}}
               .dump()
        << "\n";
  }
}

BMInvariantCheck check_bm_invariants(const Space& space, const IntervalWitness& w, const Point& eta,
                                     const BMResult& result) {
  BMInvariantCheck check;
  auto fail = [&](std::string d) {
    ++check.violations;
    if (check.details.size() < 20) check.details.push_back(std::move(d));
  };
  const Cylinder* prev = &kWholeSpace;
  for (const BMRound& r : result.state.rounds) {
    const std::string tag = "round " + std::to_string(r.round) + ": ";
    if (!r.u.subset_of(space, *prev)) fail(tag + "U_n is not inside V_{n-1}");
    if (!r.v.subset_of(space, r.u)) fail(tag + "V_n is not inside U_n");
    Interval iv = w.at(r.j);
    if (static_cast<std::int64_t>(iv.lo) <= r.kappa) fail(tag + "min I_j <= kappa");
    const Rational radius = power_of_half(r.round);
    for (Natural i = iv.lo;; ++i) {
      if (i >= result.prefix.size() || !space.distance_less(result.prefix[i], eta, radius)) {
        fail(tag + "coordinate " + std::to_string(i) + " is not within 2^-n of eta");
        break;
      }
      if (i == iv.hi) break;
    }
    prev = &r.v;
  }
  return check;
}

// ---- dense open family ---------------------------------------------------------

DenseOpenFamily::DenseOpenFamily(Space space, IntervalWitness w, Point eta)
    : space_(std::move(space)), witness_(std::move(w)), eta_(std::move(eta)) {
  space_.validate(eta_);
}

Natural DenseOpenFamily::refinement_index(Natural n, const Cylinder& d) const {
  return std::max(n, witness_.first_index_at_or_after(static_cast<Natural>(d.support() + 1)));
}

Cylinder DenseOpenFamily::refine(Natural n, const Cylinder& d) const {
  Natural k = refinement_index(n, d);
  Cylinder out = pin_interval(d, witness_.at(k), Ball{eta_, power_of_half(n)});
  if (!out.subset_of(space_, d)) throw EmptyRefinement("refinement left the given cylinder");
  return out;
}

std::optional<Natural> DenseOpenFamily::membership_witness(Natural n, const std::vector<Point>& prefix) const {
  const Rational radius = power_of_half(n);
  for (Natural k = n;; ++k) {
    Interval iv = witness_.at(k);
    if (iv.hi >= prefix.size()) return std::nullopt;
    bool all = true;
    for (Natural i = iv.lo; all; ++i) {
      all = space_.distance_less(prefix[i], eta_, radius);
      if (i == iv.hi) break;
    }
    if (all) return k;
  }
}

// ---- Laflamme ------------------------------------------------------------------

std::int64_t LaflammeState::support() const { return rounds.empty() ? -1 : rounds.back().b.support(); }

namespace {

// Least legal threshold given the state.
Natural least_threshold(const LaflammeState& s) {
  if (s.rounds.empty()) return 0;
  Natural lo = s.rounds.back().c;
  if (!s.rounds.back().f.empty()) lo = std::max(lo, s.rounds.back().f.back() + 1);
  return lo;
}

class GapStepAdversary : public LaflammeAdversary {
 public:
  explicit GapStepAdversary(Natural step) : step_(step) {
    if (step_ == 0) throw InvalidArgument("gap step must be >= 1");
  }
  Natural threshold(const LaflammeState& s) override { return static_cast<Natural>(s.support() + step_); }
  std::string name() const override { return "(gap-step " + std::to_string(step_) + ")"; }

 private:
  Natural step_;
};

class FixedAdversary : public LaflammeAdversary {
 public:
  explicit FixedAdversary(std::vector<Natural> cs) : cs_(std::move(cs)) {
    if (cs_.empty()) throw InvalidArgument("fixed thresholds need at least one value");
  }
  Natural threshold(const LaflammeState& s) override { return cs_[std::min(s.rounds.size(), cs_.size() - 1)]; }
  std::string name() const override {
    std::string out = "(fixed";
    for (Natural c : cs_) out += " " + std::to_string(c);
    return out + ")";
  }

 private:
  std::vector<Natural> cs_;
};

class RandomThresholdAdversary : public LaflammeAdversary {
 public:
  explicit RandomThresholdAdversary(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  Natural threshold(const LaflammeState& s) override {
    Natural lo = least_threshold(s);
    Natural hi = std::max<Natural>(lo, static_cast<Natural>(s.support() + 1)) + 32;
    return std::uniform_int_distribution<Natural>(lo, hi)(rng_);
  }
  std::string name() const override { return "(random-threshold " + std::to_string(seed_) + ")"; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

class InteractiveLaflammeAdversary : public LaflammeAdversary {
 public:
  InteractiveLaflammeAdversary(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  Natural threshold(const LaflammeState& s) override {
    const Natural lo = least_threshold(s);
    std::string line;
    while (true) {
      out_ << "round " << s.rounds.size() << ", Player I threshold (>= " << lo << ")> " << std::flush;
      if (!std::getline(in_, line)) {
        out_ << "\nend of input: playing " << lo << "\n";
        return lo;
      }
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        Natural c = parse_sexpr(line).as_natural();
        if (c < lo) throw IllegalAdversaryMove("threshold must be >= " + std::to_string(lo));
        return c;
      } catch (const Error& ex) {
        out_ << "illegal move: " << ex.what() << "\n";
      }
    }
  }
  std::string name() const override { return "(interactive)"; }

 private:
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace

std::unique_ptr<LaflammeAdversary> laflamme_gap_step(Natural step) { return std::make_unique<GapStepAdversary>(step); }
std::unique_ptr<LaflammeAdversary> laflamme_fixed(std::vector<Natural> thresholds) {
  return std::make_unique<FixedAdversary>(std::move(thresholds));
}
std::unique_ptr<LaflammeAdversary> laflamme_random(std::uint64_t seed) {
  return std::make_unique<RandomThresholdAdversary>(seed);
}
std::unique_ptr<LaflammeAdversary> laflamme_interactive(std::istream& in, std::ostream& out) {
  return std::make_unique<InteractiveLaflammeAdversary>(in, out);
}

std::unique_ptr<LaflammeAdversary> make_laflamme_adversary(const std::string& descriptor) {
  SExpr e = parse_sexpr(descriptor);
  const std::string head = e.head();
  if (head == "gap-step" && e.is_list() && e.size() == 2) return laflamme_gap_step(e[1].as_natural());
  if (head == "random-threshold" && e.is_list() && e.size() == 2) return laflamme_random(e[1].as_natural());
  if (head == "fixed" && e.is_list()) {
    std::vector<Natural> cs;
    for (std::size_t i = 1; i < e.size(); ++i) cs.push_back(e[i].as_natural());
    return laflamme_fixed(std::move(cs));
  }
  throw ParseError("unknown Laflamme adversary " + e.to_string());
}

LaflammeResult laflamme_play(const DenseOpenFamily& family, const Ball& u, const Ball& v,
                             LaflammeAdversary& adversary, Natural rounds) {
  const Space& space = family.space();
  space.validate(u);
  space.validate(v);
  if (!space.in_ball(family.eta(), u)) throw InvalidArgument("u must contain eta");
  if (space.balls_meet(u, v)) throw InvalidArgument("u and v must be disjoint");

  LaflammeResult out;
  out.space = space.to_string();
  out.witness = family.witness().to_string();
  out.eta = family.eta();
  out.u = u;
  out.v = v;
  out.adversary = adversary.name();

  Cylinder b;  // B_{-1} = X^omega
  for (Natural k = 0; k < rounds; ++k) {
    LaflammeRound r;
    r.round = k;
    r.c = adversary.threshold(out.state);
    if (!out.state.rounds.empty()) {
      const LaflammeRound& prev = out.state.rounds.back();
      if (r.c < prev.c) {
        throw IllegalAdversaryMove("threshold " + std::to_string(r.c) + " regresses below " + std::to_string(prev.c));
      }
      if (!prev.f.empty() && r.c <= prev.f.back()) {
        throw IllegalAdversaryMove("threshold " + std::to_string(r.c) + " does not exceed max F = " +
                                   std::to_string(prev.f.back()));
      }
    }
    const std::int64_t m = b.support();
    if (static_cast<std::int64_t>(r.c) - m > static_cast<std::int64_t>(kMaxPinnedLength)) {
      throw IllegalAdversaryMove("threshold " + std::to_string(r.c) + " is too far beyond the support");
    }

    // A_k: coordinates strictly between m(B_{k-1}) and c_k go into v.
    r.a = b;
    for (std::int64_t n = m + 1; n < static_cast<std::int64_t>(r.c); ++n) r.a.set(static_cast<Natural>(n), v);

    r.pinned_index = family.refinement_index(k, r.a);
    r.pinned = family.witness().at(r.pinned_index);
    Cylinder bk = family.refine(k, r.a);
    if (!bk.subset_of(space, r.a)) throw EmptyRefinement("B_k is not inside A_k");

    // Dichotomy on [c_k, m(B_k)]: each W_n ends up inside u or disjoint from it.
    const std::int64_t mk = bk.support();
    for (std::int64_t n = r.c; n <= mk; ++n) {
      const auto i = static_cast<Natural>(n);
      const std::optional<Ball>& w = bk.at(i);
      if (!w) {
        bk.set(i, u);
      } else if (!space.ball_subsumes(u, *w) && space.balls_meet(*w, u)) {
        bk.set(i, *space.intersection_subball(*w, u));
      }
      if (space.ball_subsumes(u, *bk.at(i))) r.f.push_back(i);
    }
    r.b = bk;
    b = std::move(bk);
    out.state.rounds.push_back(std::move(r));
  }
  out.prefix = b.materialize(space, static_cast<Natural>(b.support() + 1), space.dense_point(0));
  return out;
}

std::vector<Natural> LaflammeResult::union_f() const {
  std::vector<Natural> out;
  for (const LaflammeRound& r : state.rounds) out.insert(out.end(), r.f.begin(), r.f.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json LaflammeResult::to_json(const Space& sp) const {
  nlohmann::json j;
  j["space"] = space;
  j["witness"] = witness;
  j["eta"] = sp.point_to_json(eta);
  j["u"] = ball_to_json(sp, u);
  j["v"] = ball_to_json(sp, v);
  j["adversary"] = adversary;
  auto& rs = j["rounds"] = nlohmann::json::array();
  for (const LaflammeRound& r : state.rounds) {
    rs.push_back({{"round", r.round},
                  {"c", r.c},
                  {"a_support", r.a.support()},
                  {"pinned_index", r.pinned_index},
                  {"pinned", r.pinned.to_string()},
                  {"b_support", r.b.support()},
                  {"f", r.f}});
  }
  j["union_f_size"] = union_f().size();
  j["prefix_length"] = prefix.size();
  return j;
}

void LaflammeResult::write_transcript(std::ostream& out, const Space&) const {
  for (const LaflammeRound& r : state.rounds) {
    out << nlohmann::json{{"round", r.round}, {"mover", "I"}, {"move", {{"c", r.c}}}}.dump() << "\n";
    out << nlohmann::json{{"round", r.round},
                          {"mover", "II"},
                          {"move", {{"f", r.f}, {"pinned", r.pinned.to_string()}, {"support", r.b.support()}}}}
               .dump()
        << "\n";
  }
}

LaflammeInvariantCheck check_laflamme_invariants(const DenseOpenFamily& family, const LaflammeResult& result) {
  const Space& space = family.space();
  LaflammeInvariantCheck check;
  auto fail = [&](std::string d) {
    ++check.violations;
    if (check.details.size() < 20) check.details.push_back(std::move(d));
  };
  const auto& rounds = result.state.rounds;
  const std::vector<Natural> all_f = result.union_f();
  const std::set<Natural> f_set(all_f.begin(), all_f.end());
  const Cylinder* prev = &kWholeSpace;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const LaflammeRound& r = rounds[k];
    const std::string tag = "round " + std::to_string(k) + ": ";
    if (!r.a.subset_of(space, *prev)) fail(tag + "A_k is not inside B_{k-1}");
    if (!r.b.subset_of(space, r.a)) fail(tag + "B_k is not inside A_k");
    for (std::int64_t n = prev->support() + 1; n < static_cast<std::int64_t>(r.c); ++n) {
      const auto& w = r.b.at(static_cast<Natural>(n));
      if (!w || !space.ball_subsumes(result.v, *w)) fail(tag + "gap coordinate " + std::to_string(n) + " not in v");
    }
    if (!r.f.empty() && r.f.front() < r.c) fail(tag + "F_k is not inside [c_k, inf)");
    if (k + 1 < rounds.size() && !r.f.empty() && r.f.back() >= rounds[k + 1].c) {
      fail(tag + "F_k meets [c_{k+1}, inf)");
    }
    for (std::int64_t n = r.c; n <= r.b.support(); ++n) {
      const auto& w = r.b.at(static_cast<Natural>(n));
      if (!w) {
        fail(tag + "coordinate " + std::to_string(n) + " left unconstrained");
        continue;
      }
      const bool inside = space.ball_subsumes(result.u, *w);
      if (!inside && space.balls_meet(result.u, *w)) fail(tag + "dichotomy fails at " + std::to_string(n));
      const bool listed = std::binary_search(r.f.begin(), r.f.end(), static_cast<Natural>(n));
      if (inside != listed) fail(tag + "F_k disagrees with W_" + std::to_string(n));
    }
    bool pinned_inside = true;
    for (Natural i = r.pinned.lo;; ++i) {
      if (!f_set.count(i)) {
        pinned_inside = false;
        break;
      }
      if (i == r.pinned.hi) break;
    }
    if (k >= 1) {
      if (pinned_inside) {
        ++check.rounds_with_full_pinned_interval;
      } else {
        fail(tag + "pinned interval " + r.pinned.to_string() + " is not inside the union of the F_k");
      }
    }
    prev = &r.b;
  }
  // Dichotomy on every decided coordinate of the final cylinder.
  const Cylinder& last = prev == &kWholeSpace ? kWholeSpace : rounds.back().b;
  for (std::int64_t n = 0; n <= last.support(); ++n) {
    const auto& w = last.at(static_cast<Natural>(n));
    if (!w) {
      fail("decided coordinate " + std::to_string(n) + " is unconstrained");
    } else if (!space.ball_subsumes(result.u, *w) && space.balls_meet(result.u, *w)) {
      fail("dichotomy fails at decided coordinate " + std::to_string(n));
    }
  }
  // Union of the F_k against the u-hitting set of the prefix.
  for (std::size_t n = 0; n < result.prefix.size(); ++n) {
    const bool hit = space.in_ball(result.prefix[n], result.u);
    if (hit != (f_set.count(n) > 0)) fail("hitting set and union F differ at " + std::to_string(n));
  }
  return check;
}

nlohmann::json AdjudicationReport::to_json() const {
  nlohmann::json j;
  j["rounds"] = rounds;
  j["decided"] = decided;
  j["union_f"] = union_f;
  j["hitting"] = hitting;
  j["sets_equal"] = sets_equal;
  j["pinned_contained"] = pinned_contained;
  j["oracle"] = oracle;
  j["finite_union_value"] = finite_union.value ? nlohmann::json(finite_union.value->to_string()) : nlohmann::json();
  j["finite_union_positive"] = finite_union.positive ? nlohmann::json(*finite_union.positive) : nlohmann::json();
  return j;
}

AdjudicationReport adjudicate_laflamme(const LaflammeResult& result, const Space& space,
                                       const PositivityOracle& oracle) {
  AdjudicationReport rep;
  rep.rounds = result.state.rounds.size();
  rep.decided = result.state.support();
  rep.union_f = result.union_f();
  for (std::size_t n = 0; n < result.prefix.size(); ++n) {
    if (space.in_ball(result.prefix[n], result.u)) rep.hitting.push_back(n);
  }
  rep.sets_equal = rep.union_f == rep.hitting;
  const std::set<Natural> f_set(rep.union_f.begin(), rep.union_f.end());
  for (const LaflammeRound& r : result.state.rounds) {
    bool inside = true;
    for (Natural i = r.pinned.lo; inside; ++i) {
      inside = f_set.count(i) > 0;
      if (i == r.pinned.hi) break;
    }
    if (inside) ++rep.pinned_contained;
  }
  rep.oracle = to_string(oracle);
  rep.finite_union = evaluate_oracle(oracle, PositivityTarget{SetExpr::finite(rep.union_f)});
  return rep;
}

}  // namespace maldist
