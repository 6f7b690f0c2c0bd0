#include "maldist/submeasure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---- windows --------------------------------------------------------------
//
// Every evaluation below computes phi(S ∩ [lo, hi]) where hi may be infinite.

using Hi = std::optional<Natural>;

Natural window_count(const CanonicalSet& c, Natural lo, Natural hi) { return c.count_in(lo, hi); }

// First member of residue class r that is >= from.
Natural first_in_class(Natural from, Natural r, Natural p) { return from + ((r + p - from % p) % p); }

// ---- upper density --------------------------------------------------------

// sup_{j >= 1} |S ∩ [lo, min(j, hi)]| / j. The supremum over a run of members
// is at one of its ends and over a gap at its left end, so run ends suffice;
// along one residue class in the periodic region the ratio is a monotone
// Moebius function of the period count.
Rational upper_density_sup(const CanonicalSet& c, Natural lo, Hi hi) {
  const Natural t = c.threshold();
  const Natural p = c.period();
  std::vector<Natural> candidates{1};
  auto add = [&](Natural j) {
    if (j >= 1 && j >= lo && (!hi || j <= *hi)) candidates.push_back(j);
  };
  add(lo);
  for (const Run& r : c.exceptional()) add(r.hi);
  if (t > 0) add(t - 1);
  add(t);
  if (hi) add(*hi);
  // best = best_num / best_den
  unsigned __int128 best_num = 0, best_den = 1;
  if (c.residue_count() > 0) {
    const auto& mask = c.residue_mask();
    const Natural start = std::max(lo, t);
    for (Natural r = 0; r < p; ++r) {
      if (!mask[r] || mask[(r + 1) % p]) continue;
      Natural first = first_in_class(start, r, p);
      if (hi && first > *hi) continue;
      add(first);
      if (hi) add(first + ((*hi - first) / p) * p);
    }
    if (!hi) {
      best_num = c.residue_count();
      best_den = p;
    }
  }
  for (Natural j : candidates) {
    Natural top = hi ? std::min(j, *hi) : j;
    unsigned __int128 count = j < lo ? 0 : window_count(c, lo, top);
    if (count * best_den > best_num * j) {
      best_num = count;
      best_den = j;
    }
  }
  Rational q(to_integer(static_cast<Natural>(best_num)), to_integer(static_cast<Natural>(best_den)));
  q.canonicalize();
  return q;
}

// ---- weighted sums --------------------------------------------------------

std::pair<Integer, Integer> harmonic_split(const std::vector<Natural>& m, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return {Integer(1), to_integer(m[lo] + 1)};
  std::size_t mid = lo + (hi - lo) / 2;
  auto [p1, q1] = harmonic_split(m, lo, mid);
  auto [p2, q2] = harmonic_split(m, mid, hi);
  return {p1 * q2 + p2 * q1, q1 * q2};
}

Rational harmonic_sum(const CanonicalSet& c, Natural lo, Natural hi) {
  std::vector<Natural> members;
  for (const Run& r : c.runs_in(lo, hi)) {
    for (Natural m = r.lo;; ++m) {
      members.push_back(m);
      if (m == r.hi) break;
    }
  }
  if (members.empty()) return Rational(0);
  auto [num, den] = harmonic_split(members, 0, members.size());
  Rational out(num, den);
  out.canonicalize();
  return out;
}

// sum_{n = lo}^{hi} r^n
Rational geometric_run(const Rational& r, Natural lo, Natural hi) {
  return (pow(r, lo) - pow(r, hi + 1)) / (Rational(1) - r);
}

Rational geometric_window(const Rational& r, const CanonicalSet& c, Natural lo, Hi hi) {
  Rational sum(0);
  const Natural t = c.threshold();
  for (const Run& run : c.exceptional()) {
    if (hi && run.lo > *hi) break;
    if (run.hi < lo) continue;
    sum += geometric_run(r, std::max(run.lo, lo), hi ? std::min(run.hi, *hi) : run.hi);
  }
  if ((hi && *hi < t) || c.is_finite()) return sum;
  const Natural p = c.period();
  const Natural start = std::max(lo, t);
  Rational rp = pow(r, p);
  for (Natural res : c.residues()) {
    Natural first = first_in_class(start, res, p);
    if (hi && first > *hi) continue;
    if (hi) {
      Natural count = (*hi - first) / p + 1;
      sum += pow(r, first) * (Rational(1) - pow(rp, count)) / (Rational(1) - rp);
    } else {
      sum += pow(r, first) / (Rational(1) - rp);
    }
  }
  return sum;
}

// ---- partition density ----------------------------------------------------

struct Block {
  Natural lo;
  Natural len;
};

std::optional<Block> partition_block(const PartitionDensity& pd, Natural k) {
  if (pd.blocks == PartitionDensity::Blocks::Dyadic) {
    if (k >= 62) return std::nullopt;
    return Block{Natural{1} << k, Natural{1} << k};
  }
  unsigned __int128 lo = static_cast<unsigned __int128>(pd.scale) * k * (k + 1) / 2;
  if (lo >= kMaxAtomValue) return std::nullopt;
  return Block{static_cast<Natural>(lo), pd.scale * (k + 1)};
}

// Index of a block whose start is <= n (the last such one when it exists).
Natural partition_start_index(const PartitionDensity& pd, Natural n) {
  if (pd.blocks == PartitionDensity::Blocks::Dyadic) return n <= 1 ? 0 : static_cast<Natural>(std::bit_width(n) - 1);
  auto k = static_cast<Natural>(std::sqrt(2.0L * static_cast<long double>(n) / static_cast<long double>(pd.scale)));
  while (k > 0) {
    auto b = partition_block(pd, k);
    if (b && b->lo <= n) break;
    --k;
  }
  return k;
}

Rational partition_window(const PartitionDensity& pd, const CanonicalSet& c, Natural lo, Natural hi) {
  Rational best(0);
  for (Natural k = partition_start_index(pd, lo);; ++k) {
    auto b = partition_block(pd, k);
    if (!b || b->lo > hi) break;
    Natural end = b->lo + b->len - 1;
    if (end < lo) continue;
    Rational q(to_integer(window_count(c, std::max(lo, b->lo), std::min(hi, end))), to_integer(b->len));
    q.canonicalize();
    if (q > best) best = q;
  }
  return best;
}

Extended table_value(const CardinalityTable& t, Natural count) {
  return t.values[std::min<Natural>(count, t.values.size() - 1)];
}

Extended apply_cap(const Lscsm& phi, Extended v) {
  if (phi.cap()) return min(v, Extended(*phi.cap()));
  return v;
}

Extended window_uncapped(const Lscsm& phi, const CanonicalSet& c, Natural lo, Natural hi) {
  return std::visit(
      overloaded{
          [&](const Counting&) { return Extended(Rational(to_integer(window_count(c, lo, hi)))); },
          [&](const WeightedSum& w) {
            if (w.weights == WeightedSum::Weights::Harmonic) return Extended(harmonic_sum(c, lo, hi));
            return Extended(geometric_window(w.ratio, c, lo, hi));
          },
          [&](const UpperDensity&) { return Extended(upper_density_sup(c, lo, hi)); },
          [&](const PartitionDensity& pd) { return Extended(partition_window(pd, c, lo, hi)); },
          [&](const CardinalityTable& t) { return table_value(t, window_count(c, lo, hi)); },
      },
      phi.family());
}

// phi(S ∩ [lo, inf)) when a closed form exists.
std::optional<Extended> tail_uncapped(const Lscsm& phi, const CanonicalSet& c, Natural lo) {
  if (c.is_finite()) {
    Natural h = std::max(lo, c.max_member().value_or(0));
    return window_uncapped(phi, c, lo, h);
  }
  return std::visit(overloaded{
                        [&](const Counting&) -> std::optional<Extended> { return Extended::infinity(); },
                        [&](const WeightedSum& w) -> std::optional<Extended> {
                          if (w.weights == WeightedSum::Weights::Harmonic) return std::nullopt;
                          return Extended(geometric_window(w.ratio, c, lo, std::nullopt));
                        },
                        [&](const UpperDensity&) -> std::optional<Extended> {
                          return Extended(upper_density_sup(c, lo, std::nullopt));
                        },
                        [&](const PartitionDensity&) -> std::optional<Extended> { return std::nullopt; },
                        [&](const CardinalityTable& t) -> std::optional<Extended> { return t.values.back(); },
                    },
                    phi.family());
}

std::optional<Extended> exact_mass_uncapped(const Lscsm& phi, const CanonicalSet& c) {
  if (c.is_finite()) return window_uncapped(phi, CanonicalSet(), 0, 0);
  return std::visit(overloaded{
                        [&](const Counting&) -> std::optional<Extended> { return Extended::infinity(); },
                        [&](const WeightedSum& w) -> std::optional<Extended> {
                          if (w.weights == WeightedSum::Weights::Harmonic) return std::nullopt;
                          return Extended(Rational(0));
                        },
                        [&](const UpperDensity&) -> std::optional<Extended> { return Extended(c.density()); },
                        [&](const PartitionDensity&) -> std::optional<Extended> { return Extended(c.density()); },
                        [&](const CardinalityTable& t) -> std::optional<Extended> { return t.values.back(); },
                    },
                    phi.family());
}

Natural isqrt(Natural n) {
  auto r = static_cast<Natural>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

Lscsm::Lscsm(Family family, std::optional<Rational> cap) : family_(std::move(family)), cap_(std::move(cap)) {
  if (cap_ && *cap_ < 0) throw InvalidArgument("cap must be nonnegative");
  if (auto* w = std::get_if<WeightedSum>(&family_)) {
    if (w->weights == WeightedSum::Weights::Geometric && (w->ratio <= 0 || w->ratio >= 1)) {
      throw InvalidArgument("geometric ratio must lie in (0, 1)");
    }
  }
  if (auto* pd = std::get_if<PartitionDensity>(&family_)) {
    if (pd->blocks == PartitionDensity::Blocks::Linear && pd->scale == 0) {
      throw InvalidArgument("linear partition scale must be >= 1");
    }
  }
  if (auto* t = std::get_if<CardinalityTable>(&family_)) {
    if (t->values.empty()) throw InvalidArgument("table needs at least one value");
  }
}

Lscsm Lscsm::counting() { return Lscsm(Counting{}); }
Lscsm Lscsm::harmonic() { return Lscsm(WeightedSum{}); }
Lscsm Lscsm::geometric(Rational r) { return Lscsm(WeightedSum{WeightedSum::Weights::Geometric, std::move(r)}); }
Lscsm Lscsm::upper_density() { return Lscsm(UpperDensity{}); }
Lscsm Lscsm::partition_dyadic() { return Lscsm(PartitionDensity{}); }
Lscsm Lscsm::partition_linear(Natural scale) {
  return Lscsm(PartitionDensity{PartitionDensity::Blocks::Linear, scale});
}
Lscsm Lscsm::table(std::vector<Rational> values) { return Lscsm(CardinalityTable{std::move(values)}); }
Lscsm Lscsm::capped(Rational cap) const {
  Rational c = cap_ ? std::min(*cap_, cap) : cap;
  return Lscsm(family_, c);
}

Lscsm Lscsm::from_sexpr(const SExpr& e) {
  if (e.is_list() && e.head() == "phi") {
    if (e.size() != 2) throw ParseError("phi takes exactly one descriptor: " + e.to_string());
    return from_sexpr(e[1]);
  }
  std::string head = e.head();
  auto bare = [&](std::size_t arity) {
    if (e.is_list() && e.size() != arity) throw ParseError("wrong arity in " + e.to_string());
  };
  try {
    if (head == "counting") return bare(1), counting();
    if (head == "harmonic") return bare(1), harmonic();
    if (head == "upper-density") return bare(1), upper_density();
    if (e.is_atom()) throw ParseError("unknown submeasure '" + head + "'");
    if (head == "geometric") return bare(2), geometric(e[1].as_rational());
    if (head == "partition") {
      std::string kind = e[1].text();
      if (kind == "dyadic") return bare(2), partition_dyadic();
      if (kind == "linear") return bare(3), partition_linear(e[2].as_natural());
      throw ParseError("unknown partition '" + kind + "'");
    }
    if (head == "table") {
      std::vector<Rational> vs;
      for (std::size_t i = 1; i < e.size(); ++i) vs.push_back(e[i].as_rational());
      return table(std::move(vs));
    }
    if (head == "cap") {
      bare(3);
      return from_sexpr(e[2]).capped(e[1].as_rational());
    }
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  throw ParseError("unknown submeasure form " + e.to_string());
}

Lscsm Lscsm::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string Lscsm::to_string() const {
  std::string base = std::visit(overloaded{
                                    [](const Counting&) -> std::string { return "(counting)"; },
                                    [](const WeightedSum& w) -> std::string {
                                      if (w.weights == WeightedSum::Weights::Harmonic) return "(harmonic)";
                                      return "(geometric " + maldist::to_string(w.ratio) + ")";
                                    },
                                    [](const UpperDensity&) -> std::string { return "(upper-density)"; },
                                    [](const PartitionDensity& pd) -> std::string {
                                      if (pd.blocks == PartitionDensity::Blocks::Dyadic) return "(partition dyadic)";
                                      return "(partition linear " + std::to_string(pd.scale) + ")";
                                    },
                                    [](const CardinalityTable& t) -> std::string {
                                      std::string s = "(table";
                                      for (const auto& v : t.values) s += " " + maldist::to_string(v);
                                      return s + ")";
                                    },
                                },
                                family_);
  if (cap_) return "(cap " + maldist::to_string(*cap_) + " " + base + ")";
  return base;
}

std::string Lscsm::name() const { return to_string(); }

const Extended& MassValue::value() const {
  if (!exact || !upper) throw Uncertifiable("value is not certified exact");
  return *upper;
}

nlohmann::json MassValue::to_json() const {
  nlohmann::json j;
  j["lower"] = lower.to_string();
  j["upper"] = upper ? nlohmann::json(upper->to_string()) : nlohmann::json(nullptr);
  j["exact"] = exact;
  j["horizon"] = horizon;
  if (tail_evidence) j["tail_evidence"] = tail_evidence->to_string();
  return j;
}

Extended eval_truncated(const Lscsm& phi, const CanonicalSet& s, Natural horizon) {
  return apply_cap(phi, window_uncapped(phi, s, 0, horizon));
}

Extended eval_window(const Lscsm& phi, const CanonicalSet& s, Natural lo, Natural hi) {
  if (lo > hi) return apply_cap(phi, window_uncapped(phi, CanonicalSet(), 0, 0));
  return apply_cap(phi, window_uncapped(phi, s, lo, hi));
}

std::optional<Extended> eval_tail(const Lscsm& phi, const CanonicalSet& s, Natural lo) {
  auto v = tail_uncapped(phi, s, lo);
  if (v) return apply_cap(phi, *v);
  return std::nullopt;
}

Extended eval_finite(const Lscsm& phi, const CanonicalSet& finite_set) {
  if (!finite_set.is_finite()) throw InvalidArgument("eval_finite on an infinite set");
  return eval_truncated(phi, finite_set, finite_set.max_member().value_or(0));
}

std::optional<Extended> eval_exact(const Lscsm& phi, const CanonicalSet& s) {
  return eval_tail(phi, s, 0);
}

MassValue eval_phi(const Lscsm& phi, const CanonicalSet& s, Natural horizon) {
  MassValue out;
  out.horizon = horizon;
  out.lower = eval_truncated(phi, s, horizon);
  auto exact = eval_exact(phi, s);
  if (!exact && phi.cap() && out.lower >= Extended(*phi.cap())) exact = Extended(*phi.cap());
  if (exact) {
    out.upper = *exact;
    out.exact = true;
  }
  return out;
}

MassValue eval_phi(const Lscsm& phi, const SetExpr& s, Natural horizon) { return eval_phi(phi, s.canonical(), horizon); }

std::optional<Extended> exact_mass(const Lscsm& phi, const CanonicalSet& s) {
  auto v = exact_mass_uncapped(phi, s);
  if (v) return apply_cap(phi, *v);
  return std::nullopt;
}

MassValue mass_at_infinity(const Lscsm& phi, const CanonicalSet& s, Natural horizon) {
  MassValue out;
  out.horizon = horizon;
  if (auto exact = exact_mass(phi, s)) {
    out.lower = *exact;
    out.upper = *exact;
    out.exact = true;
    return out;
  }
  out.lower = Extended(Rational(0));
  Natural cut = isqrt(horizon);
  out.tail_evidence = eval_window(phi, s, cut + 1, horizon);
  return out;
}

MassValue mass_at_infinity(const Lscsm& phi, const SetExpr& s, Natural horizon) {
  return mass_at_infinity(phi, s.canonical(), horizon);
}

bool exh_member(const Lscsm& phi, const SetExpr& s) {
  auto m = exact_mass(phi, s.canonical());
  if (!m) throw Uncertifiable("no closed-form mass at infinity for " + phi.to_string() + " on " + s.to_string());
  return *m == Extended(Rational(0));
}

// ---------------------------------------------------------------------------

nlohmann::json AxiomReport::to_json() const {
  nlohmann::json j;
  j["phi"] = phi;
  j["samples"] = samples;
  j["horizon"] = horizon;
  j["seed"] = seed;
  j["checks"] = checks;
  j["ok"] = ok();
  auto& vs = j["violations"] = nlohmann::json::array();
  for (const auto& v : violations) {
    vs.push_back({{"axiom", v.axiom}, {"a", v.a}, {"b", v.b}, {"horizon", v.horizon}, {"detail", v.detail}});
  }
  return j;
}

AxiomReport check_submeasure_axioms(const Lscsm& phi, Natural samples, Natural horizon, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("samples must be >= 1");
  AxiomReport report;
  report.phi = phi.to_string();
  report.samples = samples;
  report.horizon = horizon;
  report.seed = seed;

  std::vector<Natural> horizons{horizon / 4, horizon / 2, horizon};
  auto value = [&](const SetExpr& s, Natural h) { return eval_truncated(phi, s.canonical(), h); };
  auto violate = [&](std::string axiom, const SetExpr& a, const SetExpr& b, Natural h, std::string detail) {
    report.violations.push_back({std::move(axiom), a.to_string(), b.to_string(), h, std::move(detail)});
  };

  auto check_pair = [&](const SetExpr& a, const SetExpr& b) {
    SetExpr both = SetExpr::unite({a, b});
    SetExpr common = SetExpr::intersect({a, b});
    for (Natural h : horizons) {
      Extended va = value(a, h);
      Extended vb = value(b, h);
      Extended vu = value(both, h);
      Extended vi = value(common, h);
      report.checks += 4;
      if (va > vu) violate("monotone", a, both, h, "phi(A)=" + va.to_string() + " > phi(A∪B)=" + vu.to_string());
      if (vi > va) violate("monotone", common, a, h, "phi(A∩B)=" + vi.to_string() + " > phi(A)=" + va.to_string());
      if (vu > va + vb) {
        violate("subadditive", a, b, h,
                "phi(A∪B)=" + vu.to_string() + " > phi(A)+phi(B)=" + (va + vb).to_string());
      }
    }
    for (const SetExpr* s : {&a, &b}) {
      Extended prev = value(*s, 0);
      for (Natural h : horizons) {
        Extended cur = value(*s, h);
        ++report.checks;
        if (prev > cur) violate("lsc", *s, *s, h, "truncated value decreased to " + cur.to_string());
        prev = cur;
      }
      if (auto ex = eval_exact(phi, s->canonical())) {
        ++report.checks;
        if (prev > *ex) violate("lsc", *s, *s, horizon, "truncation exceeds exact value " + ex->to_string());
      }
    }
  };

  // Small finite sets first: adversarial descriptors tend to misbehave there.
  std::vector<SetExpr> small{SetExpr::empty(), SetExpr::finite({0}), SetExpr::finite({1}), SetExpr::finite({0, 1})};
  for (Natural i = 0; i < 6; ++i) small.push_back(SetExpr::interval(0, i));
  for (std::size_t i = 0; i < small.size(); ++i) {
    for (std::size_t j = 0; j < small.size(); ++j) check_pair(small[i], small[j]);
  }

  std::mt19937_64 rng(seed);
  RandomSetOptions opts;
  opts.max_value = std::max<Natural>(8, horizon / 4);
  for (Natural i = 0; i < samples; ++i) {
    SetExpr a = random_set_expr(rng, opts);
    SetExpr b = random_set_expr(rng, opts);
    check_pair(a, b);
  }
  return report;
}

}  // namespace maldist
