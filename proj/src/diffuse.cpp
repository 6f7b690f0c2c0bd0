#include "maldist/diffuse.hpp"

#include "maldist/errors.hpp"

namespace maldist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Natural kMaxBlockPeriod = 4096;

bool same_witness(const IntervalWitness& a, const IntervalWitness& b) { return a.to_string() == b.to_string(); }

}  // namespace

// ---- BlockUnion ----------------------------------------------------------------

BlockUnion::BlockUnion(IntervalWitness witness, SetExpr indices)
    : witness_(std::move(witness)), indices_(std::move(indices)) {}

BlockUnion BlockUnion::from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.size() != 3 || e.head() != "blocks") {
    throw ParseError("expected (blocks WITNESS INDEX-SET), got " + e.to_string());
  }
  return BlockUnion(IntervalWitness::from_sexpr(e[1]), SetExpr::from_sexpr(e[2]));
}

BlockUnion BlockUnion::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string BlockUnion::to_string() const {
  return "(blocks " + witness_.to_string() + " " + indices_.to_string() + ")";
}

bool BlockUnion::contains(Natural n) const {
  auto k = witness_.index_containing(n);
  return k && indices_.contains(*k);
}

std::optional<CanonicalSet> BlockUnion::as_canonical() const {
  const CanonicalSet& k = indices_.canonical();
  if (k.is_finite()) {
    std::vector<Run> runs;
    Natural top = 0;
    for (const Run& r : k.exceptional()) {
      for (Natural i = r.lo;; ++i) {
        Interval iv = witness_.at(i);
        runs.push_back({iv.lo, iv.hi});
        top = iv.hi + 1;
        if (i == r.hi) break;
      }
    }
    return CanonicalSet(top, 1, {false}, std::move(runs));
  }
  switch (witness_.kind()) {
    case IntervalWitness::Kind::Unit:
      return k;
    case IntervalWitness::Kind::Linear: {
      const Interval first = witness_.at(0);
      const Natural stride = witness_.at(1).lo - first.lo;
      const Natural offset = first.lo;
      const Natural length = first.length();
      const Natural q = k.period();
      if (stride > kMaxPeriod / q) return std::nullopt;
      const Natural period = stride * q;
      const Natural threshold = stride * k.threshold() + offset;
      std::vector<bool> mask(period, false);
      for (Natural r = 0; r < period; ++r) {
        Natural v = (r + period - offset % period) % period;
        mask[r] = v % stride < length && k.residue_mask()[v / stride];
      }
      std::vector<Run> runs;
      for (const Run& r : k.exceptional()) {
        for (Natural i = r.lo;; ++i) {
          Interval iv = witness_.at(i);
          runs.push_back({iv.lo, iv.hi});
          if (i == r.hi) break;
        }
      }
      return CanonicalSet(threshold, period, std::move(mask), std::move(runs));
    }
    default:
      return std::nullopt;
  }
}

std::optional<Rational> BlockUnion::limit_upper_density() const {
  if (auto c = as_canonical()) return c->density();
  if (witness_.kind() != IntervalWitness::Kind::Dyadic) return std::nullopt;
  // At the end of block k the count is dominated by sum_{m <= k, m in K} 2^m,
  // so along k = rho (mod q) the ratio tends to
  // sum_{m < q} [rho - m in K] 2^{-(m+1)} / (1 - 2^{-q}); in between blocks
  // the ratio moves monotonically.
  const CanonicalSet& k = indices_.canonical();
  const Natural q = k.period();
  if (q > kMaxBlockPeriod) return std::nullopt;
  const auto& mask = k.residue_mask();
  const Rational half(1, 2);
  const Rational scale = Rational(1) / (Rational(1) - pow(half, q));
  Rational best(0);
  for (Natural rho = 0; rho < q; ++rho) {
    Rational sum(0);
    Rational weight = half;
    for (Natural m = 0; m < q; ++m) {
      if (mask[(rho + q - m) % q]) sum += weight;
      weight *= half;
    }
    if (sum > best) best = sum;
  }
  return best * scale;
}

std::string to_string(const PositivityTarget& t) {
  return std::visit([](const auto& x) { return x.to_string(); }, t);
}

PositivityTarget parse_target(std::string_view text) {
  SExpr e = parse_sexpr(text);
  if (e.is_list() && e.head() == "blocks") return BlockUnion::from_sexpr(e);
  return SetExpr::from_sexpr(e);
}

// ---- DiffuseSubmeasure ---------------------------------------------------------

DiffuseSubmeasure::DiffuseSubmeasure(Mode mode, std::optional<Lscsm> phi, std::optional<IntervalWitness> w)
    : mode_(mode), phi_(std::move(phi)), witness_(std::move(w)) {}

DiffuseSubmeasure DiffuseSubmeasure::from_lscsm(Lscsm phi) {
  return DiffuseSubmeasure(Mode::FromLscsmMass, std::move(phi), std::nullopt);
}

DiffuseSubmeasure DiffuseSubmeasure::indicator_of_witness(IntervalWitness w) {
  return DiffuseSubmeasure(Mode::IndicatorOfWitness, std::nullopt, std::move(w));
}

DiffuseSubmeasure DiffuseSubmeasure::from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.size() != 3 || e.head() != "diffuse") {
    throw ParseError("expected (diffuse mass PHI) or (diffuse witness W), got " + e.to_string());
  }
  const std::string mode = e[1].text();
  if (mode == "mass") return from_lscsm(Lscsm::from_sexpr(e[2]));
  if (mode == "witness") return indicator_of_witness(IntervalWitness::from_sexpr(e[2]));
  throw ParseError("unknown diffuse mode '" + mode + "'");
}

DiffuseSubmeasure DiffuseSubmeasure::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string DiffuseSubmeasure::to_string() const {
  if (mode_ == Mode::FromLscsmMass) return "(diffuse mass " + phi_->to_string() + ")";
  return "(diffuse witness " + witness_->to_string() + ")";
}

std::optional<Extended> DiffuseSubmeasure::evaluate(const CanonicalSet& s) const {
  if (mode_ == Mode::FromLscsmMass) return exact_mass(*phi_, s);
  if (s.is_finite()) return Extended(Rational(0));
  InfinitudeCertificate cert = certify_infinitude(*witness_, s);
  if (!cert.certified) return std::nullopt;
  return Extended(Rational(cert.meets_infinitely_often ? 1 : 0));
}

std::optional<Extended> DiffuseSubmeasure::evaluate(const PositivityTarget& t) const {
  if (const auto* s = std::get_if<SetExpr>(&t)) return evaluate(*s);
  const auto& b = std::get<BlockUnion>(t);
  if (auto c = b.as_canonical()) return evaluate(*c);
  if (mode_ == Mode::IndicatorOfWitness) {
    if (!same_witness(*witness_, b.witness())) return std::nullopt;
    return Extended(Rational(b.indices().canonical().is_finite() ? 0 : 1));
  }
  // The mass of the upper density is the limsup of the prefix ratios.
  if (!std::holds_alternative<UpperDensity>(phi_->family())) return std::nullopt;
  auto d = b.limit_upper_density();
  if (!d) return std::nullopt;
  Extended v(*d);
  if (phi_->cap()) v = min(v, Extended(*phi_->cap()));
  return v;
}

PositivityOracle parse_oracle(std::string_view text) {
  SExpr e = parse_sexpr(text);
  if (e.is_list() && e.head() == "density-above") {
    if (e.size() != 2) throw ParseError("expected (density-above q)");
    return DensityThreshold{e[1].as_rational()};
  }
  return DiffuseSubmeasure::from_sexpr(e);
}

std::string to_string(const PositivityOracle& o) {
  return std::visit(overloaded{
                        [](const DiffuseSubmeasure& d) { return d.to_string(); },
                        [](const DensityThreshold& t) { return "(density-above " + to_string(t.threshold) + ")"; },
                    },
                    o);
}

OracleVerdict evaluate_oracle(const PositivityOracle& o, const PositivityTarget& t) {
  OracleVerdict v;
  if (const auto* d = std::get_if<DiffuseSubmeasure>(&o)) {
    v.value = d->evaluate(t);
    if (v.value) v.positive = *v.value > Extended(Rational(0));
    return v;
  }
  const auto& threshold = std::get<DensityThreshold>(o).threshold;
  std::optional<Rational> density;
  if (const auto* s = std::get_if<SetExpr>(&t)) {
    density = s->canonical().density();
  } else {
    density = std::get<BlockUnion>(t).limit_upper_density();
  }
  if (density) {
    v.value = Extended(*density);
    v.positive = *density > threshold;
  }
  return v;
}

// ---- talagrand check -----------------------------------------------------------

bool TalagrandReport::consistent() const {
  return !(contained_infinitely_often == true && verdict.positive == false);
}

nlohmann::json TalagrandReport::to_json() const {
  nlohmann::json j;
  j["witness"] = witness;
  j["target"] = target;
  j["oracle"] = oracle;
  j["horizon"] = horizon;
  j["intervals_examined"] = intervals_examined;
  j["contained_count"] = contained_count;
  j["contained_infinitely_often"] =
      contained_infinitely_often ? nlohmann::json(*contained_infinitely_often) : nlohmann::json();
  j["oracle_evaluated"] = oracle_evaluated;
  j["oracle_value"] = verdict.value ? nlohmann::json(verdict.value->to_string()) : nlohmann::json();
  j["positive"] = verdict.positive ? nlohmann::json(*verdict.positive) : nlohmann::json();
  j["consistent"] = consistent();
  return j;
}

TalagrandReport talagrand_positivity_check(const IntervalWitness& w, const PositivityTarget& s,
                                           const PositivityOracle& oracle, Natural horizon) {
  TalagrandReport out;
  out.witness = w.to_string();
  out.target = to_string(s);
  out.oracle = to_string(oracle);
  out.horizon = horizon;

  std::optional<CanonicalSet> canonical;
  const BlockUnion* blocks = std::get_if<BlockUnion>(&s);
  if (const auto* e = std::get_if<SetExpr>(&s)) {
    canonical = e->canonical();
  } else {
    canonical = blocks->as_canonical();
  }
  const bool indexed = blocks && same_witness(blocks->witness(), w);

  std::vector<Interval> intervals = w.up_to(horizon);
  out.intervals_examined = intervals.size();
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const Interval& iv = intervals[k];
    bool inside = false;
    if (indexed) {
      inside = blocks->indices().contains(k);
    } else if (canonical) {
      inside = canonical->count_in(iv.lo, iv.hi) == iv.length();
    } else {
      inside = true;
      for (Natural n = iv.lo; inside; ++n) {
        inside = blocks->contains(n);
        if (n == iv.hi) break;
      }
    }
    if (inside) ++out.contained_count;
  }

  if (indexed) {
    out.contained_infinitely_often = !blocks->indices().canonical().is_finite();
  } else if (canonical) {
    InfinitudeCertificate cert = certify_infinitude(w, *canonical);
    if (cert.certified) out.contained_infinitely_often = cert.contained_infinitely_often;
  }
  if (out.contained_infinitely_often == true) {
    out.oracle_evaluated = true;
    out.verdict = evaluate_oracle(oracle, s);
  }
  return out;
}

}  // namespace maldist
