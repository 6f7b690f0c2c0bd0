#include "maldist/witness.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <unordered_map>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

// Materializing a recurrence beyond this many intervals is refused.
constexpr Natural kMaxMaterialized = Natural{1} << 26;

Natural checked_value(__int128 v, const char* what) {
  if (v < 0) v = 0;
  if (v >= static_cast<__int128>(kMaxAtomValue)) throw InvalidArgument(std::string(what) + " exceeds 2^62");
  return static_cast<Natural>(v);
}

Natural affine_value(Natural slope, std::int64_t intercept, Natural n) {
  return checked_value(static_cast<__int128>(slope) * n + intercept, "gap value");
}

Natural mod(__int128 v, Natural p) {
  __int128 r = v % static_cast<__int128>(p);
  if (r < 0) r += p;
  return static_cast<Natural>(r);
}

Natural ceil_div(Natural a, Natural b) { return a / b + (a % b != 0); }

Natural modpow2(Natural k, Natural p) {
  Natural result = 1 % p;
  Natural base = 2 % p;
  while (k > 0) {
    if (k & 1) result = static_cast<Natural>(static_cast<unsigned __int128>(result) * base % p);
    base = static_cast<Natural>(static_cast<unsigned __int128>(base) * base % p);
    k >>= 1;
  }
  return result;
}

CanonicalSet full_set() { return CanonicalSet(0, 1, {true}, {}); }

// Prefix sums over the residue mask of s, doubled so that circular windows
// [r, r + L) with L <= p are a single difference.
class ResidueWindows {
 public:
  explicit ResidueWindows(const CanonicalSet& s) : p_(s.period()), prefix_(2 * p_ + 1, 0) {
    const auto& mask = s.residue_mask();
    for (Natural i = 0; i < 2 * p_; ++i) prefix_[i + 1] = prefix_[i] + (mask[i % p_] ? 1 : 0);
  }
  Natural count(Natural r, Natural length) const {
    length = std::min(length, p_);
    return prefix_[r + length] - prefix_[r];
  }
  Natural period() const { return p_; }

 private:
  Natural p_;
  std::vector<Natural> prefix_;
};

}  // namespace

// ---- GapFunction -------------------------------------------------------------

struct GapFunction::State {
  Kind kind = Kind::Affine;
  Natural slope = 0;
  std::int64_t intercept = 0;
  std::vector<Natural> values;
  std::string description;
  std::function<Natural(Natural)> fn;
  mutable std::mutex mutex;
  mutable std::unordered_map<Natural, Natural> memo;
};

GapFunction::GapFunction() : GapFunction(affine(0, 0)) {}
GapFunction::GapFunction(std::shared_ptr<State> state) : state_(std::move(state)) {}

GapFunction GapFunction::affine(Natural slope, std::int64_t intercept) {
  if (slope >= kMaxAtomValue) throw InvalidArgument("gap slope exceeds 2^62");
  auto s = std::make_shared<State>();
  s->slope = slope;
  s->intercept = intercept;
  return GapFunction(std::move(s));
}

GapFunction GapFunction::constant(Natural c) {
  if (c >= kMaxAtomValue) throw InvalidArgument("gap constant exceeds 2^62");
  return affine(0, static_cast<std::int64_t>(c));
}

GapFunction GapFunction::table(std::vector<Natural> values, Natural slope, std::int64_t intercept) {
  for (Natural v : values) {
    if (v >= kMaxAtomValue) throw InvalidArgument("gap table value exceeds 2^62");
  }
  auto s = std::make_shared<State>();
  s->kind = Kind::Table;
  s->values = std::move(values);
  s->slope = slope;
  s->intercept = intercept;
  return GapFunction(std::move(s));
}

GapFunction GapFunction::derived(std::string description, std::function<Natural(Natural)> fn) {
  if (!fn) throw InvalidArgument("derived gap function needs a callable");
  auto s = std::make_shared<State>();
  s->kind = Kind::Derived;
  s->description = std::move(description);
  s->fn = std::move(fn);
  return GapFunction(std::move(s));
}

GapFunction::Kind GapFunction::kind() const { return state_->kind; }

Natural GapFunction::operator()(Natural n) const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Affine:
      return affine_value(s.slope, s.intercept, n);
    case Kind::Table:
      if (n < s.values.size()) return s.values[n];
      return affine_value(s.slope, s.intercept, n);
    case Kind::Derived: {
      {
        std::lock_guard lock(s.mutex);
        if (auto it = s.memo.find(n); it != s.memo.end()) return it->second;
      }
      Natural v = s.fn(n);
      std::lock_guard lock(s.mutex);
      s.memo.emplace(n, v);
      return v;
    }
  }
  return 0;
}

std::optional<GapFunction::AffineTail> GapFunction::eventually_affine() const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Affine:
      return AffineTail{0, s.slope, s.intercept};
    case Kind::Table:
      return AffineTail{s.values.size(), s.slope, s.intercept};
    case Kind::Derived:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

std::string affine_text(Natural slope, std::int64_t intercept) {
  if (slope == 0 && intercept >= 0) return "(const " + std::to_string(intercept) + ")";
  return "(affine " + std::to_string(slope) + " " + std::to_string(intercept) + ")";
}

void parse_affine(const SExpr& e, Natural& slope, std::int64_t& intercept) {
  std::string head = e.head();
  if (head == "affine" && e.is_list() && e.size() == 3) {
    slope = e[1].as_natural();
    intercept = e[2].as_integer();
    return;
  }
  if (head == "const" && e.is_list() && e.size() == 2) {
    slope = 0;
    Natural c = e[1].as_natural();
    if (c >= kMaxAtomValue) throw ParseError("gap constant exceeds 2^62");
    intercept = static_cast<std::int64_t>(c);
    return;
  }
  throw ParseError("expected (affine a b) or (const c), got " + e.to_string());
}

}  // namespace

GapFunction GapFunction::from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.size() == 0) throw ParseError("expected a gap function, got " + e.to_string());
  std::vector<SExpr> items = e.items();
  if (items[0].is_atom() && items[0].text() == "gap") {
    items.erase(items.begin());
    if (items.size() == 1 && items[0].is_list()) return from_sexpr(items[0]);
  }
  if (items.empty() || !items[0].is_atom()) throw ParseError("expected a gap function, got " + e.to_string());
  SExpr body = SExpr::list(items);
  const std::string& head = items[0].text();
  try {
    if (head == "affine" || head == "const") {
      Natural slope = 0;
      std::int64_t intercept = 0;
      parse_affine(body, slope, intercept);
      return affine(slope, intercept);
    }
    if (head == "table") {
      if (items.size() != 3 || !items[1].is_list()) throw ParseError("expected (gap table (v...) (affine a b))");
      std::vector<Natural> values;
      for (const SExpr& v : items[1].items()) values.push_back(v.as_natural());
      Natural slope = 0;
      std::int64_t intercept = 0;
      parse_affine(items[2], slope, intercept);
      return table(std::move(values), slope, intercept);
    }
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  throw ParseError("unknown gap function form " + e.to_string());
}

GapFunction GapFunction::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string GapFunction::to_string() const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Affine:
      return "(gap " + affine_text(s.slope, s.intercept).substr(1);
    case Kind::Table: {
      std::string out = "(gap table (";
      for (std::size_t i = 0; i < s.values.size(); ++i) out += (i ? " " : "") + std::to_string(s.values[i]);
      return out + ") " + affine_text(s.slope, s.intercept) + ")";
    }
    case Kind::Derived:
      return "(gap derived \"" + s.description + "\")";
  }
  return "";
}

// ---- IntervalWitness -----------------------------------------------------------

std::string Interval::to_string() const { return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]"; }

struct IntervalWitness::State {
  Kind kind = Kind::Dyadic;
  Natural stride = 1;
  Natural offset = 0;
  Natural length = 1;
  std::vector<Interval> prefix;  // recurrence: explicit prefix
  GapFunction extension;         // recurrence: rule after the prefix
  bool from_gap = false;

  mutable std::mutex mutex;
  mutable std::vector<Interval> cache;  // recurrence: materialized intervals

  // Extends the cache until pred(cache.back()) or size > index; caller holds the lock.
  template <class Pred>
  void materialize(Pred done) const {
    if (cache.empty()) {
      cache = prefix;
      if (cache.empty()) cache.push_back({0, checked_value(extension(0), "interval end")});
    }
    while (!done()) {
      if (cache.size() >= kMaxMaterialized) throw InvalidArgument("interval witness materialization limit reached");
      Natural m = cache.back().hi + 1;
      Natural hi = checked_value(static_cast<__int128>(m) + extension(m), "interval end");
      cache.push_back({m, hi});
    }
  }
};

IntervalWitness::IntervalWitness(std::shared_ptr<State> state) : state_(std::move(state)) {}

IntervalWitness IntervalWitness::dyadic() { return IntervalWitness(std::make_shared<State>()); }

IntervalWitness IntervalWitness::unit() {
  auto s = std::make_shared<State>();
  s->kind = Kind::Unit;
  return IntervalWitness(std::move(s));
}

IntervalWitness IntervalWitness::linear(Natural stride, Natural offset, Natural length) {
  if (length == 0 || length > stride) throw InvalidArgument("linear witness needs 1 <= length <= stride");
  if (stride >= kMaxAtomValue || offset >= kMaxAtomValue) throw InvalidArgument("linear witness exceeds 2^62");
  auto s = std::make_shared<State>();
  s->kind = Kind::Linear;
  s->stride = stride;
  s->offset = offset;
  s->length = length;
  return IntervalWitness(std::move(s));
}

IntervalWitness IntervalWitness::from_gap(GapFunction g) {
  auto s = std::make_shared<State>();
  s->kind = Kind::Recurrence;
  s->extension = std::move(g);
  s->from_gap = true;
  return IntervalWitness(std::move(s));
}

IntervalWitness IntervalWitness::table(std::vector<Interval> prefix, GapFunction extension) {
  if (prefix.empty()) throw InvalidArgument("witness table needs at least one interval");
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i].lo > prefix[i].hi) throw InvalidArgument("interval " + prefix[i].to_string() + " is empty");
    if (prefix[i].hi >= kMaxAtomValue) throw InvalidArgument("interval exceeds 2^62");
    if (i > 0 && prefix[i - 1].hi >= prefix[i].lo) {
      throw InvalidArgument("intervals " + prefix[i - 1].to_string() + " and " + prefix[i].to_string() +
                            " are not strictly separated");
    }
  }
  auto s = std::make_shared<State>();
  s->kind = Kind::Recurrence;
  s->prefix = std::move(prefix);
  s->extension = std::move(extension);
  return IntervalWitness(std::move(s));
}

IntervalWitness IntervalWitness::from_sexpr(const SExpr& e) {
  if (!e.is_list() || e.size() < 2 || e.head() != "witness") {
    throw ParseError("expected (witness ...), got " + e.to_string());
  }
  const std::string kind = e[1].head();
  try {
    if (kind == "dyadic" && e.size() == 2) return dyadic();
    if (kind == "unit" && e.size() == 2) return unit();
    if (kind == "linear" && e.size() == 5) return linear(e[2].as_natural(), e[3].as_natural(), e[4].as_natural());
    if (kind == "gap" && e.size() == 3) return from_gap(GapFunction::from_sexpr(e[2]));
    if (kind == "table") {
      std::vector<Interval> prefix;
      // Default continuation keeps the last interval length.
      std::optional<GapFunction> extension;
      for (std::size_t i = 2; i < e.size(); ++i) {
        const SExpr& item = e[i];
        if (item.is_list() && item.size() == 2 && item.head() == "extend") {
          if (i + 1 != e.size()) throw ParseError("(extend G) must come last in a witness table");
          extension = GapFunction::from_sexpr(item[1]);
          continue;
        }
        if (!item.is_list() || item.size() != 2) throw ParseError("expected (lo hi), got " + item.to_string());
        prefix.push_back({item[0].as_natural(), item[1].as_natural()});
      }
      if (prefix.empty()) throw ParseError("witness table needs at least one interval");
      if (!extension) extension = GapFunction::constant(prefix.back().hi - prefix.back().lo);
      return table(std::move(prefix), *extension);
    }
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  throw ParseError("unknown witness form " + e.to_string());
}

IntervalWitness IntervalWitness::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

std::string IntervalWitness::to_string() const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Dyadic:
      return "(witness dyadic)";
    case Kind::Unit:
      return "(witness unit)";
    case Kind::Linear:
      return "(witness linear " + std::to_string(s.stride) + " " + std::to_string(s.offset) + " " +
             std::to_string(s.length) + ")";
    case Kind::Recurrence: {
      if (s.from_gap) return "(witness gap " + s.extension.to_string() + ")";
      std::string out = "(witness table";
      for (const Interval& i : s.prefix) out += " (" + std::to_string(i.lo) + " " + std::to_string(i.hi) + ")";
      return out + " (extend " + s.extension.to_string() + "))";
    }
  }
  return "";
}

IntervalWitness::Kind IntervalWitness::kind() const { return state_->kind; }

Interval IntervalWitness::at(Natural k) const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Dyadic:
      if (k >= 62) throw InvalidArgument("dyadic interval index exceeds 61");
      return {Natural{1} << k, (Natural{2} << k) - 1};
    case Kind::Unit:
      if (k >= kMaxAtomValue) throw InvalidArgument("interval exceeds 2^62");
      return {k, k};
    case Kind::Linear: {
      Natural lo = checked_value(static_cast<__int128>(s.stride) * k + s.offset, "interval start");
      return {lo, checked_value(static_cast<__int128>(lo) + s.length - 1, "interval end")};
    }
    case Kind::Recurrence: {
      std::lock_guard lock(s.mutex);
      s.materialize([&] { return s.cache.size() > k; });
      return s.cache[k];
    }
  }
  return {};
}

std::vector<Interval> IntervalWitness::prefix(Natural count) const {
  std::vector<Interval> out;
  out.reserve(count);
  for (Natural k = 0; k < count; ++k) out.push_back(at(k));
  return out;
}

std::vector<Interval> IntervalWitness::up_to(Natural horizon) const {
  std::vector<Interval> out;
  for (Natural k = 0;; ++k) {
    if (state_->kind == Kind::Dyadic && k >= 62) break;
    Interval i = at(k);
    if (i.hi > horizon) break;
    out.push_back(i);
  }
  return out;
}

Natural IntervalWitness::first_index_at_or_after(Natural n) const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Dyadic:
      return n <= 1 ? 0 : static_cast<Natural>(std::bit_width(n - 1));
    case Kind::Unit:
      return n;
    case Kind::Linear:
      return n <= s.offset ? 0 : ceil_div(n - s.offset, s.stride);
    case Kind::Recurrence: {
      std::lock_guard lock(s.mutex);
      s.materialize([&] { return s.cache.back().lo >= n; });
      auto it = std::lower_bound(s.cache.begin(), s.cache.end(), n,
                                 [](const Interval& i, Natural v) { return i.lo < v; });
      return static_cast<Natural>(it - s.cache.begin());
    }
  }
  return 0;
}

std::optional<Natural> IntervalWitness::index_containing(Natural n) const {
  const State& s = *state_;
  switch (s.kind) {
    case Kind::Dyadic:
      if (n == 0) return std::nullopt;
      return static_cast<Natural>(std::bit_width(n) - 1);
    case Kind::Unit:
      return n;
    case Kind::Linear:
      if (n < s.offset || (n - s.offset) % s.stride >= s.length) return std::nullopt;
      return (n - s.offset) / s.stride;
    case Kind::Recurrence: {
      std::lock_guard lock(s.mutex);
      s.materialize([&] { return s.cache.back().hi >= n; });
      auto it = std::lower_bound(s.cache.begin(), s.cache.end(), n,
                                 [](const Interval& i, Natural v) { return i.hi < v; });
      if (it == s.cache.end() || it->lo > n) return std::nullopt;
      return static_cast<Natural>(it - s.cache.begin());
    }
  }
  return std::nullopt;
}

std::optional<IntervalWitness::ModularOrbit> IntervalWitness::modular_orbit(Natural p, Natural t) const {
  if (p == 0) throw InvalidArgument("period must be >= 1");
  const State& s = *state_;
  ModularOrbit orbit;
  switch (s.kind) {
    case Kind::Unit:
      orbit.start_index = t;
      orbit.start_residue = t % p;
      orbit.window = 1;
      orbit.step = [p](Natural r) { return (r + 1) % p; };
      return orbit;
    case Kind::Linear: {
      Natural k = first_index_at_or_after(t);
      orbit.start_index = k;
      orbit.start_residue = mod(static_cast<__int128>(s.stride) * k + s.offset, p);
      orbit.window = std::min(s.length, p);
      Natural stride = s.stride % p;
      orbit.step = [p, stride](Natural r) { return (r + stride) % p; };
      return orbit;
    }
    case Kind::Dyadic: {
      Natural k = first_index_at_or_after(std::max(t, p));
      orbit.start_index = k;
      orbit.start_residue = modpow2(k, p);
      orbit.window = p;  // |I_k| = 2^k >= p from here on
      orbit.step = [p](Natural r) { return static_cast<Natural>(static_cast<unsigned __int128>(r) * 2 % p); };
      return orbit;
    }
    case Kind::Recurrence: {
      auto tail = s.extension.eventually_affine();
      if (!tail) return std::nullopt;
      const Natural a = tail->slope;
      const std::int64_t b = tail->intercept;
      // From the first index whose interval is produced by the rule in its
      // unclipped regime, lo_{k+1} = (a + 1) lo_k + b + 1.
      Natural bound = std::max(t, tail->from);
      Natural len = 0;
      if (a > 0) {
        if (b < 0) bound = std::max(bound, ceil_div(static_cast<Natural>(-b), a));
        __int128 need = static_cast<__int128>(p) - 1 - b;  // a * lo + b + 1 >= p
        if (need > 0) bound = std::max(bound, ceil_div(static_cast<Natural>(need), a));
        len = p;
      } else {
        len = std::min<Natural>(static_cast<Natural>(std::max<std::int64_t>(b, 0)) + 1, p);
      }
      const Natural first_rule_index = s.prefix.size();
      Natural k = 0;
      {
        std::lock_guard lock(s.mutex);
        s.materialize([&] {
          Natural last = s.cache.size() - 1;
          return last >= first_rule_index && s.cache.back().lo >= bound;
        });
        k = s.cache.size() - 1;
        orbit.start_residue = s.cache[k].lo % p;
      }
      orbit.start_index = k;
      orbit.window = len;
      if (a == 0) {
        Natural shift = (static_cast<Natural>(std::max<std::int64_t>(b, 0)) + 1) % p;
        orbit.step = [p, shift](Natural r) { return (r + shift) % p; };
      } else {
        orbit.step = [p, a, b](Natural r) {
          return mod(static_cast<__int128>(a + 1) * r + static_cast<__int128>(b) + 1, p);
        };
      }
      return orbit;
    }
  }
  return std::nullopt;
}

nlohmann::json InfinitudeCertificate::to_json() const {
  return {{"certified", certified},
          {"contained_infinitely_often", contained_infinitely_often},
          {"meets_infinitely_often", meets_infinitely_often}};
}

InfinitudeCertificate certify_infinitude(const IntervalWitness& w, const CanonicalSet& s) {
  InfinitudeCertificate cert;
  std::optional<IntervalWitness::ModularOrbit> orbit;
  try {
    orbit = w.modular_orbit(s.period(), s.threshold());
  } catch (const InvalidArgument&) {
    return cert;
  }
  if (!orbit) return cert;
  const Natural p = s.period();
  ResidueWindows windows(s);
  // The state sequence r_k = min I_k mod p is deterministic on p states, so
  // it is eventually periodic; only states on the cycle recur.
  std::vector<std::int64_t> seen(p, -1);
  std::vector<Natural> states;
  Natural r = orbit->start_residue;
  while (seen[r] < 0) {
    seen[r] = static_cast<std::int64_t>(states.size());
    states.push_back(r);
    r = orbit->step(r);
  }
  for (std::size_t i = static_cast<std::size_t>(seen[r]); i < states.size(); ++i) {
    Natural c = windows.count(states[i], orbit->window);
    if (c == std::min(orbit->window, p)) cert.contained_infinitely_often = true;
    if (c > 0) cert.meets_infinitely_often = true;
  }
  cert.certified = true;
  return cert;
}

IntervalWitness gap_to_intervals(const GapFunction& g) { return IntervalWitness::from_gap(g); }

GapFunction intervals_to_gap(const IntervalWitness& w) {
  if (w.kind() == IntervalWitness::Kind::Unit) return GapFunction::affine(1, 0);
  return GapFunction::derived("max I_k for the least k with min I_k >= n, " + w.to_string(),
                              [w](Natural n) { return w.at(w.first_index_at_or_after(n)).hi; });
}

// ---- window condition -------------------------------------------------------------

std::string to_string(ConditionCheckResult::Outcome o) {
  switch (o) {
    case ConditionCheckResult::Outcome::Holds:
      return "holds";
    case ConditionCheckResult::Outcome::FailsAtHorizon:
      return "fails-at-horizon";
    case ConditionCheckResult::Outcome::Inconclusive:
      return "inconclusive";
  }
  return "";
}

nlohmann::json ConditionCheckResult::to_json() const {
  nlohmann::json j;
  j["outcome"] = maldist::to_string(outcome);
  if (outcome == Outcome::Holds) j["threshold"] = threshold;
  j["witnesses"] = witnesses;
  j["failure_count"] = failure_count;
  j["horizon"] = horizon;
  j["max_gap"] = max_gap;
  j["fails_infinitely_often"] = fails_infinitely_often ? nlohmann::json(*fails_infinitely_often) : nlohmann::json();
  return j;
}

namespace {

// Decides whether [n, n + g(n)] misses a for infinitely many n, using the
// eventual affine form of g and the periodic structure of a.
std::optional<bool> windows_fail_infinitely_often(const GapFunction& g, const CanonicalSet& a) {
  auto tail = g.eventually_affine();
  if (!tail) return std::nullopt;
  const Natural p = a.period();
  Natural len = 0;
  if (tail->slope > 0) {
    len = p;  // windows eventually cover a full period
  } else {
    len = std::min<Natural>(static_cast<Natural>(std::max<std::int64_t>(tail->intercept, 0)) + 1, p);
  }
  ResidueWindows windows(a);
  // Every residue class of n occurs beyond the regime start.
  for (Natural r = 0; r < p; ++r) {
    if (windows.count(r, len) == 0) return true;
  }
  return false;
}

}  // namespace

ConditionCheckResult check_condition2(const GapFunction& g, const SetExpr& a, Natural horizon) {
  const CanonicalSet& c = a.canonical();
  ConditionCheckResult out;
  out.horizon = horizon;
  std::vector<Natural> failures;
  for (Natural n = 0; n <= horizon; ++n) {
    Natural gn = g(n);
    out.max_gap = std::max(out.max_gap, gn);
    Natural end = static_cast<Natural>(std::min<unsigned __int128>(static_cast<unsigned __int128>(n) + gn,
                                                                   kMaxAtomValue));
    if (c.count_in(n, end) == 0) failures.push_back(n);
  }
  out.fails_infinitely_often = windows_fail_infinitely_often(g, c);

  // Positions whose windows reach the last max-gap stretch are not claimed as failures.
  const bool has_cutoff = out.max_gap <= horizon;
  const Natural cutoff = has_cutoff ? horizon - out.max_gap : 0;
  auto record_failures = [&](bool all) {
    for (Natural n : failures) {
      if (!all && (!has_cutoff || n > cutoff)) break;
      ++out.failure_count;
      if (out.witnesses.size() < ConditionCheckResult::kMaxWitnesses) out.witnesses.push_back(n);
    }
  };

  if (failures.empty()) {
    out.outcome = ConditionCheckResult::Outcome::Holds;
    out.threshold = 0;
    return out;
  }
  const Natural last = failures.back();
  if (out.fails_infinitely_often == false) {
    record_failures(true);
    out.outcome = ConditionCheckResult::Outcome::Holds;
    out.threshold = last + 1;
    return out;
  }
  if (out.fails_infinitely_often == true) {
    record_failures(false);
    out.outcome = out.failure_count > 0 ? ConditionCheckResult::Outcome::FailsAtHorizon
                                        : ConditionCheckResult::Outcome::Inconclusive;
    return out;
  }
  if (has_cutoff && last < cutoff) {
    record_failures(true);
    out.outcome = ConditionCheckResult::Outcome::Holds;
    out.threshold = last + 1;
    return out;
  }
  record_failures(false);
  out.outcome = out.failure_count > 0 ? ConditionCheckResult::Outcome::FailsAtHorizon
                                      : ConditionCheckResult::Outcome::Inconclusive;
  return out;
}

// ---- submeasure-derived gaps ---------------------------------------------------

GapFunction gap_from_lscsm(const Lscsm& phi, const Rational& alpha, Natural search_cap) {
  if (alpha <= 0 || alpha >= 1) throw InvalidArgument("alpha must lie in (0, 1)");
  auto norm = exact_mass(phi, full_set());
  if (!norm || *norm != Extended(Rational(1))) {
    throw HypothesisNotCertified("||omega||_phi = 1 is not certified for " + phi.to_string());
  }
  const Extended target(Rational(1) - alpha / 4);
  auto reaches = [phi, target](Natural n, Natural k) {
    return eval_window(phi, full_set(), n, n + k) >= target;
  };
  auto fn = [reaches, search_cap](Natural n) -> Natural {
    if (reaches(n, 0)) return 0;
    // Window mass is monotone in k: gallop, then bisect on (lo, hi].
    Natural lo = 0;
    Natural hi = 1;
    while (hi < search_cap && !reaches(n, hi)) {
      lo = hi;
      hi = std::min(hi * 2, search_cap);
    }
    if (!reaches(n, hi)) throw NoFiniteWitness(n);
    while (hi - lo > 1) {
      Natural mid = lo + (hi - lo) / 2;
      if (reaches(n, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  };
  std::string description = "least k with phi([n,n+k]) >= " + maldist::to_string(target.value()) +
                            " for phi = " + phi.to_string();
  return GapFunction::derived(std::move(description), fn);
}

nlohmann::json LscsmVerification::to_json() const {
  nlohmann::json j;
  j["phi"] = phi;
  j["alpha"] = maldist::to_string(alpha);
  j["set"] = set;
  j["horizon"] = horizon;
  j["complement_mass"] = complement_mass.to_string();
  j["n_a"] = n_a;
  j["windows_checked"] = windows_checked;
  j["min_window_mass"] = min_window_mass.to_string();
  j["min_window_at"] = min_window_at;
  j["required"] = maldist::to_string(required);
  j["failures"] = failures;
  j["max_gap"] = max_gap;
  j["ok"] = ok();
  return j;
}

LscsmVerification verify_prop_lscsm(const Lscsm& phi, const Rational& alpha, const SetExpr& a, Natural horizon) {
  if (alpha <= 0 || alpha >= 1) throw InvalidArgument("alpha must lie in (0, 1)");
  LscsmVerification out;
  out.phi = phi.to_string();
  out.alpha = alpha;
  out.set = a.to_string();
  out.horizon = horizon;
  out.required = alpha / 4;

  const CanonicalSet& c = a.canonical();
  const CanonicalSet rest = c.complement();
  auto mass = exact_mass(phi, rest);
  if (!mass) throw HypothesisNotCertified("mass of the complement is not certified for " + phi.to_string());
  if (*mass > Extended(Rational(1) - alpha)) {
    throw HypothesisNotCertified("mass of the complement is " + mass->to_string() + " > 1 - alpha");
  }
  out.complement_mass = *mass;

  const Extended tail_bound(Rational(1) - alpha / 2);
  std::optional<Natural> n_a;
  for (Natural n = 0; n <= horizon; ++n) {
    auto tail = eval_tail(phi, rest, n);
    if (!tail) throw HypothesisNotCertified("tail mass of the complement is not certified");
    if (*tail <= tail_bound) {
      n_a = n;
      break;
    }
  }
  if (!n_a) throw HypothesisNotCertified("no threshold n_A within the horizon");
  out.n_a = *n_a;

  GapFunction g = gap_from_lscsm(phi, alpha);
  bool first = true;
  for (Natural n = *n_a; n <= horizon; ++n) {
    Natural gn = g(n);
    out.max_gap = std::max(out.max_gap, gn);
    Extended m = eval_window(phi, c, n, n + gn);
    ++out.windows_checked;
    if (first || m < out.min_window_mass) {
      out.min_window_mass = m;
      out.min_window_at = n;
      first = false;
    }
    if (m < Extended(out.required)) out.failures.push_back(n);
  }
  return out;
}

}  // namespace maldist
