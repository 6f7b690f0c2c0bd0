#include "maldist/omega_set.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

#include "maldist/errors.hpp"

namespace maldist {

namespace {

using u128 = unsigned __int128;

std::vector<Run> merge_runs(std::vector<Run> runs) {
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.lo < b.lo; });
  std::vector<Run> out;
  for (const Run& r : runs) {
    if (r.lo > r.hi) throw InvalidArgument("run with lo > hi");
    if (!out.empty() && r.lo <= out.back().hi + 1) {
      out.back().hi = std::max(out.back().hi, r.hi);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

void check_atom(Natural v) {
  if (v >= kMaxAtomValue) throw InvalidArgument("atom value exceeds 2^62: " + std::to_string(v));
}

Natural checked_lcm(Natural a, Natural b) {
  Natural l = std::lcm(a, b);
  if (l > kMaxPeriod) throw InvalidArgument("combined period exceeds 2^22");
  return l;
}

// Pointwise combination of two run lists on [0, limit).
template <typename Op>
std::vector<Run> combine_runs(const std::vector<Run>& a, const std::vector<Run>& b, Natural limit, Op op) {
  std::vector<Natural> cuts{0, limit};
  for (const auto* rs : {&a, &b}) {
    for (const Run& r : *rs) {
      cuts.push_back(r.lo);
      cuts.push_back(r.hi + 1);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Run> out;
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i + 1 < cuts.size() && cuts[i] < limit; ++i) {
    Natural lo = cuts[i];
    Natural hi = std::min(cuts[i + 1], limit) - 1;
    while (ia < a.size() && a[ia].hi < lo) ++ia;
    while (ib < b.size() && b[ib].hi < lo) ++ib;
    bool in_a = ia < a.size() && a[ia].lo <= lo;
    bool in_b = ib < b.size() && b[ib].lo <= lo;
    if (op(in_a, in_b)) {
      if (!out.empty() && out.back().hi + 1 == lo) {
        out.back().hi = hi;
      } else {
        out.push_back({lo, hi});
      }
    }
  }
  return out;
}

template <typename Op>
CanonicalSet combine(const CanonicalSet& a, const CanonicalSet& b, Op op) {
  Natural t = std::max(a.threshold(), b.threshold());
  Natural p = checked_lcm(a.period(), b.period());
  std::vector<bool> res(p);
  for (Natural r = 0; r < p; ++r) {
    res[r] = op(a.residue_mask()[r % a.period()], b.residue_mask()[r % b.period()]);
  }
  std::vector<Run> runs;
  if (t > 0) runs = combine_runs(a.runs_in(0, t - 1), b.runs_in(0, t - 1), t, op);
  return CanonicalSet(t, p, std::move(res), std::move(runs));
}

}  // namespace

CanonicalSet::CanonicalSet() : CanonicalSet(0, 1, {false}, {}) {}

CanonicalSet::CanonicalSet(Natural threshold, Natural period, std::vector<bool> residues, std::vector<Run> exceptional)
    : threshold_(threshold), period_(period), residues_(std::move(residues)) {
  if (period_ == 0) throw InvalidArgument("period must be >= 1");
  if (period_ > kMaxPeriod) throw InvalidArgument("period exceeds 2^22");
  if (residues_.size() != period_) throw InvalidArgument("residue mask size must equal the period");
  check_atom(threshold_);
  exceptional_ = merge_runs(std::move(exceptional));
  if (!exceptional_.empty() && exceptional_.back().hi >= threshold_) {
    throw InvalidArgument("exceptional runs must lie below the threshold");
  }
  run_prefix_.assign(exceptional_.size() + 1, 0);
  for (std::size_t i = 0; i < exceptional_.size(); ++i) {
    run_prefix_[i + 1] = run_prefix_[i] + (exceptional_[i].hi - exceptional_[i].lo + 1);
  }
  residue_prefix_.assign(period_ + 1, 0);
  for (Natural r = 0; r < period_; ++r) residue_prefix_[r + 1] = residue_prefix_[r] + (residues_[r] ? 1 : 0);
  residue_count_ = residue_prefix_[period_];

  next_offset_.assign(period_, period_);
  run_length_.assign(period_, 0);
  if (residue_count_ > 0) {
    // Two backward passes over the doubled cycle settle both tables.
    Natural next = period_;
    Natural len = 0;
    for (Natural step = 2 * period_; step-- > 0;) {
      Natural r = step % period_;
      if (residues_[r]) {
        next = 0;
        len = std::min(len + 1, period_);
      } else {
        if (next < period_) ++next;
        len = 0;
      }
      if (step < period_) {
        next_offset_[r] = next;
        run_length_[r] = len;
      }
    }
  }
}

std::vector<Natural> CanonicalSet::residues() const {
  std::vector<Natural> out;
  for (Natural r = 0; r < period_; ++r) {
    if (residues_[r]) out.push_back(r);
  }
  return out;
}

std::vector<Natural> CanonicalSet::exceptional_members() const {
  std::vector<Natural> out;
  for (const Run& r : exceptional_) {
    for (Natural n = r.lo; n <= r.hi; ++n) out.push_back(n);
  }
  return out;
}

bool CanonicalSet::contains(Natural n) const {
  if (n >= threshold_) return periodic_member(n);
  auto it = std::upper_bound(exceptional_.begin(), exceptional_.end(), n,
                             [](Natural v, const Run& r) { return v < r.lo; });
  if (it == exceptional_.begin()) return false;
  return std::prev(it)->hi >= n;
}

Natural CanonicalSet::periodic_count_upto(Natural n) const {
  u128 len = u128(n) + 1;
  u128 full = len / period_;
  return static_cast<Natural>(full * residue_count_ + residue_prefix_[static_cast<Natural>(len % period_)]);
}

Natural CanonicalSet::count_upto(Natural n) const {
  if (n < threshold_) {
    auto it = std::upper_bound(exceptional_.begin(), exceptional_.end(), n,
                               [](Natural v, const Run& r) { return v < r.lo; });
    std::size_t idx = static_cast<std::size_t>(it - exceptional_.begin());
    if (idx == 0) return 0;
    const Run& r = exceptional_[idx - 1];
    return run_prefix_[idx - 1] + (std::min(r.hi, n) - r.lo + 1);
  }
  Natural below = threshold_ == 0 ? 0 : periodic_count_upto(threshold_ - 1);
  return run_prefix_.back() + (periodic_count_upto(n) - below);
}

Natural CanonicalSet::count_in(Natural lo, Natural hi) const {
  if (lo > hi) return 0;
  Natural upto_hi = count_upto(hi);
  return lo == 0 ? upto_hi : upto_hi - count_upto(lo - 1);
}

std::optional<Natural> CanonicalSet::next_member(Natural from) const {
  if (from < threshold_) {
    auto it = std::lower_bound(exceptional_.begin(), exceptional_.end(), from,
                               [](const Run& r, Natural v) { return r.hi < v; });
    if (it != exceptional_.end()) return std::max(it->lo, from);
    from = threshold_;
  }
  if (residue_count_ == 0) return std::nullopt;
  Natural off = next_offset_[from % period_];
  if (from > ~Natural{0} - off) return std::nullopt;
  return from + off;
}

std::optional<Natural> CanonicalSet::max_member() const {
  if (!is_finite() || exceptional_.empty()) return std::nullopt;
  return exceptional_.back().hi;
}

Rational CanonicalSet::density() const {
  Rational q(to_integer(residue_count_), to_integer(period_));
  q.canonicalize();
  return q;
}

std::vector<Run> CanonicalSet::runs_in(Natural lo, Natural hi) const {
  std::vector<Run> out;
  if (lo > hi) return out;
  for (const Run& r : exceptional_) {
    if (r.hi < lo) continue;
    if (r.lo > hi) break;
    out.push_back({std::max(r.lo, lo), std::min(r.hi, hi)});
  }
  if (hi < threshold_ || residue_count_ == 0) return out;
  Natural cur = std::max(lo, threshold_);
  while (cur <= hi) {
    auto m = next_member(cur);
    if (!m || *m > hi) break;
    Natural len = run_length_[*m % period_];
    Natural end = (len >= period_) ? hi : std::min(hi, *m + len - 1);
    if (!out.empty() && out.back().hi + 1 == *m) {
      out.back().hi = end;
    } else {
      out.push_back({*m, end});
    }
    if (end == hi) break;
    cur = end + 1;
  }
  return out;
}

std::vector<Natural> CanonicalSet::members_upto(Natural n) const {
  std::vector<Natural> out;
  for (const Run& r : runs_in(0, n)) {
    for (Natural m = r.lo;; ++m) {
      out.push_back(m);
      if (m == r.hi) break;
    }
  }
  return out;
}

CanonicalSet CanonicalSet::reduced() const {
  Natural q = period_;
  for (Natural d = 1; d < period_; ++d) {
    if (period_ % d != 0) continue;
    bool ok = true;
    for (Natural r = d; r < period_ && ok; ++r) ok = residues_[r] == residues_[r % d];
    if (ok) {
      q = d;
      break;
    }
  }
  std::vector<bool> res(residues_.begin(), residues_.begin() + static_cast<std::ptrdiff_t>(q));
  Natural t = threshold_;
  while (t > 0 && contains(t - 1) == res[(t - 1) % q]) --t;
  std::vector<Run> runs;
  for (const Run& r : exceptional_) {
    if (r.lo >= t) break;
    runs.push_back({r.lo, std::min(r.hi, t - 1)});
  }
  return CanonicalSet(t, q, std::move(res), std::move(runs));
}

CanonicalSet CanonicalSet::complement() const {
  std::vector<bool> res(period_);
  for (Natural r = 0; r < period_; ++r) res[r] = !residues_[r];
  std::vector<Run> runs;
  Natural cur = 0;
  for (const Run& r : exceptional_) {
    if (r.lo > cur) runs.push_back({cur, r.lo - 1});
    cur = r.hi + 1;
  }
  if (cur < threshold_) runs.push_back({cur, threshold_ - 1});
  return CanonicalSet(threshold_, period_, std::move(res), std::move(runs));
}

bool equivalent(const CanonicalSet& a, const CanonicalSet& b) { return a.reduced() == b.reduced(); }

CanonicalSet set_union(const CanonicalSet& a, const CanonicalSet& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}
CanonicalSet set_intersection(const CanonicalSet& a, const CanonicalSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}
CanonicalSet set_xor(const CanonicalSet& a, const CanonicalSet& b) {
  return combine(a, b, [](bool x, bool y) { return x != y; });
}
CanonicalSet set_difference(const CanonicalSet& a, const CanonicalSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; });
}

// ---------------------------------------------------------------------------

struct SetExpr::Node {
  Kind kind = Kind::Empty;
  std::vector<Natural> values;
  std::vector<SetExpr> children;
  std::shared_ptr<const CanonicalSet> periodic;

  mutable std::once_flag once;
  mutable std::optional<CanonicalSet> cache;
};

namespace {

std::shared_ptr<SetExpr::Node> make_node(SetExpr::Kind kind) {
  auto n = std::make_shared<SetExpr::Node>();
  n->kind = kind;
  return n;
}

std::vector<Natural> sorted_unique(std::vector<Natural> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (Natural x : v) check_atom(x);
  return v;
}

CanonicalSet finite_canonical(const std::vector<Natural>& members) {
  std::vector<Run> runs;
  for (Natural m : members) runs.push_back({m, m});
  Natural t = members.empty() ? 0 : members.back() + 1;
  return CanonicalSet(t, 1, {false}, std::move(runs));
}

}  // namespace

SetExpr::SetExpr() : SetExpr(empty()) {}
SetExpr::SetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

SetExpr SetExpr::empty() { return SetExpr(make_node(Kind::Empty)); }
SetExpr SetExpr::full() { return SetExpr(make_node(Kind::Full)); }

SetExpr SetExpr::finite(std::vector<Natural> members) {
  auto n = make_node(Kind::Finite);
  n->values = sorted_unique(std::move(members));
  return SetExpr(n);
}

SetExpr SetExpr::interval(Natural a, Natural b) {
  if (a > b) throw InvalidArgument("interval requires a <= b");
  check_atom(b);
  auto n = make_node(Kind::Interval);
  n->values = {a, b};
  return SetExpr(n);
}

SetExpr SetExpr::progression(Natural offset, Natural period) {
  if (period == 0) throw InvalidArgument("progression period must be >= 1");
  if (period > kMaxPeriod) throw InvalidArgument("progression period exceeds 2^22");
  check_atom(offset);
  auto n = make_node(Kind::Progression);
  n->values = {offset, period};
  return SetExpr(n);
}

SetExpr SetExpr::tail(Natural a) {
  check_atom(a);
  auto n = make_node(Kind::Tail);
  n->values = {a};
  return SetExpr(n);
}

SetExpr SetExpr::unite(std::vector<SetExpr> parts) {
  if (parts.empty()) throw InvalidArgument("union needs at least one operand");
  auto n = make_node(Kind::Union);
  n->children = std::move(parts);
  return SetExpr(n);
}

SetExpr SetExpr::intersect(std::vector<SetExpr> parts) {
  if (parts.empty()) throw InvalidArgument("intersection needs at least one operand");
  auto n = make_node(Kind::Intersection);
  n->children = std::move(parts);
  return SetExpr(n);
}

SetExpr SetExpr::complement(SetExpr s) {
  auto n = make_node(Kind::Complement);
  n->children = {std::move(s)};
  return SetExpr(n);
}

SetExpr SetExpr::edit(SetExpr s, std::vector<Natural> toggled) {
  auto n = make_node(Kind::Edit);
  n->children = {std::move(s)};
  n->values = sorted_unique(std::move(toggled));
  return SetExpr(n);
}

SetExpr SetExpr::from_canonical(CanonicalSet c) {
  auto n = make_node(Kind::Periodic);
  n->periodic = std::make_shared<const CanonicalSet>(std::move(c));
  return SetExpr(n);
}

SetExpr::Kind SetExpr::kind() const { return node_->kind; }

bool SetExpr::contains(Natural x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Empty:
      return false;
    case Kind::Full:
      return true;
    case Kind::Finite:
      return std::binary_search(n.values.begin(), n.values.end(), x);
    case Kind::Interval:
      return n.values[0] <= x && x <= n.values[1];
    case Kind::Progression:
      return x >= n.values[0] && (x - n.values[0]) % n.values[1] == 0;
    case Kind::Tail:
      return x >= n.values[0];
    case Kind::Union:
      return std::any_of(n.children.begin(), n.children.end(), [x](const SetExpr& c) { return c.contains(x); });
    case Kind::Intersection:
      return std::all_of(n.children.begin(), n.children.end(), [x](const SetExpr& c) { return c.contains(x); });
    case Kind::Complement:
      return !n.children[0].contains(x);
    case Kind::Edit:
      return n.children[0].contains(x) != std::binary_search(n.values.begin(), n.values.end(), x);
    case Kind::Periodic:
      return n.periodic->contains(x);
  }
  return false;
}

const CanonicalSet& SetExpr::canonical() const {
  const Node& n = *node_;
  std::call_once(n.once, [&n] {
    switch (n.kind) {
      case Kind::Empty:
        n.cache = CanonicalSet();
        break;
      case Kind::Full:
        n.cache = CanonicalSet(0, 1, {true}, {});
        break;
      case Kind::Finite:
        n.cache = finite_canonical(n.values);
        break;
      case Kind::Interval:
        n.cache = CanonicalSet(n.values[1] + 1, 1, {false}, {{n.values[0], n.values[1]}});
        break;
      case Kind::Progression: {
        std::vector<bool> res(n.values[1], false);
        res[n.values[0] % n.values[1]] = true;
        n.cache = CanonicalSet(n.values[0], n.values[1], std::move(res), {});
        break;
      }
      case Kind::Tail:
        n.cache = CanonicalSet(n.values[0], 1, {true}, {});
        break;
      case Kind::Union: {
        CanonicalSet acc = n.children[0].canonical();
        for (std::size_t i = 1; i < n.children.size(); ++i) acc = set_union(acc, n.children[i].canonical());
        n.cache = std::move(acc);
        break;
      }
      case Kind::Intersection: {
        CanonicalSet acc = n.children[0].canonical();
        for (std::size_t i = 1; i < n.children.size(); ++i) acc = set_intersection(acc, n.children[i].canonical());
        n.cache = std::move(acc);
        break;
      }
      case Kind::Complement:
        n.cache = n.children[0].canonical().complement();
        break;
      case Kind::Edit:
        n.cache = set_xor(n.children[0].canonical(), finite_canonical(n.values));
        break;
      case Kind::Periodic:
        n.cache = *n.periodic;
        break;
    }
  });
  return *n.cache;
}

SExpr SetExpr::to_sexpr() const {
  const Node& n = *node_;
  auto atom = [](Natural v) { return SExpr::atom(std::to_string(v)); };
  auto sym = [](const char* s) { return SExpr::atom(s); };
  std::vector<SExpr> items;
  switch (n.kind) {
    case Kind::Empty:
      items = {sym("empty")};
      break;
    case Kind::Full:
      items = {sym("full")};
      break;
    case Kind::Finite:
      items = {sym("fin")};
      for (Natural v : n.values) items.push_back(atom(v));
      break;
    case Kind::Interval:
      items = {sym("iv"), atom(n.values[0]), atom(n.values[1])};
      break;
    case Kind::Progression:
      items = {sym("ap"), atom(n.values[0]), atom(n.values[1])};
      break;
    case Kind::Tail:
      items = {sym("tail"), atom(n.values[0])};
      break;
    case Kind::Union:
    case Kind::Intersection:
      items = {sym(n.kind == Kind::Union ? "union" : "inter")};
      for (const SetExpr& c : n.children) items.push_back(c.to_sexpr());
      break;
    case Kind::Complement:
      items = {sym("not"), n.children[0].to_sexpr()};
      break;
    case Kind::Edit:
      items = {sym("edit"), n.children[0].to_sexpr()};
      for (Natural v : n.values) items.push_back(atom(v));
      break;
    case Kind::Periodic: {
      const CanonicalSet& c = *n.periodic;
      std::vector<SExpr> res;
      for (Natural r : c.residues()) res.push_back(atom(r));
      std::vector<SExpr> runs;
      for (const Run& r : c.exceptional()) runs.push_back(SExpr::list({atom(r.lo), atom(r.hi)}));
      items = {sym("periodic"), atom(c.threshold()), atom(c.period()), SExpr::list(std::move(res)),
               SExpr::list(std::move(runs))};
      break;
    }
  }
  return SExpr::list(std::move(items));
}

std::string SetExpr::to_string() const { return to_sexpr().to_string(); }

SetExpr SetExpr::from_sexpr(const SExpr& e) {
  std::string head = e.head();
  auto naturals_from = [&e](std::size_t start) {
    std::vector<Natural> out;
    for (std::size_t i = start; i < e.size(); ++i) out.push_back(e[i].as_natural());
    return out;
  };
  auto expect_size = [&e](std::size_t n) {
    if (e.size() != n) throw ParseError("wrong arity in " + e.to_string());
  };
  auto children_from = [&e](std::size_t start) {
    std::vector<SetExpr> out;
    for (std::size_t i = start; i < e.size(); ++i) out.push_back(from_sexpr(e[i]));
    return out;
  };
  if (e.is_atom()) {
    if (head == "empty") return empty();
    if (head == "full") return full();
    throw ParseError("unknown set atom '" + head + "'");
  }
  if (head == "empty") return expect_size(1), empty();
  if (head == "full") return expect_size(1), full();
  if (head == "fin") return finite(naturals_from(1));
  if (head == "iv") {
    expect_size(3);
    return interval(e[1].as_natural(), e[2].as_natural());
  }
  if (head == "ap") {
    expect_size(3);
    return progression(e[1].as_natural(), e[2].as_natural());
  }
  if (head == "tail") {
    expect_size(2);
    return tail(e[1].as_natural());
  }
  if (head == "union") return unite(children_from(1));
  if (head == "inter" || head == "intersection") return intersect(children_from(1));
  if (head == "not" || head == "complement") {
    expect_size(2);
    return complement(from_sexpr(e[1]));
  }
  if (head == "edit") {
    if (e.size() < 2) throw ParseError("edit needs a set operand");
    return edit(from_sexpr(e[1]), naturals_from(2));
  }
  if (head == "periodic") {
    expect_size(5);
    Natural t = e[1].as_natural();
    Natural p = e[2].as_natural();
    if (p == 0 || p > kMaxPeriod) throw ParseError("bad period in " + e.to_string());
    std::vector<bool> res(p, false);
    for (const SExpr& r : e[3].items()) {
      Natural v = r.as_natural();
      if (v >= p) throw ParseError("residue out of range in " + e.to_string());
      res[v] = true;
    }
    std::vector<Run> runs;
    for (const SExpr& r : e[4].items()) {
      if (r.size() != 2) throw ParseError("run must be (lo hi) in " + e.to_string());
      runs.push_back({r[0].as_natural(), r[1].as_natural()});
    }
    try {
      return from_canonical(CanonicalSet(t, p, std::move(res), std::move(runs)));
    } catch (const InvalidArgument& ex) {
      throw ParseError(ex.what());
    }
  }
  throw ParseError("unknown set form '" + head + "' in " + e.to_string());
}

SetExpr SetExpr::parse(std::string_view text) {
  try {
    return from_sexpr(parse_sexpr(text));
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
}

bool member(const SetExpr& s, Natural n) { return s.contains(n); }
CanonicalSet normalize(const SetExpr& s) { return s.canonical(); }
Natural prefix_count(const SetExpr& s, Natural n) { return s.canonical().count_upto(n); }
Rational exact_density(const SetExpr& s) { return s.canonical().density(); }

bool intersects_interval(const SetExpr& s, Natural a, Natural b) {
  if (a > b) throw InvalidArgument("intersects_interval requires a <= b");
  return s.canonical().count_in(a, b) > 0;
}

SetExpr random_set_expr(std::mt19937_64& rng, const RandomSetOptions& options) {
  auto uniform = [&rng](Natural lo, Natural hi) { return std::uniform_int_distribution<Natural>(lo, hi)(rng); };
  Natural maxv = std::max<Natural>(options.max_value, 1);
  Natural maxp = std::max<Natural>(options.max_period, 1);
  if (options.depth <= 0 || uniform(0, 2) == 0) {
    switch (uniform(0, 6)) {
      case 0: {
        std::vector<Natural> xs(uniform(0, 6));
        for (auto& x : xs) x = uniform(0, maxv);
        return SetExpr::finite(std::move(xs));
      }
      case 1: {
        Natural a = uniform(0, maxv);
        return SetExpr::interval(a, a + uniform(0, maxv / 4 + 1));
      }
      case 2:
      case 3:
        return SetExpr::progression(uniform(0, maxv / 4), uniform(1, maxp));
      case 4:
        return SetExpr::tail(uniform(0, maxv));
      case 5:
        return uniform(0, 1) ? SetExpr::full() : SetExpr::empty();
      default:
        return SetExpr::progression(uniform(0, maxp), uniform(1, maxp));
    }
  }
  RandomSetOptions sub = options;
  sub.depth = options.depth - 1;
  switch (uniform(0, 4)) {
    case 0:
      return SetExpr::unite({random_set_expr(rng, sub), random_set_expr(rng, sub)});
    case 1:
      return SetExpr::intersect({random_set_expr(rng, sub), random_set_expr(rng, sub)});
    case 2:
      return SetExpr::complement(random_set_expr(rng, sub));
    case 3: {
      std::vector<Natural> xs(uniform(1, 4));
      for (auto& x : xs) x = uniform(0, maxv);
      return SetExpr::edit(random_set_expr(rng, sub), std::move(xs));
    }
    default:
      return SetExpr::unite({random_set_expr(rng, sub), SetExpr::complement(random_set_expr(rng, sub))});
  }
}

}  // namespace maldist
