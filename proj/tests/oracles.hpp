#pragma once

// Brute-force reference computations. None of these call into the library's
// normal forms or closed forms; they interpret the textual grammars directly
// and enumerate.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "maldist/sexpr.hpp"

namespace oracle {

using maldist::SExpr;
using Nat = std::uint64_t;
using Q = mpq_class;

// mpq_class(p, q) does not reduce; comparisons need canonical form.
inline Q ratio(Nat p, Nat q) {
  Q r(mpz_class(std::to_string(p)), mpz_class(std::to_string(q)));
  r.canonicalize();
  return r;
}

inline Nat nat(const SExpr& e) { return std::stoull(e.text()); }

// Membership straight from the set grammar.
inline bool member(const SExpr& e, Nat n) {
  const std::string h = e.is_list() ? e[0].text() : e.text();
  if (h == "empty") return false;
  if (h == "full") return true;
  if (h == "fin") {
    for (std::size_t i = 1; i < e.size(); ++i)
      if (nat(e[i]) == n) return true;
    return false;
  }
  if (h == "iv") return nat(e[1]) <= n && n <= nat(e[2]);
  if (h == "ap") return n >= nat(e[1]) && (n - nat(e[1])) % nat(e[2]) == 0;
  if (h == "tail") return n >= nat(e[1]);
  if (h == "union") {
    for (std::size_t i = 1; i < e.size(); ++i)
      if (member(e[i], n)) return true;
    return false;
  }
  if (h == "inter") {
    for (std::size_t i = 1; i < e.size(); ++i)
      if (!member(e[i], n)) return false;
    return true;
  }
  if (h == "not") return !member(e[1], n);
  if (h == "edit") {
    bool in = member(e[1], n);
    for (std::size_t i = 2; i < e.size(); ++i)
      if (nat(e[i]) == n) in = !in;
    return in;
  }
  if (h == "periodic") {
    const Nat t = nat(e[1]);
    const Nat p = nat(e[2]);
    if (n >= t) {
      for (std::size_t i = 0; i < e[3].size(); ++i)
        if (nat(e[3][i]) == n % p) return true;
      return false;
    }
    for (std::size_t i = 0; i < e[4].size(); ++i)
      if (nat(e[4][i][0]) <= n && n <= nat(e[4][i][1])) return true;
    return false;
  }
  throw std::runtime_error("oracle: unknown set form " + e.to_string());
}

using Pred = std::function<bool(Nat)>;

inline Pred predicate(const std::string& text) {
  SExpr e = maldist::parse_sexpr(text);
  return [e](Nat n) { return member(e, n); };
}

inline Nat count(const Pred& s, Nat lo, Nat hi) {
  Nat c = 0;
  for (Nat n = lo; n <= hi; ++n) c += s(n) ? 1 : 0;
  return c;
}

// sup_{m >= 1} |S ∩ [lo, min(m, hi)]| / m, scanning every m.
inline Q upper_density_window(const Pred& s, Nat lo, Nat hi) {
  Q best = 0;
  Nat c = 0;
  for (Nat m = lo; m <= hi; ++m) {
    c += s(m) ? 1 : 0;
    if (m >= 1) best = std::max(best, ratio(c, m));
  }
  if (lo == 0 && hi == 0 && s(0)) best = std::max(best, Q(1));  // {0}: the ratio at m = 1
  return best;
}
inline Q upper_density_truncated(const Pred& s, Nat h) {
  // |S ∩ [0, m]| / m for m in [1, h]; beyond h the count is frozen, so m = h is the last candidate.
  Q best = 0;
  Nat c = s(0) ? 1 : 0;
  for (Nat m = 1; m <= h; ++m) {
    c += s(m) ? 1 : 0;
    best = std::max(best, ratio(c, m));
  }
  if (h == 0) best = c;
  return best;
}

inline Q harmonic(const Pred& s, Nat lo, Nat hi) {
  Q sum = 0;
  for (Nat n = lo; n <= hi; ++n)
    if (s(n)) sum += ratio(1, n + 1);
  return sum;
}

inline Q geometric(const Pred& s, const Q& r, Nat lo, Nat hi) {
  Q sum = 0;
  Q w = 1;
  for (Nat n = 0; n <= hi; ++n) {
    if (n >= lo && s(n)) sum += w;
    w *= r;
  }
  return sum;
}

// sup over dyadic blocks J_k = [2^k, 2^{k+1}) of |S ∩ J_k ∩ [0,h]| / |J_k|; 0 lies in no block.
inline Q partition_dyadic(const Pred& s, Nat h) {
  Q best = 0;
  for (Nat lo = 1; lo <= h; lo *= 2) {
    Nat hi = std::min(2 * lo - 1, h);
    best = std::max(best, ratio(count(s, lo, hi), lo));
  }
  return best;
}

// ---- gap functions -------------------------------------------------------------

// The textual gap grammar, evaluated directly.
struct Gap {
  std::vector<Nat> table;
  Nat slope = 0;
  std::int64_t intercept = 0;
  Nat operator()(Nat n) const {
    if (n < table.size()) return table[n];
    __int128 v = static_cast<__int128>(slope) * n + intercept;
    return v < 0 ? 0 : static_cast<Nat>(v);
  }
};

inline Gap parse_gap(const std::string& text) {
  SExpr e = maldist::parse_sexpr(text);
  std::size_t off = e[0].text() == "gap" ? 1 : 0;
  const std::string kind = e[off].text();
  Gap g;
  if (kind == "const") {
    g.intercept = std::stoll(e[off + 1].text());
  } else if (kind == "affine") {
    g.slope = nat(e[off + 1]);
    g.intercept = std::stoll(e[off + 2].text());
  } else if (kind == "table") {
    for (std::size_t i = 0; i < e[off + 1].size(); ++i) g.table.push_back(nat(e[off + 1][i]));
    const SExpr& tail = e[off + 2];
    g.slope = nat(tail[1]);
    g.intercept = std::stoll(tail[2].text());
  } else {
    throw std::runtime_error("oracle: unknown gap " + text);
  }
  return g;
}

struct Iv {
  Nat lo, hi;
};

// I_0 = [0, g(0)], I_{k+1} = [m, m + g(m)] with m = max I_k + 1.
inline std::vector<Iv> gap_recurrence(const Gap& g, Nat horizon) {
  std::vector<Iv> out;
  Nat m = 0;
  while (true) {
    Nat hi = m + g(m);
    if (hi > horizon) break;
    out.push_back({m, hi});
    m = hi + 1;
  }
  return out;
}

// Does S contain infinitely many I_k of the gap recurrence? Exact big-integer
// simulation of the interval starts; decided once the state (start residue,
// capped length) repeats beyond every threshold.
inline bool contains_infinitely_many(const Gap& g, const Pred& s, Nat threshold, Nat period) {
  // Members beyond `threshold` depend only on n mod period.
  std::vector<bool> mask(period);
  for (Nat r = 0; r < period; ++r) mask[r] = s(threshold + ((r + period - threshold % period) % period));
  // Window-all-in test for an interval starting at residue r with length L (capped at period).
  auto inside = [&](Nat r, Nat len) {
    for (Nat i = 0; i < len; ++i)
      if (!mask[(r + i) % period]) return false;
    return true;
  };
  mpz_class m = 0;
  // Beyond the table, the clipped stretch of a negative intercept and the set threshold.
  const mpz_class limit = mpz_class(static_cast<unsigned long>(threshold)) + g.table.size() +
                          static_cast<unsigned long>(g.intercept < 0 ? -g.intercept : 0) + 1;
  std::map<std::pair<Nat, Nat>, std::size_t> seen;
  std::vector<bool> hits;
  for (std::size_t step = 0; step < 100000; ++step) {
    // gap at m (exact), length = g(m) + 1
    mpz_class gm;
    if (m < mpz_class(static_cast<unsigned long>(g.table.size()))) {
      gm = static_cast<unsigned long>(g.table[m.get_ui()]);
    } else {
      gm = m * static_cast<unsigned long>(g.slope) + static_cast<long>(g.intercept);
      if (gm < 0) gm = 0;
    }
    mpz_class len = gm + 1;
    if (m >= limit) {
      Nat r = mpz_class(m % static_cast<unsigned long>(period)).get_ui();
      Nat capped = len >= static_cast<unsigned long>(period) ? period : len.get_ui();
      auto key = std::make_pair(r, capped);
      if (auto it = seen.find(key); it != seen.end()) {
        for (std::size_t i = it->second; i < hits.size(); ++i)
          if (hits[i]) return true;
        return false;
      }
      seen[key] = hits.size();
      hits.push_back(inside(r, capped));
    }
    m += len;
  }
  throw std::runtime_error("oracle: no cycle found");
}

// Windows [n, n + g(n)] miss A for infinitely many n?
inline bool windows_fail_infinitely_often(const Gap& g, const Pred& a, Nat threshold, Nat period) {
  std::vector<bool> mask(period);
  bool any = false;
  for (Nat r = 0; r < period; ++r) {
    mask[r] = a(threshold + ((r + period - threshold % period) % period));
    any = any || mask[r];
  }
  if (!any) return true;
  if (g.slope > 0) return false;  // windows eventually cover a whole period
  const Nat len = static_cast<Nat>(std::max<std::int64_t>(0, g.intercept)) + 1;
  if (len >= period) return false;
  for (Nat r = 0; r < period; ++r) {
    bool empty = true;
    for (Nat i = 0; i < len && empty; ++i) empty = !mask[(r + i) % period];
    if (empty) return true;
  }
  return false;
}

// ---- g_alpha for the upper density ---------------------------------------------

// From scratch for every k: phi([n, n+k]) recomputed by enumeration.
inline Nat galpha_upper_density_brute(Nat n, const Q& alpha, Nat cap = 1000000) {
  const Q target = 1 - alpha / 4;
  const Pred full = [](Nat) { return true; };
  for (Nat k = 0; k <= cap; ++k)
    if (upper_density_window(full, n, n + k) >= target) return k;
  throw std::runtime_error("oracle: cap reached");
}

// One pass with a running count and a running maximum.
inline Nat galpha_upper_density_incremental(Nat n, const Q& alpha, Nat cap = 1000000) {
  const Q target = 1 - alpha / 4;
  Q best = 0;
  for (Nat m = n; m <= n + cap; ++m) {
    const Nat c = m - n + 1;
    if (m >= 1) best = std::max(best, ratio(c, m));
    if (m == 0) best = 1;  // {0} has ratio 1 at m = 1
    if (best >= target) return m - n;
  }
  throw std::runtime_error("oracle: cap reached");
}

// ---- sequence space ------------------------------------------------------------

// Cantor unpairing, written out by scanning diagonals.
inline std::pair<Nat, Nat> unpair(Nat k) {
  Nat d = 0;
  while ((d + 1) * (d + 2) / 2 <= k) ++d;
  Nat i = k - d * (d + 1) / 2;
  return {d - i, i};
}

}  // namespace oracle
