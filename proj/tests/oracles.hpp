#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's series or operator code.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <gmpxx.h>

namespace oracle {

// Polynomial in x with exponents as keys; zero coefficients are erased.
using Poly = std::map<int, mpq_class>;

inline void clean(Poly& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == 0) it = p.erase(it);
    else ++it;
  }
}

inline Poly add(const Poly& a, const Poly& b, int sign = 1) {
  Poly r = a;
  for (const auto& [e, c] : b) r[e] += sign * c;
  clean(r);
  return r;
}

// Double-loop convolution keeping exponents <= cap.
inline Poly mul(const Poly& a, const Poly& b, int cap) {
  Poly r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b)
      if (ea + eb <= cap) r[ea + eb] += ca * cb;
  clean(r);
  return r;
}

inline Poly mono(const mpq_class& c, int e) {
  Poly p;
  if (c != 0) p[e] = c;
  return p;
}

inline Poly truncate(const Poly& a, int cap) {
  Poly r;
  for (const auto& [e, c] : a)
    if (e <= cap) r[e] = c;
  return r;
}

// 1/(1 - y) with y = x^d, d > 0, through x^cap.
inline Poly geometric(int d, int cap) {
  Poly r;
  for (int e = 0; e <= cap; e += d) r[e] = 1;
  return r;
}

// Bivariate series in z (index) with Poly coefficients.
using ZPoly = std::vector<Poly>;

inline ZPoly zmul(const ZPoly& a, const ZPoly& b, int cap) {
  std::size_t n = std::min(a.size(), b.size());
  ZPoly r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) r[i + j] = add(r[i + j], mul(a[i], b[j], cap));
  return r;
}

// (1 - x^e z) for the given e.
inline ZPoly linear_factor(int e, int lpos) {
  ZPoly r(static_cast<std::size_t>(lpos) + 1);
  r[0] = mono(1, 0);
  if (lpos >= 1) r[1] = mono(-1, e);
  return r;
}

// 1/(1 - x^e z) = sum_k x^{ek} z^k.
inline ZPoly inverse_linear_factor(int e, int lpos) {
  ZPoly r(static_cast<std::size_t>(lpos) + 1);
  for (int k = 0; k <= lpos; ++k) r[static_cast<std::size_t>(k)] = mono(1, e * k);
  return r;
}

// s <- s * (1 - x^e z), coefficients cut at x^cap.
inline void apply_linear(ZPoly& s, int e, int cap) {
  for (std::size_t j = s.size(); j-- > 1;) {
    for (const auto& [k, v] : s[j - 1])
      if (k + e <= cap) s[j][k + e] -= v;
    clean(s[j]);
  }
}

// s <- s / (1 - x^e z), coefficients cut at x^cap.
inline void apply_inverse_linear(ZPoly& s, int e, int cap) {
  for (std::size_t j = 1; j < s.size(); ++j) {
    for (const auto& [k, v] : s[j - 1])
      if (k + e <= cap) s[j][k + e] += v;
    clean(s[j]);
  }
}

inline ZPoly zone(int lpos) {
  ZPoly r(static_cast<std::size_t>(lpos) + 1);
  r[0] = mono(1, 0);
  return r;
}

// prod (1 - x^e z) over num times prod 1/(1 - x^e z) over den.
inline ZPoly product_of_factors(const std::vector<int>& num, const std::vector<int>& den, int lpos, int cap) {
  ZPoly r = zone(lpos);
  for (int e : num) apply_linear(r, e, cap);
  for (int e : den) apply_inverse_linear(r, e, cap);
  return r;
}

// Exponents c + sum n_i b_i <= limit (multi-base Pochhammer factors).
inline std::vector<int> lattice(int c, const std::vector<int>& bases, int limit) {
  std::vector<int> out{c};
  for (int b : bases) {
    std::vector<int> next;
    for (int e : out)
      for (int f = e; f <= limit; f += b) next.push_back(f);
    out = next;
  }
  std::vector<int> kept;
  for (int e : out)
    if (e <= limit) kept.push_back(e);
  return kept;
}

// Exponents c + base*n for n >= 0 with value <= limit.
inline std::vector<int> progression(int c, int base, int limit) {
  std::vector<int> out;
  for (int e = c; e <= limit; e += base) out.push_back(e);
  return out;
}

// f(z) = 1/(1-z) (x^{2r}z;x^4)(x^{-2r+2}z;x^4) / ((x^{2r+2}z;x^4)(x^{-2r+4}z;x^4))
// by multiplying out linear factors, x-exponents kept through `limit`.
inline ZPoly f_product(int r, int lpos, int limit) {
  std::vector<int> num, den{0};
  for (int e : progression(2 * r, 4, limit)) num.push_back(e);
  for (int e : progression(-2 * r + 2, 4, limit)) num.push_back(e);
  for (int e : progression(2 * r + 2, 4, limit)) den.push_back(e);
  for (int e : progression(-2 * r + 4, 4, limit)) den.push_back(e);
  return product_of_factors(num, den, lpos, limit);
}

// Number of sets of distinct parts from `parts` (given in units of 1/2) with
// each possible total, up to max_total.
inline std::vector<long> distinct_part_counts(const std::vector<int>& parts, int max_total) {
  std::vector<long> out(static_cast<std::size_t>(max_total) + 1, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int sum) {
    if (idx == parts.size()) {
      ++out[static_cast<std::size_t>(sum)];
      return;
    }
    rec(idx + 1, sum);
    if (sum + parts[idx] <= max_total) rec(idx + 1, sum + parts[idx]);
  };
  rec(0, 0);
  return out;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611ULL);
  return g;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Poly random_poly(int lo, int hi, int density_percent = 70) {
  Poly p;
  for (int e = lo; e <= hi; ++e) {
    if (uniform(0, 99) >= density_percent) continue;
    mpq_class c(uniform(-9, 9), uniform(1, 4));
    c.canonicalize();
    if (c != 0) p[e] = c;
  }
  return p;
}

}  // namespace oracle
