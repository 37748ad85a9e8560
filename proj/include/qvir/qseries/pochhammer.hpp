#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "qvir/coeff/context.hpp"
#include "qvir/errors.hpp"
#include "qvir/qseries/zseries.hpp"

namespace qvir::qseries {

namespace detail {

inline void check_bases(const std::vector<int>& bases) {
  if (bases.empty()) throw divergent_product("Pochhammer product needs at least one base");
  for (int d : bases)
    if (d <= 0) throw divergent_product("Pochhammer base x^" + std::to_string(d) + " has nonpositive degree");
}

// Degrees c + sum n_i b_i <= limit over all n in N^k, ascending.
inline std::vector<int> factor_degrees(int c, const std::vector<int>& bases, int limit) {
  std::vector<int> out;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int deg) {
    if (deg > limit) return;
    if (i == bases.size()) {
      out.push_back(deg);
      return;
    }
    for (int d = deg; d <= limit; d += bases[i]) rec(i + 1, d);
  };
  rec(0, c);
  std::sort(out.begin(), out.end());
  return out;
}

// Bound on sum over omitted factors of |c| x0^deg, deg > limit, using
// x0^deg <= x0^((limit+1)/2) x0^(deg/2).
inline double omitted_mass(const coeff::FloatContext& ctx, const Monomial& c, const std::vector<int>& bases, int limit) {
  double x0 = ctx.x0().get_d();
  double m = std::abs(c.coef.get_d()) * std::pow(x0, 0.5 * (limit + 1)) * std::pow(x0, 0.5 * c.exp);
  for (int b : bases) m /= (1.0 - std::pow(x0, 0.5 * b));
  return 4.0 * m;
}

inline coeff::BigFloat upward(double v) {
  coeff::BigFloat b(coeff::XFloat::kErrPrec);
  mpfr_set_d(b.get(), v, MPFR_RNDU);
  return b;
}

}  // namespace detail

// Truncated expansion of (c z; x^b_1, ..., x^b_k)_inf through z^lpos.
//
// Exact backend: factors are applied in ascending degree, intermediate
// coefficients are cut at a working cap T and the XLaurent cap arithmetic
// keeps the result sound. Factors of degree > T are dropped and each z^j
// coefficient is capped below the lowest exponent they could reach. T is
// chosen so every coefficient is reliable through ctx.cap().
//
// Float backend: factors with |c x0^deg| < 2^-(prec+32) are dropped and
// their total effect is folded into the error bounds.
template <coeff::CoefficientContext Ctx>
Series<Ctx> qpoch(const Ctx& ctx, const Monomial& c, const std::vector<int>& bases, int lpos) {
  detail::check_bases(bases);
  if (lpos < 0) throw std::invalid_argument("negative truncation order");
  if (c.coef == 0) return series_one(ctx, lpos);
  if constexpr (Ctx::is_exact) {
    std::vector<int> neg = detail::factor_degrees(c.exp, bases, -1);
    long neg_sum = 0;
    for (std::size_t i = 0; i < neg.size() && static_cast<int>(i) < lpos; ++i) neg_sum += neg[i];
    const int T = static_cast<int>(ctx.cap() - neg_sum);
    std::vector<int> degs = detail::factor_degrees(c.exp, bases, T);
    Series<Ctx> s = series_one(ctx, lpos);
    for (int d : degs) {
      for (int j = lpos; j >= 1; --j) {
        if (s[j - 1].is_exact_zero()) continue;
        s[j] = (s[j] - s[j - 1].scaled(c.coef, d)).truncated(T);
      }
    }
    // Omitted factors touch z^j no lower than T + 1 + (sum of j-1 smallest degrees).
    long partial = 0;
    for (int j = 1; j <= lpos; ++j) {
      long cap_j = T + partial;
      if (cap_j < s[j].reliable_hi()) s[j] = s[j].truncated(static_cast<int>(cap_j));
      std::size_t idx = static_cast<std::size_t>(j - 1);
      partial += idx < degs.size() ? degs[idx] : T + 1;
    }
    return s;
  } else {
    int limit = std::max(0, ctx.negligible_degree()) - std::min(0, c.exp);
    std::vector<int> degs = detail::factor_degrees(c.exp, bases, limit);
    Series<Ctx> s = series_one(ctx, lpos);
    for (int d : degs) {
      auto a = ctx.monomial(c.coef, d);
      for (int j = lpos; j >= 1; --j) s[j] = s[j] - a * s[j - 1];
    }
    // |true_j - computed_j| <= (e^B - 1) sum_{i<j} |computed_i| with B the
    // omitted mass; e^B - 1 <= 2B for small B.
    double B = detail::omitted_mass(ctx, c, bases, limit);
    coeff::BigFloat twoB = detail::upward(2.0 * B);
    coeff::BigFloat running(coeff::XFloat::kErrPrec);
    for (int j = 1; j <= lpos; ++j) {
      coeff::BigFloat mag = s[j - 1].magnitude_bound();
      mpfr_add(running.get(), running.get(), mag.get(), MPFR_RNDU);
      coeff::BigFloat extra(coeff::XFloat::kErrPrec);
      mpfr_mul(extra.get(), running.get(), twoB.get(), MPFR_RNDU);
      s[j] = s[j].with_extra_error(extra);
    }
    return s;
  }
}

// prod_{n>=0} (1 - c x^{b n}) as a ring value (no z).
template <coeff::CoefficientContext Ctx>
typename Ctx::value_type xpoch(const Ctx& ctx, const Monomial& c, int base) {
  detail::check_bases({base});
  if (c.coef == 0) return ctx.one();
  if constexpr (Ctx::is_exact) {
    std::vector<int> neg = detail::factor_degrees(c.exp, {base}, 0);
    long neg_sum = 0;
    for (int d : neg) neg_sum += std::min(d, 0);
    const int T = static_cast<int>(ctx.cap() - neg_sum);
    auto p = ctx.one();
    for (int d : detail::factor_degrees(c.exp, {base}, T)) {
      p = (p - p.scaled(c.coef, d)).truncated(T);
      if (p.is_exact_zero()) return p;
    }
    // Omitted factors change p by terms of degree >= val(p) + T + 1.
    if (p.has_terms() && p.min_exp() + T < p.reliable_hi()) p = p.truncated(p.min_exp() + T);
    return p;
  } else {
    int limit = std::max(0, ctx.negligible_degree()) - std::min(0, c.exp);
    auto p = ctx.one();
    for (int d : detail::factor_degrees(c.exp, {base}, limit)) p = p - p * ctx.monomial(c.coef, d);
    if (p.is_exact_zero()) return p;
    double B = detail::omitted_mass(ctx, c, {base}, limit);
    coeff::BigFloat extra = p.magnitude_bound();
    mpfr_mul(extra.get(), extra.get(), detail::upward(2.0 * B).get(), MPFR_RNDU);
    return p.with_extra_error(extra);
  }
}

}  // namespace qvir::qseries
