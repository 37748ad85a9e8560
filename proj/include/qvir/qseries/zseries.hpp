#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qvir/coeff/context.hpp"

namespace qvir::qseries {

using coeff::Monomial;

// Truncated series sum_{k=-lneg}^{lpos} a_k z^k, optionally times z^frac_exp.
template <class R>
class ZSeries {
 public:
  ZSeries() = default;
  ZSeries(int lneg, int lpos, const R& fill, mpq_class frac_exp = 0)
      : lneg_(lneg), frac_exp_(std::move(frac_exp)), terms_(static_cast<std::size_t>(lneg + lpos + 1), fill) {
    if (lneg < 0 || lpos < 0) throw std::invalid_argument("negative truncation order");
  }

  int lneg() const { return lneg_; }
  int lpos() const { return static_cast<int>(terms_.size()) - lneg_ - 1; }
  const mpq_class& frac_exp() const { return frac_exp_; }
  void set_frac_exp(const mpq_class& a) { frac_exp_ = a; }

  const R& operator[](int k) const { return terms_.at(static_cast<std::size_t>(k + lneg_)); }
  R& operator[](int k) { return terms_.at(static_cast<std::size_t>(k + lneg_)); }
  const std::vector<R>& terms() const { return terms_; }
  std::vector<R>& terms() { return terms_; }

 private:
  int lneg_ = 0;
  mpq_class frac_exp_ = 0;
  std::vector<R> terms_;
};

// Lowest cap among the coefficients; kExactCap for float series.
inline int min_reliable_hi(const coeff::XLaurent& a) { return a.reliable_hi(); }
inline int min_reliable_hi(const coeff::XFloat&) { return coeff::kExactCap; }
template <class R>
int min_reliable_hi(const ZSeries<R>& s) {
  int m = coeff::kExactCap;
  for (const auto& t : s.terms()) m = std::min(m, min_reliable_hi(t));
  return m;
}

inline coeff::XLaurent truncate_to(const coeff::XLaurent& a, int cap) { return a.truncated(cap); }
inline coeff::XFloat truncate_to(const coeff::XFloat& a, int) { return a; }
template <class R>
ZSeries<R> truncate_to(ZSeries<R> s, int cap) {
  for (auto& t : s.terms()) t = truncate_to(t, cap);
  return s;
}

// Run fn at a raised working cap until every coefficient of the result is
// reliable through ctx.cap(), then cut back to exactly ctx.cap(). The
// returned value therefore does not depend on the headroom used.
template <coeff::CoefficientContext Ctx, class Fn>
auto with_headroom(const Ctx& ctx, int extra, Fn&& fn) {
  if constexpr (Ctx::is_exact) {
    extra = std::max(extra, 4);
    for (int attempt = 0; attempt < 6; ++attempt, extra *= 2) {
      auto res = fn(ctx.with_cap(ctx.cap() + extra));
      if (min_reliable_hi(res) >= ctx.cap()) return truncate_to(std::move(res), ctx.cap());
    }
    throw precision_error("working cap exhausted below x^" + std::to_string(ctx.cap()));
  } else {
    return fn(ctx);
  }
}

template <class Ctx>
using Series = ZSeries<typename Ctx::value_type>;

template <coeff::CoefficientContext Ctx>
Series<Ctx> series_one(const Ctx& ctx, int lpos) {
  Series<Ctx> s(0, lpos, ctx.zero());
  s[0] = ctx.one();
  return s;
}

template <coeff::CoefficientContext Ctx>
Series<Ctx> series_add(const Ctx&, const Series<Ctx>& a, const Series<Ctx>& b, bool subtract = false) {
  if (a.lneg() != b.lneg() || a.lpos() != b.lpos() || a.frac_exp() != b.frac_exp())
    throw std::invalid_argument("series shapes differ");
  Series<Ctx> r = a;
  for (int k = -a.lneg(); k <= a.lpos(); ++k) r[k] = subtract ? a[k] - b[k] : a[k] + b[k];
  return r;
}

// Cauchy product of two power series, truncated at the shorter order.
template <coeff::CoefficientContext Ctx>
Series<Ctx> series_mul(const Ctx& ctx, const Series<Ctx>& a, const Series<Ctx>& b) {
  if (a.lneg() != 0 || b.lneg() != 0) throw std::invalid_argument("series_mul expects power series");
  int n = std::min(a.lpos(), b.lpos());
  Series<Ctx> r(0, n, ctx.zero(), a.frac_exp() + b.frac_exp());
  for (int i = 0; i <= n; ++i) {
    if (ctx.is_exact_zero(a[i])) continue;
    for (int j = 0; i + j <= n; ++j) {
      if (ctx.is_exact_zero(b[j])) continue;
      r[i + j] = r[i + j] + a[i] * b[j];
    }
  }
  return r;
}

// Product of two bilateral series; the result keeps exponents in
// [-(a.lneg + b.lneg), a.lpos + b.lpos] that receive only fully-known
// contributions, i.e. [-min(lneg), min(lpos)] when both are truncated.
template <coeff::CoefficientContext Ctx>
Series<Ctx> series_mul_bilateral(const Ctx& ctx, const Series<Ctx>& a, const Series<Ctx>& b, int lneg, int lpos) {
  Series<Ctx> r(lneg, lpos, ctx.zero(), a.frac_exp() + b.frac_exp());
  for (int i = -a.lneg(); i <= a.lpos(); ++i) {
    if (ctx.is_exact_zero(a[i])) continue;
    for (int j = -b.lneg(); j <= b.lpos(); ++j) {
      int k = i + j;
      if (k < -lneg || k > lpos || ctx.is_exact_zero(b[j])) continue;
      r[k] = r[k] + a[i] * b[j];
    }
  }
  return r;
}

// Multiplicative inverse of a power series with invertible constant term.
template <coeff::CoefficientContext Ctx>
Series<Ctx> series_inverse(const Ctx& ctx, const Series<Ctx>& a) {
  if (a.lneg() != 0) throw std::invalid_argument("series_inverse expects a power series");
  int n = a.lpos();
  Series<Ctx> b(0, n, ctx.zero(), -a.frac_exp());
  auto b0 = ctx.inverse(a[0]);
  b[0] = b0;
  for (int k = 1; k <= n; ++k) {
    auto acc = ctx.zero();
    for (int i = 1; i <= k; ++i) {
      if (ctx.is_exact_zero(a[i]) || ctx.is_exact_zero(b[k - i])) continue;
      acc = acc + a[i] * b[k - i];
    }
    b[k] = -(b0 * acc);
  }
  return b;
}

// s(m z) for a monomial m: coefficient k picks up m^k.
template <coeff::CoefficientContext Ctx>
Series<Ctx> series_scale_argument(const Ctx& ctx, const Series<Ctx>& a, const Monomial& m) {
  Series<Ctx> r = a;
  for (int k = -a.lneg(); k <= a.lpos(); ++k) {
    if (k == 0 || ctx.is_exact_zero(a[k])) continue;
    Monomial p = m.pow(k);
    if constexpr (Ctx::is_exact) r[k] = a[k].scaled(p.coef, p.exp);
    else r[k] = a[k] * ctx.monomial(p);
  }
  return r;
}

// s(z) / (1 - z): prefix sums.
template <coeff::CoefficientContext Ctx>
Series<Ctx> series_div_one_minus_z(const Ctx&, const Series<Ctx>& a) {
  Series<Ctx> r = a;
  for (int k = 1; k <= a.lpos(); ++k) r[k] = r[k - 1] + a[k];
  return r;
}

// Truncated polynomial prod_i (1 - m_i z).
template <coeff::CoefficientContext Ctx>
Series<Ctx> linear_factors(const Ctx& ctx, const std::vector<Monomial>& roots, int lpos) {
  Series<Ctx> s = series_one(ctx, lpos);
  for (const auto& m : roots) {
    auto a = ctx.monomial(m);
    for (int j = lpos; j >= 1; --j) s[j] = s[j] - a * s[j - 1];
  }
  return s;
}

template <coeff::CoefficientContext Ctx>
bool series_is_exact_zero(const Ctx& ctx, const Series<Ctx>& s) {
  for (const auto& t : s.terms())
    if (!ctx.is_exact_zero(t)) return false;
  return true;
}

}  // namespace qvir::qseries
