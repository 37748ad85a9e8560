#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qvir/coeff/context.hpp"
#include "qvir/errors.hpp"
#include "qvir/qseries/pochhammer.hpp"
#include "qvir/qseries/zseries.hpp"

namespace qvir::qseries {

inline void check_r(int r) {
  if (r < 2) throw config_error("r must be at least 2, got " + std::to_string(r));
}

// Degree of p* = x^{2(r-1)}.
inline int pstar_degree(int r) { return 2 * (r - 1); }

// Adds x^x_exponent to coefficient `index` of a series (fault injection).
struct SeriesPerturbation {
  int index = 0;
  int x_exponent = 0;
};

template <coeff::CoefficientContext Ctx>
void apply_perturbation(const Ctx& ctx, Series<Ctx>& s, const std::optional<SeriesPerturbation>& p) {
  if (!p) return;
  if (p->index < -s.lneg() || p->index > s.lpos()) throw config_error("perturbed index out of range");
  s[p->index] = s[p->index] + ctx.monomial(1, p->x_exponent);
}

namespace detail {

template <coeff::CoefficientContext C>
Series<C> f_series_raw(const C& c, int r, int lpos) {
  const std::vector<int> b4{4};
  auto n1 = qpoch(c, Monomial::x_pow(2 * r), b4, lpos);
  auto n2 = qpoch(c, Monomial::x_pow(-2 * r + 2), b4, lpos);
  auto d1 = qpoch(c, Monomial::x_pow(2 * r + 2), b4, lpos);
  auto d2 = qpoch(c, Monomial::x_pow(-2 * r + 4), b4, lpos);
  auto num = series_mul<C>(c, n1, n2);
  auto den = series_inverse<C>(c, series_mul<C>(c, d1, d2));
  return series_div_one_minus_z<C>(c, series_mul<C>(c, num, den));
}

}  // namespace detail

// Float evaluation cancels heavily between the x^{-2r+2} and x^{-2r+4}
// products, so it runs with guard bits and is rounded back.
inline constexpr mpfr_prec_t kSeriesGuardBits = 96;

// Structure function
//   f(z) = 1/(1-z) (x^{2r}z;x^4)(x^{-2r+2}z;x^4) / ((x^{2r+2}z;x^4)(x^{-2r+4}z;x^4))
// through z^lpos.
template <coeff::CoefficientContext Ctx>
Series<Ctx> f_series(const Ctx& ctx, int r, int lpos) {
  check_r(r);
  if constexpr (Ctx::is_exact) {
    return with_headroom(ctx, 6 * r + 6 * lpos + 8, [&](const auto& c) { return detail::f_series_raw(c, r, lpos); });
  } else {
    coeff::FloatContext wide(ctx.x0(), ctx.precision() + kSeriesGuardBits);
    auto s = detail::f_series_raw(wide, r, lpos);
    Series<Ctx> out(s.lneg(), s.lpos(), ctx.zero(), s.frac_exp());
    for (int k = -s.lneg(); k <= s.lpos(); ++k) out[k] = s[k].rounded_to(ctx.precision());
    return out;
  }
}

template <class R>
struct EtaFamily {
  ZSeries<R> eta_I;
  ZSeries<R> eta_II;
  ZSeries<R> eta;          // eta_I * eta_II
  ZSeries<R> eta_closed;   // {x^2 z}{p* x^2 z} / ({z}{p* x^4 z})
};

namespace detail {

// {a z} = (a z; x^4, p*)_inf
template <coeff::CoefficientContext Ctx>
Series<Ctx> brace(const Ctx& ctx, int r, int a_exp, int lpos) {
  return qpoch(ctx, Monomial::x_pow(a_exp), {4, pstar_degree(r)}, lpos);
}

template <coeff::CoefficientContext Ctx>
EtaFamily<typename Ctx::value_type> eta_family_raw(const Ctx& c, int r, int lpos) {
  const int ps = pstar_degree(r);
  auto b_ps2 = brace(c, r, ps + 2, lpos);
  auto b_ps4 = brace(c, r, ps + 4, lpos);
  auto b_ps = brace(c, r, ps, lpos);
  auto b_0 = brace(c, r, 0, lpos);
  auto b_2 = brace(c, r, 2, lpos);
  EtaFamily<typename Ctx::value_type> out;
  out.eta_I = series_mul(c, series_mul(c, b_ps2, b_ps2), series_inverse(c, series_mul(c, b_ps4, b_ps)));
  out.eta_II = series_mul(c, qpoch(c, Monomial::x_pow(2), {4}, lpos), series_inverse(c, qpoch(c, Monomial::x_pow(0), {4}, lpos)));
  out.eta = series_mul(c, out.eta_I, out.eta_II);
  out.eta_closed = series_mul(c, series_mul(c, b_2, b_ps2), series_inverse(c, series_mul(c, b_0, b_ps4)));
  return out;
}

}  // namespace detail

template <class R>
int min_reliable_hi(const EtaFamily<R>& e) {
  return std::min({qseries::min_reliable_hi(e.eta_I), qseries::min_reliable_hi(e.eta_II), qseries::min_reliable_hi(e.eta),
                   qseries::min_reliable_hi(e.eta_closed)});
}

template <class R>
EtaFamily<R> truncate_to(EtaFamily<R> e, int cap) {
  e.eta_I = qseries::truncate_to(std::move(e.eta_I), cap);
  e.eta_II = qseries::truncate_to(std::move(e.eta_II), cap);
  e.eta = qseries::truncate_to(std::move(e.eta), cap);
  e.eta_closed = qseries::truncate_to(std::move(e.eta_closed), cap);
  return e;
}


// eta_I(z) = {p* x^2 z}^2 / ({p* x^4 z}{p* z}), eta_II(z) = (x^2 z;x^4)/(z;x^4),
// eta = eta_I eta_II, and eta from its closed form.
template <coeff::CoefficientContext Ctx>
EtaFamily<typename Ctx::value_type> eta_family(const Ctx& ctx, int r, int lpos) {
  check_r(r);
  return with_headroom(ctx, 8 + 2 * lpos, [&](const auto& c) { return detail::eta_family_raw(c, r, lpos); });
}

// z^frac_exp * zpart(z) * wpart(1/z), with zpart a power series in z and
// wpart a power series in w = 1/z.
template <class R>
struct Rho {
  mpq_class frac_exp;
  ZSeries<R> zpart;
  ZSeries<R> wpart;

  // Same quotient with z -> 1/z in the eta factors; the prefactor is kept.
  Rho mirror() const { return Rho{frac_exp, wpart, zpart}; }
};

template <class R>
int min_reliable_hi(const Rho<R>& a) {
  return std::min(qseries::min_reliable_hi(a.zpart), qseries::min_reliable_hi(a.wpart));
}

template <class R>
Rho<R> truncate_to(Rho<R> a, int cap) {
  a.zpart = qseries::truncate_to(std::move(a.zpart), cap);
  a.wpart = qseries::truncate_to(std::move(a.wpart), cap);
  return a;
}

// rho(z) = z^{r/(2r-2)} eta(z) / eta(1/z).
template <coeff::CoefficientContext Ctx>
Rho<typename Ctx::value_type> rho_series(const Ctx& ctx, int r, int lpos, int lneg) {
  check_r(r);
  int n = std::max(lpos, lneg);
  return with_headroom(ctx, 8 + 2 * n, [&](const auto& c) {
    auto e = detail::eta_family_raw(c, r, n);
    Rho<typename Ctx::value_type> out;
    out.frac_exp = mpq_class(r, 2 * r - 2);
    out.frac_exp.canonicalize();
    auto inv = series_inverse(c, e.eta_closed);
    out.zpart = Series<std::decay_t<decltype(c)>>(0, lpos, c.zero());
    out.wpart = Series<std::decay_t<decltype(c)>>(0, lneg, c.zero());
    for (int k = 0; k <= lpos; ++k) out.zpart[k] = e.eta_closed[k];
    for (int k = 0; k <= lneg; ++k) out.wpart[k] = inv[k];
    return out;
  });
}

// Factorwise product of two rho-type objects.
template <coeff::CoefficientContext Ctx>
Rho<typename Ctx::value_type> rho_multiply(const Ctx& ctx, const Rho<typename Ctx::value_type>& a,
                                           const Rho<typename Ctx::value_type>& b) {
  return {a.frac_exp + b.frac_exp, series_mul(ctx, a.zpart, b.zpart), series_mul(ctx, a.wpart, b.wpart)};
}

// Bilateral expansion of the truncated factors: sum_{i,j} zpart_i wpart_j z^{i-j}
// over the stored ranges, kept on [-lneg, lpos].
template <coeff::CoefficientContext Ctx>
Series<Ctx> rho_expand(const Ctx& ctx, const Rho<typename Ctx::value_type>& a) {
  int lneg = a.wpart.lpos(), lpos = a.zpart.lpos();
  Series<Ctx> w(lneg, 0, ctx.zero());
  for (int j = 0; j <= lneg; ++j) w[-j] = a.wpart[j];
  Series<Ctx> z = a.zpart;
  Series<Ctx> out = series_mul_bilateral(ctx, z, w, lneg, lpos);
  out.set_frac_exp(a.frac_exp);
  return out;
}

// Theta_p(c) = (p;p)(c;p)(p/c;p) with p = x^p_degree.
template <coeff::CoefficientContext Ctx>
typename Ctx::value_type theta(const Ctx& ctx, const Monomial& c, int p_degree) {
  detail::check_bases({p_degree});
  if (c.coef == 0) throw std::invalid_argument("theta argument must be nonzero");
  auto run = [&](const auto& cc) {
    Monomial p_over_c{1 / c.coef, p_degree - c.exp};
    return xpoch(cc, Monomial::x_pow(p_degree), p_degree) * xpoch(cc, c, p_degree) * xpoch(cc, p_over_c, p_degree);
  };
  if constexpr (Ctx::is_exact) {
    int extra = 8 + 2 * std::abs(c.exp) + 2 * p_degree;
    for (int attempt = 0; attempt < 6; ++attempt, extra *= 2) {
      auto v = run(ctx.with_cap(ctx.cap() + extra));
      if (v.reliable_hi() >= ctx.cap()) return v.truncated(ctx.cap());
    }
    throw precision_error("theta: working cap exhausted");
  } else {
    return run(ctx);
  }
}

// (x^{r-1} - x^{1-r})(x^r - x^{-r}) / (x - x^{-1}) as an exact Laurent polynomial.
inline coeff::XLaurent central_const(int r) {
  check_r(r);
  using coeff::XLaurent;
  XLaurent a = XLaurent::monomial(1, r - 1) - XLaurent::monomial(1, 1 - r);
  XLaurent b = XLaurent::monomial(1, r) - XLaurent::monomial(1, -r);
  XLaurent d = XLaurent::monomial(1, 1) - XLaurent::monomial(1, -1);
  return divide_exact(a * b, d);
}

template <coeff::CoefficientContext Ctx>
typename Ctx::value_type central_const(const Ctx& ctx, int r) {
  return ctx.lift(central_const(r));
}

// (l^2 - 1) / (4(k+2)); l = k+2 is accepted for boundary labels.
inline mpq_class conformal_weight(int l, int k) {
  if (k < 1) throw config_error("k must be positive");
  if (l < 1 || l > k + 2) throw config_error("l must lie in [1, k+2]");
  mpq_class w(l * l - 1, 4 * (k + 2));
  w.canonicalize();
  return w;
}

// LHS - RHS of
//   eta(p* x^-2 z) eta(p*^-1 x^2 z) / (eta(x^-2 z) eta(x^2 z))
//     = (1 - x^-2 z)(1 - x^2 z) / ((1 - p*^-1 z)(1 - p* z)) f(z)
template <coeff::CoefficientContext Ctx>
Series<Ctx> identity_213(const Ctx& ctx, int r, int lpos, std::optional<SeriesPerturbation> perturb_f = std::nullopt) {
  check_r(r);
  const int ps = pstar_degree(r);
  return with_headroom(ctx, 8 + 4 * ps + 4 * lpos, [&](const auto& c) {
    using C = std::decay_t<decltype(c)>;
    auto eta = detail::eta_family_raw(c, r, lpos).eta_closed;
    auto num = series_mul<C>(c, series_scale_argument<C>(c, eta, Monomial::x_pow(ps - 2)),
                             series_scale_argument<C>(c, eta, Monomial::x_pow(2 - ps)));
    auto den = series_mul<C>(c, series_scale_argument<C>(c, eta, Monomial::x_pow(-2)),
                             series_scale_argument<C>(c, eta, Monomial::x_pow(2)));
    auto lhs = series_mul<C>(c, num, series_inverse<C>(c, den));
    auto f = f_series(c, r, lpos);
    apply_perturbation<C>(c, f, perturb_f);
    auto top = linear_factors<C>(c, {Monomial::x_pow(-2), Monomial::x_pow(2)}, lpos);
    auto bottom = linear_factors<C>(c, {Monomial::x_pow(-ps), Monomial::x_pow(ps)}, lpos);
    auto rhs = series_mul<C>(c, series_mul<C>(c, top, series_inverse<C>(c, bottom)), f);
    return series_add<C>(c, lhs, rhs, true);
  });
}

// eta(z) eta(x^2 z) - (p* x^2 z; p*) / (z; p*)
template <coeff::CoefficientContext Ctx>
Series<Ctx> identity_eta_product(const Ctx& ctx, int r, int lpos,
                                 std::optional<SeriesPerturbation> perturb_eta = std::nullopt) {
  check_r(r);
  const int ps = pstar_degree(r);
  return with_headroom(ctx, 8 + 2 * lpos, [&](const auto& c) {
    using C = std::decay_t<decltype(c)>;
    auto eta = detail::eta_family_raw(c, r, lpos).eta_closed;
    apply_perturbation<C>(c, eta, perturb_eta);
    auto lhs = series_mul<C>(c, eta, series_scale_argument<C>(c, eta, Monomial::x_pow(2)));
    auto rhs = series_mul<C>(c, qpoch(c, Monomial::x_pow(ps + 2), {ps}, lpos),
                             series_inverse<C>(c, qpoch(c, Monomial::x_pow(0), {ps}, lpos)));
    return series_add<C>(c, lhs, rhs, true);
  });
}

// Every coefficient vanishes through x^cap (exact) or within its error bar
// (float).
inline bool vanishes_on_window(const ZSeries<coeff::XLaurent>& s, int cap) {
  for (const auto& t : s.terms())
    if (!t.zero_through(cap)) return false;
  return true;
}

inline bool vanishes_on_window(const ZSeries<coeff::XFloat>& s, int = 0) {
  for (const auto& t : s.terms())
    if (!t.brackets(0)) return false;
  return true;
}

}  // namespace qvir::qseries
