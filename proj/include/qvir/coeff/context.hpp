#pragma once

#include <cmath>
#include <concepts>
#include <map>
#include <mutex>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

#include "qvir/coeff/xfloat.hpp"
#include "qvir/coeff/xlaurent.hpp"
#include "qvir/errors.hpp"

namespace qvir::coeff {

// c * x^exp
struct Monomial {
  mpq_class coef = 1;
  int exp = 0;

  static Monomial x_pow(int e) { return {mpq_class(1), e}; }
  Monomial operator*(const Monomial& o) const { return {coef * o.coef, exp + o.exp}; }
  Monomial pow(int n) const {
    mpq_class c = 1;
    for (int i = 0; i < std::abs(n); ++i) c *= coef;
    if (n < 0) c = 1 / c;
    return {c, exp * n};
  }
};

// Exact backend. cap is the working truncation degree: series computations
// keep coefficients through x^cap. floor, when set, is attached to every
// constructed value.
class ExactContext {
 public:
  using value_type = XLaurent;
  static constexpr bool is_exact = true;

  explicit ExactContext(int cap = 24, int floor = kNoFloor) : cap_(cap), floor_(floor) {}

  int cap() const { return cap_; }
  int floor() const { return floor_; }
  int working_cap() const { return cap_; }
  ExactContext with_cap(int cap) const { return ExactContext(cap, floor_); }
  std::string backend_name() const { return "exact"; }

  XLaurent zero() const { return XLaurent(); }
  XLaurent one() const { return monomial(1, 0); }
  XLaurent integer(long n) const { return monomial(n, 0); }
  XLaurent monomial(const mpq_class& c, int e) const { return tag(XLaurent::monomial(c, e)); }
  XLaurent monomial(const Monomial& m) const { return monomial(m.coef, m.exp); }
  XLaurent lift(const XLaurent& exact) const { return exact; }
  XLaurent inverse(const XLaurent& a) const { return qvir::coeff::inverse(a, cap_); }
  XLaurent mul(const XLaurent& a, const XLaurent& b, int limit) const { return multiply(a, b, limit); }
  XLaurent scaled(const XLaurent& a, const mpq_class& c, int e = 0) const { return a.scaled(c, e); }
  XLaurent abs(const XLaurent& a) const { return a; }
  bool is_exact_zero(const XLaurent& a) const { return a.is_exact_zero(); }
  XLaurent finish(const XLaurent& a) const { return a.truncated(cap_); }

 private:
  XLaurent tag(XLaurent v) const { return floor_ > kNoFloor ? v.with_floor(floor_) : v; }

  int cap_;
  int floor_;
};

// Float backend at a fixed rational point x0 in (0,1).
class FloatContext {
 public:
  using value_type = XFloat;
  static constexpr bool is_exact = false;

  FloatContext(const mpq_class& x0, mpfr_prec_t prec) : x0_(x0), prec_(prec) {
    x0_.canonicalize();
    if (x0_ <= 0 || x0_ >= 1) throw config_error("x0 must lie in (0,1)");
    if (prec < 32) throw config_error("float precision must be at least 32 bits");
  }

  const mpq_class& x0() const { return x0_; }
  mpfr_prec_t precision() const { return prec_; }
  int working_cap() const { return kExactCap; }
  std::string backend_name() const { return "float"; }

  XFloat zero() const { return XFloat::zero(prec_); }
  XFloat one() const { return XFloat::from_mpq(1, prec_); }
  XFloat integer(long n) const { return XFloat::from_mpq(n, prec_); }
  XFloat monomial(const mpq_class& c, int e) const { return XFloat::from_mpq(c * power(e), prec_); }
  XFloat monomial(const Monomial& m) const { return monomial(m.coef, m.exp); }
  XFloat lift(const XLaurent& exact) const;
  XFloat inverse(const XFloat& a) const { return qvir::coeff::inverse(a); }
  XFloat mul(const XFloat& a, const XFloat& b, int) const { return a * b; }
  XFloat scaled(const XFloat& a, const mpq_class& c, int e = 0) const { return a * monomial(c, e); }
  XFloat abs(const XFloat& a) const { return a.abs(); }
  bool is_exact_zero(const XFloat& a) const { return a.is_exact_zero(); }
  XFloat finish(const XFloat& a) const { return a; }

  // Exact x0^e.
  mpq_class power(int e) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = powers_->find(e);
    if (it != powers_->end()) return it->second;
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), x0_.get_num_mpz_t(), static_cast<unsigned long>(std::abs(e)));
    mpz_pow_ui(d.get_mpz_t(), x0_.get_den_mpz_t(), static_cast<unsigned long>(std::abs(e)));
    mpq_class q = e >= 0 ? mpq_class(n, d) : mpq_class(d, n);
    q.canonicalize();
    powers_->emplace(e, q);
    return q;
  }

  // Smallest d >= 0 with x0^d below 2^-(prec + guard).
  int negligible_degree(int guard = 32) const {
    double lx = std::log2(x0_.get_d());
    return static_cast<int>(std::ceil((static_cast<double>(prec_) + guard) / -lx)) + 1;
  }

 private:
  mpq_class x0_;
  mpfr_prec_t prec_;
  std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
  std::shared_ptr<std::map<int, mpq_class>> powers_ = std::make_shared<std::map<int, mpq_class>>();
};

template <class C>
concept CoefficientContext = requires(const C& ctx, const typename C::value_type& v, const mpq_class& q, int e,
                                      const XLaurent& xl) {
  { ctx.zero() } -> std::same_as<typename C::value_type>;
  { ctx.one() } -> std::same_as<typename C::value_type>;
  { ctx.monomial(q, e) } -> std::same_as<typename C::value_type>;
  { ctx.lift(xl) } -> std::same_as<typename C::value_type>;
  { ctx.inverse(v) } -> std::same_as<typename C::value_type>;
  { ctx.mul(v, v, e) } -> std::same_as<typename C::value_type>;
  { ctx.abs(v) } -> std::same_as<typename C::value_type>;
  { ctx.is_exact_zero(v) } -> std::same_as<bool>;
  { v + v } -> std::same_as<typename C::value_type>;
  { v - v } -> std::same_as<typename C::value_type>;
  { v * v } -> std::same_as<typename C::value_type>;
  { -v } -> std::same_as<typename C::value_type>;
};

// Evaluate a at x0 by Horner's rule in XFloat arithmetic. For truncated a the
// unseen tail is bounded by max|coeff| x0^(cap+1) / (1 - x0).
inline XFloat xl_eval_float(const XLaurent& a, const mpq_class& x0, mpfr_prec_t prec) {
  FloatContext ctx(x0, prec);
  XFloat acc = ctx.zero();
  if (a.has_terms()) {
    const auto& num = a.numerators();
    XFloat xv = ctx.monomial(1, 1);
    for (std::size_t i = num.size(); i-- > 0;) {
      acc = acc * xv + XFloat::from_mpq(mpq_class(num[i]), prec);
    }
    mpq_class scale(ctx.power(a.min_exp()) / mpq_class(a.denominator()));
    acc = acc * XFloat::from_mpq(scale, prec);
  }
  if (!a.is_exact()) {
    mpq_class m = a.max_abs_coefficient();
    if (m == 0) m = 1;
    mpq_class tail = m * ctx.power(a.reliable_hi() + 1) / (1 - x0);
    acc = acc.with_extra_error(BigFloat::from_mpq(tail, XFloat::kErrPrec, MPFR_RNDU));
  }
  return acc;
}

inline XFloat FloatContext::lift(const XLaurent& exact) const { return xl_eval_float(exact, x0_, prec_); }

// DVA parameters and highest-weight labels.
struct Params {
  int r = 4;
  int k = 1;
  int l = 1;
  int i = 0;

  void validate() const {
    if (r < 2) throw config_error("r must be at least 2");
    if (k < 1) throw config_error("k must be positive");
    if (l < 1 || l > k + 1) throw config_error("l must lie in [1, k+1]");
    if (i != 0 && i != 1) throw config_error("i must be 0 or 1");
  }
  int l0() const { return l; }
  int l1() const { return r - 1 - l; }
  int l_i() const { return i == 0 ? l0() : l1(); }
};

}  // namespace qvir::coeff
