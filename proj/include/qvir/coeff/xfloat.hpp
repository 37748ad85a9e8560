#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "qvir/errors.hpp"

namespace qvir::coeff {

// Owning handle for an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat from_mpq(const mpq_class& q, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
    return r;
  }

  // Round-trip exact hex representation ("@" exponent marker is MPFR's).
  static BigFloat from_string(const std::string& s, mpfr_prec_t prec, int base = 16) {
    BigFloat r(prec);
    if (mpfr_set_str(r.v_, s.c_str(), base, MPFR_RNDN) != 0) throw std::invalid_argument("bad float literal: " + s);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  mpq_class to_mpq() const {
    mpq_class q;
    if (mpfr_number_p(v_) == 0) throw std::domain_error("non-finite float");
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    q = m;
    if (e >= 0) q *= mpq_class(mpz_class(1) << static_cast<mp_bitcnt_t>(e));
    else q /= mpq_class(mpz_class(1) << static_cast<mp_bitcnt_t>(-e));
    q.canonicalize();
    return q;
  }

  // Exact base-16 digits; parse back with from_string at the same precision.
  std::string to_exact_string() const { return format(16, 0); }

  std::string to_decimal(int digits) const { return format(10, static_cast<std::size_t>(digits)); }

 private:
  std::string format(int base, std::size_t digits) const {
    if (mpfr_zero_p(v_)) return "0";
    mpfr_exp_t exp;
    char* raw = mpfr_get_str(nullptr, &exp, base, digits, v_, MPFR_RNDN);
    std::string m(raw);
    mpfr_free_str(raw);
    bool neg = !m.empty() && m[0] == '-';
    if (neg) m.erase(0, 1);
    std::string out = neg ? "-" : "";
    out += m.substr(0, 1);
    if (m.size() > 1) out += "." + m.substr(1);
    long e10 = static_cast<long>(exp) - 1;
    if (e10 != 0) out += (base == 10 ? "e" : "@") + std::to_string(e10);
    return out;
  }

  mpfr_t v_;
};

// Floating value with a certified absolute error bound: |true - value| <= err.
// The bound is kept at 64 bits and always rounded upward.
class XFloat {
 public:
  static constexpr mpfr_prec_t kErrPrec = 64;

  XFloat() : value_(64), err_(kErrPrec) {}
  XFloat(BigFloat value, BigFloat err) : value_(std::move(value)), err_(std::move(err)) {}

  // Exactly-known rational rounded once to prec bits.
  static XFloat from_mpq(const mpq_class& q, mpfr_prec_t prec) {
    XFloat r;
    r.value_ = BigFloat::from_mpq(q, prec);
    r.err_ = BigFloat(kErrPrec);
    r.add_rounding_error();
    return r;
  }

  static XFloat zero(mpfr_prec_t prec) {
    XFloat r;
    r.value_ = BigFloat(prec);
    return r;
  }

  const BigFloat& value() const { return value_; }
  const BigFloat& error_bound() const { return err_; }
  mpfr_prec_t precision() const { return value_.precision(); }
  bool is_exact_zero() const { return value_.is_zero() && err_.is_zero(); }
  double to_double() const { return value_.to_double(); }

  XFloat with_extra_error(const BigFloat& e) const {
    XFloat r = *this;
    mpfr_add(r.err_.get(), r.err_.get(), e.get(), MPFR_RNDU);
    return r;
  }

  // Same value rounded to p bits, rounding error folded into the bound.
  XFloat rounded_to(mpfr_prec_t p) const {
    XFloat r;
    r.value_ = BigFloat(p);
    if (mpfr_set(r.value_.get(), value_.get(), MPFR_RNDN) != 0) r.add_rounding_error();
    mpfr_add(r.err_.get(), r.err_.get(), err_.get(), MPFR_RNDU);
    return r;
  }

  // Upper bound on |true value|.
  BigFloat magnitude_bound() const {
    BigFloat m(kErrPrec);
    mpfr_abs(m.get(), value_.get(), MPFR_RNDU);
    mpfr_add(m.get(), m.get(), err_.get(), MPFR_RNDU);
    return m;
  }

  // |value| with the same error bound.
  XFloat abs() const {
    XFloat r = *this;
    mpfr_abs(r.value_.get(), r.value_.get(), MPFR_RNDN);
    return r;
  }

  XFloat operator-() const {
    XFloat r = *this;
    mpfr_neg(r.value_.get(), r.value_.get(), MPFR_RNDN);
    return r;
  }

  friend XFloat operator+(const XFloat& a, const XFloat& b) { return add(a, b, false); }
  friend XFloat operator-(const XFloat& a, const XFloat& b) { return add(a, b, true); }

  friend XFloat operator*(const XFloat& a, const XFloat& b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return zero(std::max(a.precision(), b.precision()));
    XFloat r;
    r.value_ = BigFloat(std::max(a.precision(), b.precision()));
    mpfr_mul(r.value_.get(), a.value_.get(), b.value_.get(), MPFR_RNDN);
    BigFloat aa(kErrPrec), ab(kErrPrec), t(kErrPrec);
    mpfr_abs(aa.get(), a.value_.get(), MPFR_RNDU);
    mpfr_abs(ab.get(), b.value_.get(), MPFR_RNDU);
    mpfr_mul(r.err_.get(), aa.get(), b.err_.get(), MPFR_RNDU);
    mpfr_mul(t.get(), ab.get(), a.err_.get(), MPFR_RNDU);
    mpfr_add(r.err_.get(), r.err_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.err_.get(), b.err_.get(), MPFR_RNDU);
    mpfr_add(r.err_.get(), r.err_.get(), t.get(), MPFR_RNDU);
    r.add_rounding_error();
    return r;
  }

  XFloat& operator+=(const XFloat& o) { return *this = *this + o; }
  XFloat& operator-=(const XFloat& o) { return *this = *this - o; }
  XFloat& operator*=(const XFloat& o) { return *this = *this * o; }

  friend XFloat inverse(const XFloat& a) {
    BigFloat lo(kErrPrec);
    mpfr_abs(lo.get(), a.value_.get(), MPFR_RNDD);
    mpfr_sub(lo.get(), lo.get(), a.err_.get(), MPFR_RNDD);
    if (mpfr_sgn(lo.get()) <= 0) throw not_invertible("float value is not bounded away from zero");
    XFloat r;
    r.value_ = BigFloat(a.precision());
    mpfr_ui_div(r.value_.get(), 1, a.value_.get(), MPFR_RNDN);
    // |1/a - 1/v| <= e / (|v| (|v| - e))
    BigFloat den(kErrPrec);
    mpfr_abs(den.get(), a.value_.get(), MPFR_RNDD);
    mpfr_mul(den.get(), den.get(), lo.get(), MPFR_RNDD);
    mpfr_div(r.err_.get(), a.err_.get(), den.get(), MPFR_RNDU);
    r.add_rounding_error();
    return r;
  }

  // Whether the exact rational q lies within the error bar.
  bool brackets(const mpq_class& q) const {
    mpfr_prec_t p = std::max<mpfr_prec_t>(precision(), 64) + 64;
    BigFloat d = BigFloat::from_mpq(q, p);
    mpfr_sub(d.get(), d.get(), value_.get(), MPFR_RNDN);
    mpfr_abs(d.get(), d.get(), MPFR_RNDD);
    // slack for rounding q
    BigFloat slack = BigFloat::from_mpq(abs(q), kErrPrec, MPFR_RNDU);
    mpfr_mul_2si(slack.get(), slack.get(), -(p - 1), MPFR_RNDU);
    BigFloat bound(kErrPrec);
    mpfr_add(bound.get(), err_.get(), slack.get(), MPFR_RNDU);
    return mpfr_lessequal_p(d.get(), bound.get()) != 0;
  }

 private:
  static mpq_class abs(const mpq_class& q) { return q < 0 ? mpq_class(-q) : q; }

  static XFloat add(const XFloat& a, const XFloat& b, bool subtract) {
    XFloat r;
    r.value_ = BigFloat(std::max(a.precision(), b.precision()));
    if (subtract) mpfr_sub(r.value_.get(), a.value_.get(), b.value_.get(), MPFR_RNDN);
    else mpfr_add(r.value_.get(), a.value_.get(), b.value_.get(), MPFR_RNDN);
    mpfr_add(r.err_.get(), a.err_.get(), b.err_.get(), MPFR_RNDU);
    r.add_rounding_error();
    return r;
  }

  // Round-to-nearest error is at most |value| 2^-prec.
  void add_rounding_error() {
    if (value_.is_zero()) return;
    BigFloat t(kErrPrec);
    mpfr_abs(t.get(), value_.get(), MPFR_RNDU);
    mpfr_mul_2si(t.get(), t.get(), -static_cast<long>(value_.precision()), MPFR_RNDU);
    mpfr_add(err_.get(), err_.get(), t.get(), MPFR_RNDU);
  }

  BigFloat value_;
  BigFloat err_;
};

XFloat inverse(const XFloat& a);

}  // namespace qvir::coeff
