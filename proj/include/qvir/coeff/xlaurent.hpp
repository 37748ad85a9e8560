#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qvir/errors.hpp"

namespace qvir::coeff {

// Cap of a value with no truncation (Laurent polynomial known exactly).
inline constexpr int kExactCap = std::numeric_limits<int>::max() / 4;
// Floor of a value with no lower bound on its authoritative range.
inline constexpr int kNoFloor = -kExactCap;

namespace detail {

inline int cap_add(long a, long b) {
  if (a >= kExactCap || b >= kExactCap) return kExactCap;
  return static_cast<int>(std::clamp(a + b, static_cast<long>(kNoFloor) + 1, static_cast<long>(kExactCap) - 1));
}

inline int floor_add(long a, long b) {
  if (a <= kNoFloor || b <= kNoFloor) return kNoFloor;
  return static_cast<int>(std::clamp(a + b, static_cast<long>(kNoFloor) + 1, static_cast<long>(kExactCap) - 1));
}

}  // namespace detail

// Truncated Laurent series in x with exact rational coefficients.
//
// Stored as x^lo * (num_0 + num_1 x + ...) / den with integer numerators and a
// positive shared denominator. Coefficients of exponent <= hi are exact; hi is
// kExactCap for Laurent polynomials. The low end is always exact. floor is an
// optional lower bound below which the caller declares coefficients
// non-authoritative; an operation whose cap drops below its floor throws.
class XLaurent {
 public:
  XLaurent() = default;

  static XLaurent constant(const mpq_class& c) { return monomial(c, 0); }

  static XLaurent monomial(const mpq_class& c, int e) {
    XLaurent r;
    if (c == 0) return r;
    r.lo_ = e;
    r.num_.emplace_back(c.get_num());
    r.den_ = c.get_den();
    return r;
  }

  static XLaurent from_coefficients(int lo, const std::vector<mpq_class>& c, int cap = kExactCap) {
    XLaurent r;
    r.lo_ = lo;
    r.hi_ = cap;
    mpz_class den = 1;
    for (const auto& q : c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    r.den_ = den;
    r.num_.reserve(c.size());
    for (const auto& q : c) r.num_.emplace_back(q.get_num() * (den / q.get_den()));
    r.normalize();
    return r;
  }

  // No known coefficients; exact only in the sense of being O(x^{cap+1}).
  static XLaurent unknown_above(int cap) {
    XLaurent r;
    r.hi_ = cap;
    return r;
  }

  bool is_exact() const { return hi_ >= kExactCap; }
  bool has_terms() const { return !num_.empty(); }
  bool is_exact_zero() const { return num_.empty() && is_exact(); }
  int reliable_hi() const { return hi_; }
  int reliable_lo() const { return floor_; }
  // Lowest stored exponent; meaningful when has_terms().
  int min_exp() const { return lo_; }
  int max_exp() const { return lo_ + static_cast<int>(num_.size()) - 1; }
  std::optional<int> valuation() const {
    if (num_.empty()) return std::nullopt;
    return lo_;
  }
  // Lower bound on the valuation of the true value.
  int valuation_bound() const { return num_.empty() ? detail::cap_add(hi_, 1) : lo_; }
  const std::vector<mpz_class>& numerators() const { return num_; }
  const mpz_class& denominator() const { return den_; }

  mpq_class coeff(int e) const {
    if (e > hi_) throw precision_error("coefficient of x^" + std::to_string(e) + " lies above reliable cap " + std::to_string(hi_));
    if (num_.empty() || e < lo_ || e > max_exp()) return 0;
    mpq_class q(num_[e - lo_], den_);
    q.canonicalize();
    return q;
  }

  // True when the value is reliable through x^d and all coefficients up to
  // x^d vanish.
  bool zero_through(int d) const { return hi_ >= d && (num_.empty() || lo_ > d); }

  // Coefficients agree on [lo, hi]; both must be reliable there.
  bool agrees_with(const XLaurent& o, int lo, int hi) const {
    if (hi_ < hi || o.hi_ < hi) return false;
    for (int e = lo; e <= hi; ++e)
      if (coeff(e) != o.coeff(e)) return false;
    return true;
  }

  XLaurent truncated(int cap) const {
    if (cap >= hi_ || is_exact_zero()) return *this;
    XLaurent r = *this;
    r.hi_ = cap;
    r.normalize();
    return r;
  }

  XLaurent with_floor(int f) const {
    XLaurent r = *this;
    r.floor_ = std::max(floor_, f);
    r.check_window();
    return r;
  }

  // Forget the cap: treat the stored terms as an exact Laurent polynomial.
  XLaurent as_polynomial() const {
    XLaurent r = *this;
    r.hi_ = kExactCap;
    return r;
  }

  // Multiply by c x^e.
  XLaurent scaled(const mpq_class& c, int e = 0) const {
    if (c == 0) return XLaurent();
    XLaurent r = *this;
    r.lo_ += e;
    r.hi_ = detail::cap_add(hi_, e);
    r.floor_ = detail::floor_add(floor_, e);
    if (c != 1) {
      const mpz_class& cn = c.get_num();
      for (auto& v : r.num_) v *= cn;
      r.den_ *= c.get_den();
      r.normalize();
    }
    return r;
  }

  XLaurent operator-() const {
    XLaurent r = *this;
    for (auto& v : r.num_) v = -v;
    return r;
  }

  mpq_class max_abs_coefficient() const {
    mpz_class m = 0;
    for (const auto& v : num_)
      if (mpz_cmpabs(v.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(v);
    mpq_class q(m, den_);
    q.canonicalize();
    return q;
  }

  // Exact rational value of the stored terms at x = x0 (truncation ignored).
  mpq_class evaluate_terms(const mpq_class& x0) const {
    if (num_.empty()) return 0;
    mpq_class acc = 0;
    for (std::size_t i = num_.size(); i-- > 0;) acc = acc * x0 + mpq_class(num_[i]);
    mpz_class p_num, p_den;
    mpz_pow_ui(p_num.get_mpz_t(), x0.get_num_mpz_t(), static_cast<unsigned long>(std::abs(lo_)));
    mpz_pow_ui(p_den.get_mpz_t(), x0.get_den_mpz_t(), static_cast<unsigned long>(std::abs(lo_)));
    mpq_class shift = lo_ >= 0 ? mpq_class(p_num, p_den) : mpq_class(p_den, p_num);
    shift.canonicalize();
    mpq_class r = acc * shift / mpq_class(den_);
    r.canonicalize();
    return r;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < num_.size(); ++i) {
      if (num_[i] == 0) continue;
      mpq_class c(num_[i], den_);
      c.canonicalize();
      int e = lo_ + static_cast<int>(i);
      bool neg = c < 0;
      if (neg) c = -c;
      if (first) {
        if (neg) os << "-";
      } else {
        os << (neg ? " - " : " + ");
      }
      first = false;
      if (e == 0) {
        os << c;
      } else {
        if (c != 1) os << c << "*";
        os << "x";
        if (e != 1) os << "^" << e;
      }
    }
    if (!is_exact()) {
      if (!first) os << " + ";
      os << "O(x^" << (hi_ + 1) << ")";
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

  friend bool operator==(const XLaurent& a, const XLaurent& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.floor_ == b.floor_ && a.den_ == b.den_ && a.num_ == b.num_;
  }

  friend XLaurent operator+(const XLaurent& a, const XLaurent& b) { return combine(a, b, false); }
  friend XLaurent operator-(const XLaurent& a, const XLaurent& b) { return combine(a, b, true); }
  friend XLaurent operator*(const XLaurent& a, const XLaurent& b) { return multiply(a, b, kExactCap); }
  XLaurent& operator+=(const XLaurent& o) { return *this = *this + o; }
  XLaurent& operator-=(const XLaurent& o) { return *this = *this - o; }
  XLaurent& operator*=(const XLaurent& o) { return *this = *this * o; }

  // Product with coefficients above x^limit discarded (cap <= limit).
  friend XLaurent multiply(const XLaurent& a, const XLaurent& b, int limit) {
    if (a.is_exact_zero() || b.is_exact_zero()) return XLaurent();
    int va = a.valuation_bound();
    int vb = b.valuation_bound();
    XLaurent r;
    r.hi_ = std::min({limit, detail::cap_add(a.hi_, vb), detail::cap_add(b.hi_, va)});
    r.floor_ = std::max(detail::floor_add(a.floor_, vb), detail::floor_add(b.floor_, va));
    if (a.num_.empty() || b.num_.empty()) {
      r.normalize();
      return r;
    }
    r.lo_ = a.lo_ + b.lo_;
    long top = std::min(static_cast<long>(a.max_exp()) + b.max_exp(), static_cast<long>(r.hi_));
    if (top < r.lo_) {
      r.normalize();
      return r;
    }
    std::size_t n = static_cast<std::size_t>(top - r.lo_ + 1);
    r.num_.resize(n);
    const std::size_t nb = b.num_.size();
    for (std::size_t i = 0; i < a.num_.size() && i < n; ++i) {
      if (a.num_[i] == 0) continue;
      mpz_srcptr ai = a.num_[i].get_mpz_t();
      std::size_t jmax = std::min(nb, n - i);
      for (std::size_t j = 0; j < jmax; ++j) mpz_addmul(r.num_[i + j].get_mpz_t(), ai, b.num_[j].get_mpz_t());
    }
    r.den_ = a.den_ * b.den_;
    r.normalize();
    return r;
  }

  // Multiplicative inverse. For exact input the result is cut at cap; for
  // truncated input the relative precision of a carries over and cap is an
  // additional upper limit.
  friend XLaurent inverse(const XLaurent& a, int cap) {
    if (a.num_.empty()) throw not_invertible("inverse of a value with no reliable nonzero coefficient");
    const int v = a.lo_;
    if (a.is_exact() && a.num_.size() == 1) {
      mpq_class c(a.den_, a.num_[0]);
      c.canonicalize();
      return monomial(c, -v).with_floor(detail::floor_add(a.floor_, -2L * v));
    }
    if (a.is_exact() && cap >= kExactCap) throw precision_error("inverse of a polynomial needs a finite cap");
    XLaurent r;
    r.hi_ = a.is_exact() ? cap : std::min(cap, detail::cap_add(a.hi_, -2L * v));
    r.floor_ = detail::floor_add(a.floor_, -2L * v);
    r.lo_ = -v;
    if (r.hi_ < -v) {
      r.normalize();
      return r;
    }
    const std::size_t n = static_cast<std::size_t>(static_cast<long>(r.hi_) + v + 1);
    const std::vector<mpz_class>& A = a.num_;
    const mpz_class& a0 = A[0];
    // c_k = B_k * a0^(k+1) with B the series inverse of A(x); all integers.
    std::vector<mpz_class> pw(n + 1);
    pw[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) pw[k] = pw[k - 1] * a0;
    std::vector<mpz_class> c(n);
    c[0] = 1;
    mpz_class t;
    for (std::size_t k = 1; k < n; ++k) {
      mpz_class acc = 0;
      std::size_t imax = std::min(k, A.size() - 1);
      for (std::size_t i = 1; i <= imax; ++i) {
        if (A[i] == 0) continue;
        mpz_mul(t.get_mpz_t(), A[i].get_mpz_t(), c[k - i].get_mpz_t());
        mpz_addmul(acc.get_mpz_t(), t.get_mpz_t(), pw[i - 1].get_mpz_t());
      }
      c[k] = -acc;
    }
    // B_k = c_k / a0^(k+1); common denominator a0^n.
    r.num_.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.num_[k] = c[k] * pw[n - 1 - k] * a.den_;
    r.den_ = pw[n];
    if (r.den_ < 0) {
      r.den_ = -r.den_;
      for (auto& x : r.num_) x = -x;
    }
    r.normalize();
    return r;
  }

  // Quotient of two Laurent polynomials; throws unless the division is exact.
  friend XLaurent divide_exact(const XLaurent& a, const XLaurent& b) {
    if (!a.is_exact() || !b.is_exact()) throw std::domain_error("divide_exact needs Laurent polynomials");
    if (b.num_.empty()) throw not_invertible("division by zero");
    if (a.num_.empty()) return XLaurent();
    const int qlo = a.lo_ - b.lo_;
    const int qhi = a.max_exp() - b.max_exp();
    if (qhi < qlo) throw std::domain_error("division leaves a remainder");
    XLaurent q = multiply(a, inverse(b, qhi - a.lo_), qhi).as_polynomial();
    if (!(q * b == a)) throw std::domain_error("division leaves a remainder");
    return q;
  }

 private:
  static XLaurent combine(const XLaurent& a, const XLaurent& b, bool subtract) {
    XLaurent r;
    r.hi_ = std::min(a.hi_, b.hi_);
    r.floor_ = std::max(a.floor_, b.floor_);
    if (a.num_.empty() && b.num_.empty()) {
      r.normalize();
      return r;
    }
    int lo;
    long top;
    if (a.num_.empty()) {
      lo = b.lo_;
      top = b.max_exp();
    } else if (b.num_.empty()) {
      lo = a.lo_;
      top = a.max_exp();
    } else {
      lo = std::min(a.lo_, b.lo_);
      top = std::max(a.max_exp(), b.max_exp());
    }
    top = std::min(top, static_cast<long>(r.hi_));
    if (top < lo) {
      r.normalize();
      return r;
    }
    r.lo_ = lo;
    r.num_.resize(static_cast<std::size_t>(top - lo + 1));
    mpz_class fa = 1, fb = 1;
    if (a.den_ == b.den_) {
      r.den_ = a.den_;
    } else {
      mpz_lcm(r.den_.get_mpz_t(), a.den_.get_mpz_t(), b.den_.get_mpz_t());
      fa = r.den_ / a.den_;
      fb = r.den_ / b.den_;
    }
    auto accumulate = [&](const XLaurent& s, const mpz_class& f, bool neg) {
      for (std::size_t i = 0; i < s.num_.size(); ++i) {
        long e = static_cast<long>(s.lo_) + static_cast<long>(i);
        if (e > top) break;
        mpz_ptr dst = r.num_[static_cast<std::size_t>(e - lo)].get_mpz_t();
        if (f == 1) {
          if (neg) mpz_sub(dst, dst, s.num_[i].get_mpz_t());
          else mpz_add(dst, dst, s.num_[i].get_mpz_t());
        } else {
          if (neg) mpz_submul(dst, s.num_[i].get_mpz_t(), f.get_mpz_t());
          else mpz_addmul(dst, s.num_[i].get_mpz_t(), f.get_mpz_t());
        }
      }
    };
    accumulate(a, fa, false);
    accumulate(b, fb, subtract);
    r.normalize();
    return r;
  }

  void check_window() const {
    if (floor_ > kNoFloor && hi_ < floor_)
      throw precision_error("degenerate precision: reliable window [" + std::to_string(floor_) + ", " + std::to_string(hi_) + "] is empty");
  }

  void normalize() {
    if (!num_.empty() && hi_ < kExactCap) {
      long keep = static_cast<long>(hi_) - lo_ + 1;
      if (keep <= 0) num_.clear();
      else if (static_cast<std::size_t>(keep) < num_.size()) num_.resize(static_cast<std::size_t>(keep));
    }
    while (!num_.empty() && num_.back() == 0) num_.pop_back();
    std::size_t first = 0;
    while (first < num_.size() && num_[first] == 0) ++first;
    if (first > 0) {
      num_.erase(num_.begin(), num_.begin() + static_cast<long>(first));
      lo_ += static_cast<int>(first);
    }
    if (num_.empty()) {
      lo_ = 0;
      den_ = 1;
    } else if (den_ != 1) {
      mpz_class g = den_;
      for (const auto& v : num_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) break;
      }
      if (g != 1) {
        for (auto& v : num_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
      }
    }
    check_window();
  }

  int lo_ = 0;
  std::vector<mpz_class> num_;
  mpz_class den_ = 1;
  int hi_ = kExactCap;
  int floor_ = kNoFloor;
};

XLaurent multiply(const XLaurent& a, const XLaurent& b, int limit);
XLaurent inverse(const XLaurent& a, int cap);
XLaurent divide_exact(const XLaurent& a, const XLaurent& b);

}  // namespace qvir::coeff
