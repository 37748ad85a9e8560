#pragma once

// Arbitrary-precision eigenvalues of small dense real blocks (Eigen +
// boost::multiprecision). Pulled in only where a block is not diagonal.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "qvir/coeff/xfloat.hpp"
#include "qvir/errors.hpp"

namespace qvir::chars {

using coeff::BigFloat;
using coeff::XFloat;

struct DenseEigenvalue {
  XFloat re, im;
};

namespace detail {

using MpFloat = boost::multiprecision::mpfr_float;
using MpMatrix = Eigen::Matrix<MpFloat, Eigen::Dynamic, Eigen::Dynamic>;

inline unsigned digits10_for(mpfr_prec_t bits) {
  return static_cast<unsigned>(std::ceil(static_cast<double>(bits) * 0.30103)) + 1;
}

// Eigen creates temporaries at the default precision, which is process wide.
inline std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

struct Eig {
  MpFloat re, im;
};

inline std::vector<Eig> solve_at(const std::vector<std::vector<XFloat>>& a, mpfr_prec_t bits) {
  const auto n = static_cast<Eigen::Index>(a.size());
  std::lock_guard lock(precision_mutex());
  struct Restore {
    unsigned old = MpFloat::default_precision();
    ~Restore() { MpFloat::default_precision(old); }
  } restore;
  MpFloat::default_precision(digits10_for(bits));
  MpMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      MpFloat v;
      mpfr_set(v.backend().data(), a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value().get(), MPFR_RNDN);
      m(i, j) = v;
    }
  Eigen::EigenSolver<MpMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw precision_error("eigenvalue iteration did not converge");
  std::vector<Eig> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back({es.eigenvalues()(i).real(), es.eigenvalues()(i).imag()});
  std::sort(out.begin(), out.end(), [](const Eig& x, const Eig& y) { return x.re != y.re ? x.re < y.re : x.im < y.im; });
  return out;
}

inline BigFloat to_big(const MpFloat& v, mpfr_prec_t bits) {
  BigFloat b(bits);
  mpfr_set(b.get(), v.backend().data(), MPFR_RNDN);
  return b;
}

}  // namespace detail

// Eigenvalues sorted by (real, imaginary). Error bars are estimates: the
// gap to a recomputation at twice the working precision plus the largest
// row sum of input error bounds.
inline std::vector<DenseEigenvalue> dense_eigenvalues(const std::vector<std::vector<XFloat>>& a, mpfr_prec_t prec) {
  for (const auto& row : a)
    if (row.size() != a.size()) throw shape_error("dense eigenvalues need a square block");
  if (a.empty()) return {};
  auto lo = detail::solve_at(a, prec + 32);
  auto hi = detail::solve_at(a, 2 * prec + 32);

  BigFloat input(XFloat::kErrPrec);
  for (const auto& row : a) {
    BigFloat s(XFloat::kErrPrec);
    for (const auto& v : row) mpfr_add(s.get(), s.get(), v.error_bound().get(), MPFR_RNDU);
    if (mpfr_greater_p(s.get(), input.get())) mpfr_set(input.get(), s.get(), MPFR_RNDU);
  }

  std::vector<DenseEigenvalue> out;
  for (std::size_t i = 0; i < hi.size(); ++i) {
    auto part = [&](const detail::MpFloat& h, const detail::MpFloat& l) {
      BigFloat d(4 * prec + 128), gap(XFloat::kErrPrec);
      mpfr_sub(d.get(), h.backend().data(), l.backend().data(), MPFR_RNDN);
      mpfr_abs(gap.get(), d.get(), MPFR_RNDU);
      mpfr_add(gap.get(), gap.get(), input.get(), MPFR_RNDU);
      return XFloat(detail::to_big(h, 2 * prec + 32), gap).rounded_to(prec);
    };
    out.push_back({part(hi[i].re, lo[i].re), part(hi[i].im, lo[i].im)});
  }
  return out;
}

}  // namespace qvir::chars
