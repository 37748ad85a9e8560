#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qvir/chars/graded.hpp"
#include "qvir/chars/hwscan.hpp"
#include "qvir/chars/spectrum.hpp"

using namespace qvir;
using namespace qvir::chars;
using coeff::XLaurent;

namespace {

HalfInteger H(int twice) { return HalfInteger::from_twice(twice); }
XLaurent xl(long c, int e) { return XLaurent::monomial(c, e); }

std::vector<std::size_t> dims(const std::vector<LevelCount>& rows) {
  std::vector<std::size_t> out;
  for (const auto& r : rows) out.push_back(r.dim);
  return out;
}

XFloat from_q(const mpq_class& q, mpfr_prec_t p) { return XFloat::from_mpq(q, p); }

}  // namespace

TEST(GradedDimension, SmallLevels) {
  EXPECT_EQ(dims(graded_dimension(Sector::NS, HalfInteger(2))), (std::vector<std::size_t>{1, 1, 0, 1, 1}));
  // 2 prod(1+q^n) = 2 + 2q + 2q^2 + 4q^3 + 4q^4 + 6q^5 + ...
  EXPECT_EQ(dims(graded_dimension(Sector::R, HalfInteger(5))), (std::vector<std::size_t>{2, 2, 2, 4, 4, 6}));
  auto ns = graded_dimension(Sector::NS, HalfInteger(1));
  EXPECT_EQ(ns[2].level, HalfInteger(1));
  EXPECT_EQ(ns[2].dim, 0u);
  EXPECT_EQ(graded_dimension(Sector::NS, HalfInteger(0)).size(), 1u);
}

// Subset enumeration over the modes; the R zero mode (part 0) doubles every count.
TEST(GradedDimension, MatchesEnumerationOracleThroughLevel12) {
  for (Sector s : {Sector::NS, Sector::R}) {
    std::vector<int> parts;
    for (int t = s == Sector::NS ? 1 : 0; t <= 24; t += 2) parts.push_back(t);
    auto want = oracle::distinct_part_counts(parts, 24);
    auto rows = graded_dimension(s, HalfInteger(12));
    for (const auto& r : rows) {
      EXPECT_TRUE(r.consistent()) << r.level.to_string();
      EXPECT_EQ(static_cast<long>(r.dim), want[static_cast<std::size_t>(r.level.twice())]) << r.level.to_string();
    }
    EXPECT_EQ(rows.size(), s == Sector::NS ? 25u : 13u);
  }
}

TEST(Spectrum, VacuumClosedForms) {
  for (auto x0 : {mpq_class(1, 3), mpq_class(1, 2), mpq_class(7, 10)}) {
    auto ns = t0_block_spectrum(Sector::NS, HalfInteger(0), x0, 128);
    ASSERT_EQ(ns.eigenvalues.size(), 1u);
    mpq_class want_ns = x0 + 1 / x0;
    EXPECT_TRUE(ns.eigenvalues[0].value.brackets(want_ns));
    EXPECT_EQ(ns.eigenvalues[0].multiplicity, 1u);
    EXPECT_EQ(*ns.eigenvalues[0].exact, (xl(1, -1) + xl(1, 1)).truncated(20));

    auto r = t0_block_spectrum(Sector::R, HalfInteger(0), x0, 128);
    ASSERT_EQ(r.eigenvalues.size(), 1u);
    mpq_class want_r = x0 * x0 + 1 / (x0 * x0);
    EXPECT_TRUE(r.eigenvalues[0].value.brackets(want_r));
    EXPECT_EQ(r.eigenvalues[0].multiplicity, 2u);
    EXPECT_LE(mpfr_get_d(r.eigenvalues[0].value.error_bound().get(), MPFR_RNDU), 1e-25 * want_r.get_d());
  }
  auto half = t0_block_spectrum(Sector::NS, HalfInteger(0), mpq_class(1, 2), 64);
  EXPECT_NEAR(half.eigenvalues[0].value.to_double(), 2.5, 1e-15);
}

TEST(Spectrum, MultiplicitiesAndTraces) {
  for (Sector s : {Sector::NS, Sector::R}) {
    auto table = t0_spectrum_table(s, HalfInteger(6), mpq_class(1, 2), 128, 2);
    auto gd = graded_dimension(s, HalfInteger(6));
    ASSERT_EQ(table.size(), gd.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      EXPECT_EQ(table[i].level, gd[i].level);
      EXPECT_EQ(table[i].total_multiplicity(), gd[i].dim) << table[i].level.to_string();
      EXPECT_EQ(table[i].dim, gd[i].dim);
      EXPECT_TRUE(table[i].trace_consistent) << table[i].level.to_string();
      EXPECT_EQ(table[i].method, "diagonal");
    }
  }
  EXPECT_THROW(t0_block_spectrum(Sector::R, H(1), mpq_class(1, 2), 64), parity_error);
  EXPECT_THROW(t0_block_spectrum(Sector::NS, H(1), mpq_class(3, 2), 64), config_error);
}

TEST(Spectrum, StableUnderPrecisionDoublingAndCutoff) {
  for (Sector s : {Sector::NS, Sector::R}) {
    auto a = t0_block_spectrum(s, HalfInteger(4), mpq_class(7, 10), 128);
    SpectrumOptions o;
    o.lambda = HalfInteger(6);
    auto b = t0_block_spectrum(s, HalfInteger(4), mpq_class(7, 10), 256, o);
    ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) {
      EXPECT_TRUE(detail::overlap(a.eigenvalues[i].value, b.eigenvalues[i].value));
      EXPECT_EQ(a.eigenvalues[i].multiplicity, b.eigenvalues[i].multiplicity);
      EXPECT_EQ(*a.eigenvalues[i].exact, *b.eigenvalues[i].exact);
    }
  }
}

// Dense arbitrary-precision route against the diagonal read-off.
TEST(Spectrum, DenseRouteAgreesWithDiagonal) {
  for (Sector s : {Sector::NS, Sector::R}) {
    SpectrumOptions dense;
    dense.method = SpectrumMethod::Dense;
    auto a = t0_block_spectrum(s, HalfInteger(5), mpq_class(1, 3), 128);
    auto b = t0_block_spectrum(s, HalfInteger(5), mpq_class(1, 3), 128, dense);
    EXPECT_EQ(b.method, "dense");
    ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) {
      EXPECT_TRUE(detail::overlap(a.eigenvalues[i].value, b.eigenvalues[i].value)) << i;
      EXPECT_EQ(a.eigenvalues[i].multiplicity, b.eigenvalues[i].multiplicity);
      EXPECT_TRUE(b.eigenvalues[i].imag->brackets(0));
    }
    EXPECT_TRUE(b.trace_consistent);
  }
}

// A = S diag(1/2, 1/3, 3, 3) S^{-1} with a rational unimodular S.
TEST(DenseEigen, KnownSimilarityTransform) {
  const mpfr_prec_t p = 160;
  std::vector<std::vector<mpq_class>> S{{1, 2, 0, 1}, {0, 1, 3, 0}, {0, 0, 1, 2}, {0, 0, 0, 1}};
  std::vector<mpq_class> d{mpq_class(1, 2), mpq_class(1, 3), 3, 3};
  // S^{-1} by back substitution on the unit upper-triangular S.
  std::vector<std::vector<mpq_class>> Si(4, std::vector<mpq_class>(4, 0));
  for (int c = 0; c < 4; ++c)
    for (int r = 3; r >= 0; --r) {
      mpq_class v = r == c ? 1 : 0;
      for (int k = r + 1; k < 4; ++k) v -= S[r][k] * Si[k][c];
      Si[r][c] = v;
    }
  std::vector<std::vector<XFloat>> a(4, std::vector<XFloat>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      mpq_class v = 0;
      for (int k = 0; k < 4; ++k) v += S[i][k] * d[k] * Si[k][j];
      a[i][j] = from_q(v, p);
    }
  auto ev = dense_eigenvalues(a, p);
  ASSERT_EQ(ev.size(), 4u);
  std::vector<mpq_class> want{mpq_class(1, 3), mpq_class(1, 2), 3, 3};
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(ev[i].re.brackets(want[i])) << i;
    EXPECT_TRUE(ev[i].im.brackets(0)) << i;
  }
  // Rotation block: eigenvalues +-i.
  std::vector<std::vector<XFloat>> rot{{from_q(0, p), from_q(-1, p)}, {from_q(1, p), from_q(0, p)}};
  auto er = dense_eigenvalues(rot, p);
  ASSERT_EQ(er.size(), 2u);
  EXPECT_TRUE(er[0].im.brackets(-1));
  EXPECT_TRUE(er[1].im.brackets(1));
  EXPECT_THROW(dense_eigenvalues({{from_q(1, p)}, {}}, p), shape_error);
}

TEST(HighestWeight, RationalRank) {
  EXPECT_EQ(rational_rank({}), 0u);
  EXPECT_EQ(rational_rank({{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(rational_rank({{0, 1, 1}, {1, 0, 1}, {1, 1, 2}}), 2u);
  EXPECT_EQ(rational_rank({{mpq_class(1, 3), 0}, {0, mpq_class(2, 7)}, {1, 1}}), 2u);
}

TEST(HighestWeight, TrivialCasesAndStability) {
  for (Sector s : {Sector::NS, Sector::R}) {
    auto gd = graded_dimension(s, HalfInteger(5));
    auto none = highest_weight_scan(s, 0, HalfInteger(5));
    for (std::size_t i = 0; i < gd.size(); ++i) EXPECT_EQ(none.rows[i].kernel_dim(), gd[i].dim);

    auto a = highest_weight_scan(s, 3, HalfInteger(5));
    EXPECT_EQ(a.rows[0].kernel_dim(), gd[0].dim);  // vacua are annihilated
    auto b = highest_weight_scan(s, 3, HalfInteger(5), HalfInteger(7), default_specializations(), 2);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      EXPECT_EQ(a.rows[i].kernel_dim(), b.rows[i].kernel_dim()) << a.rows[i].level.to_string();
      EXPECT_LE(a.rows[i].kernel_dim(), none.rows[i].kernel_dim());
    }
    auto more = highest_weight_scan(s, 5, HalfInteger(5));
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_LE(more.rows[i].kernel_dim(), a.rows[i].kernel_dim());
  }
  EXPECT_THROW(highest_weight_scan(Sector::NS, -1, HalfInteger(2)), config_error);
}
