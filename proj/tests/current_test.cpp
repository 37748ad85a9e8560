#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qvir/coeff/context.hpp"
#include "qvir/current/current.hpp"
#include "test_helpers.hpp"

using namespace qvir;
using namespace qvir::current;
using coeff::ExactContext;
using coeff::FloatContext;
using coeff::XLaurent;

namespace {

HalfInteger H(int twice) { return HalfInteger::from_twice(twice); }
XLaurent xl(long c, int e) { return XLaurent::monomial(c, e); }

template <class R>
const R* entry(const GradedOperator<R>& a, std::size_t i, std::size_t j) {
  return a.find(i, j);
}

}  // namespace

TEST(Trig, KappaAndVacuumConstantClosedForms) {
  ExactContext ctx(30);
  auto k = kappa(ctx, CurrentSpec::trig(Sector::NS));
  // kappa * x^2 (1 + x^2) = 1 - x^6
  EXPECT_TRUE((k * (xl(1, 2) + xl(1, 4)) - (xl(1, 0) - xl(1, 6))).zero_through(30));
  EXPECT_GE(k.reliable_hi(), 30);
  EXPECT_TRUE((vacuum_shift(ctx, CurrentSpec::trig(Sector::NS)) - (xl(1, 1) + xl(1, -1))).zero_through(30));
  EXPECT_TRUE((vacuum_shift(ctx, CurrentSpec::trig(Sector::R)) - (xl(1, 2) + xl(1, -2))).zero_through(30));
}

TEST(Trig, VacuumEigenvalues) {
  ExactContext ctx(24);
  for (Sector s : {Sector::NS, Sector::R}) {
    auto space = FockSpace::enumerate(s, HalfInteger(4));
    auto t0 = t_mode(ctx, CurrentSpec::trig(s), space, 0);
    XLaurent want = s == Sector::NS ? xl(1, 1) + xl(1, -1) : xl(1, 2) + xl(1, -2);
    std::vector<std::size_t> vacua{0};
    if (s == Sector::R) vacua.push_back(1);  // {} and {0}
    for (auto v : vacua) {
      ASSERT_EQ(t0.column(v).size(), 1u) << space->describe(v);
      EXPECT_EQ(t0.column(v)[0].first, v);
      const auto& got = t0.column(v)[0].second;
      EXPECT_GE(got.reliable_hi(), 24);
      EXPECT_TRUE((got - want).zero_through(24)) << got.to_string();
    }
    for (int k = 1; k <= 4; ++k) EXPECT_TRUE(t_mode(ctx, CurrentSpec::trig(s), space, k).column(0).empty());
  }
  auto ns = FockSpace::enumerate(Sector::NS, HalfInteger(4));
  EXPECT_TRUE(trig_normal_part(ns, -1).column(0).empty());
}

TEST(Trig, VacuumEigenvalueFloat) {
  for (auto x0 : {mpq_class(1, 3), mpq_class(1, 2), mpq_class(7, 10)}) {
    FloatContext ctx(x0, 128);
    auto space = FockSpace::enumerate(Sector::NS, HalfInteger(2));
    auto t0 = t_mode(ctx, CurrentSpec::trig(Sector::NS), space, 0);
    mpq_class want = x0 + 1 / x0;
    EXPECT_TRUE(t0.column(0)[0].second.brackets(want));
  }
}

// Naive sum of products of psi matrices on a larger space differs from the
// normal-ordered bilinear only by the truncated contraction constant.
TEST(Trig, NormalPartMatchesNaiveProducts) {
  ExactContext ctx(40);
  for (Sector s : {Sector::NS, Sector::R}) {
    const int cut = 4, big = 12;
    auto small = FockSpace::enumerate(s, HalfInteger(cut));
    auto large = FockSpace::enumerate(s, HalfInteger(big));
    for (int k = -3; k <= 3; ++k) {
      auto n = trig_normal_part(small, k);
      fock::GradedOperator<XLaurent> naive(large, HalfInteger(-k));
      for (auto a : FockSpace::sector_modes(s, HalfInteger(big + 3))) {
        auto prod = fock::op_compose(ctx, fock::psi_matrix(ctx, large, a),
                                     fock::psi_matrix(ctx, large, HalfInteger(k) - a));
        naive = fock::op_add(ctx, naive, fock::op_scale(ctx, prod, xl(1, 2 * a.twice() - 2 * k)));
      }
      for (std::size_t j = 0; j < small->dim(); ++j) {
        auto jl = *large->index_of(small->state(j).mask);
        for (std::size_t i = 0; i < small->dim(); ++i) {
          auto il = *large->index_of(small->state(i).mask);
          const XLaurent* a = entry(n, i, j);
          const XLaurent* b = entry(naive, il, jl);
          XLaurent got = a ? *a : XLaurent();
          XLaurent want = b ? *b : XLaurent();
          if (k == 0 && i == j) {
            // Contractions surviving in the truncated naive product.
            const int e2 = small->level(j).twice();
            for (int t = s == Sector::NS ? 1 : 2; t <= 2 * big - e2; t += 2) want = want - xl(1, 3 * t) - xl(1, t);
            if (s == Sector::R) want = want - xl(1, 0);
          }
          EXPECT_EQ(got, want) << "k=" << k << " " << small->describe(i) << " <- " << small->describe(j);
        }
      }
    }
  }
}

TEST(Trig, StableUnderCutoffGrowth) {
  for (Sector s : {Sector::NS, Sector::R}) {
    auto a = FockSpace::enumerate(s, HalfInteger(5));
    auto b = FockSpace::enumerate(s, HalfInteger(7));
    for (int k = -3; k <= 3; ++k) {
      auto na = trig_normal_part(a, k), nb = trig_normal_part(b, k);
      for (std::size_t j = 0; j < a->dim(); ++j)
        for (const auto& [i, v] : na.column(j)) {
          auto ib = *b->index_of(a->state(i).mask), jb = *b->index_of(a->state(j).mask);
          ASSERT_NE(nb.find(ib, jb), nullptr);
          EXPECT_EQ(*nb.find(ib, jb), v);
        }
    }
  }
}

TEST(Trig, GradingAndValidation) {
  ExactContext ctx(10);
  auto space = FockSpace::enumerate(Sector::R, HalfInteger(3));
  EXPECT_EQ(t_mode(ctx, CurrentSpec::trig(Sector::R), space, 2).degree(), HalfInteger(-2));
  EXPECT_THROW(t_mode(ctx, CurrentSpec::trig(Sector::NS), space, 0), config_error);
  auto bad = CurrentSpec::trig(Sector::R);
  bad.r = 3;
  EXPECT_THROW(t_mode(ctx, bad, space, 0), config_error);
}

TEST(Elliptic, ModeParityAndVacuum) {
  ExactContext ctx(10);
  auto space = PairedFockSpace::enumerate(HalfInteger(3));
  auto spec = CurrentSpec::elliptic(CrossSign::Commuting);
  EXPECT_THROW(elliptic_t_mode(ctx, spec, space, HalfInteger(1)), parity_error);
  EXPECT_THROW(elliptic_bilinear(space, HalfInteger(0), CrossSign::Commuting), parity_error);
  for (int t = 1; t <= 5; t += 2) EXPECT_TRUE(elliptic_t_mode(ctx, spec, space, H(t)).column(0).empty());

  auto tm = elliptic_t_mode(ctx, spec, space, H(-1));
  ASSERT_EQ(tm.column(0).size(), 1u);
  auto target = space->index_of(0b1, 0b1);  // {1/2} (x) {0}
  ASSERT_TRUE(target);
  EXPECT_EQ(tm.column(0)[0].first, *target);
  EXPECT_EQ(tm.column(0)[0].second, xl(1, 1) - xl(1, -1));
}

TEST(Elliptic, PairedSpaceCountsAndSigns) {
  auto space = PairedFockSpace::enumerate(HalfInteger(4));
  // Coefficientwise product of the two sector counts.
  std::vector<int> ns_parts, r_parts;
  for (int t = 1; t <= 8; t += 2) ns_parts.push_back(t);
  for (int t = 0; t <= 8; t += 2) r_parts.push_back(t);
  auto a = oracle::distinct_part_counts(ns_parts, 8), b = oracle::distinct_part_counts(r_parts, 8);
  std::vector<long> want(9, 0);
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; i + j <= 8; ++j) want[static_cast<std::size_t>(i + j)] += a[i] * b[j];
  std::vector<long> got(9, 0);
  for (std::size_t i = 0; i < space->dim(); ++i) ++got[static_cast<std::size_t>(space->level(i).twice())];
  EXPECT_EQ(got, want);

  // The two conventions differ exactly by (-1)^{#NS occupied} on the source state.
  auto c = elliptic_bilinear(space, H(1), CrossSign::Commuting);
  auto d = elliptic_bilinear(space, H(1), CrossSign::Anticommuting);
  for (std::size_t j = 0; j < space->dim(); ++j) {
    ASSERT_EQ(c.column(j).size(), d.column(j).size());
    const bool odd = std::popcount(space->ns_mask(j)) % 2 != 0;
    for (std::size_t t = 0; t < c.column(j).size(); ++t)
      EXPECT_EQ(c.column(j)[t].second, odd ? -d.column(j)[t].second : d.column(j)[t].second);
  }
}
