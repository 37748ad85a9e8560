#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qvir/coeff/context.hpp"
#include "qvir/half_integer.hpp"
#include "test_helpers.hpp"

using qvir::coeff::ExactContext;
using qvir::coeff::FloatContext;
using qvir::coeff::kExactCap;
using qvir::coeff::XFloat;
using qvir::coeff::XLaurent;
using testing_support::matches;
using testing_support::to_xl;

namespace {

XLaurent X(int e, long c = 1) { return XLaurent::monomial(c, e); }

}  // namespace

TEST(XLaurent, Cancellation) {
  XLaurent a = X(0) + X(1);
  XLaurent b = X(0) - X(1);
  EXPECT_EQ(a + b, X(0, 2));
  EXPECT_EQ(a + XLaurent(), a);
  EXPECT_TRUE((a - a).is_exact_zero());
}

TEST(XLaurent, ProductsAndShift) {
  EXPECT_EQ((X(0) + X(1)) * (X(0) - X(1)), X(0) - X(2));
  EXPECT_EQ(X(-2) * X(2), X(0));
  EXPECT_TRUE((XLaurent() * X(5)).is_exact_zero());
  EXPECT_TRUE((XLaurent::unknown_above(3) * XLaurent()).is_exact_zero());
}

TEST(XLaurent, GeometricInverse) {
  XLaurent g = inverse(X(0) - X(1), 10);
  EXPECT_EQ(g.reliable_hi(), 10);
  for (int e = 0; e <= 10; ++e) EXPECT_EQ(g.coeff(e), 1);
  EXPECT_EQ(inverse(X(2), 10), X(-2));
  EXPECT_TRUE(inverse(X(2), 10).is_exact());
  EXPECT_THROW(inverse(XLaurent(), 4), qvir::not_invertible);
  EXPECT_THROW(g.coeff(11), qvir::precision_error);
}

TEST(XLaurent, InverseOfTruncatedKeepsRelativePrecision) {
  // (x^-1 + 2 + O(x^3)) has relative precision 4; inverse is reliable through x^{1+3}.
  XLaurent a = (X(-1) + X(0, 2)).truncated(3);
  XLaurent b = inverse(a, 100);
  EXPECT_EQ(b.reliable_hi(), 5);
  XLaurent prod = a * b;
  EXPECT_TRUE((prod - X(0)).zero_through(prod.reliable_hi()));
  EXPECT_GE(prod.reliable_hi(), 3);
}

TEST(XLaurent, RandomSumsMatchTermwiseOracle) {
  for (int t = 0; t < 200; ++t) {
    auto pa = oracle::random_poly(oracle::uniform(-8, 0), oracle::uniform(0, 8));
    auto pb = oracle::random_poly(oracle::uniform(-8, 0), oracle::uniform(0, 8));
    int ca = oracle::uniform(2, 12), cb = oracle::uniform(2, 12);
    XLaurent s = to_xl(pa, ca) + to_xl(pb, cb);
    int cap = std::min(ca, cb);
    EXPECT_EQ(s.reliable_hi(), cap);
    EXPECT_TRUE(matches(s, oracle::truncate(oracle::add(oracle::truncate(pa, ca), oracle::truncate(pb, cb)), cap), -20, cap));
    XLaurent d = to_xl(pa) - to_xl(pb);
    EXPECT_TRUE(matches(d, oracle::add(pa, pb, -1), -20, 20));
  }
}

TEST(XLaurent, RandomProductsMatchConvolutionOracle) {
  for (int t = 0; t < 200; ++t) {
    auto pa = oracle::random_poly(oracle::uniform(-6, 2), oracle::uniform(2, 9));
    auto pb = oracle::random_poly(oracle::uniform(-6, 2), oracle::uniform(2, 9));
    if (pa.empty() || pb.empty()) continue;
    XLaurent exact = to_xl(pa) * to_xl(pb);
    EXPECT_TRUE(exact.is_exact());
    EXPECT_TRUE(matches(exact, oracle::mul(pa, pb, 1000), -30, 30));

    int ca = pa.rbegin()->first - oracle::uniform(0, 2);
    int cb = pb.rbegin()->first - oracle::uniform(0, 2);
    XLaurent ta = to_xl(oracle::truncate(pa, ca), ca);
    XLaurent tb = to_xl(oracle::truncate(pb, cb), cb);
    XLaurent p = ta * tb;
    int va = pa.begin()->first, vb = pb.begin()->first;
    if (ta.has_terms() && tb.has_terms()) {
      EXPECT_EQ(p.reliable_hi(), std::min(ca + tb.min_exp(), cb + ta.min_exp()));
      // The truncated product agrees with the full product on its window.
      EXPECT_TRUE(matches(p, oracle::mul(pa, pb, 1000), va + vb - 1, p.reliable_hi()));
    }
  }
}

TEST(XLaurent, MultiplyBackGivesOne) {
  for (int t = 0; t < 100; ++t) {
    auto pa = oracle::random_poly(oracle::uniform(-5, 3), oracle::uniform(3, 8));
    if (pa.empty()) continue;
    XLaurent a = to_xl(pa);
    XLaurent inv = inverse(a, 15);
    XLaurent prod = a * inv;
    int hi = std::min(prod.reliable_hi(), 40);
    EXPECT_TRUE(matches(prod, oracle::mono(1, 0), -30, hi));
    EXPECT_GE(prod.reliable_hi(), 15 + a.min_exp());
  }
}

TEST(XLaurent, RingAxiomsOnWindows) {
  for (int t = 0; t < 60; ++t) {
    XLaurent a = to_xl(oracle::random_poly(-3, 6), oracle::uniform(4, 9));
    XLaurent b = to_xl(oracle::random_poly(-2, 6), oracle::uniform(4, 9));
    XLaurent c = to_xl(oracle::random_poly(-4, 6), oracle::uniform(4, 9));
    XLaurent l1 = (a * b) * c, r1 = a * (b * c);
    int h1 = std::min(l1.reliable_hi(), r1.reliable_hi());
    EXPECT_TRUE(l1.agrees_with(r1, -20, h1));
    XLaurent l2 = a * (b + c), r2 = a * b + a * c;
    int h2 = std::min(l2.reliable_hi(), r2.reliable_hi());
    EXPECT_TRUE(l2.agrees_with(r2, -20, h2));
    EXPECT_EQ(a * b, b * a);
  }
}

TEST(XLaurent, RecomputationAtLargerCapExtendsWindow) {
  auto p = oracle::random_poly(-4, 6);
  if (p.empty()) p = oracle::mono(1, 0);
  XLaurent lo = inverse(to_xl(p) + X(0, 3) + X(7), 10);
  XLaurent hi = inverse(to_xl(p) + X(0, 3) + X(7), 20);
  EXPECT_TRUE(lo.agrees_with(hi, -30, lo.reliable_hi()));
  EXPECT_EQ(hi.truncated(lo.reliable_hi()), lo);
}

TEST(XLaurent, FloorIntersectsAndDegenerates) {
  XLaurent a = (X(0) + X(1)).truncated(5).with_floor(-3);
  XLaurent b = (X(0) + X(2)).with_floor(-1);
  EXPECT_EQ((a + b).reliable_lo(), -1);
  EXPECT_THROW((X(0) + X(1)).truncated(5).with_floor(6), qvir::precision_error);
  XLaurent c = (X(0) + X(1)).truncated(2).with_floor(1);
  EXPECT_THROW(c * (X(0) + X(1)).truncated(0), qvir::precision_error);
}

TEST(XLaurent, ExactDivision) {
  // (x^3 - x^-3)(x^4 - x^-4) / (x - x^-1)
  XLaurent num = (X(3) - X(-3)) * (X(4) - X(-4));
  XLaurent q = divide_exact(num, X(1) - X(-1));
  EXPECT_TRUE(q.is_exact());
  EXPECT_EQ(q * (X(1) - X(-1)), num);
  EXPECT_THROW(divide_exact(X(0) + X(1) + X(2), X(0) + X(1)), std::domain_error);
}

TEST(XLaurent, Printing) {
  EXPECT_EQ((X(-1) - X(0, 2) + X(3)).to_string(), "x^-1 - 2 + x^3");
  EXPECT_EQ((X(0) + X(1)).truncated(4).to_string(), "1 + x + O(x^5)");
  EXPECT_EQ(XLaurent().to_string(), "0");
  EXPECT_EQ(XLaurent::monomial(mpq_class(-3, 2), 2).to_string(), "-3/2*x^2");
}

TEST(XFloat, EvaluateSimpleSeries) {
  XFloat v = qvir::coeff::xl_eval_float(X(0) + X(1), mpq_class(1, 2), 128);
  EXPECT_TRUE(v.brackets(mpq_class(3, 2)));
  XLaurent g = inverse(X(0) - X(1), 200);
  XFloat gv = qvir::coeff::xl_eval_float(g, mpq_class(1, 2), 128);
  EXPECT_TRUE(gv.brackets(2));
  EXPECT_LT(gv.error_bound().to_double(), 1e-36);
}

TEST(XFloat, RandomSeriesAgainstExactPartialSum) {
  for (int t = 0; t < 50; ++t) {
    auto p = oracle::random_poly(oracle::uniform(-10, 0), oracle::uniform(5, 40));
    mpq_class x0(oracle::uniform(1, 9), 10);
    XLaurent a = to_xl(p);
    XFloat v = qvir::coeff::xl_eval_float(a, x0, 96);
    EXPECT_TRUE(v.brackets(a.evaluate_terms(x0)));
  }
}

TEST(XFloat, BracketsClosedFormsThroughArithmetic) {
  FloatContext ctx(mpq_class(7, 10), 128);
  // (x + 1/x) via monomials and inverse
  XFloat x = ctx.monomial(1, 1);
  XFloat s = x + ctx.inverse(x);
  EXPECT_TRUE(s.brackets(mpq_class(7, 10) + mpq_class(10, 7)));
  XFloat g = ctx.inverse(ctx.one() - x * x);
  EXPECT_TRUE(g.brackets(1 / (1 - mpq_class(49, 100))));
  EXPECT_FALSE(g.brackets(1 / (1 - mpq_class(49, 100)) + mpq_class(1, 1000000)));
}

TEST(XFloat, StringRoundTrip) {
  FloatContext ctx(mpq_class(1, 3), 128);
  XFloat v = ctx.monomial(1, -7) + ctx.monomial(mpq_class(2, 3), 5);
  auto s = v.value().to_exact_string();
  auto back = qvir::coeff::BigFloat::from_string(s, 128);
  EXPECT_EQ(mpfr_cmp(back.get(), v.value().get()), 0);
}

TEST(Params, DerivedLabels) {
  qvir::coeff::Params p{4, 1, 1, 1};
  p.validate();
  EXPECT_EQ(p.l1(), 2);
  EXPECT_EQ(p.l_i(), 2);
  EXPECT_THROW((qvir::coeff::Params{1, 1, 1, 0}.validate()), qvir::config_error);
  EXPECT_THROW((qvir::coeff::Params{4, 1, 3, 0}.validate()), qvir::config_error);
}

TEST(HalfInteger, ParseAndArithmetic) {
  using qvir::HalfInteger;
  EXPECT_EQ(HalfInteger::parse("5/2").twice(), 5);
  EXPECT_EQ(HalfInteger::parse("-2.5").twice(), -5);
  EXPECT_EQ(HalfInteger::parse("3").twice(), 6);
  EXPECT_THROW(HalfInteger::parse("1/3"), qvir::config_error);
  EXPECT_EQ(HalfInteger::from_twice(-3).floor(), -2);
  EXPECT_EQ(HalfInteger::from_twice(3).floor(), 1);
  EXPECT_EQ((HalfInteger::from_twice(1) + HalfInteger(1)).to_string(), "3/2");
}
