#include <gtest/gtest.h>

#include "qvir/verify/grid.hpp"
#include "qvir/verify/relations.hpp"
#include "test_helpers.hpp"

using namespace qvir;
using namespace qvir::verify;
using coeff::ExactContext;
using coeff::FloatContext;
using coeff::XLaurent;
using current::CrossSign;
using current::PairedFockSpace;
using fock::Sector;

namespace {

HalfInteger H(int twice) { return HalfInteger::from_twice(twice); }
XLaurent xl(long c, int e) { return XLaurent::monomial(c, e); }

std::shared_ptr<ModeCache> trig_modes(Sector s, int cutoff, CurrentSpec spec) {
  return ModeCache::trig(spec, FockSpace::enumerate(s, HalfInteger(cutoff)));
}

std::shared_ptr<ModeCache> trig_modes(Sector s, int cutoff) { return trig_modes(s, cutoff, CurrentSpec::trig(s)); }

std::shared_ptr<ModeCache> elliptic_modes(int cutoff, CrossSign sign) {
  return ModeCache::elliptic(CurrentSpec::elliptic(sign), PairedFockSpace::enumerate(HalfInteger(cutoff)));
}

ResidualOptions window(int lo, int hi) {
  ResidualOptions o;
  o.window_lo = lo;
  o.window_hi = hi;
  return o;
}

}  // namespace

TEST(Delta, CoefficientsAgainstHandExpansion) {
  for (int m = -4; m <= 4; ++m)
    EXPECT_EQ(delta_coefficient(trig_delta_terms(), m), xl(1, -2 * m) - xl(1, 2 * m)) << m;
  for (int N = -7; N <= 7; ++N) {
    // (1/2)[(-1)^N x^{-N} - x^{-N} - (-1)^N x^N + x^N]
    XLaurent want = N % 2 == 0 ? XLaurent() : xl(1, N) - xl(1, -N);
    EXPECT_EQ(delta_coefficient(elliptic_delta_terms(), N), want) << N;
  }
  EXPECT_NE(elliptic_delta_derivation(H(1)).find("x^-1 + x"), std::string::npos);
}

TEST(Dva, TrigExamples) {
  ExactContext ctx(16);
  auto ns = trig_modes(Sector::NS, 5);
  auto r00 = relation_residual(ctx, *ns, HalfInteger(0), HalfInteger(0), window(-16, 16));
  EXPECT_TRUE(r00.pass()) << (r00.residual ? r00.residual->to_string() : "");
  EXPECT_TRUE(r00.delta_coefficient->zero_through(16));

  auto r1 = relation_residual(ctx, *ns, HalfInteger(1), HalfInteger(-1), window(-16, 16));
  EXPECT_TRUE(r1.pass()) << r1.residual->to_string() << " at " << r1.residual_at.value_or("");
  // c (x^{-2} - x^2) with c = (x^3 - x^-3)(x^4 - x^-4)/(x - x^-1)
  XLaurent c = divide_exact((xl(1, 3) - xl(1, -3)) * (xl(1, 4) - xl(1, -4)), xl(1, 1) - xl(1, -1));
  EXPECT_EQ(*r1.delta_coefficient, (c * (xl(1, -2) - xl(1, 2))).truncated(16));
  EXPECT_GT(r1.reliable_dim, 0u);

  auto rr = trig_modes(Sector::R, 5);
  auto r21 = relation_residual(ctx, *rr, HalfInteger(2), HalfInteger(1), window(-16, 16));
  EXPECT_TRUE(r21.pass()) << r21.residual->to_string();
  EXPECT_FALSE(r21.delta_coefficient.has_value());
  EXPECT_THROW(relation_residual(ctx, *rr, H(1), H(-1), window(-16, 16)), parity_error);
}

TEST(Dva, SmallGridBothSectors) {
  ExactContext ctx(12);
  for (Sector s : {Sector::NS, Sector::R}) {
    auto modes = trig_modes(s, 4);
    for (int m = -2; m <= 2; ++m)
      for (int n = -2; n <= 2; ++n) {
        auto rep = relation_residual(ctx, *modes, HalfInteger(m), HalfInteger(n), window(-12, 12));
        EXPECT_NE(rep.status, Status::Fail) << fock::sector_name(s) << " " << m << "," << n << " "
                                            << rep.residual->to_string() << " at " << rep.residual_at.value_or("");
      }
  }
}

TEST(Dva, EmptyReliableSubspaceIsSkipped) {
  ExactContext ctx(8);
  auto modes = trig_modes(Sector::NS, 2);
  auto rep = relation_residual(ctx, *modes, HalfInteger(3), HalfInteger(0), window(-8, 8));
  EXPECT_EQ(rep.status, Status::Skipped);
  EXPECT_EQ(rep.reliable_dim, 0u);
}

TEST(Dva, PerturbationsAreDetected) {
  ExactContext ctx(12);
  auto opt = window(-12, 12);
  Perturbation f;
  f.target = Perturbation::Target::StructureCoefficient;
  f.f_index = 1;
  opt.perturbation = f;
  auto modes = trig_modes(Sector::NS, 4);
  EXPECT_EQ(relation_residual(ctx, *modes, HalfInteger(1), HalfInteger(-1), opt).status, Status::Fail);

  Perturbation k;
  k.target = Perturbation::Target::Normalization;
  auto kopt = window(-12, 12);
  kopt.perturbation = k;
  auto kmodes = trig_modes(Sector::NS, 4, perturbed_spec(CurrentSpec::trig(Sector::NS), k, 12));
  EXPECT_EQ(relation_residual(ctx, *kmodes, HalfInteger(1), HalfInteger(-1), kopt).status, Status::Fail);

  Perturbation c;
  c.target = Perturbation::Target::Contraction;
  c.mode = H(1);
  auto copt = window(-12, 12);
  copt.perturbation = c;
  auto cmodes = trig_modes(Sector::NS, 4, perturbed_spec(CurrentSpec::trig(Sector::NS), c, 12));
  bool any_fail = false;
  for (int m = -1; m <= 1; ++m)
    for (int n = -1; n <= 1; ++n)
      any_fail |= relation_residual(ctx, *cmodes, HalfInteger(m), HalfInteger(n), copt).status == Status::Fail;
  EXPECT_TRUE(any_fail);
}

TEST(Dva, FloatBackend) {
  for (auto x0 : {mpq_class(1, 3), mpq_class(1, 2), mpq_class(7, 10)}) {
    FloatContext ctx(x0, 128);
    auto modes = trig_modes(Sector::R, 4);
    for (auto [m, n] : {std::pair{1, -1}, std::pair{2, 0}, std::pair{0, 0}}) {
      auto rep = relation_residual(ctx, *modes, HalfInteger(m), HalfInteger(n), ResidualOptions{});
      EXPECT_TRUE(rep.pass()) << m << "," << n << " norm " << rep.residual_norm.value_or(-1);
      EXPECT_LE(*rep.residual_norm, 1e-25);
    }
    Perturbation f;
    f.target = Perturbation::Target::StructureCoefficient;
    f.f_index = 1;
    ResidualOptions opt;
    opt.perturbation = f;
    EXPECT_EQ(relation_residual(ctx, *modes, HalfInteger(1), HalfInteger(-1), opt).status, Status::Fail);
  }
}

TEST(Elliptic, ConventionIsFixedByTheRelation) {
  ExactContext ctx(12);
  auto good = elliptic_modes(4, CrossSign::Commuting);
  auto bad = elliptic_modes(4, CrossSign::Anticommuting);
  auto rg = relation_residual(ctx, *good, H(1), H(-1), window(-12, 12));
  EXPECT_TRUE(rg.pass()) << rg.residual->to_string() << " at " << rg.residual_at.value_or("");
  EXPECT_EQ(*rg.delta_coefficient, ((xl(1, 2) - xl(1, -2)) * (xl(1, 1) - xl(1, -1))).truncated(12));
  EXPECT_EQ(rg.convention, "commuting");
  auto rb = relation_residual(ctx, *bad, H(1), H(-1), window(-12, 12));
  EXPECT_EQ(rb.status, Status::Fail);
  EXPECT_THROW(relation_residual(ctx, *good, HalfInteger(1), HalfInteger(0), window(-12, 12)), parity_error);
}

TEST(Elliptic, SmallGrid) {
  ExactContext ctx(10);
  auto modes = elliptic_modes(4, CrossSign::Commuting);
  for (int a = -3; a <= 3; a += 2)
    for (int b = -3; b <= 3; b += 2) {
      auto rep = relation_residual(ctx, *modes, H(a), H(b), window(-10, 10));
      EXPECT_NE(rep.status, Status::Fail) << a << "/2," << b << "/2 " << rep.residual->to_string();
    }
}

TEST(Elliptic, OtherStructureFunctionFails) {
  ExactContext ctx(10);
  auto modes = elliptic_modes(4, CrossSign::Commuting);
  auto opt = window(-10, 10);
  opt.relation_r = 3;
  auto rep = relation_residual(ctx, *modes, H(1), H(-1), opt);
  EXPECT_EQ(rep.r, 3);
  EXPECT_EQ(rep.status, Status::Fail);
}

TEST(Fermion, AnticommutatorSuite) {
  for (Sector s : {Sector::NS, Sector::R}) {
    auto space = FockSpace::enumerate(s, HalfInteger(5));
    auto reps = anticommutator_suite(space, HalfInteger(3));
    EXPECT_TRUE(all_pass(reps));
    for (const auto& r : reps) EXPECT_TRUE(r.pass()) << r.m.to_string() << "," << r.n.to_string();
  }
  auto space = FockSpace::enumerate(Sector::NS, HalfInteger(4));
  auto reps = anticommutator_suite(space, HalfInteger(2), fock::ContractionPerturbation{H(3), 5});
  EXPECT_FALSE(all_pass(reps));
}

TEST(Grid, DeterministicOrderUnderThreads) {
  std::vector<std::function<int()>> tasks;
  for (int i = 0; i < 50; ++i) tasks.push_back([i] { return i * i; });
  auto a = run_tasks(tasks, 1), b = run_tasks(tasks, 4);
  EXPECT_EQ(a, b);
  tasks.push_back([]() -> int { throw config_error("boom"); });
  EXPECT_THROW(run_tasks(tasks, 3), config_error);
}

TEST(Dva, StableUnderCutoffAndWindowGrowth) {
  ExactContext ctx(12);
  auto a = trig_modes(Sector::NS, 4), b = trig_modes(Sector::NS, 6);
  auto ra = relation_residual(ctx, *a, HalfInteger(1), HalfInteger(-1), window(-12, 12));
  auto rb = relation_residual(ExactContext(16), *b, HalfInteger(1), HalfInteger(-1), window(-16, 16));
  ASSERT_TRUE(ra.pass());
  ASSERT_TRUE(rb.pass());
  EXPECT_EQ(*ra.delta_coefficient, rb.delta_coefficient->truncated(12));
}
