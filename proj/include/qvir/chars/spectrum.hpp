#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qvir/chars/dense_eigen.hpp"
#include "qvir/coeff/context.hpp"
#include "qvir/current/current.hpp"
#include "qvir/verify/grid.hpp"

namespace qvir::chars {

using coeff::XLaurent;
using current::CurrentSpec;

enum class SpectrumMethod { Auto, Dense };

struct SpectrumOptions {
  std::optional<HalfInteger> lambda;  // defaults to the level itself
  SpectrumMethod method = SpectrumMethod::Auto;
  int exact_cap = 20;  // x-cap of the exact eigenvalue series
};

struct SpectrumLine {
  XFloat value;
  std::optional<XFloat> imag;  // dense route only
  std::size_t multiplicity = 0;
  std::optional<XLaurent> exact;  // diagonal route only
  std::vector<std::string> states;
};

struct SpectrumReport {
  Sector sector = Sector::NS;
  HalfInteger level, lambda;
  mpq_class x0;
  mpfr_prec_t precision = 0;
  std::size_t dim = 0;
  std::string method;  // diagonal | dense
  std::vector<SpectrumLine> eigenvalues;
  XFloat trace;        // exact block trace evaluated at x0
  XFloat eigen_sum;    // sum of multiplicity * eigenvalue
  bool trace_consistent = true;

  std::size_t total_multiplicity() const {
    std::size_t s = 0;
    for (const auto& l : eigenvalues) s += l.multiplicity;
    return s;
  }
};

namespace detail {

inline bool overlap(const XFloat& a, const XFloat& b) {
  BigFloat d(std::max(a.precision(), b.precision()) + 8), tol(XFloat::kErrPrec), ad(XFloat::kErrPrec);
  mpfr_sub(d.get(), a.value().get(), b.value().get(), MPFR_RNDN);
  mpfr_abs(ad.get(), d.get(), MPFR_RNDD);
  mpfr_add(tol.get(), a.error_bound().get(), b.error_bound().get(), MPFR_RNDU);
  // one ulp of the wider operand for the subtraction above
  BigFloat ulp = a.magnitude_bound();
  mpfr_mul_2si(ulp.get(), ulp.get(), -static_cast<long>(std::min(a.precision(), b.precision())), MPFR_RNDU);
  mpfr_add(tol.get(), tol.get(), ulp.get(), MPFR_RNDU);
  return mpfr_lessequal_p(ad.get(), tol.get()) != 0;
}

inline void check_spectrum_config(Sector s, HalfInteger level, const mpq_class& x0, mpfr_prec_t prec) {
  if (x0 <= 0 || x0 >= 1) throw config_error("x0 must lie in (0,1)");
  if (prec < 16) throw config_error("precision must be at least 16 bits");
  if (level < HalfInteger(0)) throw config_error("level must be nonnegative");
  if (s == Sector::R && !level.is_integer()) throw parity_error("R levels are integers, got " + level.to_string());
}

}  // namespace detail

// Eigenvalues of the level block of the trigonometric T_0 at x = x0.
// T_0 has degree 0, so the block is exact on any cutoff >= level. When the
// block is diagonal (the free-fermion case) eigenvalues are its entries,
// grouped by exact equality; otherwise a dense arbitrary-precision solve.
inline SpectrumReport t0_block_spectrum(Sector sector, HalfInteger level, const mpq_class& x0, mpfr_prec_t prec,
                                        const SpectrumOptions& opt = {}) {
  detail::check_spectrum_config(sector, level, x0, prec);
  const HalfInteger lambda = opt.lambda.value_or(level);
  if (lambda < level) throw config_error("cutoff below the requested level");
  auto space = fock::FockSpace::enumerate(sector, lambda);
  const auto spec = CurrentSpec::trig(sector);

  SpectrumReport rep;
  rep.sector = sector;
  rep.level = level;
  rep.lambda = lambda;
  rep.x0 = x0;
  rep.precision = prec;

  std::vector<std::uint32_t> block;
  for (std::uint32_t j = 0; j < space->dim(); ++j)
    if (space->level(j) == level) block.push_back(j);
  rep.dim = block.size();

  coeff::FloatContext fctx(x0, prec);
  auto normal = current::trig_normal_part(space, 0);
  bool diagonal = true;
  for (auto j : block)
    for (const auto& [i, v] : normal.column(j))
      if (i != j) diagonal = false;

  // Exact trace kappa * tr N + dim * E, on a cap where x0^cap is negligible.
  coeff::ExactContext wide(fctx.negligible_degree());
  XLaurent trn;
  for (auto j : block)
    if (const XLaurent* v = normal.find(j, j)) trn = trn + *v;
  XLaurent exact_trace = current::kappa(wide, spec) * trn +
                         current::vacuum_shift(wide, spec).scaled(mpq_class(static_cast<long>(block.size())));
  rep.trace = fctx.lift(exact_trace);

  if (diagonal && opt.method == SpectrumMethod::Auto) {
    rep.method = "diagonal";
    coeff::ExactContext ectx(opt.exact_cap);
    const XLaurent kx = current::kappa(ectx, spec), ex = current::vacuum_shift(ectx, spec);
    const XFloat kf = current::kappa(fctx, spec), ef = current::vacuum_shift(fctx, spec);
    std::vector<std::pair<XLaurent, std::vector<std::uint32_t>>> groups;
    for (auto j : block) {
      const XLaurent* v = normal.find(j, j);
      XLaurent n = v ? *v : XLaurent();
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == n; });
      if (it == groups.end()) groups.push_back({n, {j}});
      else it->second.push_back(j);
    }
    for (const auto& [n, members] : groups) {
      SpectrumLine line;
      line.value = kf * fctx.lift(n) + ef;
      line.exact = (kx * n + ex).truncated(opt.exact_cap);
      line.multiplicity = members.size();
      for (auto j : members) line.states.push_back(space->describe(j));
      rep.eigenvalues.push_back(std::move(line));
    }
  } else {
    rep.method = "dense";
    auto t0 = current::t_mode(fctx, spec, space, 0);
    std::vector<std::vector<XFloat>> a(block.size(), std::vector<XFloat>(block.size(), fctx.zero()));
    for (std::size_t c = 0; c < block.size(); ++c)
      for (std::size_t r = 0; r < block.size(); ++r)
        if (const XFloat* v = t0.find(block[r], block[c])) a[r][c] = *v;
    for (const auto& e : dense_eigenvalues(a, prec)) {
      if (!rep.eigenvalues.empty() && detail::overlap(rep.eigenvalues.back().value, e.re) &&
          detail::overlap(*rep.eigenvalues.back().imag, e.im)) {
        ++rep.eigenvalues.back().multiplicity;
        continue;
      }
      SpectrumLine line;
      line.value = e.re;
      line.imag = e.im;
      line.multiplicity = 1;
      rep.eigenvalues.push_back(std::move(line));
    }
  }

  std::stable_sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const SpectrumLine& a, const SpectrumLine& b) {
    return mpfr_less_p(a.value.value().get(), b.value.value().get()) != 0;
  });
  rep.eigen_sum = fctx.zero();
  for (const auto& l : rep.eigenvalues)
    rep.eigen_sum += l.value * XFloat::from_mpq(mpq_class(static_cast<long>(l.multiplicity)), prec);
  rep.trace_consistent = detail::overlap(rep.trace, rep.eigen_sum);
  return rep;
}

// One report per level 0 .. level_max (in the sector's level steps).
inline std::vector<SpectrumReport> t0_spectrum_table(Sector sector, HalfInteger level_max, const mpq_class& x0,
                                                     mpfr_prec_t prec, unsigned threads,
                                                     const SpectrumOptions& opt = {}) {
  std::vector<std::function<SpectrumReport()>> tasks;
  const int step = sector == Sector::NS ? 1 : 2;
  for (int t = 0; t <= level_max.twice(); t += step) {
    SpectrumOptions o = opt;
    o.lambda = opt.lambda ? std::optional(std::max(*opt.lambda, level_max)) : std::optional(level_max);
    tasks.push_back([=] { return t0_block_spectrum(sector, HalfInteger::from_twice(t), x0, prec, o); });
  }
  return verify::run_tasks(tasks, threads);
}

}  // namespace qvir::chars
