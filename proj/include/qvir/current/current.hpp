#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvir/coeff/context.hpp"
#include "qvir/errors.hpp"
#include "qvir/fock/graded_operator.hpp"
#include "qvir/qseries/zseries.hpp"

namespace qvir::current {

using coeff::XLaurent;
using fock::ContractionPerturbation;
using fock::FockSpace;
using fock::GradedBasis;
using fock::GradedOperator;
using fock::OperatorOf;
using fock::Sector;

enum class CurrentKind { Trig, Elliptic };

// Sign picked up by an R-family mode passing an NS-family occupation.
enum class CrossSign { Commuting, Anticommuting };

inline std::string kind_name(CurrentKind k) { return k == CurrentKind::Trig ? "trig" : "elliptic"; }
inline std::string cross_sign_name(CrossSign s) { return s == CrossSign::Commuting ? "commuting" : "anticommuting"; }

inline CrossSign parse_cross_sign(const std::string& s) {
  if (s == "commuting") return CrossSign::Commuting;
  if (s == "anticommuting") return CrossSign::Anticommuting;
  throw config_error("unknown sign convention '" + s + "'");
}

struct CurrentSpec {
  CurrentKind kind = CurrentKind::Trig;
  int r = 4;
  Sector sector = Sector::NS;  // trig only
  CrossSign cross_sign = CrossSign::Commuting;  // elliptic only
  std::optional<int> kappa_perturbation;  // adds x^e to the normalization
  std::optional<ContractionPerturbation> contraction_perturbation;

  static CurrentSpec trig(Sector s) { return CurrentSpec{CurrentKind::Trig, 4, s, CrossSign::Commuting, {}, {}}; }
  static CurrentSpec elliptic(CrossSign c) {
    return CurrentSpec{CurrentKind::Elliptic, 2, Sector::NS, c, {}, {}};
  }

  void validate() const {
    if (kind == CurrentKind::Trig && r != 4) throw config_error("trigonometric current is defined for r = 4");
    if (kind == CurrentKind::Elliptic && r != 2) throw config_error("elliptic current is defined for r = 2");
  }
};

// Normalization constant; exact Laurent series truncated at ctx.cap().
template <coeff::CoefficientContext Ctx>
typename Ctx::value_type kappa(const Ctx& ctx, const CurrentSpec& spec) {
  typename Ctx::value_type k;
  if (spec.kind == CurrentKind::Trig) {
    // (1 - x^6) / (x^2 (1 + x^2))
    auto num = ctx.one() - ctx.monomial(1, 6);
    auto den = ctx.monomial(1, 2) + ctx.monomial(1, 4);
    k = ctx.finish(ctx.mul(num, ctx.inverse(den), ctx.working_cap()));
  } else {
    k = ctx.monomial(1, 1) - ctx.monomial(1, -1);
  }
  if (spec.kappa_perturbation) k = k + ctx.monomial(1, *spec.kappa_perturbation);
  return k;
}

// Normal-ordering constant C0 (plus the psi_0^2 term in R):
//   NS: x^3/(1-x^6) + x/(1-x^2),  R: x^6/(1-x^6) + x^2/(1-x^2) + 1.
template <coeff::CoefficientContext Ctx>
typename Ctx::value_type vacuum_constant(const Ctx& ctx, Sector sector) {
  auto geom = [&](int lead, int step) {
    return ctx.mul(ctx.monomial(1, lead), ctx.inverse(ctx.one() - ctx.monomial(1, step)), ctx.working_cap());
  };
  if (sector == Sector::NS) return ctx.finish(geom(3, 6) + geom(1, 2));
  return ctx.finish(geom(6, 6) + geom(2, 2) + ctx.one());
}

// Scalar part of T_0: kappa * vacuum_constant, i.e. the vacuum eigenvalue.
template <coeff::CoefficientContext Ctx>
typename Ctx::value_type vacuum_shift(const Ctx& ctx, const CurrentSpec& spec) {
  return qseries::with_headroom(ctx, 8, [&](const auto& c) {
    return c.finish(c.mul(kappa(c, spec), vacuum_constant(c, spec.sector), c.working_cap()));
  });
}

template <coeff::CoefficientContext Ctx>
OperatorOf<Ctx> lift_operator(const Ctx& ctx, const GradedOperator<XLaurent>& a) {
  OperatorOf<Ctx> out(a.basis_ptr(), a.degree());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    typename OperatorOf<Ctx>::Column col;
    for (const auto& [i, v] : a.column(j)) col.emplace_back(i, ctx.lift(v));
    out.set_column(j, std::move(col));
  }
  return out;
}

namespace detail {

inline XLaurent exact_contraction(HalfInteger m, const std::optional<ContractionPerturbation>& p) {
  XLaurent f = XLaurent::monomial(1, m.twice()) + XLaurent::monomial(1, -m.twice());
  if (p && p->mode == m) f = f + XLaurent::monomial(1, p->x_exponent);
  return f;
}

struct Applied {
  std::uint64_t mask;
  XLaurent coef;
};

inline std::optional<Applied> apply_exact(Sector sector, HalfInteger m, std::uint64_t mask, XLaurent coef,
                                          const std::optional<ContractionPerturbation>& p) {
  auto act = fock::psi_action(sector, m, mask);
  if (!act) return std::nullopt;
  if (act->contraction) coef = coef * exact_contraction(m, p);
  if (act->sign < 0) coef = -coef;
  return Applied{act->mask, std::move(coef)};
}

inline void accumulate(std::map<std::uint32_t, XLaurent>& col, std::uint32_t row, const XLaurent& v) {
  auto [it, fresh] = col.emplace(row, v);
  if (!fresh) it->second = it->second + v;
}

inline GradedOperator<XLaurent>::Column to_column(std::map<std::uint32_t, XLaurent>& acc) {
  GradedOperator<XLaurent>::Column col;
  for (auto& [i, v] : acc)
    if (!v.is_exact_zero()) col.emplace_back(i, std::move(v));
  return col;
}

}  // namespace detail

// Normal-ordered bilinear N_k = sum_m x^{4m-2k} :psi_m psi_{k-m}: with the
// annihilator on the right. Products are evaluated on occupation masks, so
// intermediate states are never truncated; entries are exact Laurent
// polynomials. T_k = kappa N_k + delta_{k0} vacuum_shift.
inline GradedOperator<XLaurent> trig_normal_part(const std::shared_ptr<const FockSpace>& space, int k,
                                                 const std::optional<ContractionPerturbation>& p = std::nullopt) {
  const Sector sector = space->sector();
  GradedOperator<XLaurent> out(space, HalfInteger(-k));
  const HalfInteger kk(k);
  const HalfInteger bound = space->cutoff() + HalfInteger(std::abs(k));
  if (bound.twice() >= 2 * fock::kMaxSlots - 4) throw config_error("cutoff too large for occupation mask");
  const auto modes = FockSpace::sector_modes(sector, bound);
  for (std::size_t j = 0; j < space->dim(); ++j) {
    std::map<std::uint32_t, XLaurent> acc;
    const std::uint64_t mask = space->state(j).mask;
    for (HalfInteger a : modes) {
      HalfInteger b = kk - a;
      if (a == b) continue;  // psi_a^2 = 0; the R zero-mode square lives in the constant
      // Right factor is the larger mode; reordering costs a sign.
      HalfInteger first = a < b ? b : a, second = a < b ? a : b;
      XLaurent coef = XLaurent::monomial(a < b ? 1 : -1, 2 * a.twice() - 2 * k);
      auto s1 = detail::apply_exact(sector, first, mask, coef, p);
      if (!s1) continue;
      auto s2 = detail::apply_exact(sector, second, s1->mask, s1->coef, p);
      if (!s2) continue;
      auto i = space->index_of(s2->mask);
      if (!i) continue;
      detail::accumulate(acc, *i, s2->coef);
    }
    out.set_column(j, detail::to_column(acc));
  }
  return out;
}

// T_k assembled in the coefficient ring of ctx.
template <coeff::CoefficientContext Ctx>
OperatorOf<Ctx> t_mode(const Ctx& ctx, const CurrentSpec& spec, const std::shared_ptr<const FockSpace>& space, int k) {
  spec.validate();
  if (spec.kind != CurrentKind::Trig) throw config_error("t_mode needs the trigonometric current");
  if (space->sector() != spec.sector) throw config_error("space sector differs from current sector");
  auto n = lift_operator(ctx, trig_normal_part(space, k, spec.contraction_perturbation));
  auto t = fock::op_scale(ctx, n, kappa(ctx, spec));
  if (k == 0) t = fock::op_add(ctx, t, fock::op_scale(ctx, fock::op_identity(ctx, space), vacuum_shift(ctx, spec)));
  return t;
}

// NS-family (x) R-family state space graded by total level <= cutoff.
class PairedFockSpace : public GradedBasis {
 public:
  static std::shared_ptr<const PairedFockSpace> enumerate(HalfInteger cutoff) {
    auto sp = std::shared_ptr<PairedFockSpace>(new PairedFockSpace());
    sp->cutoff_ = cutoff;
    sp->ns_ = FockSpace::enumerate(Sector::NS, cutoff);
    sp->r_ = FockSpace::enumerate(Sector::R, cutoff);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t a = 0; a < sp->ns_->dim(); ++a)
      for (std::uint32_t b = 0; b < sp->r_->dim(); ++b)
        if (sp->ns_->level(a) + sp->r_->level(b) <= cutoff) pairs.emplace_back(a, b);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
      return sp->ns_->level(x.first) + sp->r_->level(x.second) < sp->ns_->level(y.first) + sp->r_->level(y.second);
    });
    for (const auto& pr : pairs) {
      sp->index_.emplace(key(sp->ns_->state(pr.first).mask, sp->r_->state(pr.second).mask),
                         static_cast<std::uint32_t>(sp->pairs_.size()));
      sp->pairs_.push_back(pr);
      sp->levels_.push_back(sp->ns_->level(pr.first) + sp->r_->level(pr.second));
    }
    return sp;
  }

  const FockSpace& ns() const { return *ns_; }
  const FockSpace& r() const { return *r_; }
  std::uint64_t ns_mask(std::size_t i) const { return ns_->state(pairs_[i].first).mask; }
  std::uint64_t r_mask(std::size_t i) const { return r_->state(pairs_[i].second).mask; }

  std::optional<std::uint32_t> index_of(std::uint64_t ns_mask, std::uint64_t r_mask) const {
    auto it = index_.find(key(ns_mask, r_mask));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::string describe(std::size_t i) const override {
    return ns_->describe(pairs_[i].first) + "(x)" + r_->describe(pairs_[i].second);
  }
  std::string label() const override { return "paired NS(x)R space, cutoff " + cutoff_.to_string(); }

 private:
  PairedFockSpace() = default;
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
    }
  };
  static std::pair<std::uint64_t, std::uint64_t> key(std::uint64_t a, std::uint64_t b) { return {a, b}; }
  std::shared_ptr<const FockSpace> ns_, r_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t, KeyHash> index_;
};

// Bilinear M_s = sum_{a in Z+1/2} psi^NS_a psi^R_{s-a}; T_s = (x - x^{-1}) M_s.
// Only half-integer s occur (T is odd in zeta).
inline GradedOperator<XLaurent> elliptic_bilinear(const std::shared_ptr<const PairedFockSpace>& space, HalfInteger s,
                                                  CrossSign sign,
                                                  const std::optional<ContractionPerturbation>& p = std::nullopt) {
  if (s.is_integer()) throw parity_error("elliptic current has half-integer modes only, got " + s.to_string());
  GradedOperator<XLaurent> out(space, -s);
  const HalfInteger bound = space->cutoff() + s.abs() + HalfInteger(1);
  if (bound.twice() >= 2 * fock::kMaxSlots - 4) throw config_error("cutoff too large for occupation mask");
  const auto modes = FockSpace::sector_modes(Sector::NS, bound);
  for (std::size_t j = 0; j < space->dim(); ++j) {
    std::map<std::uint32_t, XLaurent> acc;
    const std::uint64_t u = space->ns_mask(j), v = space->r_mask(j);
    const bool odd_ns = std::popcount(u) % 2 != 0;
    for (HalfInteger a : modes) {
      HalfInteger b = s - a;
      XLaurent coef = XLaurent::monomial(sign == CrossSign::Anticommuting && odd_ns ? -1 : 1, 0);
      auto rv = detail::apply_exact(Sector::R, b, v, coef, p);
      if (!rv) continue;
      auto nu = detail::apply_exact(Sector::NS, a, u, rv->coef, p);
      if (!nu) continue;
      auto i = space->index_of(nu->mask, rv->mask);
      if (!i) continue;
      detail::accumulate(acc, *i, nu->coef);
    }
    out.set_column(j, detail::to_column(acc));
  }
  return out;
}

template <coeff::CoefficientContext Ctx>
OperatorOf<Ctx> elliptic_t_mode(const Ctx& ctx, const CurrentSpec& spec,
                                const std::shared_ptr<const PairedFockSpace>& space, HalfInteger s) {
  spec.validate();
  if (spec.kind != CurrentKind::Elliptic) throw config_error("elliptic_t_mode needs the elliptic current");
  auto m = lift_operator(ctx, elliptic_bilinear(space, s, spec.cross_sign, spec.contraction_perturbation));
  return fock::op_scale(ctx, m, kappa(ctx, spec));
}

}  // namespace qvir::current
