#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "qvir/coeff/xlaurent.hpp"
#include "qvir/errors.hpp"
#include "qvir/fock/fock_space.hpp"

namespace qvir::fock {

// Sparse operator on one graded basis, stored by columns with rows sorted.
// Maps level e to level e + degree; rows above the cutoff do not exist.
template <class R>
class GradedOperator {
 public:
  using Entry = std::pair<std::uint32_t, R>;
  using Column = std::vector<Entry>;

  GradedOperator(std::shared_ptr<const GradedBasis> basis, HalfInteger degree)
      : basis_(std::move(basis)), degree_(degree), columns_(basis_->dim()) {}

  const GradedBasis& basis() const { return *basis_; }
  const std::shared_ptr<const GradedBasis>& basis_ptr() const { return basis_; }
  HalfInteger degree() const { return degree_; }
  std::size_t dim() const { return columns_.size(); }
  const Column& column(std::size_t j) const { return columns_[j]; }
  const std::vector<Column>& columns() const { return columns_; }

  void set_column(std::size_t j, Column col) {
    std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < col.size(); ++t) {
      if (t > 0 && col[t - 1].first == col[t].first) throw shape_error("duplicate row in operator column");
      if (basis_->level(col[t].first) != basis_->level(j) + degree_)
        throw shape_error("entry violates grading: " + basis_->describe(col[t].first) + " <- " + basis_->describe(j));
    }
    columns_[j] = std::move(col);
  }

  const R* find(std::size_t i, std::size_t j) const {
    const auto& col = columns_[j];
    auto it = std::lower_bound(col.begin(), col.end(), i,
                               [](const Entry& e, std::size_t row) { return e.first < row; });
    if (it == col.end() || it->first != i) return nullptr;
    return &it->second;
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
  }

  bool same_basis(const GradedOperator& o) const { return basis_ == o.basis_; }

 private:
  std::shared_ptr<const GradedBasis> basis_;
  HalfInteger degree_;
  std::vector<Column> columns_;
};

template <class Ctx>
using OperatorOf = GradedOperator<typename Ctx::value_type>;

template <class Ctx>
OperatorOf<Ctx> op_identity(const Ctx& ctx, std::shared_ptr<const GradedBasis> basis) {
  OperatorOf<Ctx> out(basis, HalfInteger(0));
  for (std::size_t j = 0; j < basis->dim(); ++j) out.set_column(j, {{static_cast<std::uint32_t>(j), ctx.one()}});
  return out;
}

namespace detail {
inline void check_same_space(const GradedBasis& a, const GradedBasis& b) {
  if (&a != &b) throw shape_error("operators act on different spaces: " + a.label() + " vs " + b.label());
}
}  // namespace detail

// A + sign*B; both operands must share space and degree.
template <class Ctx>
OperatorOf<Ctx> op_add(const Ctx& ctx, const OperatorOf<Ctx>& a, const OperatorOf<Ctx>& b, int sign = 1) {
  detail::check_same_space(a.basis(), b.basis());
  if (a.degree() != b.degree())
    throw shape_error("degree mismatch in sum: " + a.degree().to_string() + " vs " + b.degree().to_string());
  OperatorOf<Ctx> out(a.basis_ptr(), a.degree());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const auto& ca = a.column(j);
    const auto& cb = b.column(j);
    typename OperatorOf<Ctx>::Column col;
    std::size_t p = 0, q = 0;
    while (p < ca.size() || q < cb.size()) {
      if (q == cb.size() || (p < ca.size() && ca[p].first < cb[q].first)) {
        col.push_back(ca[p++]);
      } else if (p == ca.size() || cb[q].first < ca[p].first) {
        col.emplace_back(cb[q].first, sign > 0 ? cb[q].second : -cb[q].second);
        ++q;
      } else {
        auto v = sign > 0 ? ca[p].second + cb[q].second : ca[p].second - cb[q].second;
        if (!ctx.is_exact_zero(v)) col.emplace_back(ca[p].first, std::move(v));
        ++p, ++q;
      }
    }
    out.set_column(j, std::move(col));
  }
  return out;
}

template <class Ctx>
OperatorOf<Ctx> op_scale(const Ctx& ctx, const OperatorOf<Ctx>& a, const typename Ctx::value_type& c) {
  OperatorOf<Ctx> out(a.basis_ptr(), a.degree());
  if (ctx.is_exact_zero(c)) return out;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    typename OperatorOf<Ctx>::Column col;
    for (const auto& [i, v] : a.column(j)) {
      auto w = ctx.mul(v, c, coeff::kExactCap);
      if (!ctx.is_exact_zero(w)) col.emplace_back(i, std::move(w));
    }
    out.set_column(j, std::move(col));
  }
  return out;
}

// A*B. Only the listed columns are computed when `cols` is given; the rest
// are left empty. Entry products are truncated at x^limit.
template <class Ctx>
OperatorOf<Ctx> op_compose(const Ctx& ctx, const OperatorOf<Ctx>& a, const OperatorOf<Ctx>& b,
                           const std::vector<std::uint32_t>* cols = nullptr, int limit = coeff::kExactCap) {
  detail::check_same_space(a.basis(), b.basis());
  using R = typename Ctx::value_type;
  OperatorOf<Ctx> out(a.basis_ptr(), a.degree() + b.degree());
  const std::size_t n = a.dim();
  std::vector<std::optional<R>> acc(n);
  std::vector<std::uint32_t> touched;
  auto do_column = [&](std::size_t j) {
    touched.clear();
    for (const auto& [k, bv] : b.column(j)) {
      for (const auto& [i, av] : a.column(k)) {
        R prod = ctx.mul(av, bv, limit);
        if (!acc[i]) {
          acc[i] = std::move(prod);
          touched.push_back(i);
        } else {
          *acc[i] = *acc[i] + prod;
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    typename OperatorOf<Ctx>::Column col;
    for (auto i : touched) {
      if (!ctx.is_exact_zero(*acc[i])) col.emplace_back(i, std::move(*acc[i]));
      acc[i].reset();
    }
    out.set_column(j, std::move(col));
  };
  if (cols) {
    for (auto j : *cols) do_column(j);
  } else {
    for (std::size_t j = 0; j < n; ++j) do_column(j);
  }
  return out;
}

// Dense evaluation A*v.
template <class Ctx>
std::vector<typename Ctx::value_type> op_apply(const Ctx& ctx, const OperatorOf<Ctx>& a,
                                               const std::vector<typename Ctx::value_type>& v) {
  if (v.size() != a.dim()) throw shape_error("vector length does not match operator dimension");
  std::vector<typename Ctx::value_type> out(a.dim(), ctx.zero());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    if (ctx.is_exact_zero(v[j])) continue;
    for (const auto& [i, av] : a.column(j)) out[i] = out[i] + ctx.mul(av, v[j], coeff::kExactCap);
  }
  return out;
}

// Extra x^e added to the contraction factor of one annihilation mode; used
// to check that the verifier notices a broken anticommutator.
struct ContractionPerturbation {
  HalfInteger mode;
  int x_exponent = 0;
};

template <class Ctx>
typename Ctx::value_type contraction_factor(const Ctx& ctx, HalfInteger m,
                                            const std::optional<ContractionPerturbation>& perturb = std::nullopt) {
  auto f = ctx.monomial(1, m.twice()) + ctx.monomial(1, -m.twice());
  if (perturb && perturb->mode == m) f = f + ctx.monomial(1, perturb->x_exponent);
  return f;
}

// Matrix of psi_m on the truncated space; images above the cutoff dropped.
template <class Ctx>
OperatorOf<Ctx> psi_matrix(const Ctx& ctx, const std::shared_ptr<const FockSpace>& space, HalfInteger m,
                           const std::optional<ContractionPerturbation>& perturb = std::nullopt) {
  OperatorOf<Ctx> out(space, -m);
  const auto factor = contraction_factor(ctx, m.abs(), perturb);
  const bool in_range = mode_slot(space->sector(), m) < kMaxSlots;
  for (std::size_t j = 0; j < space->dim(); ++j) {
    if (!in_range) break;
    auto act = psi_action(space->sector(), m, space->state(j).mask);
    if (!act) continue;
    auto i = space->index_of(act->mask);
    if (!i) continue;
    auto v = act->contraction ? factor : ctx.one();
    if (act->sign < 0) v = -v;
    out.set_column(j, {{*i, std::move(v)}});
  }
  return out;
}

}  // namespace qvir::fock
