#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qvir/coeff/context.hpp"
#include "qvir/current/current.hpp"
#include "qvir/errors.hpp"
#include "qvir/fock/graded_operator.hpp"
#include "qvir/qseries/structure.hpp"
#include "qvir/verify/report.hpp"

namespace qvir::verify {

using coeff::XLaurent;
using current::CurrentKind;
using current::CurrentSpec;
using fock::FockSpace;
using fock::GradedBasis;
using fock::GradedOperator;
using fock::OperatorOf;

// One term coef * delta(sign * x^x_exp * u) of a delta-function combination.
struct DeltaTerm {
  mpq_class coef;
  int sign = 1;
  int x_exp = 0;
};

// Coefficient of u^N in sum coef * delta(sign x^e u), with delta(z) = sum_n z^n.
inline XLaurent delta_coefficient(const std::vector<DeltaTerm>& terms, int N) {
  XLaurent out;
  for (const auto& t : terms) {
    mpq_class c = t.coef;
    if (t.sign < 0 && N % 2 != 0) c = -c;
    out = out + XLaurent::monomial(c, t.x_exp * N);
  }
  return out;
}

// delta(x^{-2}u) - delta(x^2 u), variable u = z2/z1 and N = m.
inline std::vector<DeltaTerm> trig_delta_terms() { return {{1, 1, -2}, {-1, 1, 2}}; }

// (1/2)(delta(-x^{-1}u) - delta(x^{-1}u) - delta(-x u) + delta(x u)),
// u = zeta2/zeta1 and N = 2m.
inline std::vector<DeltaTerm> elliptic_delta_terms() {
  return {{mpq_class(1, 2), -1, -1}, {mpq_class(-1, 2), 1, -1}, {mpq_class(-1, 2), -1, 1}, {mpq_class(1, 2), 1, 1}};
}

inline std::string describe_delta(const std::vector<DeltaTerm>& terms, const std::string& var, int N) {
  std::ostringstream os;
  os << "coefficient of " << var << "^" << N << " in";
  for (const auto& t : terms) {
    os << " " << (t.coef < 0 ? "-" : "+") << " " << mpq_class(abs(t.coef)).get_str() << "*delta(" << (t.sign < 0 ? "-" : "")
       << "x^" << t.x_exp << " " << var << ")";
  }
  os << " = " << delta_coefficient(terms, N).to_string();
  return os.str();
}

// Fault injected into one ingredient of the relation check.
struct Perturbation {
  enum class Target { None, StructureCoefficient, Normalization, Contraction };
  Target target = Target::None;
  int f_index = 0;
  HalfInteger mode;
  std::optional<int> x_exponent;  // defaults to half the window top

  std::string describe() const {
    switch (target) {
      case Target::StructureCoefficient: return "f:" + std::to_string(f_index);
      case Target::Normalization: return "kappa";
      case Target::Contraction: return "contraction:" + mode.to_string();
      default: return "none";
    }
  }
};

// Exact normal-ordered mode operators of one current, built on demand.
class ModeCache {
 public:
  using Builder = std::function<GradedOperator<XLaurent>(HalfInteger)>;

  ModeCache(CurrentSpec spec, std::shared_ptr<const GradedBasis> space, Builder builder)
      : spec_(spec), space_(std::move(space)), build_(std::move(builder)) {}

  static std::shared_ptr<ModeCache> trig(const CurrentSpec& spec, std::shared_ptr<const FockSpace> space) {
    auto sp = space;
    auto p = spec.contraction_perturbation;
    return std::make_shared<ModeCache>(spec, space, [sp, p](HalfInteger k) {
      return current::trig_normal_part(sp, k.as_int(), p);
    });
  }

  static std::shared_ptr<ModeCache> elliptic(const CurrentSpec& spec,
                                             std::shared_ptr<const current::PairedFockSpace> space) {
    auto sp = space;
    auto p = spec.contraction_perturbation;
    auto sign = spec.cross_sign;
    return std::make_shared<ModeCache>(spec, space, [sp, p, sign](HalfInteger s) {
      return current::elliptic_bilinear(sp, s, sign, p);
    });
  }

  const CurrentSpec& spec() const { return spec_; }
  const std::shared_ptr<const GradedBasis>& space() const { return space_; }

  // Zero when |k| exceeds the cutoff: no level pair of the space differs by k.
  const GradedOperator<XLaurent>& normal(HalfInteger k) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = ops_.find(k);
    if (it != ops_.end()) return *it->second;
    std::unique_ptr<GradedOperator<XLaurent>> op;
    if (k.abs() > space_->cutoff()) op = std::make_unique<GradedOperator<XLaurent>>(space_, -k);
    else op = std::make_unique<GradedOperator<XLaurent>>(build_(k));
    return *ops_.emplace(k, std::move(op)).first->second;
  }

  // Installs a precomputed operator (cache load).
  void insert(HalfInteger k, GradedOperator<XLaurent> op) {
    std::lock_guard<std::mutex> lock(mutex_);
    ops_[k] = std::make_unique<GradedOperator<XLaurent>>(std::move(op));
  }

  std::vector<HalfInteger> built_modes() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<HalfInteger> out;
    for (const auto& [k, op] : ops_) out.push_back(k);
    return out;
  }

 private:
  CurrentSpec spec_;
  std::shared_ptr<const GradedBasis> space_;
  Builder build_;
  mutable std::mutex mutex_;
  std::map<HalfInteger, std::unique_ptr<GradedOperator<XLaurent>>> ops_;
};

struct ResidualOptions {
  int window_lo = -24;
  int window_hi = 20;
  Perturbation perturbation;
  double tolerance = 1e-25;  // float backend, relative
  std::optional<int> relation_r;  // structure function and c taken at this r instead of the current's
};

// States whose intermediate and final levels stay inside the cutoff for
// every product in the relation at (m,n).
inline std::vector<std::uint32_t> reliable_columns(const GradedBasis& space, HalfInteger m, HalfInteger n) {
  const HalfInteger w = qvir::max(m.abs(), n.abs());
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < space.dim(); ++j) {
    const HalfInteger e = space.level(j);
    if (e + w <= space.cutoff() && e - (m + n) + w <= space.cutoff()) out.push_back(static_cast<std::uint32_t>(j));
  }
  return out;
}

namespace detail {

template <class Ctx>
using Value = typename Ctx::value_type;

// Accumulates scalar * (operator restricted to columns) into dense columns.
template <class Ctx>
struct Accumulator {
  const Ctx& ctx;
  std::vector<std::uint32_t> cols;
  std::vector<std::map<std::uint32_t, Value<Ctx>>> data;
  int limit;

  Accumulator(const Ctx& c, std::vector<std::uint32_t> cs, int lim)
      : ctx(c), cols(std::move(cs)), data(cols.size()), limit(lim) {}

  void add(const OperatorOf<Ctx>& op, const Value<Ctx>& scale) {
    if (ctx.is_exact_zero(scale)) return;
    for (std::size_t t = 0; t < cols.size(); ++t)
      for (const auto& [i, v] : op.column(cols[t])) put(t, i, ctx.mul(v, scale, limit));
  }

  void add_identity(const Value<Ctx>& scale) {
    if (ctx.is_exact_zero(scale)) return;
    for (std::size_t t = 0; t < cols.size(); ++t) put(t, cols[t], scale);
  }

  void put(std::size_t t, std::uint32_t i, const Value<Ctx>& v) {
    auto [it, fresh] = data[t].emplace(i, v);
    if (!fresh) it->second = it->second + v;
  }
};

inline int min_valuation(const GradedOperator<XLaurent>& op, const std::vector<std::uint32_t>& cols) {
  int v = 0;
  for (auto j : cols)
    for (const auto& [i, e] : op.column(j))
      if (e.has_terms()) v = std::min(v, e.min_exp());
  return v;
}

inline int min_valuation(const GradedOperator<XLaurent>& op) {
  int v = 0;
  for (std::size_t j = 0; j < op.dim(); ++j)
    for (const auto& [i, e] : op.column(j))
      if (e.has_terms()) v = std::min(v, e.min_exp());
  return v;
}

template <class Ctx>
OperatorOf<Ctx> lift_abs(const Ctx& ctx, const GradedOperator<XLaurent>& a, bool absolute) {
  auto out = current::lift_operator(ctx, a);
  if (!absolute) return out;
  OperatorOf<Ctx> r(out.basis_ptr(), out.degree());
  for (std::size_t j = 0; j < out.dim(); ++j) {
    auto col = out.column(j);
    for (auto& [i, v] : col) v = ctx.abs(v);
    r.set_column(j, std::move(col));
  }
  return r;
}

// Ingredients of one relation check, independent of the backend.
struct RelationData {
  CurrentKind kind;
  HalfInteger m, n;
  int L;
  std::vector<std::uint32_t> cols;
  std::vector<DeltaTerm> delta_terms;
  int delta_index;  // N such that the delta term contributes at u^N
};

// Sum_l f_l (T_{m-l} T_{n+l} - T_{n-l} T_{m+l}) - rhs Id on the reliable
// columns, with T_k = kappa N_k + E_k Id. When `absolute` is set every
// ingredient is replaced by its absolute value and every sign by +, giving
// the scale against which float residuals are measured.
template <class Ctx>
std::vector<std::map<std::uint32_t, Value<Ctx>>> assemble(const Ctx& ctx, ModeCache& modes, const RelationData& d,
                                                         const ResidualOptions& opt, bool absolute,
                                                         Value<Ctx>* rhs_out = nullptr) {
  const CurrentSpec& spec = modes.spec();
  const int limit = ctx.working_cap();
  auto A = [&](const Value<Ctx>& v) { return absolute ? ctx.abs(v) : v; };
  const int sgn = absolute ? 1 : -1;

  auto kap = A(current::kappa(ctx, spec));
  const int r = opt.relation_r.value_or(spec.r);
  auto f = qseries::f_series(ctx, r, std::max(d.L, 0));
  if (opt.perturbation.target == Perturbation::Target::StructureCoefficient) {
    if (opt.perturbation.f_index > d.L) throw config_error("perturbed f index beyond the l-range in use");
    qseries::apply_perturbation(ctx, f, qseries::SeriesPerturbation{opt.perturbation.f_index,
                                                                    opt.perturbation.x_exponent.value_or(0)});
  }
  std::optional<Value<Ctx>> shift;
  if (d.kind == CurrentKind::Trig) shift = A(current::vacuum_shift(ctx, spec));
  auto E = [&](HalfInteger k) -> std::optional<Value<Ctx>> {
    if (shift && k == HalfInteger(0)) return shift;
    return std::nullopt;
  };

  std::map<HalfInteger, OperatorOf<Ctx>> lifted;
  auto N = [&](HalfInteger k) -> const OperatorOf<Ctx>& {
    auto it = lifted.find(k);
    if (it == lifted.end()) it = lifted.emplace(k, lift_abs(ctx, modes.normal(k), absolute)).first;
    return it->second;
  };

  Accumulator<Ctx> quad(ctx, d.cols, limit), lin(ctx, d.cols, limit);
  Value<Ctx> scalar = ctx.zero();
  for (int l = 0; l <= d.L; ++l) {
    const auto fl = A(f[l]);
    if (ctx.is_exact_zero(fl)) continue;
    const HalfInteger L(l);
    struct Pair {
      HalfInteger a, b;
      int sign;
    };
    const Pair pairs[2] = {{d.m - L, d.n + L, 1}, {d.n - L, d.m + L, sgn}};
    for (const auto& p : pairs) {
      const auto& na = N(p.a);
      const auto& nb = N(p.b);
      auto prod = fock::op_compose(ctx, na, nb, &d.cols, limit);
      const auto coef = p.sign > 0 ? fl : -fl;
      quad.add(prod, coef);
      if (auto eb = E(p.b)) lin.add(na, ctx.mul(coef, *eb, limit));
      if (auto ea = E(p.a)) lin.add(nb, ctx.mul(coef, *ea, limit));
      if (auto ea = E(p.a))
        if (auto eb = E(p.b)) scalar = scalar + ctx.mul(coef, ctx.mul(*ea, *eb, limit), limit);
    }
  }

  // Right-hand side: c times the delta coefficient, on m+n = 0 only.
  if (d.m + d.n == HalfInteger(0)) {
    auto rhs = ctx.mul(qseries::central_const(ctx, r), ctx.lift(delta_coefficient(d.delta_terms, d.delta_index)),
                       limit);
    if (rhs_out) *rhs_out = rhs;
    scalar = absolute ? scalar + ctx.abs(rhs) : scalar - rhs;
  }

  auto kap2 = ctx.mul(kap, kap, limit);
  std::vector<std::map<std::uint32_t, Value<Ctx>>> out(d.cols.size());
  for (std::size_t t = 0; t < d.cols.size(); ++t) {
    auto& col = out[t];
    for (const auto& [i, v] : quad.data[t]) col.emplace(i, ctx.mul(kap2, v, limit));
    for (const auto& [i, v] : lin.data[t]) {
      auto w = ctx.mul(kap, v, limit);
      auto [it, fresh] = col.emplace(i, w);
      if (!fresh) it->second = it->second + w;
    }
    if (!ctx.is_exact_zero(scalar)) {
      auto [it, fresh] = col.emplace(d.cols[t], scalar);
      if (!fresh) it->second = it->second + scalar;
    }
  }
  return out;
}

inline RelationData relation_data(const CurrentSpec& spec, const GradedBasis& space, HalfInteger m, HalfInteger n) {
  RelationData d;
  d.kind = spec.kind;
  d.m = m;
  d.n = n;
  if (spec.kind == CurrentKind::Trig) {
    if (!m.is_integer() || !n.is_integer()) throw parity_error("trigonometric current has integer modes");
    d.delta_terms = trig_delta_terms();
    d.delta_index = m.as_int();
  } else {
    if (m.is_integer() || n.is_integer())
      throw parity_error("elliptic current has half-integer modes only, got " + m.to_string() + "," + n.to_string());
    d.delta_terms = elliptic_delta_terms();
    d.delta_index = m.twice();
  }
  d.L = (space.cutoff() - qvir::min(m, n)).floor();
  d.cols = reliable_columns(space, m, n);
  return d;
}

inline RelationReport base_report(const ModeCache& modes, const RelationData& d, const ResidualOptions& opt) {
  RelationReport rep;
  const auto& spec = modes.spec();
  rep.kind = current::kind_name(spec.kind);
  rep.sector = spec.kind == CurrentKind::Trig ? fock::sector_name(spec.sector) : "NSxR";
  rep.m = d.m;
  rep.n = d.n;
  rep.r = opt.relation_r.value_or(spec.r);
  rep.lambda = modes.space()->cutoff();
  rep.window_lo = opt.window_lo;
  rep.window_hi = opt.window_hi;
  rep.l_max = d.L;
  rep.reliable_dim = d.cols.size();
  if (spec.kind == CurrentKind::Elliptic) rep.convention = current::cross_sign_name(spec.cross_sign);
  if (opt.perturbation.target != Perturbation::Target::None) rep.perturbation = opt.perturbation.describe();
  return rep;
}

}  // namespace detail

// Applies a perturbation's operator-level part to the current spec.
inline CurrentSpec perturbed_spec(CurrentSpec spec, const Perturbation& p, int window_hi) {
  const int e = p.x_exponent.value_or(window_hi / 2);
  if (p.target == Perturbation::Target::Normalization) spec.kappa_perturbation = e;
  if (p.target == Perturbation::Target::Contraction) spec.contraction_perturbation = fock::ContractionPerturbation{p.mode, e};
  return spec;
}

inline ResidualOptions resolved(ResidualOptions opt) {
  if (!opt.perturbation.x_exponent) opt.perturbation.x_exponent = opt.window_hi / 2;
  return opt;
}

// Exact check: every residual entry on the reliable columns vanishes
// through x^{window_hi}. The working cap is raised until all entries are
// known that far.
inline RelationReport relation_residual(const coeff::ExactContext& ctx, ModeCache& modes, HalfInteger m,
                                        HalfInteger n, ResidualOptions opt) {
  opt = resolved(opt);
  const auto& space = *modes.space();
  auto d = detail::relation_data(modes.spec(), space, m, n);
  auto rep = detail::base_report(modes, d, opt);
  rep.backend = "exact";
  if (d.cols.empty()) {
    rep.status = Status::Skipped;
    rep.note = "empty reliable subspace";
    return rep;
  }
  const int D = opt.window_hi;
  // Lowest x-power among the operators involved bounds the loss of cap.
  int vmin = 0;
  for (int l = 0; l <= d.L; ++l) {
    const HalfInteger L(l);
    for (HalfInteger k : {d.m - L, d.n + L, d.n - L, d.m + L}) vmin = std::min(vmin, detail::min_valuation(modes.normal(k)));
  }
  int headroom = 16 - 2 * vmin;
  for (int attempt = 0; attempt < 5; ++attempt, headroom *= 2) {
    coeff::ExactContext work = ctx.with_cap(D + headroom);
    XLaurent rhs;
    auto cols = detail::assemble(work, modes, d, opt, false, &rhs);
    int reached = coeff::kExactCap;
    for (const auto& col : cols)
      for (const auto& [i, v] : col) reached = std::min(reached, v.reliable_hi());
    if (reached < D) continue;
    if (d.m + d.n == HalfInteger(0)) rep.delta_coefficient = rhs.truncated(D);
    rep.status = Status::Pass;
    rep.residual = XLaurent::unknown_above(D);
    for (std::size_t t = 0; t < cols.size() && rep.status == Status::Pass; ++t)
      for (const auto& [i, v] : cols[t]) {
        if (v.zero_through(D)) continue;
        rep.status = Status::Fail;
        rep.residual = v.truncated(D);
        rep.residual_at = space.describe(i) + " <- " + space.describe(d.cols[t]);
        break;
      }
    return rep;
  }
  throw precision_error("residual entries not reliable through x^" + std::to_string(D));
}

// Float check: |residual| / (same sum with absolute values) <= tolerance on
// every entry.
inline RelationReport relation_residual(const coeff::FloatContext& ctx, ModeCache& modes, HalfInteger m,
                                        HalfInteger n, ResidualOptions opt) {
  opt = resolved(opt);
  const auto& space = *modes.space();
  auto d = detail::relation_data(modes.spec(), space, m, n);
  auto rep = detail::base_report(modes, d, opt);
  rep.backend = "float";
  rep.tolerance = opt.tolerance;
  if (d.cols.empty()) {
    rep.status = Status::Skipped;
    rep.note = "empty reliable subspace";
    return rep;
  }
  auto res = detail::assemble(ctx, modes, d, opt, false);
  auto mag = detail::assemble(ctx, modes, d, opt, true);
  double worst = 0;
  for (std::size_t t = 0; t < res.size(); ++t) {
    for (const auto& [i, v] : res[t]) {
      auto num = v.magnitude_bound();
      auto it = mag[t].find(i);
      double ratio;
      if (num.is_zero()) continue;
      if (it == mag[t].end() || it->second.value().is_zero()) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        coeff::BigFloat q(64);
        mpfr_div(q.get(), num.get(), it->second.value().get(), MPFR_RNDU);
        ratio = q.to_double();
      }
      if (ratio > worst) {
        worst = ratio;
        rep.residual_at = space.describe(i) + " <- " + space.describe(d.cols[t]);
      }
    }
  }
  rep.residual_norm = worst;
  rep.status = worst <= opt.tolerance ? Status::Pass : Status::Fail;
  return rep;
}

// Text of the elliptic delta-coefficient derivation at mode m.
inline std::string elliptic_delta_derivation(HalfInteger m) {
  return "(c/2)*[" + describe_delta(elliptic_delta_terms(), "u", m.twice()) + "], u = zeta2/zeta1; even powers cancel";
}

// Deformed anticommutator {psi_m, psi_n} = delta_{m+n,0}(x^{2m}+x^{-2m}) on
// the band level - min(m,n,0) <= cutoff, for all |m|,|n| <= mmax; psi_0^2 = Id
// on the whole space; and psi_m psi_n = -psi_n psi_m when m+n != 0.
inline std::vector<RelationReport> anticommutator_suite(const std::shared_ptr<const FockSpace>& space, HalfInteger mmax,
                                                        const std::optional<fock::ContractionPerturbation>& p = {},
                                                        int window_lo = -20, int window_hi = 24) {
  coeff::ExactContext ctx(window_hi);
  std::vector<RelationReport> out;
  const auto modes = FockSpace::sector_modes(space->sector(), mmax);
  std::map<HalfInteger, GradedOperator<XLaurent>> psi;
  for (auto m : modes) psi.emplace(m, fock::psi_matrix(ctx, space, m, p));
  for (auto m : modes) {
    for (auto n : modes) {
      RelationReport rep;
      rep.kind = "fermion";
      rep.sector = fock::sector_name(space->sector());
      rep.m = m;
      rep.n = n;
      rep.lambda = space->cutoff();
      rep.window_lo = window_lo;
      rep.window_hi = window_hi;
      if (p) rep.perturbation = "contraction:" + p->mode.to_string();
      const auto& a = psi.at(m);
      const auto& b = psi.at(n);
      auto anti = fock::op_add(ctx, fock::op_compose(ctx, a, b), fock::op_compose(ctx, b, a));
      const bool zero_mode_square = m == HalfInteger(0) && n == HalfInteger(0);
      const HalfInteger lowest = qvir::min(qvir::min(m, n), HalfInteger(0));
      XLaurent want;
      if (m + n == HalfInteger(0)) {
        want = fock::contraction_factor(ctx, m.abs());
        rep.delta_coefficient = want;
      }
      rep.status = Status::Pass;
      rep.residual = XLaurent();
      for (std::size_t j = 0; j < space->dim(); ++j) {
        if (!zero_mode_square && space->level(j) - lowest > space->cutoff()) continue;
        ++rep.reliable_dim;
        for (const auto& [i, v] : anti.column(j)) {
          XLaurent diff = i == j ? v - want : v;
          if (diff.is_exact_zero()) continue;
          rep.status = Status::Fail;
          rep.residual = diff;
          rep.residual_at = space->describe(i) + " <- " + space->describe(j);
        }
        if (anti.find(j, j) == nullptr && !want.is_exact_zero()) {
          rep.status = Status::Fail;
          rep.residual = -want;
          rep.residual_at = space->describe(j) + " <- " + space->describe(j);
        }
      }
      out.push_back(std::move(rep));
    }
  }
  return out;
}

}  // namespace qvir::verify
