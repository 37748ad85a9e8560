#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qvir/chars/graded.hpp"
#include "qvir/current/current.hpp"
#include "qvir/verify/grid.hpp"

namespace qvir::chars {

using coeff::XLaurent;

struct KernelRow {
  HalfInteger level;
  std::size_t dim = 0;
  std::size_t rank = 0;  // max over specialisations
  std::size_t kernel_dim() const { return dim - rank; }
};

struct HighestWeightScan {
  Sector sector = Sector::NS;
  int kmax = 0;
  HalfInteger nmax, lambda;
  std::vector<mpq_class> specializations;
  std::vector<KernelRow> rows;
};

inline std::vector<mpq_class> default_specializations() { return {mpq_class(3, 7), mpq_class(5, 11), mpq_class(2, 3)}; }

// Rank over Q by Gaussian elimination.
inline std::size_t rational_rank(std::vector<std::vector<mpq_class>> rows) {
  std::size_t rank = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < ncols && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      mpq_class f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < ncols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Joint kernel of T_k, 0 < k <= kmax, on each level block up to nmax.
// For k > 0, T_k = kappa N_k with kappa a unit, so ker T_k = ker N_k and the
// entries are exact Laurent polynomials. The rank at a rational point never
// exceeds the generic rank; the maximum over several points is reported, so
// kernel dimensions are upper bounds that are generically attained.
inline HighestWeightScan highest_weight_scan(Sector sector, int kmax, HalfInteger nmax,
                                             std::optional<HalfInteger> lambda = std::nullopt,
                                             std::vector<mpq_class> points = default_specializations(),
                                             unsigned threads = 1) {
  if (kmax < 0) throw config_error("kmax must be nonnegative");
  if (nmax < HalfInteger(0)) throw config_error("nmax must be nonnegative");
  if (points.empty()) throw config_error("need at least one specialisation point");
  for (const auto& x : points)
    if (x == 0) throw config_error("specialisation point must be nonzero");
  HighestWeightScan out;
  out.sector = sector;
  out.kmax = kmax;
  out.nmax = nmax;
  out.lambda = lambda.value_or(nmax);
  if (out.lambda < nmax) throw config_error("cutoff below nmax");
  out.specializations = points;

  auto space = fock::FockSpace::enumerate(sector, out.lambda);
  std::vector<fock::GradedOperator<XLaurent>> ops;
  for (int k = 1; k <= kmax; ++k) ops.push_back(current::trig_normal_part(space, k));

  std::vector<std::function<KernelRow()>> tasks;
  for (auto level : sector_levels(sector, nmax)) {
    tasks.push_back([&, level] {
      std::vector<std::uint32_t> block;
      for (std::uint32_t j = 0; j < space->dim(); ++j)
        if (space->level(j) == level) block.push_back(j);
      KernelRow row{level, block.size(), 0};
      for (const auto& x : points) {
        std::vector<std::vector<mpq_class>> rows;
        for (const auto& op : ops) {
          std::map<std::uint32_t, std::vector<mpq_class>> by_target;
          for (std::size_t c = 0; c < block.size(); ++c)
            for (const auto& [i, v] : op.column(block[c])) {
              auto& r = by_target[i];
              if (r.empty()) r.assign(block.size(), 0);
              r[c] = v.evaluate_terms(x);
            }
          for (auto& [i, r] : by_target) rows.push_back(std::move(r));
        }
        row.rank = std::max(row.rank, rational_rank(std::move(rows)));
      }
      return row;
    });
  }
  out.rows = verify::run_tasks(tasks, threads);
  return out;
}

}  // namespace qvir::chars
