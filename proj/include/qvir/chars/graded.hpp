#pragma once

#include <gmpxx.h>

#include <vector>

#include "qvir/errors.hpp"
#include "qvir/fock/fock_space.hpp"

namespace qvir::chars {

using fock::Sector;

struct LevelCount {
  HalfInteger level;
  std::size_t dim = 0;  // by enumeration
  mpz_class euler;      // product coefficient
  bool consistent() const { return euler == dim; }
};

// Levels reached by the sector up to nmax: steps of 1/2 (NS) or 1 (R).
inline std::vector<HalfInteger> sector_levels(Sector s, HalfInteger nmax) {
  std::vector<HalfInteger> out;
  const int step = s == Sector::NS ? 1 : 2;
  for (int t = 0; t <= nmax.twice(); t += step) out.push_back(HalfInteger::from_twice(t));
  return out;
}

// Coefficients of prod_{j>=0}(1+q^{j+1/2}) (NS) or 2 prod_{n>=1}(1+q^n) (R),
// indexed by twice the q-exponent.
inline std::vector<mpz_class> euler_product_coefficients(Sector s, HalfInteger nmax) {
  if (nmax.twice() < 0) throw config_error("nmax must be non-negative");
  const int top = nmax.twice();
  std::vector<mpz_class> c(static_cast<std::size_t>(top) + 1, 0);
  c[0] = s == Sector::NS ? 1 : 2;
  for (int t = s == Sector::NS ? 1 : 2; t <= top; t += 2)
    for (int e = top; e >= t; --e) c[static_cast<std::size_t>(e)] += c[static_cast<std::size_t>(e - t)];
  return c;
}

inline std::vector<LevelCount> graded_dimension(Sector s, HalfInteger nmax) {
  auto euler = euler_product_coefficients(s, nmax);
  auto space = fock::FockSpace::enumerate(s, nmax);
  std::vector<std::size_t> counts(euler.size(), 0);
  for (auto l : space->levels()) ++counts[static_cast<std::size_t>(l.twice())];
  std::vector<LevelCount> out;
  for (auto l : sector_levels(s, nmax)) {
    auto i = static_cast<std::size_t>(l.twice());
    out.push_back({l, counts[i], euler[i]});
  }
  return out;
}

}  // namespace qvir::chars
