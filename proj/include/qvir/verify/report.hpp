#pragma once

#include <optional>
#include <string>

#include "qvir/coeff/xlaurent.hpp"
#include "qvir/half_integer.hpp"

namespace qvir::verify {

enum class Status { Pass, Fail, Skipped };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    default: return "SKIPPED";
  }
}

// One checked relation at one mode pair.
struct RelationReport {
  std::string kind;    // trig | elliptic | fermion
  std::string sector;  // NS | R | NSxR
  HalfInteger m, n;
  int r = 0;
  HalfInteger lambda;
  int window_lo = 0, window_hi = 0;
  int l_max = -1;  // highest structure-function index used
  std::size_t reliable_dim = 0;
  std::string backend = "exact";
  std::optional<std::string> convention;
  std::optional<std::string> perturbation;
  Status status = Status::Skipped;

  // Exact backend: first nonzero residual entry (or a zero carrying the cap).
  std::optional<coeff::XLaurent> residual;
  std::optional<std::string> residual_at;
  // Coefficient of the identity on the right-hand side (m+n = 0 only).
  std::optional<coeff::XLaurent> delta_coefficient;

  // Float backend: max over entries of |residual| / |term magnitudes|.
  std::optional<double> residual_norm;
  std::optional<double> tolerance;

  std::string note;

  bool pass() const { return status == Status::Pass; }
};

}  // namespace qvir::verify
