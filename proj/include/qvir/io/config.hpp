#pragma once

#include <gmpxx.h>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "qvir/current/current.hpp"
#include "qvir/errors.hpp"
#include "qvir/half_integer.hpp"
#include "qvir/verify/relations.hpp"

namespace qvir::io {

using fock::Sector;
using current::CrossSign;
using verify::Perturbation;

enum class Command { FSeries, VerifyDva, VerifyElliptic, VerifyFermion, Spectrum, Chars, HwScan };

inline std::string command_name(Command c) {
  switch (c) {
    case Command::FSeries: return "fseries";
    case Command::VerifyDva: return "verify dva";
    case Command::VerifyElliptic: return "verify elliptic";
    case Command::VerifyFermion: return "verify fermion";
    case Command::Spectrum: return "spectrum";
    case Command::Chars: return "chars";
    default: return "hwscan";
  }
}

// "3/7", "0.7", "1".
inline mpq_class parse_rational(const std::string& s) {
  auto bad = [&] { return config_error("not a rational number: '" + s + "'"); };
  if (s.empty()) throw bad();
  try {
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos) throw bad();
      bool neg = !whole.empty() && whole[0] == '-';
      if (neg) whole.erase(0, 1);
      if (whole.find_first_not_of("0123456789") != std::string::npos) throw bad();
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
      mpq_class q(mpz_class((whole.empty() ? "0" : whole) + frac), scale);
      q.canonicalize();
      return neg ? mpq_class(-q) : q;
    }
    mpq_class q(s);
    if (q.get_den() == 0) throw bad();
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw bad();
  }
}

// "lo:hi", e.g. "-24:20".
inline std::pair<int, int> parse_window(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw config_error("window must be lo:hi, got '" + s + "'");
  try {
    std::size_t a = 0, b = 0;
    int lo = std::stoi(s.substr(0, colon), &a);
    int hi = std::stoi(s.substr(colon + 1), &b);
    if (a != colon || b != s.size() - colon - 1) throw config_error("window must be lo:hi, got '" + s + "'");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw config_error("window must be lo:hi, got '" + s + "'");
  }
}

// "f:1", "kappa", "contraction:1/2"; an optional ":e" suffix sets the x-exponent.
inline Perturbation parse_perturbation(const std::string& s) {
  Perturbation p;
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ':') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  auto exponent = [&](std::size_t idx) {
    if (parts.size() > idx + 1) throw config_error("too many fields in perturbation '" + s + "'");
    if (parts.size() == idx + 1) {
      try {
        p.x_exponent = std::stoi(parts[idx]);
      } catch (const std::logic_error&) {
        throw config_error("bad exponent in perturbation '" + s + "'");
      }
    }
  };
  if (parts[0] == "f") {
    if (parts.size() < 2) throw config_error("f perturbation needs an index, e.g. f:1");
    try {
      std::size_t pos = 0;
      p.f_index = std::stoi(parts[1], &pos);
      if (pos != parts[1].size() || p.f_index < 0) throw config_error("bad f index in '" + s + "'");
    } catch (const std::logic_error&) {
      throw config_error("bad f index in '" + s + "'");
    }
    p.target = Perturbation::Target::StructureCoefficient;
    exponent(2);
  } else if (parts[0] == "kappa") {
    p.target = Perturbation::Target::Normalization;
    exponent(1);
  } else if (parts[0] == "contraction") {
    if (parts.size() < 2) throw config_error("contraction perturbation needs a mode, e.g. contraction:1/2");
    p.mode = HalfInteger::parse(parts[1]);
    if (p.mode <= HalfInteger(0)) throw config_error("contraction mode must be positive");
    p.target = Perturbation::Target::Contraction;
    exponent(2);
  } else {
    throw config_error("unknown perturbation '" + s + "' (use f:<l>, kappa or contraction:<m>)");
  }
  return p;
}

struct RunConfig {
  Command command = Command::VerifyDva;
  std::optional<int> r;
  std::string backend = "exact";
  std::optional<mpq_class> x0;
  std::optional<int> prec;
  int L = 8;
  std::optional<HalfInteger> lambda;
  int window_lo = -24, window_hi = 20;
  HalfInteger modes = HalfInteger(3);
  std::vector<Sector> sectors{Sector::NS, Sector::R};
  std::string format = "json";
  std::optional<std::string> cache;
  unsigned threads = 1;
  std::vector<CrossSign> signs{CrossSign::Commuting, CrossSign::Anticommuting};
  Perturbation perturb;
  HalfInteger level = HalfInteger(0);
  HalfInteger nmax = HalfInteger(6);
  int kmax = 3;

  bool is_float() const { return backend == "float"; }
  int precision() const { return prec.value_or(128); }

  HalfInteger cutoff() const {
    if (lambda) return *lambda;
    switch (command) {
      case Command::Spectrum: return level;
      case Command::HwScan: return nmax;
      case Command::VerifyFermion: return HalfInteger(6);
      default: return HalfInteger(8);
    }
  }

  int relation_r() const {
    if (r) return *r;
    return command == Command::VerifyElliptic ? 2 : 4;
  }

  void validate() const {
    if (backend != "exact" && backend != "float") throw config_error("backend must be exact or float");
    if (format != "json" && format != "csv" && format != "text") throw config_error("format must be json, csv or text");
    if (threads < 1) throw config_error("thread budget must be positive");
    if (command == Command::Spectrum) {
      if (backend != "float") throw config_error("spectrum runs on the float backend");
      if (!x0) throw config_error("spectrum needs --x0");
    } else if (is_float()) {
      if (!x0) throw config_error("float backend needs --x0");
      if (command == Command::VerifyFermion || command == Command::Chars || command == Command::HwScan)
        throw config_error(command_name(command) + " has no float backend");
    } else {
      if (x0) throw config_error("--x0 is only meaningful with --backend float");
      if (prec) throw config_error("--prec is only meaningful with --backend float");
    }
    if (x0 && (*x0 <= 0 || *x0 >= 1)) throw config_error("x0 must lie in (0,1)");
    if (prec && (*prec < 16 || *prec > 65536)) throw config_error("prec must be between 16 and 65536 bits");
    if (command == Command::FSeries && !r) throw config_error("fseries needs --r");
    if (r && *r < 2) throw config_error("r must be at least 2");
    if (L < 0) throw config_error("L must be nonnegative");
    if (cutoff() < HalfInteger(0) || (lambda && *lambda <= HalfInteger(0)))
      throw config_error("lambda must be positive");
    if (window_lo >= 0 || window_hi <= 0) throw config_error("window must satisfy lo < 0 < hi");
    if (modes < HalfInteger(0)) throw config_error("mode bound must be nonnegative");
    const bool verify = command == Command::VerifyDva || command == Command::VerifyElliptic ||
                        command == Command::VerifyFermion;
    if (verify && modes > cutoff()) throw config_error("mode bound exceeds lambda");
    if (sectors.empty()) throw config_error("no sector selected");
    if (signs.empty()) throw config_error("no sign convention selected");
    if (perturb.target != Perturbation::Target::None) {
      if (!verify) throw config_error("--perturb applies to verify commands only");
      if (command == Command::VerifyFermion && perturb.target != Perturbation::Target::Contraction)
        throw config_error("verify fermion accepts only contraction perturbations");
    }
    if (cache && command != Command::VerifyDva && command != Command::VerifyElliptic)
      throw config_error("--cache applies to verify dva and verify elliptic");
    if (kmax < 0) throw config_error("kmax must be nonnegative");
    if (nmax < HalfInteger(0)) throw config_error("nmax must be nonnegative");
    if (level < HalfInteger(0)) throw config_error("level must be nonnegative");
    if (command == Command::HwScan && lambda && *lambda < nmax) throw config_error("lambda below nmax");
    if (command == Command::Spectrum && lambda && *lambda < level) throw config_error("lambda below level");
  }

  // Config echo carried by every report.
  nlohmann::ordered_json echo() const {
    nlohmann::ordered_json j;
    j["command"] = command_name(command);
    j["r"] = relation_r();
    j["backend"] = backend;
    if (x0) j["x0"] = x0->get_str();
    if (is_float() || command == Command::Spectrum) j["prec"] = precision();
    const bool relation = command == Command::VerifyDva || command == Command::VerifyElliptic ||
                          command == Command::VerifyFermion;
    if (command != Command::FSeries && command != Command::Chars) j["lambda"] = cutoff().to_string();
    if (relation || command == Command::FSeries) j["window"] = {window_lo, window_hi};
    switch (command) {
      case Command::FSeries: j["L"] = L; break;
      case Command::Chars: j["nmax"] = nmax.to_string(); break;
      case Command::HwScan:
        j["nmax"] = nmax.to_string();
        j["kmax"] = kmax;
        break;
      case Command::Spectrum: j["level"] = level.to_string(); break;
      default: j["modes"] = modes.to_string();
    }
    nlohmann::ordered_json sec = nlohmann::ordered_json::array();
    for (auto s : sectors) sec.push_back(fock::sector_name(s));
    if (command != Command::FSeries && command != Command::VerifyElliptic) j["sectors"] = sec;
    if (command == Command::VerifyElliptic) {
      nlohmann::ordered_json sg = nlohmann::ordered_json::array();
      for (auto s : signs) sg.push_back(current::cross_sign_name(s));
      j["signs"] = sg;
    }
    if (perturb.target != Perturbation::Target::None) j["perturb"] = perturb.describe();
    j["format"] = format;
    if (cache) j["cache"] = *cache;
    return j;
  }
};

}  // namespace qvir::io
