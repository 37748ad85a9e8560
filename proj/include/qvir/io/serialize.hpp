#pragma once

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "qvir/chars/graded.hpp"
#include "qvir/chars/hwscan.hpp"
#include "qvir/chars/spectrum.hpp"
#include "qvir/coeff/xfloat.hpp"
#include "qvir/coeff/xlaurent.hpp"
#include "qvir/errors.hpp"
#include "qvir/verify/report.hpp"

namespace qvir::io {

using json = nlohmann::ordered_json;
using coeff::XFloat;
using coeff::XLaurent;

// {lo, hi, floor, den, num[], text}; hi/floor are null when unbounded.
// Integers are decimal strings so nothing is rounded through doubles.
inline json to_json(const XLaurent& a) {
  json j;
  j["lo"] = a.has_terms() ? a.min_exp() : 0;
  j["hi"] = a.is_exact() ? json(nullptr) : json(a.reliable_hi());
  j["floor"] = a.reliable_lo() <= coeff::kNoFloor ? json(nullptr) : json(a.reliable_lo());
  j["den"] = a.denominator().get_str();
  json num = json::array();
  for (const auto& v : a.numerators()) num.push_back(v.get_str());
  j["num"] = std::move(num);
  j["text"] = a.to_string();
  return j;
}

inline XLaurent xlaurent_from_json(const json& j) {
  try {
    mpz_class den(j.at("den").get<std::string>());
    if (den <= 0) throw cache_error("nonpositive denominator");
    std::vector<mpq_class> c;
    for (const auto& v : j.at("num")) {
      mpq_class q(mpz_class(v.get<std::string>()), den);
      q.canonicalize();
      c.push_back(q);
    }
    const int cap = j.at("hi").is_null() ? coeff::kExactCap : j.at("hi").get<int>();
    XLaurent r = XLaurent::from_coefficients(j.at("lo").get<int>(), c, cap);
    if (!j.at("floor").is_null()) r = r.with_floor(j.at("floor").get<int>());
    return r;
  } catch (const json::exception& e) {
    throw cache_error(std::string("malformed series: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw cache_error(std::string("malformed series: ") + e.what());
  }
}

// Exact hex mantissa/exponent strings plus a short decimal for reading.
inline json to_json(const XFloat& v) {
  json j;
  j["value"] = v.value().to_exact_string();
  j["error"] = v.error_bound().to_exact_string();
  j["precision"] = v.precision();
  j["decimal"] = v.value().to_decimal(40);
  j["error_decimal"] = v.error_bound().to_decimal(6);
  return j;
}

inline std::string mode_string(HalfInteger h) { return h.to_string(); }

inline json to_json(const verify::RelationReport& r) {
  json j;
  j["kind"] = r.kind;
  j["sector"] = r.sector;
  j["m"] = mode_string(r.m);
  j["n"] = mode_string(r.n);
  if (r.kind != "fermion") j["r"] = r.r;
  j["lambda"] = mode_string(r.lambda);
  j["window"] = {r.window_lo, r.window_hi};
  if (r.kind != "fermion") j["l_max"] = r.l_max;
  j["reliable_dim"] = r.reliable_dim;
  j["backend"] = r.backend;
  if (r.convention) j["convention"] = *r.convention;
  if (r.perturbation) j["perturbation"] = *r.perturbation;
  j["status"] = verify::status_name(r.status);
  if (r.residual) j["residual"] = to_json(*r.residual);
  if (r.residual_at) j["residual_at"] = *r.residual_at;
  if (r.delta_coefficient) j["delta_coefficient"] = to_json(*r.delta_coefficient);
  if (r.residual_norm) j["residual_norm"] = *r.residual_norm;
  if (r.tolerance) j["tolerance"] = *r.tolerance;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const chars::LevelCount& c) {
  json j;
  j["level"] = mode_string(c.level);
  j["dim"] = c.dim;
  j["euler"] = c.euler.get_str();
  j["consistent"] = c.consistent();
  return j;
}

inline json to_json(const chars::SpectrumReport& s) {
  json j;
  j["sector"] = fock::sector_name(s.sector);
  j["level"] = mode_string(s.level);
  j["lambda"] = mode_string(s.lambda);
  j["x0"] = s.x0.get_str();
  j["precision"] = s.precision;
  j["dim"] = s.dim;
  j["method"] = s.method;
  json ev = json::array();
  for (const auto& l : s.eigenvalues) {
    json e;
    e["value"] = to_json(l.value);
    if (l.imag) e["imag"] = to_json(*l.imag);
    e["multiplicity"] = l.multiplicity;
    if (l.exact) e["exact"] = to_json(*l.exact);
    if (!l.states.empty()) e["states"] = l.states;
    ev.push_back(std::move(e));
  }
  j["eigenvalues"] = std::move(ev);
  j["trace"] = to_json(s.trace);
  j["eigen_sum"] = to_json(s.eigen_sum);
  j["trace_consistent"] = s.trace_consistent;
  return j;
}

inline json to_json(const chars::HighestWeightScan& h) {
  json j;
  j["sector"] = fock::sector_name(h.sector);
  j["kmax"] = h.kmax;
  j["nmax"] = mode_string(h.nmax);
  j["lambda"] = mode_string(h.lambda);
  json pts = json::array();
  for (const auto& p : h.specializations) pts.push_back(p.get_str());
  j["specializations"] = std::move(pts);
  json rows = json::array();
  for (const auto& r : h.rows) {
    json row;
    row["level"] = mode_string(r.level);
    row["dim"] = r.dim;
    row["rank"] = r.rank;
    row["kernel_dim"] = r.kernel_dim();
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

// Scalar rendering of one cell for CSV/text: series and floats collapse to
// their readable text.
inline std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) {
    if (v.contains("text")) return v["text"].get<std::string>();
    if (v.contains("decimal")) return v["decimal"].get<std::string>() + " +- " + v["error_decimal"].get<std::string>();
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + cell(v[i]);
    return s;
  }
  return v.dump();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Flat table over rows; header is the union of keys in first-seen order.
inline std::string to_csv(const json& rows) {
  std::vector<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::ostringstream os;
  for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) os << ",";
      if (r.contains(keys[i])) os << csv_escape(cell(r[keys[i]]));
    }
    os << "\n";
  }
  return os.str();
}

inline std::string to_text(const json& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    bool first = true;
    for (const auto& [k, v] : r.items()) {
      os << (first ? "" : "  ") << k << "=" << cell(v);
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qvir::io
