#pragma once

#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qvir/chars/graded.hpp"
#include "qvir/chars/hwscan.hpp"
#include "qvir/chars/spectrum.hpp"
#include "qvir/io/cache.hpp"
#include "qvir/io/config.hpp"
#include "qvir/io/serialize.hpp"
#include "qvir/qseries/structure.hpp"
#include "qvir/verify/grid.hpp"
#include "qvir/verify/relations.hpp"
#include "qvir/version.hpp"

namespace qvir::io {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitNothingChecked = 3 };

struct Output {
  json doc;   // canonical report
  json rows;  // flat rows for csv/text
  int exit_code = kExitPass;
};

inline std::string render(const Output& out, const std::string& format) {
  if (format == "csv") return to_csv(out.rows);
  if (format == "text") return to_text(out.rows);
  return out.doc.dump(2) + "\n";
}

namespace detail {

inline json header(const RunConfig& cfg) {
  json doc;
  doc["tool"] = "qvircheck";
  doc["version"] = kVersion;
  doc["command"] = command_name(cfg.command);
  doc["config"] = cfg.echo();
  return doc;
}

struct Tally {
  std::size_t pass = 0, fail = 0, skipped = 0;
  void add(const verify::RelationReport& r) {
    if (r.status == verify::Status::Pass) ++pass;
    else if (r.status == verify::Status::Fail) ++fail;
    else ++skipped;
  }
  json to_json() const { return json{{"pass", pass}, {"fail", fail}, {"skipped", skipped}}; }
  int exit_code() const {
    if (fail > 0) return kExitFail;
    if (pass == 0) return kExitNothingChecked;
    return kExitPass;
  }
};

// Mode pairs of the given parity with |m|,|n| <= bound.
inline std::vector<std::pair<HalfInteger, HalfInteger>> mode_pairs(HalfInteger bound, bool half_odd) {
  std::vector<HalfInteger> ms;
  for (int t = -bound.twice(); t <= bound.twice(); ++t) {
    HalfInteger m = HalfInteger::from_twice(t);
    if (m.is_integer() != half_odd) ms.push_back(m);
  }
  std::vector<std::pair<HalfInteger, HalfInteger>> out;
  for (auto m : ms)
    for (auto n : ms) out.emplace_back(m, n);
  return out;
}

inline verify::ResidualOptions residual_options(const RunConfig& cfg) {
  verify::ResidualOptions o;
  o.window_lo = cfg.window_lo;
  o.window_hi = cfg.window_hi;
  o.perturbation = cfg.perturb;
  if (cfg.r) o.relation_r = *cfg.r;
  return o;
}

inline json cache_fields(const RunConfig& cfg, const std::vector<CacheBlock>& blocks) {
  json f;
  f["library_version"] = kVersion;
  f["command"] = command_name(cfg.command);
  f["lambda"] = cfg.cutoff().to_string();
  json labels = json::array();
  for (const auto& b : blocks) labels.push_back(b.label);
  f["blocks"] = labels;
  if (cfg.perturb.target == Perturbation::Target::Contraction) {
    f["contraction_mode"] = cfg.perturb.mode.to_string();
    f["contraction_exponent"] = cfg.perturb.x_exponent.value_or(cfg.window_hi / 2);
  }
  return f;
}

// Runs every (block, m, n) task, loading and refreshing the cache around it.
inline std::vector<verify::RelationReport> run_relation_grid(const RunConfig& cfg, const std::vector<CacheBlock>& blocks,
                                                             bool half_odd) {
  std::optional<OperatorCache> cache;
  if (cfg.cache) {
    cache.emplace(*cfg.cache, cache_fields(cfg, blocks));
    if (cache->load(blocks)) std::cerr << "cache hit: " << cache->path() << " (key " << cache->key() << ")\n";
  }
  const auto opt = residual_options(cfg);
  std::vector<std::function<verify::RelationReport()>> tasks;
  std::optional<coeff::ExactContext> ectx;
  std::optional<coeff::FloatContext> fctx;
  if (cfg.is_float()) fctx.emplace(*cfg.x0, cfg.precision());
  else ectx.emplace(cfg.window_hi);
  for (const auto& b : blocks)
    for (auto [m, n] : mode_pairs(cfg.modes, half_odd)) {
      auto modes = b.modes;
      tasks.push_back([&, modes, m, n] {
        if (fctx) return verify::relation_residual(*fctx, *modes, m, n, opt);
        return verify::relation_residual(*ectx, *modes, m, n, opt);
      });
    }
  auto reps = verify::run_tasks(tasks, cfg.threads);
  if (cache) cache->save(blocks);
  return reps;
}

inline Output relation_output(const RunConfig& cfg, const std::vector<verify::RelationReport>& reps) {
  Output out;
  out.doc = header(cfg);
  Tally t;
  json arr = json::array();
  for (const auto& r : reps) {
    t.add(r);
    arr.push_back(to_json(r));
  }
  out.doc["summary"] = t.to_json();
  out.doc["reports"] = arr;
  out.rows = arr;
  out.exit_code = t.exit_code();
  return out;
}

}  // namespace detail

inline Output cmd_fseries(const RunConfig& cfg) {
  Output out;
  out.doc = detail::header(cfg);
  const int r = *cfg.r;
  json rows = json::array();
  if (cfg.is_float()) {
    coeff::FloatContext ctx(*cfg.x0, cfg.precision());
    auto f = qseries::f_series(ctx, r, cfg.L);
    for (int l = 0; l <= cfg.L; ++l) rows.push_back(json{{"l", l}, {"value", to_json(f[l])}});
  } else {
    coeff::ExactContext ctx(cfg.window_hi);
    auto f = qseries::f_series(ctx, r, cfg.L);
    for (int l = 0; l <= cfg.L; ++l) rows.push_back(json{{"l", l}, {"value", to_json(f[l])}});
  }
  out.doc["central_const"] = to_json(qseries::central_const(r));
  out.doc["coefficients"] = rows;
  out.rows = rows;
  return out;
}

inline Output cmd_verify_dva(const RunConfig& cfg) {
  std::vector<CacheBlock> blocks;
  for (auto s : cfg.sectors) {
    auto spec = verify::perturbed_spec(current::CurrentSpec::trig(s), cfg.perturb, cfg.window_hi);
    blocks.push_back({"trig/" + fock::sector_name(s),
                      verify::ModeCache::trig(spec, fock::FockSpace::enumerate(s, cfg.cutoff()))});
  }
  return detail::relation_output(cfg, detail::run_relation_grid(cfg, blocks, false));
}

inline Output cmd_verify_elliptic(const RunConfig& cfg) {
  auto space = current::PairedFockSpace::enumerate(cfg.cutoff());
  std::vector<CacheBlock> blocks;
  for (auto sign : cfg.signs) {
    auto spec = verify::perturbed_spec(current::CurrentSpec::elliptic(sign), cfg.perturb, cfg.window_hi);
    blocks.push_back({"elliptic/" + current::cross_sign_name(sign), verify::ModeCache::elliptic(spec, space)});
  }
  auto reps = detail::run_relation_grid(cfg, blocks, true);
  Output out = detail::relation_output(cfg, reps);

  // Convention verdict: a sign passes when none of its pairs fails and at
  // least one was checkable.
  json conv;
  json per = json::object();
  std::vector<std::string> passing;
  for (auto sign : cfg.signs) {
    const auto name = current::cross_sign_name(sign);
    std::vector<verify::RelationReport> mine;
    for (const auto& r : reps)
      if (r.convention == name) mine.push_back(r);
    const bool ok = verify::all_pass(mine);
    per[name] = ok ? "PASS" : "FAIL";
    if (ok) passing.push_back(name);
  }
  conv["results"] = per;
  conv["adopted"] = passing.size() == 1 ? json(passing[0]) : json(nullptr);
  conv["delta_derivation"] = verify::elliptic_delta_derivation(HalfInteger::from_twice(1));
  out.doc["convention"] = conv;
  if (cfg.signs.size() > 1 && out.exit_code != kExitNothingChecked)
    out.exit_code = passing.size() == 1 ? kExitPass : kExitFail;
  return out;
}

inline Output cmd_verify_fermion(const RunConfig& cfg) {
  std::optional<fock::ContractionPerturbation> p;
  if (cfg.perturb.target == Perturbation::Target::Contraction)
    p = fock::ContractionPerturbation{cfg.perturb.mode, cfg.perturb.x_exponent.value_or(cfg.window_hi / 2)};
  std::vector<std::function<std::vector<verify::RelationReport>()>> tasks;
  for (auto s : cfg.sectors)
    tasks.push_back([&, s] {
      return verify::anticommutator_suite(fock::FockSpace::enumerate(s, cfg.cutoff()), cfg.modes, p, cfg.window_lo,
                                          cfg.window_hi);
    });
  std::vector<verify::RelationReport> all;
  for (auto& part : verify::run_tasks(tasks, cfg.threads)) all.insert(all.end(), part.begin(), part.end());
  return detail::relation_output(cfg, all);
}

inline Output cmd_spectrum(const RunConfig& cfg) {
  Output out;
  out.doc = detail::header(cfg);
  json reps = json::array(), rows = json::array();
  bool ok = true;
  for (auto s : cfg.sectors) {
    chars::SpectrumOptions o;
    o.lambda = cfg.cutoff();
    auto rep = chars::t0_block_spectrum(s, cfg.level, *cfg.x0, cfg.precision(), o);
    ok = ok && rep.trace_consistent;
    for (const auto& l : rep.eigenvalues) {
      json row;
      row["sector"] = fock::sector_name(s);
      row["level"] = rep.level.to_string();
      row["value"] = l.value.value().to_decimal(40);
      row["error"] = l.value.error_bound().to_decimal(6);
      row["multiplicity"] = l.multiplicity;
      if (l.exact) row["exact"] = l.exact->to_string();
      rows.push_back(std::move(row));
    }
    reps.push_back(to_json(rep));
  }
  out.doc["reports"] = reps;
  out.rows = rows;
  out.exit_code = ok ? kExitPass : kExitFail;
  return out;
}

inline Output cmd_chars(const RunConfig& cfg) {
  Output out;
  out.doc = detail::header(cfg);
  json reps = json::array(), rows = json::array();
  bool ok = true;
  for (auto s : cfg.sectors) {
    json rep;
    rep["sector"] = fock::sector_name(s);
    json lv = json::array();
    for (const auto& c : chars::graded_dimension(s, cfg.nmax)) {
      ok = ok && c.consistent();
      json row = to_json(c);
      lv.push_back(row);
      json flat;
      flat["sector"] = fock::sector_name(s);
      for (const auto& [k, v] : row.items()) flat[k] = v;
      rows.push_back(std::move(flat));
    }
    rep["levels"] = lv;
    reps.push_back(std::move(rep));
  }
  out.doc["reports"] = reps;
  out.rows = rows;
  out.exit_code = ok ? kExitPass : kExitFail;
  return out;
}

inline Output cmd_hwscan(const RunConfig& cfg) {
  Output out;
  out.doc = detail::header(cfg);
  json reps = json::array(), rows = json::array();
  for (auto s : cfg.sectors) {
    auto scan = chars::highest_weight_scan(s, cfg.kmax, cfg.nmax, cfg.cutoff(), chars::default_specializations(),
                                           cfg.threads);
    json j = to_json(scan);
    for (const auto& row : j["rows"]) {
      json flat;
      flat["sector"] = fock::sector_name(s);
      for (const auto& [k, v] : row.items()) flat[k] = v;
      rows.push_back(std::move(flat));
    }
    reps.push_back(std::move(j));
  }
  out.doc["reports"] = reps;
  out.rows = rows;
  return out;
}

inline Output run(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.command) {
    case Command::FSeries: return cmd_fseries(cfg);
    case Command::VerifyDva: return cmd_verify_dva(cfg);
    case Command::VerifyElliptic: return cmd_verify_elliptic(cfg);
    case Command::VerifyFermion: return cmd_verify_fermion(cfg);
    case Command::Spectrum: return cmd_spectrum(cfg);
    case Command::Chars: return cmd_chars(cfg);
    default: return cmd_hwscan(cfg);
  }
}

}  // namespace qvir::io
