#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "qvir/io/commands.hpp"
#include "qvir/verify/grid.hpp"

using namespace qvir;
using io::Command;
using io::RunConfig;

namespace {

struct RawOptions {
  std::optional<int> r;
  std::string backend = "exact";
  std::optional<std::string> x0;
  std::optional<int> prec;
  int L = 8;
  std::optional<std::string> lambda;
  std::optional<std::string> window;
  std::string modes = "3";
  std::string sector = "both";
  std::string format = "json";
  std::optional<std::string> cache;
  std::optional<unsigned> threads;
  std::string sign = "both";
  std::optional<std::string> perturb;
  std::string level = "0";
  std::string nmax = "6";
  int kmax = 3;
};

RunConfig to_config(Command cmd, const RawOptions& o) {
  RunConfig c;
  c.command = cmd;
  c.r = o.r;
  c.backend = o.backend;
  if (o.x0) c.x0 = io::parse_rational(*o.x0);
  c.prec = o.prec;
  c.L = o.L;
  if (o.lambda) c.lambda = HalfInteger::parse(*o.lambda);
  std::tie(c.window_lo, c.window_hi) = io::parse_window(o.window.value_or(cmd == Command::VerifyFermion ? "-20:24" : "-24:20"));
  c.modes = HalfInteger::parse(o.modes);
  if (o.sector == "both") c.sectors = {fock::Sector::NS, fock::Sector::R};
  else c.sectors = {fock::parse_sector(o.sector)};
  c.format = o.format;
  c.cache = o.cache;
  c.threads = o.threads.value_or(verify::default_threads());
  if (o.sign == "both") c.signs = {current::CrossSign::Commuting, current::CrossSign::Anticommuting};
  else c.signs = {current::parse_cross_sign(o.sign)};
  if (o.perturb) c.perturb = io::parse_perturbation(*o.perturb);
  c.level = HalfInteger::parse(o.level);
  c.nmax = HalfInteger::parse(o.nmax);
  c.kmax = o.kmax;
  if (cmd == Command::Spectrum && !o.x0) throw config_error("spectrum needs --x0");
  if (cmd == Command::Spectrum) c.backend = o.backend == "exact" ? "float" : o.backend;
  return c;
}

void add_common(CLI::App* app, RawOptions& o) {
  app->add_option("--format", o.format, "json, csv or text")->capture_default_str();
  app->add_option("--threads", o.threads, "worker threads (default: QVIR_THREADS or hardware count)");
}

void add_backend(CLI::App* app, RawOptions& o) {
  app->add_option("--backend", o.backend, "exact or float")->capture_default_str();
  app->add_option("--x0", o.x0, "numeric x in (0,1) for the float backend, e.g. 1/2");
  app->add_option("--prec", o.prec, "float precision in bits (default 128)");
  app->add_option("--window", o.window, "x-exponent window lo:hi (default -24:20)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and arbitrary-precision checks of the fermionic deformed Virasoro current"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RawOptions o;
  Command cmd = Command::FSeries;

  auto* fs = app.add_subcommand("fseries", "structure function coefficients f_0..f_L");
  fs->add_option("--r", o.r, "structure parameter r >= 2");
  fs->add_option("--L", o.L, "highest coefficient")->capture_default_str();
  add_backend(fs, o);
  add_common(fs, o);
  fs->callback([&] { cmd = Command::FSeries; });

  auto* ver = app.add_subcommand("verify", "mode-relation checks");
  ver->require_subcommand(1);
  auto relation_opts = [&](CLI::App* a) {
    a->add_option("--r", o.r, "structure function parameter (default 4 trig, 2 elliptic)");
    a->add_option("--lambda", o.lambda, "Fock-space level cutoff (default 8)");
    a->add_option("--modes", o.modes, "bound on |m|,|n|")->capture_default_str();
    a->add_option("--perturb", o.perturb, "fault injection: f:<l>, kappa or contraction:<m>");
    a->add_option("--cache", o.cache, "operator cache file");
    add_backend(a, o);
    add_common(a, o);
  };
  auto* dva = ver->add_subcommand("dva", "trigonometric current, both sectors");
  relation_opts(dva);
  dva->add_option("--sector", o.sector, "ns, r or both")->capture_default_str();
  dva->callback([&] { cmd = Command::VerifyDva; });
  auto* ell = ver->add_subcommand("elliptic", "elliptic current on the paired NS(x)R space");
  relation_opts(ell);
  ell->add_option("--sign", o.sign, "commuting, anticommuting or both")->capture_default_str();
  ell->callback([&] { cmd = Command::VerifyElliptic; });
  auto* fer = ver->add_subcommand("fermion", "deformed anticommutators");
  fer->add_option("--lambda", o.lambda, "Fock-space level cutoff (default 6)");
  fer->add_option("--modes", o.modes, "bound on |m|,|n|")->capture_default_str();
  fer->add_option("--sector", o.sector, "ns, r or both")->capture_default_str();
  fer->add_option("--perturb", o.perturb, "fault injection: contraction:<m>");
  fer->add_option("--window", o.window, "x-exponent window lo:hi (default -20:24)");
  add_common(fer, o);
  fer->callback([&] { cmd = Command::VerifyFermion; });

  auto* sp = app.add_subcommand("spectrum", "eigenvalues of a level block of T_0");
  sp->add_option("--sector", o.sector, "ns, r or both")->capture_default_str();
  sp->add_option("--level", o.level, "level of the block")->capture_default_str();
  sp->add_option("--x0", o.x0, "numeric x in (0,1)");
  sp->add_option("--prec", o.prec, "precision in bits (default 128)");
  sp->add_option("--lambda", o.lambda, "Fock-space cutoff (default: the level)");
  add_common(sp, o);
  sp->callback([&] { cmd = Command::Spectrum; });

  auto* ch = app.add_subcommand("chars", "graded dimensions against the product formulas");
  ch->add_option("--sector", o.sector, "ns, r or both")->capture_default_str();
  ch->add_option("--nmax", o.nmax, "highest level")->capture_default_str();
  add_common(ch, o);
  ch->callback([&] { cmd = Command::Chars; });

  auto* hw = app.add_subcommand("hwscan", "joint kernels of T_k, 0 < k <= kmax, per level");
  hw->add_option("--sector", o.sector, "ns, r or both")->capture_default_str();
  hw->add_option("--kmax", o.kmax, "highest lowering mode")->capture_default_str();
  hw->add_option("--nmax", o.nmax, "highest level")->capture_default_str();
  hw->add_option("--lambda", o.lambda, "Fock-space cutoff (default: nmax)");
  add_common(hw, o);
  hw->callback([&] { cmd = Command::HwScan; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : io::kExitConfig;
  }

  try {
    RunConfig cfg = to_config(cmd, o);
    auto out = io::run(cfg);
    std::cout << io::render(out, cfg.format);
    return out.exit_code;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return io::kExitConfig;
  } catch (const parity_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return io::kExitConfig;
  } catch (const cache_error& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return io::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io::kExitFail;
  }
}
