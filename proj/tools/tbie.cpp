// tbie: operator-norm sweeps and consistency checks for the modal
// transmission problem on the unit circle and sphere.
//
//   tbie sweep    --geometry circle --ni 3 --no 1 --kmin 1 --kmax 10 --kstep 0.05
//   tbie verify   --geometry sphere --ni 1 --no 3 --k 4
//   tbie spectrum --k 5 --ops S_io,A_I_inv
//   tbie oracle
//
// Options may also come from a TOML file given with --config; command-line
// values win. TBIE_THREADS sets the number of sweep workers.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbie/checks.hpp"
#include "tbie/report.hpp"
#include "tbie/sweep.hpp"

namespace {

struct Options {
  std::string geometry = "circle";
  double ni = 3.0, no = 1.0, alpha = 1.0;
  double kmin = 1.0, kmax = 10.0, kstep = tbie::kDefaultStep;
  double k = 2.0;
  int maxOrder = tbie::kDefaultModalOrder;
  std::string norm = "trace";
  std::string ops;
  bool refine = false;
  std::string format = "csv";
  std::string out;
  double tol = 1e-8;
  std::string fault;
};

std::vector<tbie::FamilyName> parse_ops(const std::string& list) {
  std::vector<tbie::FamilyName> v;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      v.push_back(tbie::parse_family(item));
    } catch (const std::invalid_argument& e) {
      throw tbie::ConfigError(e.what());
    }
  }
  if (v.empty()) throw tbie::ConfigError("--ops: empty operator list");
  return v;
}

tbie::EigenvalueHook fault_hook(const std::string& fault) {
  if (fault.empty()) return {};
  if (fault == "negate-w") return tbie::negate_w_hook();
  throw tbie::ConfigError("unknown fault '" + fault + "'");
}

tbie::SweepConfig make_config(const Options& o, bool kmaxGiven) {
  tbie::SweepConfig c;
  try {
    c.geometry = tbie::parse_geometry(o.geometry);
    c.normChoice = tbie::parse_norm(o.norm);
  } catch (const std::invalid_argument& e) {
    throw tbie::ConfigError(e.what());
  }
  c.n_i = o.ni;
  c.n_o = o.no;
  c.alpha = o.alpha;
  c.kmin = o.kmin;
  c.kmax = kmaxGiven ? o.kmax : (c.geometry == tbie::Geometry::Circle2D ? 10.0 : 8.0);
  c.kstep = o.kstep;
  c.maxOrder = o.maxOrder;
  if (!o.ops.empty()) c.operators = parse_ops(o.ops);
  c.adaptiveRefine = o.refine;
  c.format = tbie::parse_format(o.format);
  c.validate();
  return c;
}

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw tbie::ConfigError("cannot open output file '" + path + "'");
  fn(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal operator norms for the Helmholtz transmission problem"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with option defaults");

  Options o;
  app.add_option("--geometry", o.geometry, "circle|sphere")->capture_default_str();
  app.add_option("--ni", o.ni, "interior index n_i")->capture_default_str();
  app.add_option("--no", o.no, "exterior index n_o")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Neumann jump weight")->capture_default_str();
  app.add_option("--kmin", o.kmin)->capture_default_str();
  auto* kmaxOpt = app.add_option("--kmax", o.kmax, "default 10 (circle) or 8 (sphere)");
  app.add_option("--kstep", o.kstep)->capture_default_str();
  app.add_option("--k", o.k, "single frequency for verify and spectrum")->capture_default_str();
  app.add_option("--max-order", o.maxOrder, "highest mode")->capture_default_str();
  app.add_option("--norm", o.norm, "trace|energy")->capture_default_str();
  app.add_option("--ops", o.ops, "comma list of S_io,S_oi,A_I,A_II,A_I_inv,A_II_inv,A_I_gen,Aug_I,Aug_II,Identity");
  app.add_flag("--refine", o.refine, "bisect around local maxima");
  app.add_option("--format", o.format, "csv|json|svg")->capture_default_str();
  app.add_option("--out", o.out, "output path (stdout if omitted)");
  app.add_option("--tol", o.tol, "identity / oracle tolerance")->capture_default_str();
  app.add_option("--fault", o.fault)->group("");

  auto* sweep = app.add_subcommand("sweep", "operator norms over a k grid");
  auto* verify = app.add_subcommand("verify", "per-mode identity suite at one k");
  auto* spectrum = app.add_subcommand("spectrum", "per-mode singular values at one k");
  auto* oracle = app.add_subcommand("oracle", "quadrature cross-check of the circle eigenvalues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tbie::kExitConfig;
  }

  try {
    const auto hook = fault_hook(o.fault);
    const bool kmaxGiven = kmaxOpt->count() > 0;

    if (*sweep) {
      const auto cfg = make_config(o, kmaxGiven);
      const auto res = tbie::run_sweep(cfg, tbie::thread_count_from_env(), hook);
      emit(o.out, [&](std::ostream& os) { tbie::write_sweep(os, res); });
      return tbie::kExitOk;
    }
    if (*verify) {
      auto cfg = make_config(o, kmaxGiven);
      const tbie::MediumParams p{o.k, cfg.n_i, cfg.n_o, cfg.alpha};
      if (!(o.k > 0.0)) throw tbie::ConfigError("k must be > 0");
      if (!(o.tol > 0.0)) throw tbie::ConfigError("tol must be > 0");
      const auto v = tbie::run_verify(p, cfg.geometry, cfg.maxOrder, o.tol, hook);
      emit(o.out, [&](std::ostream& os) { tbie::write_verify_report(os, v); });
      if (const auto* f = v.report.first_failure())
        std::cerr << "identity (" << f->id << ") failed at mode " << f->mode << '\n';
      return v.exitCode;
    }
    if (*spectrum) {
      const auto cfg = make_config(o, kmaxGiven);
      if (!(o.k > 0.0)) throw tbie::ConfigError("k must be > 0");
      const auto entries = tbie::spectrum_at(cfg, o.k, hook);
      emit(o.out, [&](std::ostream& os) { tbie::write_spectrum(os, cfg, o.k, entries); });
      return tbie::kExitOk;
    }
    if (*oracle) {
      if (!(o.tol > 0.0)) throw tbie::ConfigError("tol must be > 0");
      const int maxMode = app.get_option("--max-order")->count() > 0 ? o.maxOrder : 10;
      const auto res = tbie::run_oracle(maxMode, o.tol, 1e-9, tbie::oracle_kappas(), hook);
      emit(o.out, [&](std::ostream& os) { tbie::write_oracle_report(os, res); });
      if (res.exitCode != tbie::kExitOk) std::cerr << "oracle check failed\n";
      return res.exitCode;
    }
  } catch (const tbie::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tbie::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tbie::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return tbie::kExitOk;
}
