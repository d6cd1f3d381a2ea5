#pragma once

// Check runners used by the command-line tool: the per-mode identity suite,
// the quadrature cross-validation, and a per-mode singular value dump.

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tbie/calculus.hpp"
#include "tbie/oracle.hpp"
#include "tbie/report.hpp"

namespace tbie {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIdentity = 3;
inline constexpr int kExitOracle = 4;

/// Identity hook that negates every hypersingular eigenvalue.
inline EigenvalueHook negate_w_hook() {
  return [](ModalBIO& b) { b.w = -b.w; };
}

struct VerifyOutcome {
  IdentityReport report;
  int maxOrder = 0;
  int exitCode = kExitOk;
};

/// Identity suite over modes 0..maxOrder; exit 3 when any residual exceeds tolerance.
inline VerifyOutcome run_verify(const MediumParams& params, Geometry geom, int maxOrder, double tol,
                                const EigenvalueHook& hook = {}) {
  params.validate();
  if (maxOrder < 0) throw ConfigError("max-order must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  VerifyOutcome out;
  out.maxOrder = maxOrder;
  out.report = verify_identities_upto(params, geom, maxOrder, tol, hook);
  out.exitCode = out.report.ok() ? kExitOk : kExitIdentity;
  return out;
}

inline void write_verify_report(std::ostream& os, const VerifyOutcome& v) {
  const auto& r = v.report;
  os << "verify " << to_string(r.geometry) << " ni=" << format_double(r.params.n_i)
     << " no=" << format_double(r.params.n_o) << " k=" << format_double(r.params.k) << " modes=0.." << v.maxOrder
     << " tol=" << format_double(r.tol) << '\n';
  // Worst residual / scale per identity id, in first-seen order.
  std::vector<std::string> ids;
  std::map<std::string, const IdentityCheck*> worst;
  for (const auto& c : r.checks) {
    auto it = worst.find(c.id);
    if (it == worst.end()) {
      ids.push_back(c.id);
      worst[c.id] = &c;
    } else if (!(c.residual / c.scale <= it->second->residual / it->second->scale)) {
      it->second = &c;
    }
  }
  for (const auto& id : ids) {
    const IdentityCheck& c = *worst[id];
    bool ok = true;
    for (const auto& x : r.checks)
      if (x.id == id && !x.passed) ok = false;
    os << "  (" << id << ") worst residual/scale " << format_double(c.residual / c.scale) << " at mode " << c.mode
       << (ok ? "  ok" : "  FAILED") << '\n';
  }
  if (const IdentityCheck* f = r.first_failure()) {
    os << "FAIL identity (" << f->id << ") mode " << f->mode << ": " << f->description << " residual "
       << format_double(f->residual) << " > tol*scale " << format_double(r.tol * f->scale) << '\n';
  } else {
    os << "PASS " << r.checks.size() << " checks\n";
  }
}

// ---------------------------------------------------------------------------

struct OracleComparison {
  int mode = 0;
  double kappa = 0.0;
  std::string quantity;  // v, kk, kp, w
  cplx modal;
  cplx reference;
  double error = 0.0;
  double tol = 0.0;
  bool passed = true;
};

struct OracleOutcome {
  std::vector<OracleComparison> rows;
  std::vector<std::pair<int, double>> skipped;  // (mode, kappa) too close to a zero of J_m
  std::string failure;                          // non-empty on quadrature breakdown
  int exitCode = kExitOk;
};

inline const std::vector<double>& oracle_kappas() {
  static const std::vector<double> ks{1.0, 2.0, 3.0, 5.0, 8.0, 10.0};
  return ks;
}

/// Circle eigenvalues against Nystrom quadrature for modes 0..maxMode.
/// v, kk, kp must agree to `tol`; w must match (1/4 - kk^2)/v built from
/// the quadrature values to `wtol`.
inline OracleOutcome run_oracle(int maxMode = 10, double tol = 1e-8, double wtol = 1e-9,
                                const std::vector<double>& kappas = oracle_kappas(),
                                const EigenvalueHook& hook = {}) {
  if (maxMode < 0) throw ConfigError("oracle: max mode must be >= 0");
  if (!(tol > 0.0) || !(wtol > 0.0)) throw ConfigError("oracle: tolerances must be > 0");
  OracleOutcome out;
  for (double kappa : kappas) {
    for (int m = 0; m <= maxMode; ++m) {
      if (std::abs(std::cyl_bessel_j(static_cast<double>(m), kappa)) < oracle::kMinAbsJ) {
        out.skipped.emplace_back(m, kappa);
        continue;
      }
      ModalBIO b = layer_eigenvalues(Geometry::Circle2D, m, kappa);
      if (hook) hook(b);
      try {
        const cplx v = oracle::quadrature_eigenvalue(oracle::Kernel::V, m, kappa);
        const cplx kk = oracle::quadrature_eigenvalue(oracle::Kernel::K, m, kappa);
        const cplx kp = oracle::quadrature_eigenvalue(oracle::Kernel::Kp, m, kappa);
        const cplx w = oracle::hypersingular_from_calderon(v, kk);
        auto add = [&](const char* q, cplx modal, cplx ref, double t) {
          const double e = std::abs(modal - ref);
          out.rows.push_back({m, kappa, q, modal, ref, e, t, e <= t});
        };
        add("v", b.v, v, tol);
        add("kk", b.kk, kk, tol);
        add("kp", b.kp, kp, tol);
        add("w", b.w, w, wtol);
      } catch (const oracle::OracleError& e) {
        out.failure = e.what();
        out.exitCode = kExitOracle;
        return out;
      }
    }
  }
  for (const auto& r : out.rows)
    if (!r.passed) out.exitCode = kExitOracle;
  return out;
}

inline void write_oracle_report(std::ostream& os, const OracleOutcome& o) {
  os << "mode,kappa,quantity,modal_re,modal_im,oracle_re,oracle_im,abs_err,status\n";
  for (const auto& r : o.rows) {
    os << r.mode << ',' << format_double(r.kappa) << ',' << r.quantity << ',' << format_double(r.modal.real()) << ','
       << format_double(r.modal.imag()) << ',' << format_double(r.reference.real()) << ','
       << format_double(r.reference.imag()) << ',' << format_double(r.error) << ',' << (r.passed ? "ok" : "FAIL")
       << '\n';
  }
  for (const auto& [m, kappa] : o.skipped)
    os << "# skipped mode " << m << " kappa " << format_double(kappa) << " (near a zero of J_m)\n";
  if (!o.failure.empty()) os << "# oracle failure: " << o.failure << '\n';
}

// ---------------------------------------------------------------------------

struct SpectrumEntry {
  int mode = 0;
  FamilyName name = FamilyName::Identity;
  double sigmaMax = 0.0;
  double sigmaMin = 0.0;
};

/// Weighted singular values of every selected family, mode by mode, at one k.
inline std::vector<SpectrumEntry> spectrum_at(const SweepConfig& cfg, double k, const EigenvalueHook& hook = {}) {
  cfg.validate();
  if (!(k > 0.0)) throw ConfigError("k must be > 0");
  auto table = std::make_shared<const ModeTable>(cfg.geometry, MediumParams{k, cfg.n_i, cfg.n_o, cfg.alpha},
                                                 cfg.maxOrder, hook);
  const SobolevWeight wt{cfg.normChoice, cfg.geometry, k};
  std::vector<SpectrumEntry> out;
  for (int m = 0; m <= table->max_order(); ++m) {
    for (FamilyName f : cfg.operators) {
      const auto s = weighted_singular_values(make_family(f, table).block(m), wt, m);
      out.push_back({m, f, s[0], s[1]});
    }
  }
  return out;
}

inline void write_spectrum(std::ostream& os, const SweepConfig& cfg, double k,
                           const std::vector<SpectrumEntry>& entries) {
  if (cfg.format == OutputFormat::Json) {
    nlohmann::ordered_json root;
    root["config"] = config_json(cfg);
    root["k"] = k;
    nlohmann::ordered_json ops;
    for (const auto& e : entries) {
      auto& list = ops[std::string(to_string(e.name))];
      list.push_back({{"mode", e.mode},
                      {"sigma_max", detail::json_number(e.sigmaMax)},
                      {"sigma_min", detail::json_number(e.sigmaMin)}});
    }
    root["ops"] = ops;
    os << root.dump(2) << '\n';
    return;
  }
  if (cfg.format == OutputFormat::Svg) throw ConfigError("spectrum supports csv or json output");
  os << "mode,op_name,sigma_max,sigma_min\n";
  for (const auto& e : entries)
    os << e.mode << ',' << to_string(e.name) << ',' << format_double(e.sigmaMax) << ','
       << format_double(e.sigmaMin) << '\n';
}

}  // namespace tbie
