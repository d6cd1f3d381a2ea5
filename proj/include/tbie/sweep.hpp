#pragma once

// Frequency sweeps of weighted operator norms.
//
// Every k is evaluated independently (one ModeTable per k) and rows are merged
// in k order, so the result does not depend on how many worker threads ran.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tbie/calculus.hpp"
#include "tbie/specfun.hpp"

namespace tbie {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { Csv, Json, Svg };

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Svg: return "svg";
  }
  return "csv";
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "svg") return OutputFormat::Svg;
  throw ConfigError("unknown format '" + std::string(s) + "' (expected csv|json|svg)");
}

inline constexpr double kDefaultStep = 0.05;

struct SweepConfig {
  Geometry geometry = Geometry::Circle2D;
  double n_i = 3.0;
  double n_o = 1.0;
  double alpha = 1.0;
  double kmin = 1.0;
  double kmax = 10.0;
  double kstep = kDefaultStep;
  int maxOrder = kDefaultModalOrder;
  NormChoice normChoice = NormChoice::TraceNorm;
  std::vector<FamilyName> operators{FamilyName::S_io, FamilyName::A_I_inv, FamilyName::A_II_inv};
  bool adaptiveRefine = false;
  OutputFormat format = OutputFormat::Csv;

  void validate() const {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(n_i) || !positive(n_o) || !positive(alpha)) throw ConfigError("ni, no and alpha must be > 0");
    if (!positive(kmin)) throw ConfigError("kmin must be > 0");
    if (!positive(kstep)) throw ConfigError("kstep must be > 0");
    if (!std::isfinite(kmax) || kmax < kmin) throw ConfigError("kmax must be >= kmin");
    if (maxOrder < 1) throw ConfigError("max-order must be >= 1");
    if (operators.empty()) throw ConfigError("no operators selected");
    if ((kmax - kmin) / kstep > 1e7) throw ConfigError("k grid too large");
  }

  /// kmin + j kstep for j = 0, 1, ... while <= kmax, rounded to 10 decimals.
  std::vector<double> k_grid() const {
    validate();
    const long n = static_cast<long>(std::floor((kmax - kmin) / kstep + 1e-9));
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(n + 1));
    for (long j = 0; j <= n; ++j) ks.push_back(std::round((kmin + j * kstep) * 1e10) / 1e10);
    return ks;
  }
};

// Row annotations.
enum Warning : unsigned {
  kWarnNone = 0,
  kWarnTruncation = 1u << 0,    // supremum attained at the last mode computed
  kWarnOverflow = 1u << 1,      // radial factors overflowed below maxOrder
  kWarnNearSingular = 1u << 2,  // attaining mode is numerically singular
};

inline std::string warning_string(unsigned w) {
  std::string s;
  auto add = [&](unsigned bit, const char* name) {
    if (!(w & bit)) return;
    if (!s.empty()) s += ';';
    s += name;
  };
  add(kWarnTruncation, "trunc");
  add(kWarnOverflow, "overflow");
  add(kWarnNearSingular, "near_singular");
  return s;
}

struct OperatorValue {
  FamilyName name = FamilyName::Identity;
  double norm = std::numeric_limits<double>::quiet_NaN();  // pseudo-inverse norm for Aug_*
  int mode = 0;                                            // argmax (argmin for Aug_*)
  double minDet = std::numeric_limits<double>::quiet_NaN();
  unsigned warn = kWarnNone;
};

struct SweepRow {
  double k = 0.0;
  int modesComputed = 0;
  bool refined = false;  // inserted by adaptive refinement
  std::vector<OperatorValue> ops;
};

struct Spike {
  double k = 0.0;
  double height = 0.0;
  double ratio = 0.0;  // height / rolling median
};

struct SpikeOptions {
  int window = 21;  // samples, centred, clipped at the ends
  double ratio = 10.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;

  /// Values of one operator, in row order. Throws if it was not swept.
  std::vector<double> series(FamilyName f, bool baseGridOnly = false) const {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (baseGridOnly && r.refined) continue;
      bool found = false;
      for (const auto& o : r.ops)
        if (o.name == f) {
          v.push_back(o.norm);
          found = true;
        }
      if (!found) throw std::invalid_argument("series: operator not in sweep");
    }
    return v;
  }
  std::vector<double> ks(bool baseGridOnly = false) const {
    std::vector<double> v;
    for (const auto& r : rows)
      if (!(baseGridOnly && r.refined)) v.push_back(r.k);
    return v;
  }
};

// ---------------------------------------------------------------------------

/// Local maxima v[i] > v[i-1], v[i] >= v[i+1] whose value is at least
/// `ratio` times the centred rolling median.
inline std::vector<Spike> detect_spikes(const std::vector<double>& k, const std::vector<double>& values,
                                        const SpikeOptions& opt = {}) {
  if (k.size() != values.size()) throw std::invalid_argument("detect_spikes: k and values differ in length");
  if (values.size() < 16) throw std::invalid_argument("detect_spikes: need at least 16 samples");
  if (opt.window < 1) throw std::invalid_argument("detect_spikes: window must be >= 1");
  const int n = static_cast<int>(values.size());
  const int half = opt.window / 2;
  std::vector<Spike> out;
  std::vector<double> buf;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    buf.assign(values.begin() + lo, values.begin() + hi + 1);
    std::erase_if(buf, [](double x) { return std::isnan(x); });
    if (buf.empty()) continue;
    const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    double median = *mid;
    if (buf.size() % 2 == 0) median = 0.5 * (median + *std::max_element(buf.begin(), mid));
    if (values[i] >= opt.ratio * median) out.push_back({k[i], values[i], values[i] / median});
  }
  return out;
}

/// Window covering the same k-width as 21 samples at the default step.
inline int spike_window_for_step(double kstep) {
  const long half = std::lround(10.0 * kDefaultStep / kstep);
  return static_cast<int>(2 * std::max(1L, half) + 1);
}

/// Worker count from TBIE_THREADS; hardware concurrency when unset.
inline unsigned thread_count_from_env() {
  const char* s = std::getenv("TBIE_THREADS");
  if (s == nullptr || *s == '\0') return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("TBIE_THREADS must be an integer in [1, 1024]");
  return static_cast<unsigned>(v);
}

namespace detail {

// out[i] = fn(in[i]) computed by `threads` workers.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& in, unsigned threads, Fn fn) {
  using Out = decltype(fn(in.front()));
  std::vector<Out> out(in.size());
  if (in.empty()) return out;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < in.size(); i = next++) out[i] = fn(in[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(in.size())));
  if (n == 1) {
    work();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  return out;
}

inline double condition_of(const std::array<double, 2>& s) {
  return s[1] > 0.0 ? s[0] / s[1] : std::numeric_limits<double>::infinity();
}

inline OperatorValue evaluate_family(FamilyName name, const std::shared_ptr<const ModeTable>& table,
                                     const SobolevWeight& wt) {
  OperatorValue v;
  v.name = name;
  const OperatorFamily fam = make_family(name, table);
  const NormResult r = is_augmented(name) ? pinv_norm(fam, wt) : operator_norm(fam, wt);
  v.norm = r.norm;
  v.mode = r.mode;
  if (r.truncationWarning) v.warn |= kWarnTruncation;
  if (table->truncated()) v.warn |= kWarnOverflow;

  const ModeBlocks& b = (*table)[r.mode];
  bool singular = false;
  switch (name) {
    case FamilyName::S_io: singular = b.S_io.near_singular(); break;
    case FamilyName::S_oi: singular = b.S_oi.near_singular(); break;
    case FamilyName::A_I:
    case FamilyName::A_I_inv: singular = condition_of(svd_small(weighted_block(b.A_I, wt, r.mode))) > kNearSingularCondition; break;
    case FamilyName::A_II:
    case FamilyName::A_II_inv: singular = condition_of(svd_small(weighted_block(b.A_II, wt, r.mode))) > kNearSingularCondition; break;
    case FamilyName::A_I_gen: singular = condition_of(svd_small(weighted_block(b.A_I_gen, wt, r.mode))) > kNearSingularCondition; break;
    default: singular = !std::isfinite(r.norm); break;
  }
  if (singular) v.warn |= kWarnNearSingular;

  // Smallest determinant magnitude of the underlying 2x2 blocks.
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& mb : table->modes()) {
    double d = std::numeric_limits<double>::quiet_NaN();
    switch (name) {
      case FamilyName::S_io: d = std::abs(mb.S_io.matchingDet); break;
      case FamilyName::S_oi: d = std::abs(mb.S_oi.matchingDet); break;
      case FamilyName::A_I:
      case FamilyName::A_I_inv: d = std::abs(det(mb.A_I)); break;
      case FamilyName::A_II:
      case FamilyName::A_II_inv: d = std::abs(det(mb.A_II)); break;
      case FamilyName::A_I_gen: d = std::abs(det(mb.A_I_gen)); break;
      case FamilyName::Identity: d = 1.0; break;
      default: break;
    }
    if (std::isnan(d)) {
      dmin = d;
      break;
    }
    dmin = std::min(dmin, d);
  }
  v.minDet = dmin;
  return v;
}

}  // namespace detail

/// All requested operator norms at one frequency. Overflow in the special
/// functions is reported on the row, never thrown.
inline SweepRow evaluate_point(const SweepConfig& cfg, double k, const EigenvalueHook& hook = {}) {
  SweepRow row;
  row.k = k;
  const MediumParams p{k, cfg.n_i, cfg.n_o, cfg.alpha};
  std::shared_ptr<const ModeTable> table;
  try {
    table = std::make_shared<const ModeTable>(cfg.geometry, p, cfg.maxOrder, hook);
  } catch (const specfun::OverflowError&) {
    for (FamilyName f : cfg.operators) {
      OperatorValue v;
      v.name = f;
      v.warn = kWarnOverflow;
      row.ops.push_back(v);
    }
    return row;
  }
  row.modesComputed = table->max_order() + 1;
  const SobolevWeight wt{cfg.normChoice, cfg.geometry, k};
  for (FamilyName f : cfg.operators) row.ops.push_back(detail::evaluate_family(f, table, wt));
  return row;
}

namespace detail {

struct PeakBracket {
  std::size_t op;  // index into cfg.operators
  double left, centre, right;
  double height;
  int level = 0;
  bool active = true;
};

inline double op_value(const SweepRow& r, std::size_t op) { return r.ops.at(op).norm; }

// Bisection around interior local maxima of the base grid until the peak
// height changes by less than 5% between levels, or after 12 levels.
inline void refine_peaks(const SweepConfig& cfg, std::map<double, SweepRow>& rows, unsigned threads,
                         const EigenvalueHook& hook) {
  constexpr int kMaxLevels = 12;
  constexpr double kRelChange = 0.05;
  std::vector<PeakBracket> peaks;
  std::vector<const SweepRow*> base;
  for (const auto& [k, r] : rows) base.push_back(&r);
  for (std::size_t op = 0; op < cfg.operators.size(); ++op) {
    for (std::size_t i = 1; i + 1 < base.size(); ++i) {
      const double v = op_value(*base[i], op);
      if (std::isfinite(v) && v > op_value(*base[i - 1], op) && v >= op_value(*base[i + 1], op)) {
        peaks.push_back({op, base[i - 1]->k, base[i]->k, base[i + 1]->k, v});
      }
    }
  }
  auto value_at = [&](double k, std::size_t op) { return op_value(rows.at(k), op); };

  for (int level = 0; level < kMaxLevels; ++level) {
    std::vector<double> todo;
    for (const auto& pk : peaks) {
      if (!pk.active) continue;
      for (double k : {0.5 * (pk.left + pk.centre), 0.5 * (pk.centre + pk.right)})
        if (!rows.contains(k)) todo.push_back(k);
    }
    if (todo.empty()) break;
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    auto fresh = parallel_map(todo, threads, [&](double k) { return evaluate_point(cfg, k, hook); });
    for (auto& r : fresh) {
      r.refined = true;
      const double k = r.k;
      rows.emplace(k, std::move(r));
    }
    for (auto& pk : peaks) {
      if (!pk.active) continue;
      const double ml = 0.5 * (pk.left + pk.centre), mr = 0.5 * (pk.centre + pk.right);
      const double pts[5] = {pk.left, ml, pk.centre, mr, pk.right};
      int best = 2;
      for (int j = 0; j < 5; ++j)
        if (value_at(pts[j], pk.op) > value_at(pts[best], pk.op)) best = j;
      const double h = value_at(pts[best], pk.op);
      const bool stable = std::abs(h - pk.height) <= kRelChange * pk.height;
      pk.height = h;
      pk.level = level + 1;
      if (best == 0 || best == 4 || stable) {
        pk.active = false;
        continue;
      }
      pk.left = pts[best - 1];
      pk.centre = pts[best];
      pk.right = pts[best + 1];
    }
  }
}

}  // namespace detail

inline SweepResult run_sweep(const SweepConfig& cfg, unsigned threads = thread_count_from_env(),
                             const EigenvalueHook& hook = {}) {
  cfg.validate();
  SweepResult res;
  res.config = cfg;
  const auto ks = cfg.k_grid();
  auto base = detail::parallel_map(ks, threads, [&](double k) { return evaluate_point(cfg, k, hook); });
  if (!cfg.adaptiveRefine) {
    res.rows = std::move(base);
    return res;
  }
  std::map<double, SweepRow> rows;
  for (auto& r : base) {
    const double k = r.k;
    rows.emplace(k, std::move(r));
  }
  detail::refine_peaks(cfg, rows, threads, hook);
  for (auto& [k, r] : rows) res.rows.push_back(std::move(r));
  return res;
}

/// Spikes of one operator on the base (unrefined) grid, with the rolling
/// window scaled to the sweep step.
inline std::vector<Spike> sweep_spikes(const SweepResult& res, FamilyName f, double ratio = 10.0) {
  const auto v = res.series(f, true);
  if (v.size() < 16) return {};
  return detect_spikes(res.ks(true), v, {spike_window_for_step(res.config.kstep), ratio});
}

}  // namespace tbie
