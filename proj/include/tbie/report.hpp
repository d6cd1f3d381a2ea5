#pragma once

// Writers for sweep results: long-format CSV, nested JSON and a standalone
// SVG plot with a logarithmic y axis. All number formatting goes through
// std::to_chars so output is locale-independent and byte-stable.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tbie/sweep.hpp"

namespace tbie {

/// Shortest round-trip representation; "nan", "inf", "-inf" for non-finite values.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string format_fixed(double x, int digits) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, p);
}

inline constexpr std::string_view kCsvHeader = "k,op_name,norm,argmax_mode,warn";

inline void write_csv(std::ostream& os, const SweepResult& res) {
  os << kCsvHeader << '\n';
  for (const auto& r : res.rows) {
    for (const auto& o : r.ops) {
      os << format_double(r.k) << ',' << to_string(o.name) << ',' << format_double(o.norm) << ',' << o.mode << ','
         << warning_string(o.warn) << '\n';
    }
  }
}

namespace detail {

inline nlohmann::ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline nlohmann::ordered_json warn_list(unsigned w) {
  auto a = nlohmann::ordered_json::array();
  if (w & kWarnTruncation) a.push_back("trunc");
  if (w & kWarnOverflow) a.push_back("overflow");
  if (w & kWarnNearSingular) a.push_back("near_singular");
  return a;
}

}  // namespace detail

inline nlohmann::ordered_json config_json(const SweepConfig& c) {
  nlohmann::ordered_json j;
  j["geometry"] = to_string(c.geometry);
  j["ni"] = c.n_i;
  j["no"] = c.n_o;
  j["alpha"] = c.alpha;
  j["kmin"] = c.kmin;
  j["kmax"] = c.kmax;
  j["kstep"] = c.kstep;
  j["max_order"] = c.maxOrder;
  j["norm"] = to_string(c.normChoice);
  auto ops = nlohmann::ordered_json::array();
  for (auto f : c.operators) ops.push_back(to_string(f));
  j["ops"] = ops;
  j["refine"] = c.adaptiveRefine;
  return j;
}

inline nlohmann::ordered_json sweep_json(const SweepResult& res) {
  nlohmann::ordered_json root;
  root["config"] = config_json(res.config);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : res.rows) {
    nlohmann::ordered_json row;
    row["k"] = r.k;
    row["modes"] = r.modesComputed;
    row["refined"] = r.refined;
    nlohmann::ordered_json ops;
    for (const auto& o : r.ops) {
      nlohmann::ordered_json e;
      e["norm"] = detail::json_number(o.norm);
      e[is_augmented(o.name) ? "argmin_mode" : "argmax_mode"] = o.mode;
      e["min_det"] = detail::json_number(o.minDet);
      e["warn"] = detail::warn_list(o.warn);
      ops[std::string(to_string(o.name))] = e;
    }
    row["ops"] = ops;
    rows.push_back(row);
  }
  root["rows"] = rows;
  nlohmann::ordered_json spikes;
  for (auto f : res.config.operators) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& s : sweep_spikes(res, f)) {
      a.push_back({{"k", s.k}, {"height", detail::json_number(s.height)}, {"ratio", detail::json_number(s.ratio)}});
    }
    spikes[std::string(to_string(f))] = a;
  }
  root["spikes"] = spikes;
  return root;
}

inline void write_json(std::ostream& os, const SweepResult& res) { os << sweep_json(res).dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// SVG

inline void write_svg(std::ostream& os, const SweepResult& res) {
  constexpr double W = 800, H = 500, left = 70, right = 150, top = 30, bottom = 50;
  constexpr const char* palette[] = {"#0072bd", "#d95319", "#edb120", "#7e2f8e", "#77ac30",
                                     "#4dbeee", "#a2142f", "#000000", "#888888", "#00a087"};
  const auto ks = res.ks();
  double kmin = res.config.kmin, kmax = std::max(res.config.kmax, res.config.kmin + 1e-9);
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  for (const auto& r : res.rows)
    for (const auto& o : r.ops)
      if (std::isfinite(o.norm) && o.norm > 0.0) {
        ymin = std::min(ymin, o.norm);
        ymax = std::max(ymax, o.norm);
      }
  if (!(ymax > 0.0)) {
    ymin = 1.0;
    ymax = 10.0;
  }
  const double d0 = std::floor(std::log10(ymin));
  const double d1 = std::max(d0 + 1.0, std::ceil(std::log10(ymax)));
  auto X = [&](double k) { return left + (k - kmin) / (kmax - kmin) * (W - left - right); };
  auto Y = [&](double v) { return top + (d1 - std::log10(v)) / (d1 - d0) * (H - top - bottom); };
  auto f2 = [](double x) { return format_fixed(x, 2); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int d = static_cast<int>(d0); d <= static_cast<int>(d1); ++d) {
    const double y = Y(std::pow(10.0, d));
    os << "<line x1=\"" << left << "\" y1=\"" << f2(y) << "\" x2=\"" << W - right << "\" y2=\"" << f2(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  const double span = kmax - kmin;
  const double tick = span <= 2 ? 0.25 : span <= 5 ? 0.5 : span <= 12 ? 1.0 : span <= 30 ? 5.0 : 10.0;
  for (double t = std::ceil(kmin / tick) * tick; t <= kmax + 1e-9; t += tick) {
    const double x = X(t);
    os << "<line x1=\"" << f2(x) << "\" y1=\"" << H - bottom << "\" x2=\"" << f2(x) << "\" y2=\"" << H - bottom + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << f2(x) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">" << format_double(t)
       << "</text>\n";
  }
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">k</text>\n";

  for (std::size_t op = 0; op < res.config.operators.size(); ++op) {
    const char* colour = palette[op % std::size(palette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (const auto& r : res.rows) {
      const double v = r.ops[op].norm;
      if (!std::isfinite(v) || v <= 0.0) continue;
      if (!first) os << ' ';
      os << f2(X(r.k)) << ',' << f2(Y(v));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 20.0 * static_cast<double>(op + 1);
    os << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 35 << "\" y2=\"" << ly
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - right + 40 << "\" y=\"" << ly + 4 << "\">" << to_string(res.config.operators[op])
       << "</text>\n";
  }
  os << "</svg>\n";
}

inline void write_sweep(std::ostream& os, const SweepResult& res) {
  switch (res.config.format) {
    case OutputFormat::Csv: write_csv(os, res); break;
    case OutputFormat::Json: write_json(os, res); break;
    case OutputFormat::Svg: write_svg(os, res); break;
  }
}

}  // namespace tbie
