#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fgsens/analysis.hpp"

namespace fgsens {

namespace detail {

inline std::string fixed(double v, int dp) {
  if (std::isinf(v)) return v > 0 ? "inf" : "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", dp, v);
  return buf;
}

// full precision for machine-readable output; infinities become empty cells
inline std::string csv_num(double v) {
  if (std::isinf(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace detail

inline std::string render_report_text(const LRReport& r) {
  std::ostringstream os;
  std::size_t name_w = 14;
  for (const auto& m : r.markers) name_w = std::max(name_w, m.size() + 2);
  std::vector<std::size_t> col_w;
  for (const auto& c : r.columns) col_w.push_back(std::max<std::size_t>(c.label.size() + 2, 12));

  os << std::string(name_w, ' ');
  for (std::size_t j = 0; j < r.columns.size(); ++j)
    os << detail::pad(r.columns[j].label, col_w[j]);
  os << "\n";
  for (std::size_t i = 0; i < r.markers.size(); ++i) {
    os << r.markers[i] << std::string(name_w - r.markers[i].size(), ' ');
    for (std::size_t j = 0; j < r.columns.size(); ++j)
      os << detail::pad(detail::fixed(r.columns[j].per_marker_lr[i], 1), col_w[j]);
    os << "\n";
  }
  os << "Overall log10 LR\n";
  os << "Exact" << std::string(name_w - 5, ' ');
  for (std::size_t j = 0; j < r.columns.size(); ++j)
    os << detail::pad(detail::fixed(r.columns[j].exact_log10, 2), col_w[j]);
  os << "\n";
  os << "Product rule" << std::string(name_w - 12, ' ');
  for (std::size_t j = 0; j < r.columns.size(); ++j)
    os << detail::pad(detail::fixed(r.columns[j].product_log10, 2), col_w[j]);
  os << "\n";
  bool any_posterior = false;
  for (const auto& c : r.columns) any_posterior |= c.posterior.has_value();
  if (any_posterior) {
    os << "Posterior" << std::string(name_w - 9, ' ');
    for (std::size_t j = 0; j < r.columns.size(); ++j)
      os << detail::pad(r.columns[j].posterior ? detail::fixed(*r.columns[j].posterior, 3) : "-",
                        col_w[j]);
    os << "\n";
  }
  return os.str();
}

inline std::string render_report_csv(const LRReport& r) {
  std::ostringstream os;
  os << "marker,scenario,lr\n";
  for (std::size_t i = 0; i < r.markers.size(); ++i)
    for (const auto& c : r.columns)
      os << r.markers[i] << "," << c.label << "," << detail::csv_num(c.per_marker_lr[i]) << "\n";
  for (const auto& c : r.columns) {
    os << "overall_exact_log10," << c.label << "," << detail::csv_num(c.exact_log10) << "\n";
    os << "overall_product_log10," << c.label << "," << detail::csv_num(c.product_log10) << "\n";
    if (c.posterior) os << "posterior," << c.label << "," << detail::csv_num(*c.posterior) << "\n";
  }
  return os.str();
}

inline std::string render_bounds_text(const BoundsReport& r) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << "\n";
  std::size_t name_w = 10;
  for (const auto& row : r.rows) name_w = std::max(name_w, row.marker.size() + 2);
  os << std::string(name_w, ' ') << detail::pad("baseline", 12) << detail::pad("exact", 12);
  for (EpsMode m : r.modes) {
    os << detail::pad(eps_mode_name(m) + " lo", 14) << detail::pad(eps_mode_name(m) + " hi", 14);
  }
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.marker << std::string(name_w - row.marker.size(), ' ');
    os << detail::pad(detail::fixed(row.baseline_lr, 1), 12)
       << detail::pad(detail::fixed(row.exact_lr, 1), 12);
    for (const auto& [lo, hi] : row.intervals) {
      os << detail::pad(std::isinf(lo) && lo < 0 ? "0" : detail::fixed(lo, 1), 14);
      os << detail::pad(std::isinf(hi) ? "inf" : detail::fixed(hi, 1), 14);
    }
    os << "\n";
  }
  return os.str();
}

inline std::string render_bounds_csv(const BoundsReport& r) {
  std::ostringstream os;
  os << "marker,scenario,baseline,exact";
  for (EpsMode m : r.modes)
    os << "," << eps_mode_name(m) << "_epsilon," << eps_mode_name(m) << "_lower,"
       << eps_mode_name(m) << "_upper";
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.marker << "," << r.scenario << "," << detail::csv_num(row.baseline_lr) << ","
       << detail::csv_num(row.exact_lr);
    for (std::size_t i = 0; i < row.intervals.size(); ++i) {
      os << "," << detail::csv_num(row.epsilons[i]) << ","
         << detail::csv_num(row.intervals[i].first) << ","
         << detail::csv_num(row.intervals[i].second);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace fgsens
