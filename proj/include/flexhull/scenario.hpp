#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/numeric.hpp"
#include "flexhull/optimization.hpp"
#include "flexhull/polytope.hpp"

namespace flexhull {

// A fleet of storage devices plus the household demand and price curves they
// are benchmarked against. Demand is per household (one column each); the
// optimization sees only the row sums.
struct Scenario {
  std::vector<StorageSpec> specs;
  Eigen::MatrixXd demand;  // d x n_households, kW
  Eigen::VectorXd prices;  // per period
  std::uint64_t seed = 0;
  std::string label;

  int d() const { return specs.empty() ? 0 : specs.front().d; }
  std::size_t n() const { return specs.size(); }
};

namespace detail {

// Hour-of-day at the midpoint of period t when d periods span 24h.
inline double hour_of(int t, int d) { return (t + 0.5) * 24.0 / d; }

inline double gaussian_bump(double h, double center, double sigma) {
  const double z = (h - center) / sigma;
  return std::exp(-0.5 * z * z);
}

}  // namespace detail

// Household load curves: a flat base plus morning and evening peaks, with
// small uniform noise, clipped at zero. One column per household; draws are
// consumed base, morning, evening, then the d per-period jitters, household
// by household, so the stream layout is part of the reproducibility contract.
inline Eigen::MatrixXd synthetic_demand(int d, int n_households, Rng& rng) {
  if (d < 1 || n_households < 1) {
    throw std::invalid_argument("synthetic_demand: d and n_households must be >= 1");
  }
  Eigen::MatrixXd q(d, n_households);
  for (int i = 0; i < n_households; ++i) {
    const double base = rng.uniform(0.2, 0.5);
    const double morning = rng.uniform(0.3, 1.0);
    const double evening = rng.uniform(0.5, 1.5);
    for (int t = 0; t < d; ++t) {
      const double h = detail::hour_of(t, d);
      double v = base + morning * detail::gaussian_bump(h, 8.0, 1.5) +
                 evening * detail::gaussian_bump(h, 19.0, 2.5) +
                 rng.uniform(-0.05, 0.05);
      q(t, i) = std::max(0.0, v);
    }
  }
  return q;
}

// Price curve shaped like the demand peaks (morning and evening premiums on
// a flat base) with light noise. Prices may not be hit by the clip in
// practice but are clipped anyway so downstream code can assume >= 0.
inline Eigen::VectorXd synthetic_prices(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("synthetic_prices: d must be >= 1");
  Eigen::VectorXd p(d);
  for (int t = 0; t < d; ++t) {
    const double h = detail::hour_of(t, d);
    double v = 0.15 + 0.08 * detail::gaussian_bump(h, 8.0, 2.0) +
               0.12 * detail::gaussian_bump(h, 19.0, 2.5) +
               rng.uniform(-0.01, 0.01);
    p(t) = std::max(0.0, v);
  }
  return p;
}

// Builds the standard benchmark fleet: lossless devices on a quarter-hour
// grid, empty lower SoC bound, and a final target of half the initial
// charge. Device parameters are drawn uniformly per device in the order
// s_max, s0, x_max, x_min; then demand (one household per device), then
// prices. The draw order is frozen: changing it silently changes every
// seeded benchmark.
inline Scenario generate_scenario(int n, int d, std::uint64_t seed,
                                  const std::string& label = "") {
  if (n < 1 || d < 1) {
    throw std::invalid_argument("generate_scenario: n and d must be >= 1");
  }
  Rng rng(seed);
  Scenario sc;
  sc.seed = seed;
  sc.label = label;
  sc.specs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    StorageSpec spec;
    spec.d = d;
    spec.alpha = 1.0;
    spec.dt = 0.25;
    spec.s_min = 0.0;
    spec.s_max = rng.uniform(10.5, 13.5);
    spec.s0 = rng.uniform(0.0, 10.5);
    spec.x_max = rng.uniform(4.0, 6.0);
    spec.x_min = rng.uniform(-6.0, -4.0);
    spec.s_f = 0.5 * spec.s0;
    spec.validate();
    sc.specs.push_back(spec);
  }
  sc.demand = synthetic_demand(d, n, rng);
  sc.prices = synthetic_prices(d, rng);
  return sc;
}

inline ObjectiveSpec make_objective(const Scenario& sc, ObjectiveKind kind) {
  if (sc.specs.empty()) {
    throw std::invalid_argument("make_objective: scenario has no devices");
  }
  ObjectiveSpec obj;
  obj.kind = kind;
  obj.prices = sc.prices;
  obj.demand_sum = sc.demand.rowwise().sum();
  obj.dt = sc.specs.front().dt;
  obj.validate(sc.d());
  return obj;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string trim(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t");
  return s.substr(lo, hi - lo + 1);
}

inline double parse_csv_number(const std::string& raw, const std::string& path,
                               std::size_t line_no, std::size_t col_no) {
  const std::string text = trim(raw);
  const std::string where = path + " line " + std::to_string(line_no) +
                            " column " + std::to_string(col_no);
  if (text.empty()) {
    throw std::runtime_error("CSV parse error at " + where + ": empty field");
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("CSV parse error at " + where + ": '" + text +
                             "' is not a number");
  }
  if (used != text.size()) {
    throw std::runtime_error("CSV parse error at " + where + ": trailing text in '" +
                             text + "'");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error("CSV parse error at " + where + ": non-finite value");
  }
  return value;
}

inline std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error("CSV file is empty: " + path);
  return rows;
}

}  // namespace detail

// Reads a demand table with header "t,q_1,...,q_N" and d data rows. The t
// column is parsed but only the q columns are returned (d x N). Every
// structural mismatch names the offending row or column.
inline Eigen::MatrixXd load_demand_csv(const std::string& path, int d) {
  const auto rows = detail::read_csv_rows(path);
  const auto& header = rows.front();
  if (header.empty() || detail::trim(header[0]) != "t") {
    throw std::runtime_error("demand CSV " + path +
                             ": header must start with 't', got '" +
                             (header.empty() ? "" : header[0]) + "'");
  }
  const std::size_t n_cols = header.size();
  if (n_cols < 2) {
    throw std::runtime_error("demand CSV " + path +
                             ": header has no q_* columns");
  }
  const std::size_t n_data = rows.size() - 1;
  if (n_data != static_cast<std::size_t>(d)) {
    throw std::runtime_error("demand CSV " + path + ": expected " +
                             std::to_string(d) + " data rows, found " +
                             std::to_string(n_data));
  }
  Eigen::MatrixXd q(d, static_cast<Eigen::Index>(n_cols - 1));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != n_cols) {
      throw std::runtime_error("demand CSV " + path + " line " +
                               std::to_string(r + 1) + ": expected " +
                               std::to_string(n_cols) + " fields, found " +
                               std::to_string(row.size()));
    }
    detail::parse_csv_number(row[0], path, r + 1, 1);
    for (std::size_t c = 1; c < n_cols; ++c) {
      q(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) =
          detail::parse_csv_number(row[c], path, r + 1, c + 1);
    }
  }
  return q;
}

// Reads a price curve with header "t,price" and d data rows.
inline Eigen::VectorXd load_prices_csv(const std::string& path, int d) {
  const auto rows = detail::read_csv_rows(path);
  const auto& header = rows.front();
  if (header.size() != 2 || detail::trim(header[0]) != "t" ||
      detail::trim(header[1]) != "price") {
    throw std::runtime_error("prices CSV " + path +
                             ": header must be 't,price'");
  }
  const std::size_t n_data = rows.size() - 1;
  if (n_data != static_cast<std::size_t>(d)) {
    throw std::runtime_error("prices CSV " + path + ": expected " +
                             std::to_string(d) + " data rows, found " +
                             std::to_string(n_data));
  }
  Eigen::VectorXd p(d);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2) {
      throw std::runtime_error("prices CSV " + path + " line " +
                               std::to_string(r + 1) + ": expected 2 fields, found " +
                               std::to_string(row.size()));
    }
    detail::parse_csv_number(row[0], path, r + 1, 1);
    p(static_cast<Eigen::Index>(r - 1)) =
        detail::parse_csv_number(row[1], path, r + 1, 2);
  }
  return p;
}

}  // namespace flexhull
