#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/aggregation.hpp"
#include "flexhull/disaggregation.hpp"
#include "flexhull/polytope.hpp"
#include "flexhull/scenario.hpp"

namespace flexhull {

// ordered_json keeps object keys in insertion order so serialized files are
// stable across runs, which the determinism contract depends on.
using json = nlohmann::ordered_json;

namespace detail {

// Shortest-round-trip formatting for doubles in CSV output. JSON output goes
// through nlohmann which already round-trips.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw std::runtime_error(what + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& entry : arr) {
    if (!entry.is_number()) throw std::runtime_error(what + ": non-numeric entry");
    v(i++) = entry.get<double>();
  }
  return v;
}

// Matrices are stored column by column: a d x m matrix becomes an array of m
// arrays of length d. Columns are the natural unit here (hull vertices,
// device schedules), so this layout keeps files readable.
inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    arr.push_back(vector_to_json(m.col(c)));
  }
  return arr;
}

inline Eigen::MatrixXd matrix_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw std::runtime_error(what + ": expected an array of columns");
  if (arr.empty()) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(arr.size());
  Eigen::Index rows = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index c = 0; c < cols; ++c) {
    Eigen::VectorXd col = vector_from_json(arr[static_cast<std::size_t>(c)],
                                           what + " column " + std::to_string(c));
    if (rows < 0) {
      rows = col.size();
      m.resize(rows, cols);
    } else if (col.size() != rows) {
      throw std::runtime_error(what + ": ragged columns (" + std::to_string(col.size()) +
                               " vs " + std::to_string(rows) + ")");
    }
    m.col(c) = col;
  }
  return m;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline const json& require_key(const json& j, const std::string& key,
                               const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error(what + ": missing key '" + key + "'");
  return *it;
}

}  // namespace detail

// ---- Scenario files -------------------------------------------------------

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["label"] = sc.label;
  j["seed"] = sc.seed;
  j["n"] = sc.n();
  j["d"] = sc.d();
  json specs = json::array();
  for (const StorageSpec& s : sc.specs) {
    json e;
    e["alpha"] = s.alpha;
    e["dt"] = s.dt;
    e["x_min"] = s.x_min;
    e["x_max"] = s.x_max;
    e["s_min"] = s.s_min;
    e["s_max"] = s.s_max;
    e["s0"] = s.s0;
    e["s_f"] = s.s_f;
    specs.push_back(e);
  }
  j["specs"] = specs;
  j["demand"] = detail::matrix_to_json(sc.demand);
  j["prices"] = detail::vector_to_json(sc.prices);
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.label = detail::require_key(j, "label", "scenario").get<std::string>();
  sc.seed = detail::require_key(j, "seed", "scenario").get<std::uint64_t>();
  const int d = detail::require_key(j, "d", "scenario").get<int>();
  const auto& specs = detail::require_key(j, "specs", "scenario");
  if (!specs.is_array() || specs.empty()) {
    throw std::runtime_error("scenario: 'specs' must be a non-empty array");
  }
  for (const auto& e : specs) {
    StorageSpec s;
    s.d = d;
    s.alpha = detail::require_key(e, "alpha", "scenario spec").get<double>();
    s.dt = detail::require_key(e, "dt", "scenario spec").get<double>();
    s.x_min = detail::require_key(e, "x_min", "scenario spec").get<double>();
    s.x_max = detail::require_key(e, "x_max", "scenario spec").get<double>();
    s.s_min = detail::require_key(e, "s_min", "scenario spec").get<double>();
    s.s_max = detail::require_key(e, "s_max", "scenario spec").get<double>();
    s.s0 = detail::require_key(e, "s0", "scenario spec").get<double>();
    s.s_f = detail::require_key(e, "s_f", "scenario spec").get<double>();
    s.validate();
    sc.specs.push_back(s);
  }
  sc.demand = detail::matrix_from_json(detail::require_key(j, "demand", "scenario"),
                                       "scenario demand");
  sc.prices = detail::vector_from_json(detail::require_key(j, "prices", "scenario"),
                                       "scenario prices");
  if (sc.demand.rows() != d) {
    throw std::runtime_error("scenario: demand has " + std::to_string(sc.demand.rows()) +
                             " rows, expected d=" + std::to_string(d));
  }
  if (sc.prices.size() != d) {
    throw std::runtime_error("scenario: prices has " + std::to_string(sc.prices.size()) +
                             " entries, expected d=" + std::to_string(d));
  }
  return sc;
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  detail::write_text_file(path, scenario_to_json(sc).dump(2) + "\n");
}

inline Scenario load_scenario(const std::string& path) {
  return scenario_from_json(detail::read_json_file(path));
}

// ---- Vertex matrix files --------------------------------------------------

inline json vertex_matrix_to_json(const VertexMatrix& vm) {
  json j;
  j["d"] = vm.columns.rows();
  j["n_devices"] = vm.n_devices;
  j["g"] = vm.g();
  j["has_zero_column"] = vm.has_zero_column;
  json signs = json::array();
  for (const SignVector& jv : vm.sign_vectors) {
    json row = json::array();
    for (std::int8_t s : jv) row.push_back(static_cast<int>(s));
    signs.push_back(row);
  }
  j["sign_vectors"] = signs;
  j["columns"] = detail::matrix_to_json(vm.columns);
  if (!vm.per_device.empty()) {
    json per = json::array();
    for (const Eigen::MatrixXd& m : vm.per_device) per.push_back(detail::matrix_to_json(m));
    j["per_device"] = per;
  }
  if (vm.shared_multiplicity > 0) {
    j["shared_per_device"] = detail::matrix_to_json(vm.shared_per_device);
    j["shared_multiplicity"] = vm.shared_multiplicity;
  }
  return j;
}

inline VertexMatrix vertex_matrix_from_json(const json& j) {
  VertexMatrix vm;
  vm.n_devices = detail::require_key(j, "n_devices", "vertex matrix").get<std::size_t>();
  vm.has_zero_column =
      detail::require_key(j, "has_zero_column", "vertex matrix").get<bool>();
  vm.columns = detail::matrix_from_json(
      detail::require_key(j, "columns", "vertex matrix"), "vertex matrix columns");
  const auto& signs = detail::require_key(j, "sign_vectors", "vertex matrix");
  if (!signs.is_array()) {
    throw std::runtime_error("vertex matrix: 'sign_vectors' must be an array");
  }
  for (const auto& row : signs) {
    SignVector jv;
    for (const auto& e : row) {
      const int v = e.get<int>();
      if (v != 1 && v != -1) {
        throw std::runtime_error("vertex matrix: sign entries must be +1 or -1");
      }
      jv.push_back(static_cast<std::int8_t>(v));
    }
    vm.sign_vectors.push_back(std::move(jv));
  }
  const Eigen::Index expected =
      static_cast<Eigen::Index>(vm.sign_vectors.size()) + (vm.has_zero_column ? 1 : 0);
  if (vm.columns.cols() != expected) {
    throw std::runtime_error("vertex matrix: " + std::to_string(vm.columns.cols()) +
                             " columns but " + std::to_string(vm.sign_vectors.size()) +
                             " sign vectors (zero column " +
                             (vm.has_zero_column ? "present" : "absent") + ")");
  }
  if (auto it = j.find("per_device"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      vm.per_device.push_back(detail::matrix_from_json(
          (*it)[i], "per-device matrix " + std::to_string(i)));
    }
    if (vm.per_device.size() != vm.n_devices) {
      throw std::runtime_error("vertex matrix: per_device count does not match n_devices");
    }
  }
  if (auto it = j.find("shared_per_device"); it != j.end()) {
    vm.shared_per_device = detail::matrix_from_json(*it, "shared per-device matrix");
    vm.shared_multiplicity =
        detail::require_key(j, "shared_multiplicity", "vertex matrix").get<std::size_t>();
  }
  return vm;
}

inline void save_vertex_matrix(const VertexMatrix& vm, const std::string& path) {
  detail::write_text_file(path, vertex_matrix_to_json(vm).dump(2) + "\n");
}

inline VertexMatrix load_vertex_matrix(const std::string& path) {
  return vertex_matrix_from_json(detail::read_json_file(path));
}

// ---- Hull weight files ----------------------------------------------------

inline json weights_to_json(const HullWeights& w) {
  json j;
  j["alpha"] = detail::vector_to_json(w.alpha);
  j["zero_weight"] = w.zero_weight;
  return j;
}

inline HullWeights weights_from_json(const json& j) {
  HullWeights w;
  w.alpha = detail::vector_from_json(detail::require_key(j, "alpha", "weights"),
                                     "weights alpha");
  w.zero_weight = detail::require_key(j, "zero_weight", "weights").get<double>();
  return w;
}

inline void save_weights(const HullWeights& w, const std::string& path) {
  detail::write_text_file(path, weights_to_json(w).dump(2) + "\n");
}

inline HullWeights load_weights(const std::string& path) {
  return weights_from_json(detail::read_json_file(path));
}

// ---- Schedule output ------------------------------------------------------

// Per-device schedules as CSV: header "device_0,...,device_{n-1}", one row
// per period, full double precision.
inline std::string schedules_to_csv(const Eigen::MatrixXd& schedules) {
  std::string out;
  for (Eigen::Index i = 0; i < schedules.cols(); ++i) {
    if (i > 0) out += ',';
    out += "device_" + std::to_string(i);
  }
  out += '\n';
  for (Eigen::Index t = 0; t < schedules.rows(); ++t) {
    for (Eigen::Index i = 0; i < schedules.cols(); ++i) {
      if (i > 0) out += ',';
      out += detail::fmt_double(schedules(t, i));
    }
    out += '\n';
  }
  return out;
}

inline void save_schedules_csv(const Eigen::MatrixXd& schedules, const std::string& path) {
  detail::write_text_file(path, schedules_to_csv(schedules));
}

}  // namespace flexhull
