#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/aggregation.hpp"
#include "flexhull/io.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/optimization.hpp"
#include "flexhull/scenario.hpp"

namespace flexhull {

struct BenchTuple {
  int n = 0;
  int d = 0;
};

// How the vertex budget g is derived from the horizon d.
enum class GRule { DSquared, PowD, Fixed };

struct BenchConfig {
  std::vector<BenchTuple> tuples;
  GRule g_rule = GRule::DSquared;
  long long g_fixed = 0;
  std::vector<ObjectiveKind> objectives = {ObjectiveKind::Cost, ObjectiveKind::Peak};
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string demand_csv;
  std::string prices_csv;
  // Exact optima are solved only when n*d stays at or below this, since the
  // stacked LP grows with both fleet size and horizon.
  long long exact_threshold = 5000;
  double tolerance = kDefaultTol;
  bool record_timings = true;
  int redraws = 50;  // robustness mode only
  std::string out_csv = "flexhull_results.csv";
  std::string out_json = "flexhull_results.json";

  long long g_for(int d) const {
    switch (g_rule) {
      case GRule::DSquared:
        return static_cast<long long>(d) * d;
      case GRule::PowD:
        if (d > 62) {
          throw std::invalid_argument("g rule 2^d overflows for d > 62");
        }
        return 1LL << d;
      case GRule::Fixed:
        return g_fixed;
    }
    throw std::logic_error("unreachable g rule");
  }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  const std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<std::string> split_tokens(const std::string& value) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

inline long long parse_int_value(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': '" + value +
                                "' is not an integer");
  }
  if (used != value.size()) {
    throw std::invalid_argument("config key '" + key + "': trailing text in '" +
                                value + "'");
  }
  return v;
}

inline double parse_double_value(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': '" + value +
                                "' is not a number");
  }
  if (used != value.size()) {
    throw std::invalid_argument("config key '" + key + "': trailing text in '" +
                                value + "'");
  }
  return v;
}

inline BenchTuple parse_tuple_token(const std::string& token) {
  const std::size_t x = token.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= token.size()) {
    throw std::invalid_argument("config key 'tuples': token '" + token +
                                "' is not of the form NxD");
  }
  BenchTuple t;
  t.n = static_cast<int>(parse_int_value(token.substr(0, x), "tuples"));
  t.d = static_cast<int>(parse_int_value(token.substr(x + 1), "tuples"));
  if (t.n < 1 || t.d < 1) {
    throw std::invalid_argument("config key 'tuples': token '" + token +
                                "' must have n >= 1 and d >= 1");
  }
  return t;
}

inline std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

inline std::string csv_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

inline json json_opt(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Parses the key=value benchmark configuration format. '#' starts a comment,
// blank lines are skipped, later assignments win, and unknown keys are hard
// errors so typos cannot silently fall back to defaults.
inline BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_tuples = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(detail::strip_comment(line));
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + stripped + "'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }

    if (key == "tuples") {
      cfg.tuples.clear();
      for (const std::string& token : detail::split_tokens(value)) {
        cfg.tuples.push_back(detail::parse_tuple_token(token));
      }
      saw_tuples = true;
    } else if (key == "g") {
      if (value == "d^2") {
        cfg.g_rule = GRule::DSquared;
      } else if (value == "2^d") {
        cfg.g_rule = GRule::PowD;
      } else {
        cfg.g_rule = GRule::Fixed;
        cfg.g_fixed = detail::parse_int_value(value, key);
        if (cfg.g_fixed < 1) {
          throw std::invalid_argument("config key 'g': must be >= 1, 'd^2' or '2^d'");
        }
      }
    } else if (key == "objectives") {
      cfg.objectives.clear();
      for (const std::string& token : detail::split_tokens(value)) {
        if (token == "cost") {
          cfg.objectives.push_back(ObjectiveKind::Cost);
        } else if (token == "peak") {
          cfg.objectives.push_back(ObjectiveKind::Peak);
        } else {
          throw std::invalid_argument("config key 'objectives': unknown objective '" +
                                      token + "'");
        }
      }
      if (cfg.objectives.empty()) {
        throw std::invalid_argument("config key 'objectives': no objectives listed");
      }
    } else if (key == "repetitions") {
      cfg.repetitions = static_cast<int>(detail::parse_int_value(value, key));
      if (cfg.repetitions < 1) {
        throw std::invalid_argument("config key 'repetitions': must be >= 1");
      }
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::parse_int_value(value, key));
    } else if (key == "demand_csv") {
      cfg.demand_csv = value;
    } else if (key == "prices_csv") {
      cfg.prices_csv = value;
    } else if (key == "exact_threshold") {
      cfg.exact_threshold = detail::parse_int_value(value, key);
      if (cfg.exact_threshold < 0) {
        throw std::invalid_argument("config key 'exact_threshold': must be >= 0");
      }
    } else if (key == "tolerance") {
      cfg.tolerance = detail::parse_double_value(value, key);
      if (!(cfg.tolerance > 0)) {
        throw std::invalid_argument("config key 'tolerance': must be > 0");
      }
    } else if (key == "record_timings") {
      if (value == "true") {
        cfg.record_timings = true;
      } else if (value == "false") {
        cfg.record_timings = false;
      } else {
        throw std::invalid_argument("config key 'record_timings': expected true or false");
      }
    } else if (key == "redraws") {
      cfg.redraws = static_cast<int>(detail::parse_int_value(value, key));
      if (cfg.redraws < 1) {
        throw std::invalid_argument("config key 'redraws': must be >= 1");
      }
    } else if (key == "out_csv") {
      cfg.out_csv = value;
    } else if (key == "out_json") {
      cfg.out_json = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (!saw_tuples || cfg.tuples.empty()) {
    throw std::invalid_argument("config: 'tuples' is required and must be non-empty");
  }
  return cfg;
}

// Loads a config file and applies the FLEXHULL_SEED environment override, so
// a whole sweep can be re-seeded without editing configs.
inline BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  BenchConfig cfg = parse_bench_config(ss.str());
  if (const char* env = std::getenv("FLEXHULL_SEED")) {
    const std::string value(env);
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw std::invalid_argument("FLEXHULL_SEED='" + value +
                                  "' is not an unsigned integer");
    }
  }
  return cfg;
}

// One benchmark cell. Optional fields stay empty when a stage was skipped
// (exact above threshold, timings off) or failed (see the error column).
struct BenchRow {
  int n = 0;
  int d = 0;
  long long g = 0;
  std::string objective;
  std::optional<double> z_approx;
  std::optional<double> z_exact;
  std::optional<double> z_noflex;
  std::optional<double> upr_percent;
  std::optional<double> t_aggregate_s;
  std::optional<double> t_opt_s;
  std::optional<double> t_exact_s;
  std::string repetition;  // "0", "1", ... or "median"
  std::string error;
};

inline std::string bench_rows_to_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "n,d,g,objective,z_approx,z_exact,z_noflex,upr_percent,"
      "t_aggregate_s,t_opt_s,t_exact_s,repetition,error\n";
  for (const BenchRow& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.d) + ',' +
           std::to_string(r.g) + ',' + r.objective + ',' +
           detail::csv_opt(r.z_approx) + ',' + detail::csv_opt(r.z_exact) + ',' +
           detail::csv_opt(r.z_noflex) + ',' + detail::csv_opt(r.upr_percent) + ',' +
           detail::csv_opt(r.t_aggregate_s) + ',' + detail::csv_opt(r.t_opt_s) + ',' +
           detail::csv_opt(r.t_exact_s) + ',' + r.repetition + ',' +
           detail::csv_field(r.error) + '\n';
  }
  return out;
}

inline json bench_rows_to_json(const std::vector<BenchRow>& rows) {
  json arr = json::array();
  for (const BenchRow& r : rows) {
    json e;
    e["n"] = r.n;
    e["d"] = r.d;
    e["g"] = r.g;
    e["objective"] = r.objective;
    e["z_approx"] = detail::json_opt(r.z_approx);
    e["z_exact"] = detail::json_opt(r.z_exact);
    e["z_noflex"] = detail::json_opt(r.z_noflex);
    e["upr_percent"] = detail::json_opt(r.upr_percent);
    e["t_aggregate_s"] = detail::json_opt(r.t_aggregate_s);
    e["t_opt_s"] = detail::json_opt(r.t_opt_s);
    e["t_exact_s"] = detail::json_opt(r.t_exact_s);
    e["repetition"] = r.repetition;
    e["error"] = r.error;
    arr.push_back(e);
  }
  json j;
  j["rows"] = arr;
  return j;
}

namespace detail {

inline bool bench_row_less(const BenchRow& a, const BenchRow& b) {
  if (a.n != b.n) return a.n < b.n;
  if (a.d != b.d) return a.d < b.d;
  if (a.objective != b.objective) return a.objective < b.objective;
  // Numeric repetitions ascending, with the median summary row last.
  const bool am = a.repetition == "median";
  const bool bm = b.repetition == "median";
  if (am != bm) return bm;
  if (am) return false;
  return std::stoi(a.repetition) < std::stoi(b.repetition);
}

// Summary row for one (tuple, objective) group: a copy of the repetition
// whose UPR is the lower median, so every value in the row comes from one
// actual run rather than being averaged across runs. Falls back to z_approx
// ordering (and then to the first repetition) when UPR is unavailable.
inline BenchRow median_row(const std::vector<BenchRow>& reps) {
  std::vector<const BenchRow*> with_upr;
  std::vector<const BenchRow*> with_z;
  for (const BenchRow& r : reps) {
    if (r.upr_percent) with_upr.push_back(&r);
    if (r.z_approx) with_z.push_back(&r);
  }
  const BenchRow* pick = nullptr;
  if (!with_upr.empty()) {
    std::sort(with_upr.begin(), with_upr.end(), [](const BenchRow* a, const BenchRow* b) {
      return *a->upr_percent < *b->upr_percent;
    });
    pick = with_upr[(with_upr.size() - 1) / 2];
  } else if (!with_z.empty()) {
    std::sort(with_z.begin(), with_z.end(), [](const BenchRow* a, const BenchRow* b) {
      return *a->z_approx < *b->z_approx;
    });
    pick = with_z[(with_z.size() - 1) / 2];
  } else {
    pick = &reps.front();
  }
  BenchRow out = *pick;
  out.repetition = "median";
  return out;
}

inline Scenario build_scenario(const BenchConfig& cfg, int n, int d,
                               std::uint64_t seed) {
  Scenario sc = generate_scenario(n, d, seed);
  if (!cfg.demand_csv.empty()) sc.demand = load_demand_csv(cfg.demand_csv, d);
  if (!cfg.prices_csv.empty()) sc.prices = load_prices_csv(cfg.prices_csv, d);
  return sc;
}

}  // namespace detail

// Runs the full sweep: for every tuple and repetition r, draw a fresh fleet
// with seed+r, aggregate once, then evaluate each objective over the hull
// and (within the threshold) exactly. Failures are captured per cell in the
// error column; a bad cell never aborts the sweep.
inline std::vector<BenchRow> run_benchmark(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (const BenchTuple& tuple : cfg.tuples) {
    std::vector<std::vector<BenchRow>> by_objective(cfg.objectives.size());
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t rep_seed = cfg.seed + static_cast<std::uint64_t>(rep);

      Scenario sc;
      VertexMatrix vm;
      std::string setup_error;
      std::optional<double> t_aggregate;
      try {
        sc = detail::build_scenario(cfg, tuple.n, tuple.d, rep_seed);
        const detail::Stopwatch sw;
        vm = aggregate(sc.specs, cfg.g_for(tuple.d), rep_seed);
        if (cfg.record_timings) t_aggregate = sw.seconds();
      } catch (const std::exception& e) {
        setup_error = e.what();
      }

      for (std::size_t oi = 0; oi < cfg.objectives.size(); ++oi) {
        const ObjectiveKind kind = cfg.objectives[oi];
        BenchRow row;
        row.n = tuple.n;
        row.d = tuple.d;
        row.objective = objective_name(kind);
        row.repetition = std::to_string(rep);
        if (!setup_error.empty()) {
          row.g = cfg.g_rule == GRule::PowD && tuple.d > 62 ? 0 : cfg.g_for(tuple.d);
          row.error = setup_error;
          by_objective[oi].push_back(row);
          continue;
        }
        row.g = vm.g();
        row.t_aggregate_s = t_aggregate;
        try {
          const ObjectiveSpec obj = make_objective(sc, kind);
          const detail::Stopwatch sw_opt;
          const HullSolution hull = kind == ObjectiveKind::Cost
                                        ? min_cost_over_hull(vm, obj)
                                        : min_peak_over_hull(vm, obj);
          if (cfg.record_timings) row.t_opt_s = sw_opt.seconds();
          row.z_approx = hull.value;
          row.z_noflex = no_flex_value(obj);
          if (static_cast<long long>(tuple.n) * tuple.d <= cfg.exact_threshold) {
            const detail::Stopwatch sw_exact;
            const double exact = exact_optimum(sc.specs, obj);
            if (cfg.record_timings) row.t_exact_s = sw_exact.seconds();
            row.z_exact = exact;
            row.upr_percent = upr(*row.z_approx, exact, *row.z_noflex, cfg.tolerance);
          }
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        by_objective[oi].push_back(row);
      }
    }
    for (const auto& reps : by_objective) {
      rows.insert(rows.end(), reps.begin(), reps.end());
      if (cfg.repetitions > 1) rows.push_back(detail::median_row(reps));
    }
  }
  std::sort(rows.begin(), rows.end(), detail::bench_row_less);
  return rows;
}

// One robustness cell: UPR spread for a fixed fleet across vertex redraws.
struct RobustnessRow {
  int n = 0;
  int d = 0;
  long long g = 0;
  std::string objective;
  int redraws = 0;
  std::optional<double> upr_min_percent;
  std::optional<double> upr_median_percent;
  std::optional<double> upr_max_percent;
  std::string error;
};

inline std::string robustness_rows_to_csv(const std::vector<RobustnessRow>& rows) {
  std::string out =
      "n,d,g,objective,redraws,upr_min_percent,upr_median_percent,"
      "upr_max_percent,error\n";
  for (const RobustnessRow& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.d) + ',' +
           std::to_string(r.g) + ',' + r.objective + ',' +
           std::to_string(r.redraws) + ',' + detail::csv_opt(r.upr_min_percent) +
           ',' + detail::csv_opt(r.upr_median_percent) + ',' +
           detail::csv_opt(r.upr_max_percent) + ',' + detail::csv_field(r.error) +
           '\n';
  }
  return out;
}

inline json robustness_rows_to_json(const std::vector<RobustnessRow>& rows) {
  json arr = json::array();
  for (const RobustnessRow& r : rows) {
    json e;
    e["n"] = r.n;
    e["d"] = r.d;
    e["g"] = r.g;
    e["objective"] = r.objective;
    e["redraws"] = r.redraws;
    e["upr_min_percent"] = detail::json_opt(r.upr_min_percent);
    e["upr_median_percent"] = detail::json_opt(r.upr_median_percent);
    e["upr_max_percent"] = detail::json_opt(r.upr_max_percent);
    e["error"] = r.error;
    arr.push_back(e);
  }
  json j;
  j["rows"] = arr;
  return j;
}

namespace detail {

inline double true_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace detail

// Measures how sensitive the approximation is to the sign-vector sample: the
// fleet and exact optimum are fixed per tuple, the hull is rebuilt `redraws`
// times with seeds seed+1+k, and the UPR spread is reported.
inline std::vector<RobustnessRow> run_robustness(const BenchConfig& cfg) {
  std::vector<RobustnessRow> rows;
  for (const BenchTuple& tuple : cfg.tuples) {
    std::vector<RobustnessRow> cell(cfg.objectives.size());
    std::vector<std::vector<double>> uprs(cfg.objectives.size());
    std::vector<double> z_exact(cfg.objectives.size());
    std::vector<double> z_noflex(cfg.objectives.size());
    std::vector<ObjectiveSpec> objs(cfg.objectives.size());

    for (std::size_t oi = 0; oi < cfg.objectives.size(); ++oi) {
      cell[oi].n = tuple.n;
      cell[oi].d = tuple.d;
      cell[oi].objective = objective_name(cfg.objectives[oi]);
      cell[oi].redraws = cfg.redraws;
    }

    Scenario sc;
    std::string setup_error;
    try {
      sc = detail::build_scenario(cfg, tuple.n, tuple.d, cfg.seed);
      if (static_cast<long long>(tuple.n) * tuple.d > cfg.exact_threshold) {
        throw std::runtime_error(
            "exact optimum unavailable: n*d exceeds exact_threshold");
      }
      for (std::size_t oi = 0; oi < cfg.objectives.size(); ++oi) {
        objs[oi] = make_objective(sc, cfg.objectives[oi]);
        z_exact[oi] = exact_optimum(sc.specs, objs[oi]);
        z_noflex[oi] = no_flex_value(objs[oi]);
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    if (setup_error.empty()) {
      for (int k = 0; k < cfg.redraws; ++k) {
        const std::uint64_t redraw_seed = cfg.seed + 1 + static_cast<std::uint64_t>(k);
        VertexMatrix vm;
        try {
          vm = aggregate(sc.specs, cfg.g_for(tuple.d), redraw_seed);
        } catch (const std::exception& e) {
          setup_error = e.what();
          break;
        }
        for (std::size_t oi = 0; oi < cfg.objectives.size(); ++oi) {
          if (!cell[oi].error.empty()) continue;
          cell[oi].g = vm.g();
          try {
            const HullSolution hull = cfg.objectives[oi] == ObjectiveKind::Cost
                                          ? min_cost_over_hull(vm, objs[oi])
                                          : min_peak_over_hull(vm, objs[oi]);
            uprs[oi].push_back(
                upr(hull.value, z_exact[oi], z_noflex[oi], cfg.tolerance));
          } catch (const std::exception& e) {
            cell[oi].error = e.what();
          }
        }
      }
    }

    for (std::size_t oi = 0; oi < cfg.objectives.size(); ++oi) {
      if (!setup_error.empty()) cell[oi].error = setup_error;
      if (cell[oi].error.empty() && !uprs[oi].empty()) {
        cell[oi].upr_min_percent = *std::min_element(uprs[oi].begin(), uprs[oi].end());
        cell[oi].upr_max_percent = *std::max_element(uprs[oi].begin(), uprs[oi].end());
        cell[oi].upr_median_percent = detail::true_median(uprs[oi]);
      }
      rows.push_back(cell[oi]);
    }
  }
  return rows;
}

}  // namespace flexhull
