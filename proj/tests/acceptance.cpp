// Acceptance gate for the aggregate-flexibility library. Each criterion is a
// self-contained end-to-end scenario that prints exactly one [PASS]/[FAIL]
// line with a short account of what was measured; the process exits nonzero
// when any selected criterion fails.
//
//   acceptance                          run every criterion
//   acceptance --criterion 4            run a single criterion
//   acceptance --cli PATH               benchmark tool, needed by criterion 11

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "flexhull/flexhull.hpp"
#include "test_util.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

flexhull::SignVector random_sign_vector(flexhull::Rng& rng, int d) {
  flexhull::SignVector j(static_cast<std::size_t>(d));
  for (auto& e : j) e = rng.index(2) == 0 ? std::int8_t{-1} : std::int8_t{1};
  return j;
}

// Criterion 1: on randomized fleets satisfying the battery assumptions,
// every sampled aggregate column must be a vertex of the exact Minkowski
// sum. Small dimensions keep the brute-force oracle exact; the fleet and
// size draws are shared with criterion 2 via the fixed seed.
Outcome criterion_columns_are_exact_vertices() {
  const auto start = Clock::now();
  flexhull::Rng rng(101);
  int columns = 0;
  int violations = 0;
  std::string first;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(2));
    const int n = 1 + static_cast<int>(rng.index(3));
    const auto fleet = testutil::random_assumption_fleet(rng, n, d);
    const auto vm =
        flexhull::aggregate(fleet, 1LL << d, static_cast<std::uint64_t>(trial));
    std::vector<flexhull::VertexSet> parts;
    parts.reserve(fleet.size());
    for (const auto& spec : fleet) {
      parts.push_back(flexhull::enumerate_vertices(flexhull::battery_polytope(spec)));
    }
    const flexhull::VertexSet candidates = flexhull::minkowski_vertex_candidates(parts);
    for (Eigen::Index c = 0; c < vm.g(); ++c) {
      ++columns;
      const Eigen::VectorXd col = vm.columns.col(c);
      if (!flexhull::is_vertex_of_hull(col, candidates, 1e-7)) {
        ++violations;
        if (first.empty()) {
          first = "; first at trial " + std::to_string(trial) + ", column " +
                  std::to_string(c);
        }
      }
    }
  }
  const double secs = seconds_since(start);
  Outcome out;
  out.pass = violations == 0 && secs < 120.0;
  out.detail = std::to_string(columns) + " columns over 200 fleets, " +
               std::to_string(violations) + " violations" + first + ", " +
               fmt(secs) + "s";
  return out;
}

// Criterion 2: on the same fleets, each column obeys its sign pattern
// componentwise and no two columns coincide.
Outcome criterion_sign_patterns_and_distinctness() {
  flexhull::Rng rng(101);
  int sign_checks = 0;
  int pair_checks = 0;
  int violations = 0;
  std::string first;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(2));
    const int n = 1 + static_cast<int>(rng.index(3));
    const auto fleet = testutil::random_assumption_fleet(rng, n, d);
    const auto vm =
        flexhull::aggregate(fleet, 1LL << d, static_cast<std::uint64_t>(trial));
    for (Eigen::Index c = 0; c < vm.g(); ++c) {
      const auto& j = vm.sign_vectors[static_cast<std::size_t>(c)];
      for (int t = 0; t < d; ++t) {
        ++sign_checks;
        const double v = vm.columns(t, c);
        const bool ok = j[static_cast<std::size_t>(t)] > 0 ? v >= -1e-9 : v <= 1e-9;
        if (!ok) {
          ++violations;
          if (first.empty()) {
            first = "; sign mismatch at trial " + std::to_string(trial);
          }
        }
      }
      for (Eigen::Index c2 = 0; c2 < c; ++c2) {
        ++pair_checks;
        if ((vm.columns.col(c) - vm.columns.col(c2)).lpNorm<Eigen::Infinity>() <=
            1e-9) {
          ++violations;
          if (first.empty()) {
            first = "; duplicate columns at trial " + std::to_string(trial);
          }
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(sign_checks) + " sign entries and " +
               std::to_string(pair_checks) + " column pairs, " +
               std::to_string(violations) + " violations" + first;
  return out;
}

// Criterion 3: corrected extreme actions of sets with a raised final-energy
// target are feasible and are vertices of that target set.
Outcome criterion_corrected_actions_are_vertices() {
  flexhull::Rng rng(303);
  int actions = 0;
  int violations = 0;
  std::string first;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(3));
    const auto spec = testutil::random_target_battery(rng, d);
    const auto poly = flexhull::battery_polytope(spec);
    const auto vertices = flexhull::enumerate_vertices(poly);
    const auto signs = flexhull::sample_sign_vectors(d, 1LL << d, 0);
    for (const auto& j : signs) {
      ++actions;
      std::string why;
      try {
        const auto corrected = flexhull::correct(spec, flexhull::battery_vertex(spec, j));
        if (!flexhull::contains(poly, corrected.y_tilde, 1e-7)) {
          why = "infeasible profile";
        } else if (!flexhull::is_vertex_of_hull(corrected.y_tilde, vertices, 1e-7)) {
          why = "not a vertex";
        }
      } catch (const std::exception& e) {
        why = e.what();
      }
      if (!why.empty()) {
        ++violations;
        if (first.empty()) {
          first = "; first at trial " + std::to_string(trial) + " (" + why + ")";
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(actions) + " corrected actions over 200 specs, " +
               std::to_string(violations) + " violations" + first;
  return out;
}

// Criterion 4: the closed-form battery extremization and the generic
// row-scanning extremization agree to solver precision.
Outcome criterion_fast_path_matches_generic() {
  flexhull::Rng rng(404);
  double max_gap = 0.0;
  int specs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(8));
    const auto spec = testutil::random_assumption_battery(rng, d);
    const auto j = random_sign_vector(rng, d);
    const auto fast = flexhull::battery_vertex(spec, j);
    const auto generic =
        flexhull::extreme_action_generic(flexhull::battery_polytope(spec), j);
    max_gap = std::max(max_gap,
                       (fast.y - generic.y).lpNorm<Eigen::Infinity>());
    ++specs;
  }
  Outcome out;
  out.pass = max_gap <= 1e-9;
  out.detail = std::to_string(specs) + " specs, max gap " + fmt(max_gap);
  return out;
}

// Feasibility program for criterion 5: find per-device profiles, one inside
// each device set, summing to the requested aggregate profile.
struct Decomposition {
  bool found = false;
  Eigen::MatrixXd schedules;  // d x n
};

Decomposition decompose_by_lp(const std::vector<flexhull::StorageSpec>& fleet,
                              const Eigen::VectorXd& p) {
  const int d = fleet.front().d;
  const auto n = static_cast<Eigen::Index>(fleet.size());
  const Eigen::Index nv = n * d;

  std::vector<flexhull::HPolytope> polys;
  polys.reserve(fleet.size());
  Eigen::Index device_rows = 0;
  for (const auto& spec : fleet) {
    polys.push_back(flexhull::battery_polytope(spec));
    device_rows += polys.back().rows();
  }

  flexhull::LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.A = Eigen::MatrixXd::Zero(device_rows + d, nv);
  lp.b.resize(device_rows + d);
  lp.sense.assign(static_cast<std::size_t>(device_rows), flexhull::RowSense::LE);
  lp.sense.insert(lp.sense.end(), static_cast<std::size_t>(d),
                  flexhull::RowSense::EQ);
  constexpr double inf = std::numeric_limits<double>::infinity();
  lp.lower = Eigen::VectorXd::Constant(nv, -inf);
  lp.upper = Eigen::VectorXd::Constant(nv, inf);

  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& poly = polys[static_cast<std::size_t>(i)];
    lp.A.block(row, i * d, poly.rows(), d) = poly.A;
    lp.b.segment(row, poly.rows()) = poly.b;
    row += poly.rows();
  }
  for (int t = 0; t < d; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) lp.A(row + t, i * d + t) = 1.0;
    lp.b(row + t) = p(t);
  }

  const auto sol = flexhull::simplex_solve(lp);
  Decomposition out;
  if (sol.status != flexhull::SolveStatus::Optimal) return out;
  out.found = true;
  out.schedules.resize(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.schedules.col(i) = sol.x.segment(i * d, d);
  }
  return out;
}

// Criterion 5: random convex combinations of the aggregate columns always
// admit a per-device feasible decomposition, so the spanned hull sits inside
// the exact aggregate set.
Outcome criterion_hull_points_decompose() {
  flexhull::Rng rng(505);
  int points = 0;
  int violations = 0;
  std::string first;
  for (int f = 0; f < 100; ++f) {
    const int n = 1 + static_cast<int>(rng.index(4));
    const int d = 1 + static_cast<int>(rng.index(6));
    const auto fleet = testutil::random_assumption_fleet(rng, n, d);
    const auto vm =
        flexhull::aggregate(fleet, 1LL << d, static_cast<std::uint64_t>(f));
    for (int k = 0; k < 10; ++k) {
      ++points;
      const auto w = testutil::random_weights(rng, vm);
      const Eigen::VectorXd p = vm.columns.leftCols(vm.g()) * w.alpha;
      std::string why;
      const auto dec = decompose_by_lp(fleet, p);
      if (!dec.found) {
        why = "no decomposition";
      } else {
        for (Eigen::Index i = 0; i < dec.schedules.cols(); ++i) {
          const Eigen::VectorXd xi = dec.schedules.col(i);
          if (!flexhull::contains(
                  flexhull::battery_polytope(fleet[static_cast<std::size_t>(i)]),
                  xi, 1e-6)) {
            why = "device profile infeasible";
            break;
          }
        }
        if (why.empty() &&
            (dec.schedules.rowwise().sum() - p).lpNorm<Eigen::Infinity>() > 1e-6) {
          why = "schedules do not sum to the point";
        }
      }
      if (!why.empty()) {
        ++violations;
        if (first.empty()) {
          first = "; first at fleet " + std::to_string(f) + " (" + why + ")";
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(points) + " hull points over 100 fleets, " +
               std::to_string(violations) + " failures" + first;
  return out;
}

// Criterion 6: the fully worked two-battery example reproduces its known
// column set and optimization values.
Outcome criterion_worked_example() {
  const auto fleet = testutil::example_fleet2();
  const auto vm = flexhull::aggregate(fleet, 4, 0);

  std::vector<Eigen::VectorXd> cols;
  for (Eigen::Index c = 0; c < vm.g(); ++c) cols.push_back(vm.columns.col(c));
  const std::vector<Eigen::VectorXd> expected = {
      testutil::vec2(2, 0), testutil::vec2(-2, 0), testutil::vec2(2, -2),
      testutil::vec2(-2, 2)};
  std::vector<std::string> problems;
  if (!vm.has_zero_column) problems.push_back("zero column missing");
  if (!testutil::same_point_set(cols, expected, 1e-12)) {
    problems.push_back("column set differs");
  }

  flexhull::ObjectiveSpec peak;
  peak.kind = flexhull::ObjectiveKind::Peak;
  peak.demand_sum = testutil::vec2(1, 1);
  peak.prices = testutil::vec2(1, -1);
  peak.dt = 1.0;
  const double za = flexhull::min_peak_over_hull(vm, peak).value;
  const double ze = flexhull::exact_optimum(fleet, peak);
  const double zn = flexhull::no_flex_value(peak);
  const double peak_upr = flexhull::upr(za, ze, zn);
  if (std::abs(za - 1.0 / 3.0) > 1e-9) {
    problems.push_back("peak approx " + fmt(za));
  }
  if (std::abs(ze) > 1e-9) problems.push_back("peak exact " + fmt(ze));
  if (std::abs(zn - 1.0) > 1e-12) problems.push_back("peak no-flex " + fmt(zn));
  if (std::abs(peak_upr - 100.0 / 3.0) > 1e-6) {
    problems.push_back("peak UPR " + fmt(peak_upr));
  }

  flexhull::ObjectiveSpec cost = peak;
  cost.kind = flexhull::ObjectiveKind::Cost;
  const double ca = flexhull::min_cost_over_hull(vm, cost).value;
  const double ce = flexhull::exact_optimum(fleet, cost);
  const double cn = flexhull::no_flex_value(cost);
  const double cost_upr = flexhull::upr(ca, ce, cn);
  if (std::abs(cost_upr) > 1e-6) problems.push_back("cost UPR " + fmt(cost_upr));

  Outcome out;
  out.pass = problems.empty();
  if (out.pass) {
    out.detail = "columns and zero column as expected; peak UPR " +
                 fmt(peak_upr) + "%, cost UPR " + fmt(cost_upr) + "%";
  } else {
    out.detail = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) {
      out.detail += "; " + problems[i];
    }
  }
  return out;
}

// Criterion 7: across a benchmark sweep in which every cell has an exact
// reference, the reported unlocked-potential ratio stays within [0, 100] up
// to tolerance for both objectives.
Outcome criterion_benchmark_upr_bounds() {
  flexhull::BenchConfig cfg;
  cfg.tuples = {{2, 4}, {3, 6}, {5, 8}, {8, 12}, {10, 16}, {12, 24}};
  cfg.repetitions = 2;
  cfg.seed = 2026;
  cfg.record_timings = false;
  const auto rows = flexhull::run_benchmark(cfg);

  int checked = 0;
  int violations = 0;
  std::string first;
  for (const auto& row : rows) {
    std::string why;
    if (!row.error.empty()) {
      why = "error '" + row.error + "'";
    } else if (!row.z_exact || !row.upr_percent) {
      why = "exact reference missing";
    } else if (*row.upr_percent < -1e-6 || *row.upr_percent > 100.0 + 1e-6) {
      why = "UPR " + fmt(*row.upr_percent);
    }
    ++checked;
    if (!why.empty()) {
      ++violations;
      if (first.empty()) {
        first = "; first at n=" + std::to_string(row.n) + " d=" +
                std::to_string(row.d) + " " + row.objective + " rep " +
                row.repetition + " (" + why + ")";
      }
    }
  }
  Outcome out;
  out.pass = violations == 0 && checked > 0;
  out.detail = std::to_string(checked) + " benchmark rows, " +
               std::to_string(violations) + " out of bounds" + first;
  return out;
}

// Criterion 8: a desk-scale aggregation (500 devices, 96 periods, 9216
// sampled columns) completes within a fixed wall-clock budget.
Outcome criterion_desk_scale_runtime() {
  const auto sc = flexhull::generate_scenario(500, 96, 2026);
  const auto start = Clock::now();
  const auto vm = flexhull::aggregate(sc.specs, 96LL * 96LL, 2026);
  const double secs = seconds_since(start);
  Outcome out;
  const bool shape_ok = vm.g() == 9216 && vm.has_zero_column;
  out.pass = secs <= 60.0 && shape_ok;
  out.detail = "n=500 d=96 g=9216 aggregated in " + fmt(secs) + "s" +
               (shape_ok ? "" : "; unexpected matrix shape");
  return out;
}

// Criterion 9: on synthetic full-day scenarios the approximation stays
// useful: across ten seeds per cell, the median peak UPR is at most 50% and
// the median cost UPR at most 80%.
Outcome criterion_scenario_upr_medians() {
  const std::vector<std::pair<int, int>> cells = {{10, 12}, {30, 24}};
  Outcome out;
  out.pass = true;
  for (const auto& [n, d] : cells) {
    std::vector<double> cost_uprs;
    std::vector<double> peak_uprs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto sc = flexhull::generate_scenario(n, d, seed);
      const auto vm =
          flexhull::aggregate(sc.specs, static_cast<long long>(d) * d, seed);
      for (const auto kind :
           {flexhull::ObjectiveKind::Cost, flexhull::ObjectiveKind::Peak}) {
        const auto obj = flexhull::make_objective(sc, kind);
        const double za = kind == flexhull::ObjectiveKind::Cost
                              ? flexhull::min_cost_over_hull(vm, obj).value
                              : flexhull::min_peak_over_hull(vm, obj).value;
        const double ze = flexhull::exact_optimum(sc.specs, obj);
        const double zn = flexhull::no_flex_value(obj);
        const double u = flexhull::upr(za, ze, zn);
        (kind == flexhull::ObjectiveKind::Cost ? cost_uprs : peak_uprs).push_back(u);
      }
    }
    const double cost_med = flexhull::detail::true_median(cost_uprs);
    const double peak_med = flexhull::detail::true_median(peak_uprs);
    if (!(cost_med <= 80.0 && peak_med <= 50.0)) out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += "cell " + std::to_string(n) + "x" + std::to_string(d) +
                  ": median cost UPR " + fmt(cost_med) + "%, median peak UPR " +
                  fmt(peak_med) + "%";
  }
  out.detail += " (limits 80% / 50%)";
  return out;
}

// Criterion 10: disaggregation of random hull weights yields per-device
// feasible schedules that sum to the chosen point, and the point's weights
// can be recovered again from the hull.
Outcome criterion_disaggregation_round_trip() {
  flexhull::Rng rng(1010);
  int pairs = 0;
  int violations = 0;
  std::string first;
  for (int f = 0; f < 100; ++f) {
    const int n = 1 + static_cast<int>(rng.index(4));
    const int d = 1 + static_cast<int>(rng.index(6));
    std::vector<flexhull::StorageSpec> fleet;
    flexhull::VertexMatrix vm;
    if (f % 4 == 3) {
      const auto spec = testutil::random_assumption_battery(rng, d);
      fleet.assign(static_cast<std::size_t>(n), spec);
      vm = flexhull::aggregate_identical(spec, static_cast<std::size_t>(n),
                                         1LL << d, static_cast<std::uint64_t>(f),
                                         true);
    } else {
      fleet = testutil::random_assumption_fleet(rng, n, d);
      vm = flexhull::aggregate(fleet, 1LL << d, static_cast<std::uint64_t>(f),
                               true);
    }
    for (int k = 0; k < 5; ++k) {
      ++pairs;
      std::string why;
      try {
        const auto w = testutil::random_weights(rng, vm);
        const auto res = flexhull::disaggregate(w, vm);
        const Eigen::VectorXd expected = vm.columns.leftCols(vm.g()) * w.alpha;
        for (Eigen::Index i = 0; i < res.schedules.cols() && why.empty(); ++i) {
          const Eigen::VectorXd xi = res.schedules.col(i);
          if (!flexhull::contains(
                  flexhull::battery_polytope(fleet[static_cast<std::size_t>(i)]),
                  xi, 1e-7)) {
            why = "schedule infeasible";
          }
        }
        if (why.empty() &&
            (res.schedules.rowwise().sum() - expected).lpNorm<Eigen::Infinity>() >
                1e-6) {
          why = "schedules do not sum to V*alpha";
        }
        if (why.empty()) {
          const auto recovered = flexhull::weights_for_point(res.aggregate, vm);
          Eigen::VectorXd rebuilt = vm.columns.leftCols(vm.g()) * recovered.alpha;
          if ((rebuilt - res.aggregate).lpNorm<Eigen::Infinity>() > 1e-6) {
            why = "recovered weights miss the point";
          }
        }
      } catch (const std::exception& e) {
        why = e.what();
      }
      if (!why.empty()) {
        ++violations;
        if (first.empty()) {
          first = "; first at fleet " + std::to_string(f) + " (" + why + ")";
        }
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(pairs) + " fleet/weight pairs, " +
               std::to_string(violations) + " failures" + first;
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 11: two benchmark runs from one config file produce the same
// bytes. Timing capture is disabled in the config since elapsed times are
// the one intentionally nondeterministic output.
Outcome criterion_cli_determinism(const std::string& cli) {
  Outcome out;
  if (cli.empty()) {
    out.detail = "needs --cli PATH to the benchmark tool";
    return out;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flexhull_acceptance_c11";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "bench.cfg";
  const fs::path csv_path = dir / "out.csv";
  const fs::path json_path = dir / "out.json";
  const fs::path log_path = dir / "run.log";

  std::ofstream cfg(cfg_path);
  cfg << "tuples = 2x4, 3x6\n"
      << "g = d^2\n"
      << "repetitions = 2\n"
      << "seed = 11\n"
      << "record_timings = false\n"
      << "out_csv = " << csv_path.string() << "\n"
      << "out_json = " << json_path.string() << "\n";
  cfg.close();

  const std::string cmd = "\"" + cli + "\" bench run --config \"" +
                          cfg_path.string() + "\" >\"" + log_path.string() +
                          "\" 2>&1";
  std::string csv_first, json_first;
  for (int run = 0; run < 2; ++run) {
    if (std::system(cmd.c_str()) != 0) {
      out.detail = "run " + std::to_string(run + 1) + " failed: " + slurp(log_path);
      return out;
    }
    if (run == 0) {
      csv_first = slurp(csv_path);
      json_first = slurp(json_path);
      fs::remove(csv_path);
      fs::remove(json_path);
    }
  }
  const std::string csv_second = slurp(csv_path);
  const std::string json_second = slurp(json_path);
  if (csv_first.empty()) {
    out.detail = "first run produced no CSV";
  } else if (csv_first != csv_second) {
    out.detail = "CSV outputs differ between runs";
  } else if (json_first != json_second) {
    out.detail = "JSON outputs differ between runs";
  } else {
    out.pass = true;
    const auto lines = std::count(csv_first.begin(), csv_first.end(), '\n');
    out.detail = "two runs, " + std::to_string(lines) +
                 " CSV lines byte-identical, JSON byte-identical";
  }
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--cli PATH]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "aggregate columns are vertices of the exact Minkowski sum",
       criterion_columns_are_exact_vertices},
      {2, "columns match their sign patterns and are pairwise distinct",
       criterion_sign_patterns_and_distinctness},
      {3, "corrected actions are feasible vertices of the target set",
       criterion_corrected_actions_are_vertices},
      {4, "closed-form battery extremization matches the generic scan",
       criterion_fast_path_matches_generic},
      {5, "hull points decompose into per-device feasible profiles",
       criterion_hull_points_decompose},
      {6, "worked two-battery example reproduces the known optima",
       criterion_worked_example},
      {7, "benchmark UPR stays within [0, 100] up to tolerance",
       criterion_benchmark_upr_bounds},
      {8, "desk-scale aggregation finishes within the time budget",
       criterion_desk_scale_runtime},
      {9, "full-day scenario UPR medians stay within bounds",
       criterion_scenario_upr_medians},
      {10, "disaggregation round-trips and stays feasible",
       criterion_disaggregation_round_trip},
      {11, "repeated benchmark runs are byte-identical",
       [&cli] { return criterion_cli_determinism(cli); }},
  };

  bool all_pass = true;
  bool any_run = false;
  for (const auto& c : criteria) {
    if (selected != 0 && selected != c.id) continue;
    any_run = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("unexpected exception: ") + e.what();
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": "
              << c.title << " (" << o.detail << ")\n";
    all_pass = all_pass && o.pass;
  }
  if (!any_run) {
    std::cerr << "error: no criterion numbered " << selected << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
