// Command line front end for the flexhull library: scenario generation,
// fleet aggregation, disaggregation, and the benchmark/robustness sweeps.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "flexhull/flexhull.hpp"

namespace {

long long g_from_option(const std::string& g_option, int d) {
  flexhull::BenchConfig probe;
  if (g_option == "d^2") {
    probe.g_rule = flexhull::GRule::DSquared;
  } else if (g_option == "2^d") {
    probe.g_rule = flexhull::GRule::PowD;
  } else {
    probe.g_rule = flexhull::GRule::Fixed;
    probe.g_fixed = std::stoll(g_option);
    if (probe.g_fixed < 1) {
      throw CLI::ValidationError("--g", "must be a positive integer, 'd^2' or '2^d'");
    }
  }
  return probe.g_for(d);
}

void cmd_bench_run(const std::string& config_path) {
  const flexhull::BenchConfig cfg = flexhull::load_bench_config(config_path);
  const std::vector<flexhull::BenchRow> rows = flexhull::run_benchmark(cfg);
  flexhull::detail::write_text_file(cfg.out_csv, flexhull::bench_rows_to_csv(rows));
  flexhull::detail::write_text_file(cfg.out_json,
                                    flexhull::bench_rows_to_json(rows).dump(2) + "\n");
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) ++failed;
  }
  std::cout << "wrote " << rows.size() << " rows to " << cfg.out_csv << " and "
            << cfg.out_json << "\n";
  if (failed > 0) {
    std::cout << failed << " row(s) carry an error; see the error column\n";
  }
}

void cmd_bench_robustness(const std::string& config_path) {
  const flexhull::BenchConfig cfg = flexhull::load_bench_config(config_path);
  const std::vector<flexhull::RobustnessRow> rows = flexhull::run_robustness(cfg);
  flexhull::detail::write_text_file(cfg.out_csv,
                                    flexhull::robustness_rows_to_csv(rows));
  flexhull::detail::write_text_file(
      cfg.out_json, flexhull::robustness_rows_to_json(rows).dump(2) + "\n");
  std::cout << "wrote " << rows.size() << " rows to " << cfg.out_csv << " and "
            << cfg.out_json << "\n";
}

void cmd_aggregate(const std::string& spec_path, const std::string& out_path,
                   const std::string& g_option, std::int64_t seed_option,
                   bool seed_given, bool retain_per_device) {
  const flexhull::Scenario sc = flexhull::load_scenario(spec_path);
  const long long g = g_from_option(g_option, sc.d());
  const std::uint64_t seed =
      seed_given ? static_cast<std::uint64_t>(seed_option) : sc.seed;
  flexhull::AggregateStats stats;
  const flexhull::VertexMatrix vm =
      flexhull::aggregate(sc.specs, g, seed, retain_per_device, &stats);
  flexhull::save_vertex_matrix(vm, out_path);
  std::cout << "aggregated " << sc.n() << " device(s) over horizon " << sc.d()
            << ": " << vm.g() << " hull vertices"
            << (vm.has_zero_column ? " plus the zero column" : "") << ", "
            << stats.corrections_applied << " correction(s) applied, written to "
            << out_path << "\n";
}

void cmd_disaggregate(const std::string& vertices_path, const std::string& weights_path,
                      const std::string& out_path) {
  const flexhull::VertexMatrix vm = flexhull::load_vertex_matrix(vertices_path);
  const flexhull::HullWeights weights = flexhull::load_weights(weights_path);
  const flexhull::DisaggregationResult result = flexhull::disaggregate(weights, vm);
  flexhull::save_schedules_csv(result.schedules, out_path);
  std::cout << "wrote " << result.schedules.cols() << " device schedule(s) over "
            << result.schedules.rows() << " period(s) to " << out_path << "\n";
}

void cmd_scenario_gen(int n, int d, std::uint64_t seed, const std::string& out_path,
                      const std::string& label) {
  const flexhull::Scenario sc = flexhull::generate_scenario(n, d, seed, label);
  flexhull::save_scenario(sc, out_path);
  std::cout << "wrote scenario with " << n << " device(s), horizon " << d
            << ", seed " << seed << " to " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertex-based inner approximation of aggregate storage flexibility"};
  app.require_subcommand(1);

  // bench run / bench robustness
  auto* bench = app.add_subcommand("bench", "Benchmark sweeps driven by a config file");
  bench->require_subcommand(1);
  std::string run_config;
  auto* bench_run = bench->add_subcommand("run", "Run the benchmark sweep");
  bench_run->add_option("--config", run_config, "key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_run->callback([&] { cmd_bench_run(run_config); });

  std::string robustness_config;
  auto* bench_rob =
      bench->add_subcommand("robustness", "Measure UPR spread across vertex redraws");
  bench_rob->add_option("--config", robustness_config, "key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_rob->callback([&] { cmd_bench_robustness(robustness_config); });

  // aggregate
  std::string agg_spec, agg_out, agg_g = "d^2";
  std::int64_t agg_seed = 0;
  bool agg_retain = false;
  auto* agg = app.add_subcommand("aggregate",
                                 "Build the aggregate vertex matrix for a fleet");
  agg->add_option("--spec", agg_spec, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  agg->add_option("--out", agg_out, "output vertex matrix JSON")->required();
  agg->add_option("--g", agg_g, "vertex budget: integer, 'd^2' or '2^d' (default d^2)");
  auto* agg_seed_opt =
      agg->add_option("--seed", agg_seed, "sampling seed (default: scenario seed)");
  agg->add_flag("--retain-per-device", agg_retain,
                "store per-device vertex matrices for later disaggregation");
  agg->callback([&] {
    cmd_aggregate(agg_spec, agg_out, agg_g, agg_seed, agg_seed_opt->count() > 0,
                  agg_retain);
  });

  // disaggregate
  std::string dis_vertices, dis_weights, dis_out;
  auto* dis = app.add_subcommand(
      "disaggregate", "Recover per-device schedules from hull weights");
  dis->add_option("--vertices", dis_vertices, "vertex matrix JSON (with per-device data)")
      ->required()
      ->check(CLI::ExistingFile);
  dis->add_option("--weights", dis_weights, "hull weights JSON")
      ->required()
      ->check(CLI::ExistingFile);
  dis->add_option("--out", dis_out, "output schedules CSV")->required();
  dis->callback([&] { cmd_disaggregate(dis_vertices, dis_weights, dis_out); });

  // scenario gen
  auto* scenario = app.add_subcommand("scenario", "Scenario utilities");
  scenario->require_subcommand(1);
  int gen_n = 0, gen_d = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_label;
  auto* gen = scenario->add_subcommand("gen", "Generate a random benchmark fleet");
  gen->add_option("--n", gen_n, "number of devices")->required()->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_d, "number of periods")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--out", gen_out, "output scenario JSON")->required();
  gen->add_option("--label", gen_label, "free-form label stored in the file");
  gen->callback([&] { cmd_scenario_gen(gen_n, gen_d, gen_seed, gen_out, gen_label); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
