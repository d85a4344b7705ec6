#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "flexhull/aggregation.hpp"
#include "flexhull/io.hpp"
#include "flexhull/scenario.hpp"
#include "test_util.hpp"

using flexhull::aggregate;
using flexhull::aggregate_identical;
using flexhull::generate_scenario;
using flexhull::HullWeights;
using flexhull::load_demand_csv;
using flexhull::load_prices_csv;
using flexhull::load_scenario;
using flexhull::load_vertex_matrix;
using flexhull::load_weights;
using flexhull::make_objective;
using flexhull::ObjectiveKind;
using flexhull::save_scenario;
using flexhull::save_vertex_matrix;
using flexhull::save_weights;
using flexhull::Scenario;
using flexhull::schedules_to_csv;
using flexhull::StorageSpec;
using flexhull::VertexMatrix;

namespace {

std::string temp_path(const std::string& name) {
  return testing::TempDir() + "flexhull_" + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  ASSERT_TRUE(out.is_open()) << path;
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_error_containing(const std::function<void()>& fn,
                             const std::string& needle) {
  try {
    fn();
    FAIL() << "expected an error mentioning '" << needle << "'";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << "actual message: " << e.what();
  }
}

void expect_specs_equal(const StorageSpec& a, const StorageSpec& b) {
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.dt, b.dt);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.x_min, b.x_min);
  EXPECT_EQ(a.x_max, b.x_max);
  EXPECT_EQ(a.s_min, b.s_min);
  EXPECT_EQ(a.s_max, b.s_max);
  EXPECT_EQ(a.s0, b.s0);
  EXPECT_EQ(a.s_f, b.s_f);
}

}  // namespace

TEST(GenerateScenario, DeterministicForAFixedSeed) {
  const Scenario a = generate_scenario(5, 8, 42);
  const Scenario b = generate_scenario(5, 8, 42);
  ASSERT_EQ(a.n(), 5u);
  ASSERT_EQ(a.d(), 8);
  for (std::size_t i = 0; i < a.n(); ++i) expect_specs_equal(a.specs[i], b.specs[i]);
  EXPECT_TRUE((a.demand.array() == b.demand.array()).all());
  EXPECT_EQ(a.prices, b.prices);

  const Scenario c = generate_scenario(5, 8, 43);
  EXPECT_FALSE((a.demand.array() == c.demand.array()).all());
}

TEST(GenerateScenario, DevicesFollowTheBenchmarkDistribution) {
  const Scenario sc = generate_scenario(30, 12, 3, "fleet");
  EXPECT_EQ(sc.label, "fleet");
  EXPECT_EQ(sc.seed, 3u);
  for (const StorageSpec& s : sc.specs) {
    EXPECT_EQ(s.alpha, 1.0);
    EXPECT_EQ(s.dt, 0.25);
    EXPECT_EQ(s.s_min, 0.0);
    EXPECT_GE(s.s_max, 10.5);
    EXPECT_LE(s.s_max, 13.5);
    EXPECT_GE(s.s0, 0.0);
    EXPECT_LE(s.s0, 10.5);
    EXPECT_GE(s.x_max, 4.0);
    EXPECT_LE(s.x_max, 6.0);
    EXPECT_GE(s.x_min, -6.0);
    EXPECT_LE(s.x_min, -4.0);
    EXPECT_EQ(s.s_f, 0.5 * s.s0);
  }
  ASSERT_EQ(sc.demand.rows(), 12);
  ASSERT_EQ(sc.demand.cols(), 30);
  EXPECT_GE(sc.demand.minCoeff(), 0.0);
  ASSERT_EQ(sc.prices.size(), 12);
  EXPECT_GE(sc.prices.minCoeff(), 0.0);
  EXPECT_THROW(generate_scenario(0, 4, 0), std::invalid_argument);
  EXPECT_THROW(generate_scenario(4, 0, 0), std::invalid_argument);
}

TEST(GenerateScenario, DemandAndPricesPeakInTheEvening) {
  // On a 24-period day, index 18 sits at 18:30 (inside the evening bump) and
  // index 2 at 02:30 (flat night); the curve shapes guarantee a strict gap
  // for every draw.
  const Scenario sc = generate_scenario(20, 24, 11);
  for (Eigen::Index i = 0; i < sc.demand.cols(); ++i) {
    EXPECT_GT(sc.demand(18, i), sc.demand(2, i)) << "household " << i;
  }
  EXPECT_GT(sc.prices(18), sc.prices(2));
}

TEST(MakeObjective, SumsHouseholdDemand) {
  const Scenario sc = generate_scenario(7, 6, 5);
  const auto obj = make_objective(sc, ObjectiveKind::Peak);
  EXPECT_EQ(obj.kind, ObjectiveKind::Peak);
  EXPECT_EQ(obj.dt, 0.25);
  ASSERT_EQ(obj.demand_sum.size(), 6);
  const Eigen::VectorXd expect = sc.demand.rowwise().sum();
  EXPECT_EQ(obj.demand_sum, expect);
  EXPECT_EQ(obj.prices, sc.prices);
}

TEST(LoadDemandCsv, ParsesAWellFormedTable) {
  const std::string path = temp_path("demand_ok.csv");
  write_file(path, "t,q_1,q_2\n0,1.5,2.5\n1,0.25,0.125\n");
  const Eigen::MatrixXd q = load_demand_csv(path, 2);
  ASSERT_EQ(q.rows(), 2);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_EQ(q(0, 0), 1.5);
  EXPECT_EQ(q(0, 1), 2.5);
  EXPECT_EQ(q(1, 0), 0.25);
  EXPECT_EQ(q(1, 1), 0.125);
}

TEST(LoadDemandCsv, ToleratesQuotesCrlfAndBlankLines) {
  const std::string path = temp_path("demand_quoted.csv");
  write_file(path, "t,\"q_1\"\r\n\n\"0\",\"1.5\"\r\n\n");
  const Eigen::MatrixXd q = load_demand_csv(path, 1);
  ASSERT_EQ(q.rows(), 1);
  ASSERT_EQ(q.cols(), 1);
  EXPECT_EQ(q(0, 0), 1.5);
}

TEST(LoadDemandCsv, NamesEveryStructuralProblem) {
  const std::string path = temp_path("demand_bad.csv");

  expect_error_containing([&] { load_demand_csv(temp_path("absent.csv"), 2); },
                          "cannot open");

  write_file(path, "time,q_1\n0,1\n1,2\n");
  expect_error_containing([&] { load_demand_csv(path, 2); }, "must start with 't'");

  write_file(path, "t\n0\n1\n");
  expect_error_containing([&] { load_demand_csv(path, 2); }, "no q_* columns");

  write_file(path, "t,q_1\n0,1\n1,2\n");
  expect_error_containing([&] { load_demand_csv(path, 3); },
                          "expected 3 data rows, found 2");

  write_file(path, "t,q_1,q_2\n0,1\n");
  expect_error_containing([&] { load_demand_csv(path, 1); },
                          "expected 3 fields, found 2");

  write_file(path, "t,q_1\n0,oops\n");
  expect_error_containing([&] { load_demand_csv(path, 1); }, "line 2 column 2");

  write_file(path, "t,q_1\n0,1.5abc\n");
  expect_error_containing([&] { load_demand_csv(path, 1); }, "trailing text");

  write_file(path, "t,q_1\n0,\n");
  expect_error_containing([&] { load_demand_csv(path, 1); }, "empty field");

  write_file(path, "t,q_1\n0,nan\n");
  expect_error_containing([&] { load_demand_csv(path, 1); }, "non-finite");
}

TEST(LoadPricesCsv, ParsesAndValidates) {
  const std::string path = temp_path("prices.csv");
  write_file(path, "t,price\n0,0.2\n1,0.3\n");
  const Eigen::VectorXd p = load_prices_csv(path, 2);
  ASSERT_EQ(p.size(), 2);
  EXPECT_EQ(p(0), 0.2);
  EXPECT_EQ(p(1), 0.3);

  write_file(path, "t,cost\n0,0.2\n");
  expect_error_containing([&] { load_prices_csv(path, 1); }, "'t,price'");

  write_file(path, "t,price\n0,0.2\n");
  expect_error_containing([&] { load_prices_csv(path, 4); },
                          "expected 4 data rows, found 1");

  write_file(path, "t,price\n0,0.2,9\n");
  expect_error_containing([&] { load_prices_csv(path, 1); },
                          "expected 2 fields, found 3");
}

TEST(ScenarioJson, RoundTripsExactly) {
  const Scenario sc = generate_scenario(4, 6, 10'000'000'017ULL, "roundtrip");
  const std::string path = temp_path("scenario.json");
  save_scenario(sc, path);
  const Scenario back = load_scenario(path);

  EXPECT_EQ(back.label, "roundtrip");
  EXPECT_EQ(back.seed, 10'000'000'017ULL);
  ASSERT_EQ(back.n(), sc.n());
  ASSERT_EQ(back.d(), sc.d());
  for (std::size_t i = 0; i < sc.n(); ++i) expect_specs_equal(sc.specs[i], back.specs[i]);
  EXPECT_TRUE((sc.demand.array() == back.demand.array()).all());
  EXPECT_EQ(sc.prices, back.prices);

  // Serialization is byte-stable: saving the reloaded scenario reproduces
  // the file.
  const std::string first = slurp(path);
  save_scenario(back, path);
  EXPECT_EQ(first, slurp(path));
}

TEST(ScenarioJson, RejectsInconsistentFiles) {
  const Scenario sc = generate_scenario(2, 3, 1);
  flexhull::json j = flexhull::scenario_to_json(sc);
  j.erase("prices");
  expect_error_containing([&] { flexhull::scenario_from_json(j); },
                          "missing key 'prices'");

  j = flexhull::scenario_to_json(sc);
  j["specs"] = flexhull::json::array();
  expect_error_containing([&] { flexhull::scenario_from_json(j); }, "non-empty");

  j = flexhull::scenario_to_json(sc);
  j["d"] = 4;  // demand rows no longer agree with d
  expect_error_containing([&] { flexhull::scenario_from_json(j); },
                          "expected d=4");
}

TEST(VertexMatrixJson, RoundTripsWithPerDeviceMatrices) {
  const VertexMatrix vm = aggregate(testutil::example_fleet2(), 4, 0, true);
  const std::string path = temp_path("vm.json");
  save_vertex_matrix(vm, path);
  const VertexMatrix back = load_vertex_matrix(path);

  EXPECT_TRUE((vm.columns.array() == back.columns.array()).all());
  EXPECT_EQ(vm.sign_vectors, back.sign_vectors);
  EXPECT_EQ(vm.has_zero_column, back.has_zero_column);
  EXPECT_EQ(vm.n_devices, back.n_devices);
  ASSERT_EQ(back.per_device.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE((vm.per_device[i].array() == back.per_device[i].array()).all());
  }
  EXPECT_EQ(back.shared_multiplicity, 0u);
}

TEST(VertexMatrixJson, RoundTripsTheSharedFastPath) {
  const VertexMatrix vm =
      aggregate_identical(testutil::example_battery(), 7, 4, 0, true);
  const std::string path = temp_path("vm_shared.json");
  save_vertex_matrix(vm, path);
  const VertexMatrix back = load_vertex_matrix(path);
  EXPECT_EQ(back.shared_multiplicity, 7u);
  EXPECT_TRUE((vm.shared_per_device.array() == back.shared_per_device.array()).all());
  EXPECT_TRUE(back.per_device.empty());
  EXPECT_TRUE(back.has_per_device());
}

TEST(VertexMatrixJson, RejectsCorruptedFiles) {
  const VertexMatrix vm = aggregate(testutil::example_fleet2(), 4, 0);
  flexhull::json j = flexhull::vertex_matrix_to_json(vm);
  j["sign_vectors"][0][1] = 0;
  expect_error_containing([&] { flexhull::vertex_matrix_from_json(j); },
                          "+1 or -1");

  j = flexhull::vertex_matrix_to_json(vm);
  j["sign_vectors"].erase(3);
  expect_error_containing([&] { flexhull::vertex_matrix_from_json(j); },
                          "sign vectors");

  j = flexhull::vertex_matrix_to_json(vm);
  j["columns"][1].erase(1);  // ragged column
  expect_error_containing([&] { flexhull::vertex_matrix_from_json(j); }, "ragged");
}

TEST(WeightsJson, RoundTripsAndValidates) {
  HullWeights w;
  w.alpha.resize(3);
  w.alpha << 0.25, 0.5, 0.125;
  w.zero_weight = 0.125;
  const std::string path = temp_path("weights.json");
  save_weights(w, path);
  const HullWeights back = load_weights(path);
  EXPECT_EQ(back.alpha, w.alpha);
  EXPECT_EQ(back.zero_weight, 0.125);

  flexhull::json j = flexhull::weights_to_json(w);
  j.erase("alpha");
  expect_error_containing([&] { flexhull::weights_from_json(j); },
                          "missing key 'alpha'");
}

TEST(SchedulesCsv, WritesOneColumnPerDevice) {
  Eigen::MatrixXd schedules(2, 3);
  schedules << 1, 2, 0.5,
               3, 4, -0.25;
  EXPECT_EQ(schedules_to_csv(schedules),
            "device_0,device_1,device_2\n1,2,0.5\n3,4,-0.25\n");
}
