#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "magpat/experiments.hpp"
#include "magpat/params.hpp"

using namespace magpat;

namespace {
std::string tmp_dir(const std::string& leaf) {
  const auto d = std::filesystem::temp_directory_path() / "magpat_exp" / leaf;
  std::filesystem::create_directories(d);
  return d.string();
}
}  // namespace

TEST_CASE("check records carry consistently signed margins") {
  const auto pass = make_check("c", "s", 1.0, 2.0);
  CHECK(pass.status == CheckRecord::Status::pass);
  CHECK(pass.margin == doctest::Approx(1.0));
  const auto fail = make_check("c", "s", 3.0, 2.0);
  CHECK(fail.status == CheckRecord::Status::fail);
  CHECK(fail.margin < 0.0);
  const auto rep = make_report("c", "s", 42.0);
  CHECK(rep.status == CheckRecord::Status::report_only);
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig cfg;
  cfg.shape = Shape::convex_polygon({{0, 0}, {2, 0}, {1, 2}});
  cfg.epsilon = 1e-3;
  cfg.Q = 3.0;
  cfg.grid_n = 40;
  cfg.solver.seed = 77;
  cfg.solver.starts = {"uniform_up", "bubble"};
  cfg.epsilon_list = {1e-2, 1e-3};
  cfg.diameter_list = {0.2, 100.0};

  const std::string path = tmp_dir("cfg") + "/config.json";
  std::ofstream(path) << config_json(cfg).dump(2);
  const ExperimentConfig back = load_config(path);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.Q == cfg.Q);
  CHECK(back.grid_n == cfg.grid_n);
  CHECK(back.solver.seed == cfg.solver.seed);
  CHECK(back.solver.starts == cfg.solver.starts);
  CHECK(back.epsilon_list == cfg.epsilon_list);
  CHECK(back.diameter_list == cfg.diameter_list);
  CHECK(back.shape.kind() == ShapeKind::convex_polygon);
  CHECK(back.shape.area() == doctest::Approx(cfg.shape.area()));
}

TEST_CASE("random smooth scalars are clipped, smooth and reproducible") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  const auto f = random_smooth_scalar(mask, 5);
  const auto g = random_smooth_scalar(mask, 5);
  const auto h = random_smooth_scalar(mask, 6);
  CHECK(f == g);
  CHECK(f != h);
  for (double v : f) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("interpolation bound: constant fields and guards") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 24);
  std::vector<double> f(mask.cell_count(), 0.7);
  const auto rec = check_interpolation(mask, f, 0.01, 0.1);
  CHECK(rec.lhs == 0.0);
  CHECK(rec.rhs == 0.0);
  CHECK(rec.status == CheckRecord::Status::pass);
  CHECK_THROWS_AS(check_interpolation(mask, f, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(check_interpolation(mask, f, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("interpolation bound holds on random smooth fields") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 32);
  const std::pair<double, double> radii[] = {{0.01, 0.1}, {0.01, 1.0}, {0.1, 10.0}};
  for (int i = 0; i < 25; ++i) {
    const auto f = random_smooth_scalar(mask, 2000 + i);
    for (const auto& [r, R] : radii) {
      const auto rec = check_interpolation(mask, f, r, R);
      CHECK(rec.status == CheckRecord::Status::pass);
    }
  }
}

TEST_CASE("bv bound records for the uniform state") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  const ParameterSet p = derive(1e-2, 2.0);
  const auto recs = check_bv_bounds(Magnetization2D::uniform(mask, {0, 0, 1}), p);
  REQUIRE(!recs.empty());
  CHECK(recs.front().claim == "bv.energy_vs_interface");
  CHECK(recs.front().lhs == 0.0);
  CHECK(recs.front().status == CheckRecord::Status::pass);
}

TEST_CASE("build_start kinds") {
  DomainMask mask = build_mask(Shape::disk({0, 0}, 1.0), 16);
  CHECK(build_start(mask, "uniform_up", 1, 1e-2).m3(0) == 1.0);
  CHECK(build_start(mask, "uniform_down", 1, 1e-2).m3(0) == -1.0);
  CHECK_NOTHROW(build_start(mask, "random_unit", 1, 1e-2).validate());
  CHECK_NOTHROW(build_start(mask, "bubble", 1, 1e-2).validate());
  CHECK_THROWS_AS(build_start(mask, "nonsense", 1, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(build_start(mask, "from_snapshot:/no/such/file", 1, 1e-2),
                  std::runtime_error);
}

TEST_CASE("kernel checker suite passes") {
  const auto res = kernel_checks();
  for (const auto& r : res.records) {
    INFO(r.claim, ": lhs=", r.lhs, " rhs=", r.rhs);
    CHECK(r.status != CheckRecord::Status::fail);
  }
  CHECK(all_checks_pass(res));
  CHECK(res.table.size() == 50);
}

TEST_CASE("onset scan classifies a small below-threshold disk as uniform") {
  ExperimentConfig cfg;
  cfg.Q = 2.0;
  cfg.grid_n = 32;
  cfg.epsilon_list = {1e-2};
  cfg.diameter_list = {0.5 * onset_threshold(1e-2)};
  cfg.solver.max_iterations = 120;
  cfg.solver.starts = {"uniform_up", "random_unit"};
  cfg.out_dir = tmp_dir("onset");
  const auto res = onset_scan(cfg);
  CHECK(all_checks_pass(res));
  REQUIRE(res.table.size() == 1);
  CHECK(res.table[0][6] == 0.0);  // not patterned
  CHECK(res.table[0][2] == doctest::Approx(onset_threshold(1e-2)));
}

TEST_CASE("onset scan classifies a large disk as patterned") {
  ExperimentConfig cfg;
  cfg.Q = 2.0;
  cfg.grid_n = 48;
  cfg.epsilon_list = {1e-3};
  cfg.diameter_list = {100.0};
  cfg.solver.max_iterations = 150;
  cfg.solver.starts = {"random_unit", "bubble"};
  cfg.out_dir = tmp_dir("onset_large");
  const auto res = onset_scan(cfg);
  CHECK(all_checks_pass(res));
  REQUIRE(res.table.size() == 1);
  CHECK(res.table[0][6] == 1.0);  // patterned
  CHECK(res.table[0][4] < -1e-3);
  CHECK(res.table[0][5] > 1e-2);
}

TEST_CASE("compactness diagnostic runs and its checks hold") {
  ExperimentConfig cfg;
  cfg.shape = Shape::disk({0, 0}, 20.0);
  cfg.grid_n = 32;
  cfg.epsilon_list = {1e-2, 1e-3};
  cfg.solver.max_iterations = 80;
  cfg.out_dir = tmp_dir("compact");
  const auto res = compactness_diagnostic(cfg);
  CHECK(all_checks_pass(res));
  REQUIRE(res.table.size() == 2);
  // In-plane mass obeys the fitted eps |ln eps| envelope.
  CHECK(res.table[1][2] <= 1.5 * std::max(res.table[0][2], 1e-12));
}

TEST_CASE("scaling sweep keeps order-one energy and interface densities") {
  ExperimentConfig cfg;
  cfg.shape = Shape::disk({0, 0}, 20.0);
  cfg.grid_n = 48;
  cfg.epsilon_list = {1e-2, 1e-3};
  cfg.solver.max_iterations = 150;
  cfg.solver.starts = {"random_unit"};
  cfg.out_dir = tmp_dir("scaling");
  const auto res = scaling_sweep(cfg);
  CHECK(all_checks_pass(res));
  for (const auto& row : res.table) {
    CHECK(std::abs(row[1]) >= 0.01);   // |F|/|O|
    CHECK(std::abs(row[1]) <= 6.72);
    CHECK(row[3] == doctest::Approx(derive(row[0], 2.0).d_over_s));
  }
}

TEST_CASE("results are written and the CSV is byte-stable") {
  ExperimentConfig cfg;
  cfg.grid_n = 24;
  cfg.epsilon_list = {2e-2};
  cfg.diameter_list = {0.15};
  cfg.solver.max_iterations = 40;
  cfg.solver.starts = {"uniform_up", "random_unit"};
  cfg.out_dir = tmp_dir("stable");
  const auto a = onset_scan(cfg);
  const auto b = onset_scan(cfg);
  CHECK(table_csv(a) == table_csv(b));

  write_results(a, cfg.out_dir);
  CHECK(std::filesystem::exists(cfg.out_dir + "/results.json"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/table.csv"));

  std::ifstream js(cfg.out_dir + "/results.json");
  nlohmann::json parsed;
  js >> parsed;
  CHECK(parsed["id"] == "onset_scan");
  CHECK(parsed["records"].is_array());
  CHECK(parsed["table"]["columns"].size() == a.table_columns.size());
}

TEST_CASE("epsilon guard demotes bound checks to reports") {
  ExperimentConfig cfg;
  cfg.grid_n = 20;
  cfg.epsilon0 = 1e-3;  // stricter than the epsilon below
  cfg.epsilon_list = {1e-2};
  cfg.diameter_list = {0.1};
  cfg.solver.max_iterations = 20;
  cfg.solver.starts = {"uniform_up"};
  cfg.out_dir = tmp_dir("guard");
  const auto res = onset_scan(cfg);
  for (const auto& r : res.records)
    CHECK(r.status == CheckRecord::Status::report_only);
}

TEST_CASE("zz: no energy-floor violations in this binary") {
  CHECK(magpat::EnergyFloorSentinel::violations() == 0);
}
