#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "magpat/energy.hpp"
#include "magpat/field.hpp"
#include "magpat/geometry.hpp"
#include "magpat/minimize.hpp"
#include "magpat/params.hpp"

namespace magpat {

struct Provenance {
  std::uint64_t seed = 0;
  double h = 0.0;
  int threads = 1;
  std::string version;
};

/// One checked inequality: measured left-hand side, bound, margin, verdict.
struct CheckRecord {
  enum class Status { pass, fail, report_only };

  std::string claim;      // stable claim identifier
  std::string statement;  // human-readable inequality
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  Status status = Status::pass;
  std::string snapshot;  // written for failing records when a field exists
};

CheckRecord make_check(const std::string& claim, const std::string& statement,
                       double lhs, double rhs, double tol = 0.0);
CheckRecord make_report(const std::string& claim, const std::string& statement,
                        double lhs, double rhs = 0.0);

struct ExperimentResult {
  std::string id;
  nlohmann::json config;
  std::vector<CheckRecord> records;
  std::vector<std::string> table_columns;
  std::vector<std::vector<double>> table;
  Provenance provenance;
};

bool all_checks_pass(const ExperimentResult& r);
std::string table_csv(const ExperimentResult& r);
/// Writes results.json and table.csv into out_dir (created if missing).
void write_results(const ExperimentResult& r, const std::string& out_dir);

struct SolverSettings {
  int max_iterations = 400;
  double grad_tol = 1e-6;
  double initial_step = 0.0;
  double backtrack = 0.5;
  int max_backtracks = 40;
  std::vector<std::string> starts = {"uniform_up", "uniform_down", "random_unit"};
  std::uint64_t seed = 1;

  MinimizeConfig minimize_config() const;
};

struct ExperimentConfig {
  Shape shape = Shape::disk({0.0, 0.0}, 1.0);
  double epsilon = 1e-2;
  double Q = 2.0;
  int grid_n = 48;
  double epsilon0 = 1e-2;  // guard below which the bound checkers assert
  SolverSettings solver;
  std::vector<double> epsilon_list;
  std::vector<double> diameter_list;
  std::string out_dir = ".";
};

ExperimentConfig load_config(const std::string& path);
nlohmann::json config_json(const ExperimentConfig& cfg);
nlohmann::json shape_json(const Shape& shape);
Shape shape_from_json(const nlohmann::json& j);

/// Mask with grid_n cells across the longest bounding-box extent.
DomainMask build_mask(const Shape& shape, int grid_n);

/// Initial fields for the multi-start protocol. Kinds: uniform_up,
/// uniform_down, random_unit, bubble, from_snapshot:<path>.
Magnetization2D build_start(const DomainMask& mask, const std::string& kind,
                            std::uint64_t seed, double epsilon);

struct StartResult {
  std::string name;
  MinimizeResult run;
  EnergyBreakdown energy;
};

/// Runs every configured start and returns the runs; the caller picks the
/// best reduced energy as the ground-state estimate (each run is only an
/// upper bound for the infimum).
std::vector<StartResult> multi_start(const DomainMask& mask,
                                     const ParameterSet& p,
                                     const SolverSettings& s);

/// Random low-order trigonometric polynomial on the mask, clipped to
/// [-1, 1]; the standard smooth test field.
std::vector<double> random_smooth_scalar(const DomainMask& mask,
                                         std::uint64_t seed, int max_mode = 3);

/// Pair-sum interpolation bound: finite-difference double sum of f against
/// the gradient/BV/far-field right-hand side at radii (r, R).
CheckRecord check_interpolation(const DomainMask& mask,
                                const std::vector<double>& f, double r,
                                double R, double tol_factor = 1e-3);

/// 200-field interpolation suite plus the wall-profile sharpness probe.
ExperimentResult interpolation_suite(const ExperimentConfig& cfg,
                                     int n_fields = 200);

/// BV-bound records for one field: log-weighted bound, the two-sided
/// sandwich data when the energy is below -alpha |Omega|, the gap bound and
/// the L/N window data.
std::vector<CheckRecord> check_bv_bounds(const Magnetization2D& m,
                                         const ParameterSet& p,
                                         double alpha = 0.1);

/// Phase scan over (epsilon, diameter) disks: best-of-starts energy,
/// uniform/patterned classification against the analytic threshold column.
ExperimentResult onset_scan(const ExperimentConfig& cfg);

/// Minimizer sweep over decreasing epsilon from one seed: in-plane mass
/// decay, successive L1 distances, BV boundedness, concentration of m3.
ExperimentResult compactness_diagnostic(const ExperimentConfig& cfg);

/// Best energy and BV per unit area across epsilon on a fixed large shape,
/// with the physical-ratio columns.
ExperimentResult scaling_sweep(const ExperimentConfig& cfg);

/// Kernel identity checks runnable from the CLI.
ExperimentResult kernel_checks();

}  // namespace magpat
