// Command-line driver: evaluate snapshots, run minimizations and the
// experiment harness from a JSON config. Exit code is nonzero iff any
// non-report-only check fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "magpat/energy.hpp"
#include "magpat/experiments.hpp"
#include "magpat/field.hpp"
#include "magpat/minimize.hpp"
#include "magpat/params.hpp"
#include "magpat/version.hpp"

namespace {

using namespace magpat;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;  // 0 = keep config seed
  int threads = 0;         // 0 = runtime default
};

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.seed != 0) cfg.solver.seed = opts.seed;
  cfg.out_dir = opts.out_dir;
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
  return cfg;
}

int finish(const ExperimentResult& res, const std::string& out_dir) {
  write_results(res, out_dir);
  int fails = 0;
  for (const auto& r : res.records) {
    const char* mark = r.status == CheckRecord::Status::pass ? "pass"
                       : r.status == CheckRecord::Status::fail ? "FAIL"
                                                               : "info";
    std::printf("[%s] %s: lhs=%.6g rhs=%.6g margin=%.6g\n", mark,
                r.claim.c_str(), r.lhs, r.rhs, r.margin);
    if (r.status == CheckRecord::Status::fail) ++fails;
  }
  std::printf("%s: %zu records, %d failures; results in %s\n", res.id.c_str(),
              res.records.size(), fails, out_dir.c_str());
  return fails == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magpat: thin-film magnetization pattern toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON experiment config");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--threads", opts.threads, "OpenMP thread count");

  std::string snapshot_path;
  double thickness = 0.0;
  auto* energy = app.add_subcommand("energy", "evaluate a field snapshot");
  energy->add_option("--snapshot", snapshot_path, "field snapshot path")
      ->required();
  energy->add_option("--thickness", thickness,
                     "also evaluate the reduced stray energies at this film thickness");

  auto* minimize_cmd = app.add_subcommand("minimize", "run the multi-start minimizer");
  auto* onset = app.add_subcommand("onset-scan", "phase scan over (epsilon, diameter)");
  std::string check_kind = "kernels";
  auto* check = app.add_subcommand("check", "run a checker suite");
  check->add_option("--kind", check_kind, "kernels | interpolation | bv");
  auto* sweep = app.add_subcommand("sweep", "scaling sweep over epsilon");

  CLI11_PARSE(app, argc, argv);
  const ExperimentConfig cfg = resolve_config(opts);

  try {
    if (energy->parsed()) {
      Snapshot snap = load_snapshot(snapshot_path);
      const ParameterSet p = derive(snap.epsilon, snap.Q);
      const EnergyBreakdown e = film_energy(snap.field, p);
      ExperimentResult res;
      res.id = "energy";
      res.config = {{"snapshot", snapshot_path}};
      res.provenance = {cfg.solver.seed, snap.field.mask().grid_spacing(),
                        omp_get_max_threads(), kVersion};
      res.table_columns = {"L", "N", "F", "BV", "G", "E", "exterior_tail"};
      res.table.push_back({e.local, e.nonlocal, e.reduced, e.bv, e.correction,
                           e.film, e.exterior_tail});
      res.records.push_back(make_report("energy.reduced", "F = L - N", e.reduced));
      res.records.push_back(make_check(
          "energy.floor", "-F/|O| <= pi^2 e/4 + 0.01",
          -e.reduced / snap.field.mask().raster_area(),
          energy_floor_coefficient() + 0.01));
      res.records.push_back(make_check("energy.correction_nonneg",
                                       "G >= -1e-8 |O|", -e.correction,
                                       1e-8 * snap.field.mask().raster_area()));
      if (thickness > 0.0) {
        res.records.push_back(make_report(
            "energy.stray_vertical", "reduced vertical stray energy",
            stray_vertical(snap.field, thickness)));
        res.records.push_back(make_report(
            "energy.stray_tangential", "reduced tangential stray energy",
            stray_tangential(snap.field, thickness)));
      }
      return finish(res, cfg.out_dir);
    }

    if (minimize_cmd->parsed()) {
      DomainMask mask = build_mask(cfg.shape, cfg.grid_n);
      const ParameterSet p = derive(cfg.epsilon, cfg.Q);
      auto starts = multi_start(mask, p, cfg.solver);
      ExperimentResult res;
      res.id = "minimize";
      res.config = config_json(cfg);
      res.provenance = {cfg.solver.seed, mask.grid_spacing(),
                        omp_get_max_threads(), kVersion};
      res.table_columns = {"start", "F", "L", "N", "BV", "iterations"};
      std::filesystem::create_directories(cfg.out_dir);
      const double area = mask.raster_area();
      for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto& s = starts[i];
        res.table.push_back({static_cast<double>(i), s.energy.reduced,
                             s.energy.local, s.energy.nonlocal, s.energy.bv,
                             static_cast<double>(s.run.trace.size())});
        const std::string base = cfg.out_dir + "/" + s.name;
        std::ofstream tr(base + "_trace.csv", std::ios::trunc);
        tr << trace_csv(s.run.trace);
        save_snapshot(base + ".field", s.run.field, cfg.epsilon, cfg.Q);
        res.records.push_back(make_check(
            "minimize.floor (" + s.name + ")", "-F/|O| <= pi^2 e/4 + 0.01",
            -s.energy.reduced / area, energy_floor_coefficient() + 0.01));
        res.records.push_back(make_report("minimize.final (" + s.name + ")",
                                          "final reduced energy",
                                          s.energy.reduced));
      }
      return finish(res, cfg.out_dir);
    }

    if (onset->parsed()) return finish(onset_scan(cfg), cfg.out_dir);

    if (check->parsed()) {
      if (check_kind == "kernels") return finish(kernel_checks(), cfg.out_dir);
      if (check_kind == "interpolation")
        return finish(interpolation_suite(cfg), cfg.out_dir);
      if (check_kind == "bv") {
        DomainMask mask = build_mask(cfg.shape, cfg.grid_n);
        const ParameterSet p = derive(cfg.epsilon, cfg.Q);
        auto starts = multi_start(mask, p, cfg.solver);
        ExperimentResult res;
        res.id = "bv_checks";
        res.config = config_json(cfg);
        res.provenance = {cfg.solver.seed, mask.grid_spacing(),
                          omp_get_max_threads(), kVersion};
        for (const auto& s : starts) {
          auto recs = check_bv_bounds(s.run.field, p);
          for (auto& r : recs) {
            r.claim += " (" + s.name + ")";
            res.records.push_back(std::move(r));
          }
        }
        return finish(res, cfg.out_dir);
      }
      std::cerr << "unknown check kind: " << check_kind << "\n";
      return 2;
    }

    if (sweep->parsed()) return finish(scaling_sweep(cfg), cfg.out_dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
