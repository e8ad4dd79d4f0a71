#include "magpat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <omp.h>

#include "magpat/kernels.hpp"
#include "magpat/parallel.hpp"
#include "magpat/profiles.hpp"
#include "magpat/version.hpp"

namespace magpat {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Provenance make_provenance(std::uint64_t seed, double h) {
  return Provenance{seed, h, omp_get_max_threads(), kVersion};
}
}  // namespace

CheckRecord make_check(const std::string& claim, const std::string& statement,
                       double lhs, double rhs, double tol) {
  CheckRecord r;
  r.claim = claim;
  r.statement = statement;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.status = (lhs <= rhs + tol) ? CheckRecord::Status::pass
                                : CheckRecord::Status::fail;
  return r;
}

CheckRecord make_report(const std::string& claim, const std::string& statement,
                        double lhs, double rhs) {
  CheckRecord r;
  r.claim = claim;
  r.statement = statement;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.status = CheckRecord::Status::report_only;
  return r;
}

bool all_checks_pass(const ExperimentResult& r) {
  for (const auto& c : r.records)
    if (c.status == CheckRecord::Status::fail) return false;
  return true;
}

std::string table_csv(const ExperimentResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.table_columns.size(); ++i) {
    if (i) out += ",";
    out += r.table_columns[i];
  }
  out += "\n";
  for (const auto& row : r.table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt(row[i]);
    }
    out += "\n";
  }
  return out;
}

namespace {

nlohmann::json record_json(const CheckRecord& c) {
  const char* status = c.status == CheckRecord::Status::pass ? "pass"
                       : c.status == CheckRecord::Status::fail ? "fail"
                                                               : "report_only";
  nlohmann::json j{{"claim", c.claim},       {"statement", c.statement},
                   {"lhs", c.lhs},           {"rhs", c.rhs},
                   {"margin", c.margin},     {"status", status}};
  if (!c.snapshot.empty()) j["snapshot"] = c.snapshot;
  return j;
}

}  // namespace

void write_results(const ExperimentResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j;
  j["id"] = r.id;
  j["config"] = r.config;
  j["provenance"] = {{"seed", r.provenance.seed},
                     {"h", r.provenance.h},
                     {"threads", r.provenance.threads},
                     {"version", r.provenance.version}};
  j["records"] = nlohmann::json::array();
  for (const auto& c : r.records) j["records"].push_back(record_json(c));
  j["table"] = {{"columns", r.table_columns}, {"rows", r.table}};

  std::ofstream js(out_dir + "/results.json", std::ios::trunc);
  if (!js) throw std::runtime_error("cannot write results.json in " + out_dir);
  js << j.dump(2) << "\n";

  std::ofstream cs(out_dir + "/table.csv", std::ios::trunc);
  if (!cs) throw std::runtime_error("cannot write table.csv in " + out_dir);
  cs << table_csv(r);
}

MinimizeConfig SolverSettings::minimize_config() const {
  MinimizeConfig c;
  c.max_iterations = max_iterations;
  c.grad_tol = grad_tol;
  c.initial_step = initial_step;
  c.backtrack = backtrack;
  c.max_backtracks = max_backtracks;
  return c;
}

nlohmann::json shape_json(const Shape& shape) {
  switch (shape.kind()) {
    case ShapeKind::disk:
      return {{"kind", "disk"},
              {"radius", shape.radius()},
              {"center", {shape.center().x, shape.center().y}}};
    case ShapeKind::rectangle:
      return {{"kind", "rectangle"},
              {"lo", {shape.lo().x, shape.lo().y}},
              {"hi", {shape.hi().x, shape.hi().y}}};
    case ShapeKind::convex_polygon: {
      nlohmann::json vs = nlohmann::json::array();
      for (const Vec2& v : shape.vertices()) vs.push_back({v.x, v.y});
      return {{"kind", "polygon"}, {"vertices", vs}};
    }
  }
  throw std::logic_error("unknown shape kind");
}

Shape shape_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "disk") {
    Vec2 c{0.0, 0.0};
    if (j.contains("center"))
      c = {j["center"][0].get<double>(), j["center"][1].get<double>()};
    return Shape::disk(c, j.at("radius").get<double>());
  }
  if (kind == "rectangle") {
    return Shape::rectangle(
        {j.at("lo")[0].get<double>(), j.at("lo")[1].get<double>()},
        {j.at("hi")[0].get<double>(), j.at("hi")[1].get<double>()});
  }
  if (kind == "polygon") {
    std::vector<Vec2> vs;
    for (const auto& v : j.at("vertices"))
      vs.push_back({v[0].get<double>(), v[1].get<double>()});
    return Shape::convex_polygon(std::move(vs));
  }
  throw std::invalid_argument("unknown shape kind: " + kind);
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["shape"] = shape_json(cfg.shape);
  j["epsilon"] = cfg.epsilon;
  j["Q"] = cfg.Q;
  j["grid_n"] = cfg.grid_n;
  j["epsilon0"] = cfg.epsilon0;
  j["solver"] = {{"max_iterations", cfg.solver.max_iterations},
                 {"grad_tol", cfg.solver.grad_tol},
                 {"initial_step", cfg.solver.initial_step},
                 {"backtrack", cfg.solver.backtrack},
                 {"max_backtracks", cfg.solver.max_backtracks},
                 {"starts", cfg.solver.starts},
                 {"seed", cfg.solver.seed}};
  j["epsilon_list"] = cfg.epsilon_list;
  j["diameter_list"] = cfg.diameter_list;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  is >> j;
  ExperimentConfig cfg;
  if (j.contains("shape")) cfg.shape = shape_from_json(j["shape"]);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.Q = j.value("Q", cfg.Q);
  cfg.grid_n = j.value("grid_n", cfg.grid_n);
  cfg.epsilon0 = j.value("epsilon0", cfg.epsilon0);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
    cfg.solver.grad_tol = s.value("grad_tol", cfg.solver.grad_tol);
    cfg.solver.initial_step = s.value("initial_step", cfg.solver.initial_step);
    cfg.solver.backtrack = s.value("backtrack", cfg.solver.backtrack);
    cfg.solver.max_backtracks = s.value("max_backtracks", cfg.solver.max_backtracks);
    if (s.contains("starts"))
      cfg.solver.starts = s["starts"].get<std::vector<std::string>>();
    cfg.solver.seed = s.value("seed", cfg.solver.seed);
  }
  if (j.contains("epsilon_list"))
    cfg.epsilon_list = j["epsilon_list"].get<std::vector<double>>();
  if (j.contains("diameter_list"))
    cfg.diameter_list = j["diameter_list"].get<std::vector<double>>();
  return cfg;
}

DomainMask build_mask(const Shape& shape, int grid_n) {
  if (grid_n < 4) throw std::invalid_argument("grid_n too small");
  const Vec2 lo = shape.bbox_lo();
  const Vec2 hi = shape.bbox_hi();
  const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
  return DomainMask::build(shape, extent / grid_n);
}

Magnetization2D build_start(const DomainMask& mask, const std::string& kind,
                            std::uint64_t seed, double epsilon) {
  if (kind == "uniform_up")
    return Magnetization2D::uniform(mask, {0.0, 0.0, 1.0});
  if (kind == "uniform_down")
    return Magnetization2D::uniform(mask, {0.0, 0.0, -1.0});
  if (kind == "random_unit") return Magnetization2D::random_unit(mask, seed);
  if (kind == "bubble") {
    const double R = std::max(mask.diameter() / 8.0,
                              2.0 * std::sqrt(epsilon) + 2.0 * mask.grid_spacing());
    const auto layout = profiles::pack_bubbles(mask, R, epsilon);
    if (layout.centers.empty())
      return Magnetization2D::uniform(mask, {0.0, 0.0, 1.0});
    return profiles::multi_bubble_field(mask, layout, epsilon);
  }
  if (kind.rfind("from_snapshot:", 0) == 0) {
    const std::string path = kind.substr(std::string("from_snapshot:").size());
    Snapshot snap = load_snapshot(path);
    if (!snap.field.mask().same_raster(mask))
      throw std::invalid_argument("snapshot grid does not match the mask");
    return snap.field;
  }
  throw std::invalid_argument("unknown start kind: " + kind);
}

std::vector<StartResult> multi_start(const DomainMask& mask,
                                     const ParameterSet& p,
                                     const SolverSettings& s) {
  std::vector<StartResult> out;
  const MinimizeConfig mc = s.minimize_config();
  for (std::size_t i = 0; i < s.starts.size(); ++i) {
    const std::string& kind = s.starts[i];
    Magnetization2D m0 = build_start(mask, kind, s.seed + i, p.epsilon);
    MinimizeResult run = minimize(m0, p, mc);
    EnergyBreakdown e = reduced_energy(run.field, p);
    out.push_back({kind, std::move(run), e});
  }
  return out;
}

std::vector<double> random_smooth_scalar(const DomainMask& mask,
                                         std::uint64_t seed, int max_mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
  const Vec2 lo = mask.shape().bbox_lo();
  const Vec2 hi = mask.shape().bbox_hi();
  const double sx = hi.x - lo.x;
  const double sy = hi.y - lo.y;

  struct Mode {
    double kx, ky, amp, phase;
  };
  std::vector<Mode> modes;
  for (int kx = 0; kx <= max_mode; ++kx) {
    for (int ky = -max_mode; ky <= max_mode; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double decay = 1.0 / (1.0 + kx * kx + ky * ky);
      modes.push_back({2.0 * kPi * kx / sx, 2.0 * kPi * ky / sy,
                       gauss(rng) * decay, unif(rng)});
    }
  }
  std::vector<double> f(mask.cell_count(), 0.0);
  double peak = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec2 c = mask.cell_center(k);
    double v = 0.0;
    for (const Mode& m : modes)
      v += m.amp * std::cos(m.kx * (c.x - lo.x) + m.ky * (c.y - lo.y) + m.phase);
    f[k] = v;
    peak = std::max(peak, std::abs(v));
  }
  // Scale so clipping to [-1, 1] bites occasionally but not degenerately.
  const double target = 1.1;
  if (peak > 0.0)
    for (double& v : f) v = std::clamp(v * target / peak, -1.0, 1.0);
  return f;
}

namespace {

double scalar_pair_lhs(const DomainMask& mask, const std::vector<double>& f) {
  const std::size_t n = mask.cell_count();
  const Vec2* pos = mask.centers().data();
  const double* fv = f.data();
  const double h = mask.grid_spacing();
  const double sum = deterministic_row_sum(n, [&](std::size_t i) {
    double acc = 0.0;
    const Vec2 pi = pos[i];
    const double fi = fv[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = pos[j].x - pi.x;
      const double dy = pos[j].y - pi.y;
      const double r2 = dx * dx + dy * dy;
      const double d = fi - fv[j];
      acc += d * d / (r2 * std::sqrt(r2));
    }
    return acc;
  });
  return h * h * h * h * sum;
}

}  // namespace

CheckRecord check_interpolation(const DomainMask& mask,
                                const std::vector<double>& f, double r,
                                double R, double tol_factor) {
  if (!(r > 0.0 && r <= R)) throw std::invalid_argument("need 0 < r <= R");
  if (!mask.is_plain())
    throw std::invalid_argument("interpolation check needs a plain convex mask");
  const double h = mask.grid_spacing();
  const double area = mask.raster_area();
  const double diam = mask.diameter();

  const auto g = masked_gradient(mask, f);
  double grad2 = 0.0, grad1 = 0.0, fmax = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double gg = g[0][k] * g[0][k] + g[1][k] * g[1][k];
    grad2 += gg;
    grad1 += std::sqrt(gg);
    fmax = std::max(fmax, std::abs(f[k]));
  }
  grad2 *= h * h;
  grad1 *= h * h;

  const double lhs = scalar_pair_lhs(mask, f);
  const double alpha0 = (R < diam) ? 1.0 : 0.0;
  const double rhs = kPi * r * grad2 + 8.0 * std::log(R / r) * fmax * grad1 +
                     (4.0 * kPi * alpha0 / R) * fmax *
                         std::min(diam * grad1, 2.0 * area * fmax);
  return make_check("interp.bound",
                    "pair sum <= pi r |grad f|_2^2 + 8 ln(R/r) |f|_inf |grad f|_1 + far-field",
                    lhs, rhs, tol_factor * std::max(rhs, 1e-300));
}

ExperimentResult interpolation_suite(const ExperimentConfig& cfg, int n_fields) {
  ExperimentResult res;
  res.id = "interpolation";
  res.config = config_json(cfg);
  DomainMask mask = build_mask(cfg.shape, cfg.grid_n);
  res.provenance = make_provenance(cfg.solver.seed, mask.grid_spacing());
  res.table_columns = {"field", "r", "R", "lhs", "rhs", "margin"};

  const std::pair<double, double> radii[] = {{0.01, 0.1}, {0.01, 1.0}, {0.1, 10.0}};
  double worst_margin = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < n_fields; ++i) {
    const auto f = random_smooth_scalar(mask, cfg.solver.seed + 1000 + i);
    for (const auto& [r, R] : radii) {
      CheckRecord c = check_interpolation(mask, f, r, R);
      res.table.push_back({static_cast<double>(i), r, R, c.lhs, c.rhs, c.margin});
      worst_margin = std::min(worst_margin, c.margin / std::max(c.rhs, 1e-300));
      if (c.status == CheckRecord::Status::fail) {
        ++failures;
        res.records.push_back(c);
      }
    }
  }
  res.records.push_back(make_check(
      "interp.suite", "no violation beyond -1e-3 rhs over all fields and radii",
      static_cast<double>(failures), 0.0));
  res.records.push_back(make_report("interp.worst_relative_margin",
                                    "min (rhs - lhs)/rhs over the suite",
                                    worst_margin));

  // Sharpness probe: extruded wall profile on a thin strip, r = eps,
  // R = diam. The ratio of the pair sum to the middle-range term
  // approaches a constant at most 1 as eps decreases.
  for (double eps : {2e-2, 1e-2}) {
    const double hs = eps / 8.0;
    const double width = 16.0 * hs;
    const Shape strip = Shape::rectangle({0.0, 0.0}, {1.0, width});
    GridSpec grid{{0.0, 0.0}, hs, static_cast<int>(std::lround(1.0 / hs)),
                  static_cast<int>(std::lround(width / hs))};
    DomainMask smask = DomainMask::rasterize(strip, grid);
    std::vector<double> f(smask.cell_count());
    for (std::size_t k = 0; k < f.size(); ++k)
      f[k] = profiles::transition(eps, smask.cell_center(k).x - 0.5);
    const auto g = masked_gradient(smask, f);
    double grad1 = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      grad1 += std::hypot(g[0][k], g[1][k]);
      fmax = std::max(fmax, std::abs(f[k]));
    }
    grad1 *= hs * hs;
    const double lhs = scalar_pair_lhs(smask, f);
    const double mid = 8.0 * std::log(smask.diameter() / eps) * fmax * grad1;
    res.records.push_back(make_report(
        "interp.sharpness",
        "wall-profile pair sum over the log-range term at eps " + fmt(eps),
        lhs / mid));
  }
  return res;
}

std::vector<CheckRecord> check_bv_bounds(const Magnetization2D& m,
                                         const ParameterSet& p, double alpha) {
  std::vector<CheckRecord> out;
  const double area = m.mask().raster_area();
  const EnergyBreakdown e = reduced_energy(m, p);
  const double X = e.bv;
  const double coeff = energy_floor_coefficient();  // pi^2 e / 4

  // Checked form: the energy-vs-interface-length bound in the shape its
  // derivation actually yields, -F <= X ln(pi^2 e^2 |O| / (4X)); minimizing
  // the right side over X reproduces the universal floor (pi^2 e/4)|O|.
  // Pinned discretization allowance 0.05 |O|.
  const double pe2 = kPi * kPi * std::numbers::e * std::numbers::e;
  const double tol_disc = 0.05 * area;
  const double rhs_bound = X > 0.0 ? X * std::log(pe2 * area / (4.0 * X)) : 0.0;
  out.push_back(make_check("bv.energy_vs_interface",
                           "-F <= X ln(pi^2 e^2 |O| / (4X)) + tol",
                           -e.reduced, rhs_bound + tol_disc));
  // Both printed log-weighted variants are reported alongside; they exceed
  // the derivable bound for mid-range interface densities.
  const double lhs_log =
      X > 0.0 ? std::abs(std::log(4.0 * X / (pe2 * area))) * X : 0.0;
  out.push_back(make_report("bv.log_weighted",
                            "|ln(4X / (pi^2 e^2 |O|))| X vs F + (pi^2 e/4)|O|",
                            lhs_log, e.reduced + coeff * area));
  const double lhs_alt =
      X > 0.0 ? std::abs(std::log(X / (pe2 * area))) * X : 0.0;
  out.push_back(make_report("bv.log_weighted_alt",
                            "variant without the factor 4 in the logarithm",
                            lhs_alt, e.reduced + coeff * area));

  if (e.reduced <= -alpha * area) {
    out.push_back(make_report("bv.sandwich",
                              "interface density X/|O| for a low-energy state",
                              X / area));
    const double gap = modica_mortola_gap(m, p);
    out.push_back(make_report("bv.mm_gap_constant",
                              "gap |ln eps| / |O| (sample of the gap constant)",
                              gap * p.log_eps / area));
    out.push_back(make_report("bv.local_window", "L / (|O| |ln eps|)",
                              e.local / (area * p.log_eps)));
    out.push_back(make_report("bv.nonlocal_window", "N / (|O| |ln eps|)",
                              e.nonlocal / (area * p.log_eps)));
  }
  return out;
}

namespace {

void demote_if_warned(std::vector<CheckRecord>& records, bool warned,
                      std::size_t from) {
  if (!warned) return;
  for (std::size_t i = from; i < records.size(); ++i)
    if (records[i].status != CheckRecord::Status::report_only)
      records[i].status = CheckRecord::Status::report_only;
}

}  // namespace

ExperimentResult onset_scan(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.id = "onset_scan";
  res.config = config_json(cfg);
  res.table_columns = {"epsilon", "diameter", "threshold", "area",
                       "bestF_over_area", "bv_over_area", "patterned"};
  res.provenance = make_provenance(cfg.solver.seed, 0.0);

  const std::vector<double> eps_list =
      cfg.epsilon_list.empty() ? std::vector<double>{cfg.epsilon} : cfg.epsilon_list;
  const std::vector<double> diam_list =
      cfg.diameter_list.empty() ? std::vector<double>{cfg.shape.diameter()}
                                : cfg.diameter_list;

  int snapshot_counter = 0;
  for (double eps : eps_list) {
    const ParameterSet p = derive(eps, cfg.Q);
    const double thr = onset_threshold(eps);
    const bool warned = eps > cfg.epsilon0;
    for (double diam : diam_list) {
      const Shape disk = Shape::disk({0.0, 0.0}, diam / 2.0);
      DomainMask mask = build_mask(disk, cfg.grid_n);
      res.provenance.h = mask.grid_spacing();
      const double area = mask.raster_area();
      auto starts = multi_start(mask, p, cfg.solver);
      const auto best = std::min_element(
          starts.begin(), starts.end(), [](const auto& a, const auto& b) {
            return a.energy.reduced < b.energy.reduced;
          });
      const double F = best->energy.reduced;
      const double bv = best->energy.bv;
      const bool patterned = F < -1e-3 * area && bv > 1e-2 * area;
      res.table.push_back({eps, diam, thr, area, F / area, bv / area,
                           patterned ? 1.0 : 0.0});

      const std::size_t first = res.records.size();
      const std::string tag = " (eps " + fmt(eps) + ", diam " + fmt(diam) + ")";
      res.records.push_back(make_check("onset.energy_floor",
                                       "-F/|O| <= pi^2 e/4 + 0.01" + tag,
                                       -F / area, energy_floor_coefficient() + 0.01));
      if (diam < thr) {
        res.records.push_back(make_check(
            "onset.uniform_energy", "below threshold: -F/|O| <= 1e-3" + tag,
            -F / area, 1e-3));
        res.records.push_back(make_check(
            "onset.uniform_bv", "below threshold: BV/|O| <= 1e-2" + tag,
            bv / area, 1e-2));
      } else if (diam >= 20.0 * thr) {
        res.records.push_back(make_check(
            "onset.patterned_energy", "large domain: F/|O| <= -1e-3" + tag,
            F / area, -1e-3));
        res.records.push_back(make_check(
            "onset.patterned_bv", "large domain: -BV/|O| <= -1e-2" + tag,
            -bv / area, -1e-2));
      } else {
        res.records.push_back(make_report(
            "onset.classification", "near-threshold point, patterned flag" + tag,
            patterned ? 1.0 : 0.0));
      }
      for (std::size_t i = first; i < res.records.size(); ++i) {
        if (res.records[i].status == CheckRecord::Status::fail) {
          const std::string path = cfg.out_dir + "/onset_fail_" +
                                   std::to_string(snapshot_counter++) + ".field";
          std::filesystem::create_directories(cfg.out_dir);
          save_snapshot(path, best->run.field, eps, cfg.Q);
          res.records[i].snapshot = path;
        }
      }
      demote_if_warned(res.records, warned, first);
    }
  }
  return res;
}

ExperimentResult compactness_diagnostic(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.id = "compactness";
  res.config = config_json(cfg);
  res.table_columns = {"epsilon", "inplane_mass",   "mass_over_eps_logeps",
                       "bv",      "l1_to_previous", "frac_undecided"};

  DomainMask mask = build_mask(cfg.shape, cfg.grid_n);
  res.provenance = make_provenance(cfg.solver.seed, mask.grid_spacing());
  std::vector<double> eps_list =
      cfg.epsilon_list.empty() ? std::vector<double>{1e-2, 1e-3} : cfg.epsilon_list;
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());

  const double h2 = mask.grid_spacing() * mask.grid_spacing();
  const double area = mask.raster_area();
  std::vector<double> prev_m3;
  double c_mass = 0.0, bv0 = 0.0;
  for (std::size_t idx = 0; idx < eps_list.size(); ++idx) {
    const double eps = eps_list[idx];
    const ParameterSet p = derive(eps, cfg.Q);
    Magnetization2D m0 = build_start(mask, "random_unit", cfg.solver.seed, eps);
    MinimizeResult run = minimize(m0, p, cfg.solver.minimize_config());
    const Magnetization2D& m = run.field;

    double mass = 0.0, undecided = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      mass += m.m1(k) * m.m1(k) + m.m2(k) * m.m2(k);
      if (std::abs(m.m3(k)) < 0.9) undecided += 1.0;
    }
    mass *= h2;
    undecided *= h2 / area;
    const double bv = bv_norm(m);
    double l1 = 0.0;
    if (!prev_m3.empty()) {
      for (std::size_t k = 0; k < m.size(); ++k)
        l1 += std::abs(m.m3(k) - prev_m3[k]);
      l1 *= h2;
    }
    const double ratio = mass / (eps * p.log_eps);
    res.table.push_back({eps, mass, ratio, bv, l1, undecided});

    if (idx == 0) {
      c_mass = ratio;
      bv0 = bv;
      res.records.push_back(make_report(
          "compact.mass_constant", "fitted C with mass <= C eps |ln eps|", ratio));
    } else {
      res.records.push_back(make_check(
          "compact.mass_decay",
          "mass/(eps |ln eps|) stays within 1.5x of the fitted constant at eps " +
              fmt(eps),
          ratio, 1.5 * std::max(c_mass, 1e-12)));
      res.records.push_back(make_check(
          "compact.bv_bounded",
          "BV bounded by a single constant across the sweep at eps " + fmt(eps),
          bv, 2.5 * std::max(bv0, 0.1 * area)));
      const double prev_frac = res.table[res.table.size() - 2][5];
      res.records.push_back(make_check(
          "compact.concentration",
          "measure{|m3| < 0.9} shrinks along the sweep at eps " + fmt(eps),
          undecided, 1.1 * prev_frac + 0.01));
      res.records.push_back(
          make_report("compact.l1_consecutive",
                      "L1 distance of m3 to the previous epsilon", l1));
    }
    prev_m3 = m.m3();
  }
  return res;
}

ExperimentResult scaling_sweep(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.id = "scaling_sweep";
  res.config = config_json(cfg);
  res.table_columns = {"epsilon", "F_over_area", "bv_over_area",
                       "d_over_s", "s_over_t",   "d_over_t"};
  DomainMask mask = build_mask(cfg.shape, cfg.grid_n);
  res.provenance = make_provenance(cfg.solver.seed, mask.grid_spacing());
  const double area = mask.raster_area();

  const std::vector<double> eps_list =
      cfg.epsilon_list.empty() ? std::vector<double>{1e-2, 1e-3} : cfg.epsilon_list;
  std::vector<double> bv_densities;
  for (double eps : eps_list) {
    const ParameterSet p = derive(eps, cfg.Q);
    auto starts = multi_start(mask, p, cfg.solver);
    const auto best = std::min_element(
        starts.begin(), starts.end(), [](const auto& a, const auto& b) {
          return a.energy.reduced < b.energy.reduced;
        });
    const double F = best->energy.reduced;
    const double bv = best->energy.bv;
    res.table.push_back(
        {eps, F / area, bv / area, p.d_over_s, p.s_over_t, p.d_over_t});
    const std::string tag = " at eps " + fmt(eps);
    res.records.push_back(make_check("scaling.energy_lower",
                                     "0.01 <= |F|/|O| (order-one energy)" + tag,
                                     0.01, std::abs(F) / area));
    res.records.push_back(make_check("scaling.energy_upper",
                                     "|F|/|O| <= pi^2 e/4 + 0.01" + tag,
                                     std::abs(F) / area,
                                     energy_floor_coefficient() + 0.01));
    if (bv > 0.0) bv_densities.push_back(bv / area);
  }
  if (bv_densities.size() >= 2) {
    const auto [mn, mx] =
        std::minmax_element(bv_densities.begin(), bv_densities.end());
    res.records.push_back(make_check(
        "scaling.bv_stability",
        "interface densities vary by < 2x across the sweep", *mx / *mn, 2.0));
  }
  return res;
}

ExperimentResult kernel_checks() {
  ExperimentResult res;
  res.id = "kernels";
  res.config = nlohmann::json::object();
  res.provenance = make_provenance(0, 0.0);
  res.table_columns = {"alpha", "gamma", "theta", "gamma_oracle_err",
                       "theta_oracle_err"};

  double worst_g = 0.0, worst_t = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
    const double g = kernels::gamma(a);
    const double t = kernels::theta(a);
    const double ge = std::abs(g - kernels::gamma_from_kernel(a));
    const double te = std::abs(t - kernels::theta_from_kernel(a));
    worst_g = std::max(worst_g, ge);
    worst_t = std::max(worst_t, te);
    res.table.push_back({a, g, t, ge, te});
  }
  res.records.push_back(make_check(
      "kernels.gamma_oracle", "max |gamma - kernel oracle| <= 1e-6", worst_g, 1e-6));
  res.records.push_back(make_check(
      "kernels.theta_oracle", "max |theta - quadrature oracle| <= 1e-6", worst_t, 1e-6));
  res.records.push_back(make_check("kernels.gamma_zero", "gamma(0) = 0",
                                   kernels::gamma(0.0), 0.0));
  res.records.push_back(make_check("kernels.theta_zero", "theta(0) = 0",
                                   kernels::theta(0.0), 0.0));
  res.records.push_back(make_check("kernels.gamma_limit",
                                   "|gamma(1e6) - 1| <= 1e-5",
                                   std::abs(kernels::gamma(1e6) - 1.0), 1e-5));
  res.records.push_back(make_check("kernels.theta_limit",
                                   "|theta(1e6) - 1| <= 1e-5",
                                   std::abs(kernels::theta(1e6) - 1.0), 1e-5));
  res.records.push_back(make_check(
      "kernels.radial_integral", "|int (1 - rho/sqrt(1+rho^2)) - 1| <= 1e-8",
      std::abs(kernels::unit_tail_integral() - 1.0), 1e-8));

  // Multiplier flatness: |mu_i - delta_i3| <= |xi| t over a log-frequency
  // times height grid; exact inequality.
  const double t_film = 0.1;
  double worst_mu = -1e300;
  for (int i = 0; i < 20; ++i) {
    const double xi = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
    for (int j = 0; j < 20; ++j) {
      const double x3 = t_film * (j + 0.5) / 20.0;
      for (int idx = 1; idx <= 3; ++idx) {
        const double mu = kernels::thin_film_multiplier(idx, xi, x3, t_film);
        const double dev = std::abs(mu - (idx == 3 ? 1.0 : 0.0));
        worst_mu = std::max(worst_mu, dev - xi * t_film);
      }
    }
  }
  res.records.push_back(make_check(
      "kernels.multiplier_flatness", "max(|mu_i - delta_i3| - |xi| t) <= 0",
      worst_mu, 0.0));

  const auto& table = kernels::KernelTable::shared();
  double worst_tab = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double a = std::pow(10.0, -5.5 + 12.0 * i / 399.0) * 1.0037;
    worst_tab = std::max(worst_tab, std::abs(table.gamma(a) - kernels::gamma(a)));
    worst_tab = std::max(worst_tab, std::abs(table.theta(a) - kernels::theta(a)));
  }
  res.records.push_back(make_check(
      "kernels.table_accuracy", "interpolated table within 1e-8 off-grid",
      worst_tab, 1e-8));
  return res;
}

}  // namespace magpat
