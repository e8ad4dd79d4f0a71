#include "magpat/minimize.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "magpat/parallel.hpp"

namespace magpat {

namespace {

// Adjoint of the forward/backward stencil used by masked_gradient.
void scatter_adjoint(const DomainMask& mask, const std::vector<double>& d,
                     bool along_x, double coef, std::vector<double>& out) {
  const double h = mask.grid_spacing();
  for (std::size_t k = 0; k < mask.cell_count(); ++k) {
    const auto [ix, iy] = mask.cell(k);
    const std::int32_t minus = along_x ? mask.compact_index(ix - 1, iy)
                                       : mask.compact_index(ix, iy - 1);
    const std::int32_t plus = along_x ? mask.compact_index(ix + 1, iy)
                                      : mask.compact_index(ix, iy + 1);
    const double w = coef * d[k];
    if (plus >= 0) {
      out[static_cast<std::size_t>(plus)] += w / h;
      out[k] -= w / h;
    } else if (minus >= 0) {
      out[k] += w / h;
      out[static_cast<std::size_t>(minus)] -= w / h;
    }
  }
}

}  // namespace

TangentField reduced_energy_gradient(const Magnetization2D& m,
                                     const ParameterSet& p) {
  const DomainMask& mask = m.mask();
  const std::size_t n = m.size();
  const double h = mask.grid_spacing();
  TangentField g{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                 std::vector<double>(n, 0.0)};

  // Exchange: eps |ln eps| D^T D m per component (variational form).
  const double xc = p.epsilon * p.log_eps;
  const std::vector<double>* comps[3] = {&m.m1(), &m.m2(), &m.m3()};
  std::vector<double>* outs[3] = {&g.g1, &g.g2, &g.g3};
  for (int c = 0; c < 3; ++c) {
    const auto grad = masked_gradient(mask, *comps[c]);
    scatter_adjoint(mask, grad[0], true, xc, *outs[c]);
    scatter_adjoint(mask, grad[1], false, xc, *outs[c]);
  }

  // Anisotropy: -(|ln eps| / eps) m3.
  const double ac = p.log_eps / p.epsilon;
  for (std::size_t k = 0; k < n; ++k) g.g3[k] -= ac * m.m3(k);

  // Nonlocal part of F = L - N: subtract the pair interaction
  // (h^2 / 2) sum_j (m3_i - m3_j) / r^3.
  const Vec2* pos = mask.centers().data();
  const double* m3 = m.m3().data();
  const double nc = 0.5 * h * h;
  double* g3 = g.g3.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Vec2 pi = pos[i];
    const double mi = m3[i];
    KahanSum s;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = pos[j].x - pi.x;
      const double dy = pos[j].y - pi.y;
      const double r2 = dx * dx + dy * dy;
      const double r = std::sqrt(r2);
      s.add((mi - m3[j]) / (r2 * r));
    }
    g3[i] -= nc * s.value();
  }

  // Project onto the tangent space of the sphere at each cell.
  for (std::size_t k = 0; k < n; ++k) {
    const double dotp =
        g.g1[k] * m.m1(k) + g.g2[k] * m.m2(k) + g.g3[k] * m.m3(k);
    g.g1[k] -= dotp * m.m1(k);
    g.g2[k] -= dotp * m.m2(k);
    g.g3[k] -= dotp * m.m3(k);
  }
  return g;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged:
      return "converged";
    case StopReason::max_iterations:
      return "max_iterations";
    case StopReason::stalled:
      return "stalled";
  }
  return "unknown";
}

void MinimizeConfig::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("max_iterations < 0");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("backtrack factor must lie in (0, 1)");
  if (!(armijo > 0.0)) throw std::invalid_argument("armijo must be > 0");
  if (initial_step < 0.0) throw std::invalid_argument("initial_step < 0");
}

MinimizeResult minimize(const Magnetization2D& m0, const ParameterSet& p,
                        const MinimizeConfig& cfg) {
  cfg.validate();
  m0.validate();
  const DomainMask& mask = m0.mask();
  const std::size_t n = m0.size();
  const double h = mask.grid_spacing();
  const double h2 = h * h;

  MinimizeResult res{m0, {}, StopReason::max_iterations};
  Magnetization2D m = m0;
  EnergyBreakdown cur = reduced_energy(m, p);
  double step = cfg.initial_step > 0.0 ? cfg.initial_step
                                       : p.epsilon / p.log_eps;
  const double step_cap = step * 1e4;

  for (int iter = 0; iter <= cfg.max_iterations; ++iter) {
    const TangentField g = reduced_energy_gradient(m, p);
    double g2 = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      g2 += g.g1[k] * g.g1[k] + g.g2[k] * g.g2[k] + g.g3[k] * g.g3[k];
    const double grad_norm = std::sqrt(g2 * h2);
    res.trace.push_back({iter, cur.reduced, cur.local, cur.nonlocal, cur.bv,
                         grad_norm, step});

    if (grad_norm <= cfg.grad_tol) {
      res.reason = StopReason::converged;
      break;
    }
    if (iter == cfg.max_iterations) {
      res.reason = StopReason::max_iterations;
      break;
    }

    bool accepted = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      Magnetization2D trial = m;
      bool degenerate = false;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = m.m1(k) - step * g.g1[k];
        const double y = m.m2(k) - step * g.g2[k];
        const double z = m.m3(k) - step * g.g3[k];
        const double nm = std::sqrt(x * x + y * y + z * z);
        if (nm < 0.5) {
          degenerate = true;
          break;
        }
        trial.m1(k) = x / nm;
        trial.m2(k) = y / nm;
        trial.m3(k) = z / nm;
      }
      if (!degenerate) {
        const EnergyBreakdown trial_e = reduced_energy(trial, p);
        if (trial_e.reduced <= cur.reduced - cfg.armijo * step * g2 * h2) {
          m = std::move(trial);
          cur = trial_e;
          accepted = true;
          step = std::min(step * cfg.growth, step_cap);
          break;
        }
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      res.reason = StopReason::stalled;
      break;
    }
  }

  res.field = std::move(m);
  return res;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,F,L,N,BV,gradnorm,step\n";
  char buf[256];
  for (const TraceRow& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.iteration, r.reduced, r.local, r.nonlocal, r.bv,
                  r.grad_norm, r.step);
    out += buf;
  }
  return out;
}

}  // namespace magpat
