#include "dbi/tonal.hpp"

#include <cmath>
#include <stdexcept>

namespace dbi {

namespace {

double dot(const Raster &a, const Raster &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace

Raster tonal_optimize(const Mask &mask, const Raster &f, InpaintOperator op,
                      const TonalConfig &cfg, const SolveConfig &solve_cfg,
                      TonalStats *stats) {
  if (!mask.same_shape(f))
    throw std::invalid_argument("tonal_optimize: shape mismatch");
  if (mask.empty()) throw std::invalid_argument("tonal_optimize: empty mask");
  if (!(cfg.normal_eq_tolerance > 0.0 && cfg.normal_eq_tolerance < 1.0))
    throw std::invalid_argument("tonal_optimize: tolerance must be in (0,1)");

  const std::size_t n = f.size();
  const long max_outer = cfg.max_outer_iters > 0
                             ? cfg.max_outer_iters
                             : static_cast<long>(2 * mask.count());

  auto apply_forward = [&](const Raster &g) {
    return inpaint(mask, g, op, solve_cfg); // B C g
  };
  auto apply_adjoint_masked = [&](const Raster &r) {
    Raster s = inpaint_adjoint(mask, r, op, solve_cfg); // B^T r
    for (std::size_t i = 0; i < n; ++i)
      if (!mask.test(i)) s[i] = 0.0;
    return s; // C B^T r
  };

  // start from the interpolation values C f
  Raster g(f.width(), f.height(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (mask.test(i)) g[i] = f[i];

  Raster residual = apply_forward(g); // r(c, f)
  for (std::size_t i = 0; i < n; ++i) residual[i] = f[i] - residual[i];
  const double interp_objective = dot(residual, residual);

  TonalStats st;
  st.interpolation_objective = interp_objective;

  Raster s = apply_adjoint_masked(residual);
  double gamma = dot(s, s);
  const double gamma0 = gamma;
  Raster p = s;

  Raster g_best = g;
  double best_objective = interp_objective;
  double prev_objective = interp_objective;

  while (st.iterations < max_outer) {
    if (gamma0 == 0.0) break;
    if (std::sqrt(gamma / gamma0) <= cfg.normal_eq_tolerance) break;
    Raster q = apply_forward(p);
    const double qq = dot(q, q);
    if (qq <= 0.0) break;
    const double alpha = gamma / qq;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] += alpha * p[i];
      residual[i] -= alpha * q[i];
    }
    ++st.iterations;

    const double objective = dot(residual, residual);
    if (objective < best_objective) {
      best_objective = objective;
      g_best = g;
    }
    const double decrease =
        (prev_objective - objective) / std::max(interp_objective, 1e-300);
    prev_objective = objective;

    s = apply_adjoint_masked(residual);
    const double gamma_new = dot(s, s);
    const double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = s[i] + beta * p[i];

    if (decrease >= 0.0 && decrease < cfg.min_objective_decrease) break;
  }

  st.rel_normal_residual = gamma0 > 0.0 ? std::sqrt(gamma / gamma0) : 0.0;
  st.converged = st.rel_normal_residual <= cfg.normal_eq_tolerance ||
                 st.iterations < max_outer;

  // verify against recurrence drift; the result may never be worse than
  // plain interpolation
  Raster check = apply_forward(g_best);
  for (std::size_t i = 0; i < n; ++i) check[i] = f[i] - check[i];
  double final_objective = dot(check, check);
  if (final_objective > interp_objective) {
    for (std::size_t i = 0; i < n; ++i) g_best[i] = mask.test(i) ? f[i] : 0.0;
    final_objective = interp_objective;
  }
  st.objective = final_objective;
  if (stats) *stats = st;
  return g_best;
}

} // namespace dbi
