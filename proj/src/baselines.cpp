#include "dbi/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "dbi/errors.hpp"

namespace dbi {

namespace {

void validate(const DiffusionParams &p) {
  if (p.total_time < 0.0)
    throw std::invalid_argument("diffusion: total_time must be >= 0");
  if (!(p.tau > 0.0 && p.tau <= 0.25))
    throw std::invalid_argument(
        "diffusion: explicit stability needs 0 < tau <= 0.25");
}

// |grad f|^2 with central differences, half-sample mirrored boundary
Raster gradient_sq(const Raster &f) {
  const int nx = f.width();
  const int ny = f.height();
  Raster out(nx, ny);
  auto cx = [&](int x) { return x < 0 ? 0 : (x >= nx ? nx - 1 : x); };
  auto cy = [&](int y) { return y < 0 ? 0 : (y >= ny ? ny - 1 : y); };
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      const double fx = 0.5 * (f(cx(x + 1), y) - f(cx(x - 1), y));
      const double fy = 0.5 * (f(x, cy(y + 1)) - f(x, cy(y - 1)));
      out(x, y) = fx * fx + fy * fy;
    }
  return out;
}

Raster charbonnier(const Raster &grad_sq, double lambda) {
  Raster g(grad_sq.width(), grad_sq.height());
  const double inv_l2 = 1.0 / (lambda * lambda);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = 1.0 / std::sqrt(1.0 + grad_sq[i] * inv_l2);
  return g;
}

// one explicit step in divergence form, diffusivities averaged on edges
void diffusion_step(const Raster &u, const Raster &g, double tau, Raster &out) {
  const int nx = u.width();
  const int ny = u.height();
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      const double uc = u(x, y);
      const double gc = g(x, y);
      double flux = 0.0;
      if (x > 0) flux += 0.5 * (gc + g(x - 1, y)) * (u(x - 1, y) - uc);
      if (x < nx - 1) flux += 0.5 * (gc + g(x + 1, y)) * (u(x + 1, y) - uc);
      if (y > 0) flux += 0.5 * (gc + g(x, y - 1)) * (u(x, y - 1) - uc);
      if (y < ny - 1) flux += 0.5 * (gc + g(x, y + 1)) * (u(x, y + 1) - uc);
      out(x, y) = uc + tau * flux;
    }
}

enum class Diffusivity { Constant, Frozen, Evolving };

Raster run_diffusion(const Raster &f, const DiffusionParams &params,
                     Diffusivity mode) {
  validate(params);
  if (params.total_time == 0.0) return f;
  if (mode != Diffusivity::Constant && params.lambda <= 0.0)
    throw std::invalid_argument("diffusion: lambda must be > 0");

  Raster u = f;
  Raster next(f.width(), f.height());
  Raster g(f.width(), f.height(), 1.0);
  if (mode == Diffusivity::Frozen) {
    const Raster guide =
        params.sigma > 0.0 ? gaussian_convolve(f, params.sigma) : f;
    g = charbonnier(gradient_sq(guide), params.lambda);
  }

  double remaining = params.total_time;
  while (remaining > 1e-14) {
    const double tau = std::min(params.tau, remaining);
    if (mode == Diffusivity::Evolving) {
      const Raster guide =
          params.sigma > 0.0 ? gaussian_convolve(u, params.sigma) : u;
      g = charbonnier(gradient_sq(guide), params.lambda);
    }
    diffusion_step(u, g, tau, next);
    std::swap(u, next);
    remaining -= tau;
  }
  return u;
}

} // namespace

Raster homogeneous_diffusion(const Raster &f, const DiffusionParams &params) {
  return run_diffusion(f, params, Diffusivity::Constant);
}

Raster space_variant_diffusion(const Raster &f, const DiffusionParams &params) {
  return run_diffusion(f, params, Diffusivity::Frozen);
}

Raster nonlinear_diffusion(const Raster &f, const DiffusionParams &params) {
  return run_diffusion(f, params, Diffusivity::Evolving);
}

namespace {

constexpr double kTvEpsilon = 1e-3;

// E(u) = 1/2 |u - f|^2 + alpha * sum sqrt(dx^2 + dy^2 + eps^2),
// forward differences, Neumann (zero difference past the border)
double tv_energy(const Raster &u, const Raster &f, double alpha) {
  const int nx = u.width();
  const int ny = u.height();
  double data = 0.0;
  double tv = 0.0;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      const double d = u(x, y) - f(x, y);
      data += d * d;
      const double dx = x < nx - 1 ? u(x + 1, y) - u(x, y) : 0.0;
      const double dy = y < ny - 1 ? u(x, y + 1) - u(x, y) : 0.0;
      tv += std::sqrt(dx * dx + dy * dy + kTvEpsilon * kTvEpsilon);
    }
  return 0.5 * data + alpha * tv;
}

void tv_gradient(const Raster &u, const Raster &f, double alpha, Raster &grad) {
  const int nx = u.width();
  const int ny = u.height();
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = u[i] - f[i];
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      const double dx = x < nx - 1 ? u(x + 1, y) - u(x, y) : 0.0;
      const double dy = y < ny - 1 ? u(x, y + 1) - u(x, y) : 0.0;
      const double w =
          alpha / std::sqrt(dx * dx + dy * dy + kTvEpsilon * kTvEpsilon);
      grad(x, y) -= (dx + dy) * w;
      if (x < nx - 1) grad(x + 1, y) += dx * w;
      if (y < ny - 1) grad(x, y + 1) += dy * w;
    }
}

} // namespace

Raster tv_denoise(const Raster &f, double alpha) {
  if (alpha < 0.0)
    throw std::invalid_argument("tv_denoise: alpha must be >= 0");
  if (alpha == 0.0) return f;

  // Gradient descent with Barzilai-Borwein step lengths and a monotone
  // backtracking safeguard; fixed small steps crawl once alpha/eps makes
  // the energy stiff.
  const std::size_t n = f.size();
  Raster u = f;
  Raster grad(f.width(), f.height());
  Raster prev_grad(f.width(), f.height());
  Raster trial(f.width(), f.height());
  double energy = tv_energy(u, f, alpha);
  tv_gradient(u, f, alpha, grad);
  double step = 1.0 / (1.0 + 8.0 * alpha / kTvEpsilon);
  const long max_iters = 200000;
  int stalled = 0;

  for (long it = 0; it < max_iters; ++it) {
    bool accepted = false;
    double taken = step;
    while (taken > 1e-300) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - taken * grad[i];
      const double trial_energy = tv_energy(trial, f, alpha);
      if (trial_energy < energy) {
        const double decrease = (energy - trial_energy) / std::max(energy, 1.0);
        energy = trial_energy;
        std::swap(prev_grad, grad);
        tv_gradient(trial, f, alpha, grad);
        // BB1 step from the accepted move: <du,du> / <du,dg>
        double du_du = 0.0, du_dg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double du = trial[i] - u[i];
          const double dg = grad[i] - prev_grad[i];
          du_du += du * du;
          du_dg += du * dg;
        }
        std::swap(u, trial);
        step = du_dg > 0.0 ? du_du / du_dg : taken * 1.5;
        accepted = true;
        stalled = decrease < 1e-8 ? stalled + 1 : 0;
        break;
      }
      taken *= 0.5;
    }
    if (!accepted || stalled >= 5) break;
  }
  if (!u.all_finite()) throw NumericError("tv_denoise: diverged");
  return u;
}

} // namespace dbi
