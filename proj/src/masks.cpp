#include "dbi/masks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbi/errors.hpp"
#include "dbi/parallel.hpp"
#include "dbi/rng.hpp"

namespace dbi {

std::vector<Mask> regular_masks(const RegularGridSpec &spec, int width,
                                int height) {
  if (spec.r < 1 || spec.s < 1)
    throw std::invalid_argument("regular_masks: spacings must be >= 1");
  if (spec.r > width || spec.s > height)
    throw std::invalid_argument("regular_masks: spacing exceeds image size");
  std::vector<Mask> masks;
  masks.reserve(static_cast<std::size_t>(spec.r) * spec.s);
  for (int p = 0; p < spec.r; ++p) {
    for (int q = 0; q < spec.s; ++q) {
      Mask m(width, height);
      for (int x = p; x < width; x += spec.r)
        for (int y = q; y < height; y += spec.s) m.set(x, y);
      masks.push_back(std::move(m));
    }
  }
  return masks;
}

DensityMap analytic_density(const Raster &f, double sigma, double rho,
                            double target_density) {
  if (!(target_density > 0.0 && target_density <= 1.0))
    throw std::invalid_argument("analytic_density: target must be in (0,1]");
  if (sigma < 0.0 || rho < 0.0)
    throw std::invalid_argument("analytic_density: sigma, rho must be >= 0");

  Raster guide = apply_neg_laplacian(gaussian_convolve(f, sigma));
  for (double &v : guide.data()) v = std::abs(v);
  guide = gaussian_convolve(guide, rho);

  const double peak = guide.max_value();
  DensityMap out;
  out.target_density = target_density;
  if (peak <= 0.0) {
    // constant image: the guidance vanishes, use the uniform map
    out.map = Raster(f.width(), f.height(), target_density);
    return out;
  }

  double min_positive = peak;
  std::size_t nonzero = 0;
  for (double v : guide.data()) {
    if (v > 0.0) {
      ++nonzero;
      min_positive = std::min(min_positive, v);
    }
  }
  const double reachable =
      static_cast<double>(nonzero) / static_cast<double>(guide.size());
  if (reachable < target_density - 1e-9)
    throw NumericError(
        "analytic_density: target density unreachable (too few nonzero "
        "guidance entries)");

  auto mean_at = [&](double scale) {
    double sum = 0.0;
    for (double v : guide.data()) sum += std::min(scale * v, 1.0);
    return sum / static_cast<double>(guide.size());
  };

  // mean is nondecreasing in the scale, so bisect on [0, saturation]
  double lo = 0.0;
  double hi = 1.0 / min_positive;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_at(mid) < target_density)
      lo = mid;
    else
      hi = mid;
  }
  const double scale = 0.5 * (lo + hi);

  out.map = Raster(f.width(), f.height());
  for (std::size_t i = 0; i < guide.size(); ++i)
    out.map[i] = std::min(scale * guide[i], 1.0);
  if (std::abs(out.map.mean() - target_density) > 1e-3)
    throw NumericError("analytic_density: calibration failed to reach target");
  return out;
}

namespace {

void validate_density(const DensityMap &density) {
  for (double v : density.map.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("density map entries must lie in [0,1]");
}

} // namespace

Mask poisson_sample(const DensityMap &density, std::uint64_t seed) {
  validate_density(density);
  const Raster &d = density.map;
  for (int attempt = 0; attempt < 64; ++attempt) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Mask m(d.width(), d.height());
    for (std::size_t i = 0; i < d.size(); ++i)
      if (rng.uniform() <= d[i]) m.set(i);
    if (!m.empty()) return m;
  }
  throw NumericError("poisson_sample: empty mask after 64 attempts");
}

namespace {

// real root of x^3 = x + 1 by Newton iteration
double plastic_constant() {
  double x = 1.3;
  for (int i = 0; i < 64; ++i) {
    const double fx = x * x * x - x - 1.0;
    const double dfx = 3.0 * x * x - 1.0;
    const double next = x - fx / dfx;
    if (next == x) break;
    x = next;
  }
  return x;
}

double frac(double v) { return v - std::floor(v); }

constexpr double kGoldenFraction = 0.61803398874989484820458683436564;

} // namespace

Raster r2_threshold_field(int width, int height) {
  const double g = plastic_constant();
  const double a1 = 1.0 / g;
  const double a2 = 1.0 / (g * g);
  Raster t(width, height);
  for (int x = 0; x < width; ++x)
    for (int y = 0; y < height; ++y) t(x, y) = frac(x * a1 + y * a2);
  return t;
}

Mask ld_sample(const DensityMap &density, std::uint64_t mask_index) {
  validate_density(density);
  const Raster &d = density.map;
  const Raster base = r2_threshold_field(d.width(), d.height());
  // shift starts at one golden step so no threshold is exactly zero
  const double shift =
      frac(static_cast<double>(mask_index + 1) * kGoldenFraction);
  Mask m(d.width(), d.height());
  for (std::size_t i = 0; i < d.size(); ++i)
    if (frac(base[i] + shift) <= d[i]) m.set(i);
  if (m.empty())
    throw NumericError("ld_sample: empty mask (density too low)");
  return m;
}

namespace {

// Serpentine error-diffusion pass. `decide` maps the clamped running density
// of the visited pixel to a binary choice; the probability of the taken
// branch is multiplied into the returned numerator.
template <typename Decide>
double error_diffusion_pass(const Raster &density, Mask &mask, Decide decide) {
  const int nx = density.width();
  const int ny = density.height();
  Raster work = density;
  double numerator = 1.0;
  for (int y = 0; y < ny; ++y) {
    const bool reverse = (y % 2) == 1;
    const int dir = reverse ? -1 : 1;
    for (int step = 0; step < nx; ++step) {
      const int x = reverse ? nx - 1 - step : step;
      const double p = std::clamp(work(x, y), 0.0, 1.0);
      const bool bit = decide(p);
      numerator *= bit ? p : 1.0 - p;
      if (bit) mask.set(x, y);
      const double err = work(x, y) - (bit ? 1.0 : 0.0);
      // Floyd-Steinberg, mirrored with the scan direction
      const int xf = x + dir;
      if (xf >= 0 && xf < nx) work(xf, y) += err * (7.0 / 16.0);
      if (y + 1 < ny) {
        const int xb = x - dir;
        if (xb >= 0 && xb < nx) work(xb, y + 1) += err * (3.0 / 16.0);
        work(x, y + 1) += err * (5.0 / 16.0);
        if (xf >= 0 && xf < nx) work(xf, y + 1) += err * (1.0 / 16.0);
      }
    }
  }
  return numerator;
}

} // namespace

ErrorDiffusionResult error_diffusion_sample(const DensityMap &density,
                                            std::uint64_t seed) {
  validate_density(density);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    ErrorDiffusionResult result;
    result.mask = Mask(density.map.width(), density.map.height());
    result.pmf_numerator = error_diffusion_pass(
        density.map, result.mask, [&](double p) { return rng.uniform() <= p; });
    if (!result.mask.empty()) return result;
  }
  throw NumericError("error_diffusion_sample: empty mask after 64 attempts");
}

double error_diffusion_pmf_numerator(const DensityMap &density,
                                     const Mask &mask) {
  validate_density(density);
  if (!mask.same_shape(density.map))
    throw std::invalid_argument("error_diffusion_pmf_numerator: shape mismatch");
  Mask replay(density.map.width(), density.map.height());
  std::size_t cursor = 0;
  // replay the serpentine traversal, forcing the recorded bits
  const int nx = density.map.width();
  const int ny = density.map.height();
  std::vector<std::uint8_t> forced(mask.size());
  for (int y = 0; y < ny; ++y) {
    const bool reverse = (y % 2) == 1;
    for (int step = 0; step < nx; ++step) {
      const int x = reverse ? nx - 1 - step : step;
      forced[cursor++] = mask.test(x, y) ? 1 : 0;
    }
  }
  cursor = 0;
  return error_diffusion_pass(density.map, replay, [&](double) {
    return forced[cursor++] != 0;
  });
}

namespace {

// argmin with uniformly random tie-breaking; ties are energies within
// 1e-12 * max(min, 1) of the minimum
std::size_t pick_argmin(const std::vector<double> &energy, SplitMix64 &rng) {
  double best = energy[0];
  for (double e : energy) best = std::min(best, e);
  const double tol = 1e-12 * std::max(best, 1.0);
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < energy.size(); ++i)
    if (energy[i] <= best + tol) ties.push_back(i);
  return ties[static_cast<std::size_t>(rng.below(ties.size()))];
}

// partial Fisher-Yates: moves `take` uniformly chosen entries to the front
void draw_candidates(std::vector<std::uint32_t> &pool, std::size_t take,
                     SplitMix64 &rng) {
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

std::size_t target_pixel_count(double density, std::size_t n) {
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("mask optimization: density must be in (0,1]");
  const auto t = static_cast<std::size_t>(
      std::llround(density * static_cast<double>(n)));
  return std::clamp<std::size_t>(t, 1, n);
}

} // namespace

Mask densify(const Raster &f, const DensificationParams &params,
             InpaintOperator op, const SolveConfig &cfg) {
  if (params.alpha < 1)
    throw std::invalid_argument("densify: alpha must be >= 1");
  const std::size_t n = f.size();
  const std::size_t target = target_pixel_count(params.target_density, n);
  SplitMix64 rng(params.seed);

  Mask mask(f.width(), f.height());
  std::vector<std::uint32_t> empty(n);
  for (std::size_t i = 0; i < n; ++i) empty[i] = static_cast<std::uint32_t>(i);

  while (mask.count() < target) {
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(params.alpha),
                              empty.size());
    draw_candidates(empty, take, rng);
    std::vector<double> energy(take);
    parallel_for(take, [&](std::size_t i) {
      Mask trial = mask;
      trial.set(empty[i]);
      energy[i] = mse(inpaint(trial, f, op, cfg), f);
    });
    const std::size_t winner = pick_argmin(energy, rng);
    mask.set(empty[winner]);
    empty[winner] = empty.back();
    empty.pop_back();
  }
  return mask;
}

Mask sparsify(const Raster &f, const DensificationParams &params,
              InpaintOperator op, const SolveConfig &cfg) {
  if (params.alpha < 1)
    throw std::invalid_argument("sparsify: alpha must be >= 1");
  const std::size_t n = f.size();
  const std::size_t target = target_pixel_count(params.target_density, n);
  SplitMix64 rng(params.seed);

  Mask mask(f.width(), f.height(), true);
  std::vector<std::uint32_t> members(n);
  for (std::size_t i = 0; i < n; ++i)
    members[i] = static_cast<std::uint32_t>(i);

  while (mask.count() > target) {
    const std::size_t take = std::min<std::size_t>(
        static_cast<std::size_t>(params.alpha), members.size());
    draw_candidates(members, take, rng);
    std::vector<double> energy(take);
    parallel_for(take, [&](std::size_t i) {
      Mask trial = mask;
      trial.set(members[i], false);
      energy[i] = mse(inpaint(trial, f, op, cfg), f);
    });
    const std::size_t loser = pick_argmin(energy, rng);
    mask.set(members[loser], false);
    members[loser] = members.back();
    members.pop_back();
  }
  return mask;
}

namespace {

double log_choose(long n, long k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

} // namespace

double densification_step_probability(long num_empty, long alpha, long n_eq,
                                      long n_gt) {
  if (alpha < 1 || alpha > num_empty)
    throw std::invalid_argument(
        "densification_step_probability: need 1 <= alpha <= num_empty");
  if (n_eq < 1 || n_eq + n_gt > num_empty)
    throw std::invalid_argument(
        "densification_step_probability: need n_eq >= 1 and n_eq + n_gt <= "
        "num_empty");
  const double log_total = log_choose(num_empty, alpha);
  double prob = 0.0;
  for (long beta = 1; beta <= alpha; ++beta) {
    if (beta - 1 > n_eq - 1) break;
    if (alpha - beta > n_gt) continue;
    const double log_term = log_choose(n_eq - 1, beta - 1) +
                            log_choose(n_gt, alpha - beta) - log_total;
    prob += std::exp(log_term) / static_cast<double>(beta);
  }
  return prob;
}

} // namespace dbi
