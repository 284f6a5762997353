#pragma once

#include <cstdint>
#include <vector>

#include "dbi/inpaint.hpp"
#include "dbi/raster.hpp"

namespace dbi {

/// Per-pixel mask probabilities in [0,1] together with the requested mean.
struct DensityMap {
  Raster map;
  double target_density = 0.0;
};

/// Shifted regular grids: one mask pixel every r-th column and s-th row.
struct RegularGridSpec {
  int r = 1; // x spacing
  int s = 1; // y spacing
};

struct DensificationParams {
  int alpha = 16;             // candidates per iteration
  double target_density = 0.1;
  std::uint64_t seed = 0;
};

/// The r*s shifted masks c^{p*s+q+1} with offsets p in {0..r-1}, q in
/// {0..s-1}. They partition the grid.
std::vector<Mask> regular_masks(const RegularGridSpec &spec, int width,
                                int height);

/// Edge-adaptive density d = min{ C * (K_rho * |L f_sigma|), 1 } with C
/// calibrated by bisection so that mean(d) hits target_density (within 1e-3).
/// A constant image falls back to the uniform map. Throws NumericError when
/// the target is unreachable even with all nonzero entries saturated.
DensityMap analytic_density(const Raster &f, double sigma, double rho,
                            double target_density);

/// Independent per-pixel thresholding: bit i is set iff v_i <= d_i with
/// v_i ~ U[0,1). Resamples with a derived sub-seed when the draw comes out
/// empty (at most 64 attempts).
Mask poisson_sample(const DensityMap &density, std::uint64_t seed);

/// Quasirandom threshold field t(x,y) = frac(x/g + y/g^2), g the plastic
/// constant (real root of x^3 = x + 1).
Raster r2_threshold_field(int width, int height);

/// Low-discrepancy mask: bit set iff frac(t(x,y) + mask_index * phi) <= d,
/// phi the fractional golden ratio. Deterministic per index.
Mask ld_sample(const DensityMap &density, std::uint64_t mask_index);

struct ErrorDiffusionResult {
  Mask mask;
  /// Product of the per-pixel branch probabilities taken during the pass
  /// (the unnormalized mask probability). Underflows to 0 on large grids.
  double pmf_numerator = 1.0;
};

/// Randomized error-diffusion halftoning of the density map: serpentine
/// traversal, threshold v_k ~ U[0,1) against the clamped running density,
/// residual diffused with Floyd-Steinberg weights 7/16, 3/16, 5/16, 1/16 to
/// unvisited neighbors. Resamples on an empty result like poisson_sample.
ErrorDiffusionResult error_diffusion_sample(const DensityMap &density,
                                            std::uint64_t seed);

/// Unnormalized probability of producing exactly `mask` from `density`
/// (forced replay of the diffusion pass).
double error_diffusion_pmf_numerator(const DensityMap &density,
                                     const Mask &mask);

/// Bottom-up mask growth: per iteration draw `alpha` distinct empty pixels,
/// inpaint with each candidate temporarily added, keep the one whose
/// reconstruction has the lowest global MSE against f. Ties are broken
/// uniformly at random.
Mask densify(const Raster &f, const DensificationParams &params,
             InpaintOperator op, const SolveConfig &cfg);

/// Top-down counterpart: start from the full mask and repeatedly remove the
/// candidate whose removal yields the lowest global MSE against f.
Mask sparsify(const Raster &f, const DensificationParams &params,
              InpaintOperator op, const SolveConfig &cfg);

/// Probability that a fixed empty pixel x* is the one inserted by a single
/// densification step, given num_empty remaining locations, of which n_eq
/// share x*'s energy (x* included) and n_gt are strictly worse:
///   sum_beta (1/beta) C(n_eq-1, beta-1) C(n_gt, alpha-beta) / C(num_empty, alpha).
double densification_step_probability(long num_empty, long alpha, long n_eq,
                                      long n_gt);

} // namespace dbi
