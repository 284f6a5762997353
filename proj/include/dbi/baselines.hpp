#pragma once

#include "dbi/raster.hpp"

namespace dbi {

struct DiffusionParams {
  double total_time = 0.0;
  double tau = 0.2;      // explicit step size, stability needs tau <= 0.25
  double lambda = 1.0;   // Charbonnier contrast parameter
  double sigma = 0.0;    // optional pre-smoothing of the guidance image
};

/// Explicit homogeneous diffusion with reflecting boundaries. The last step
/// is shortened so the evolution lands on total_time exactly.
Raster homogeneous_diffusion(const Raster &f, const DiffusionParams &params);

/// Charbonnier diffusivity g = 1/sqrt(1 + |grad f|^2 / lambda^2) frozen from
/// the (optionally pre-smoothed) initial image, averaged onto half-grid
/// edges.
Raster space_variant_diffusion(const Raster &f, const DiffusionParams &params);

/// Same scheme with the diffusivity recomputed from the evolving image in
/// every step.
Raster nonlinear_diffusion(const Raster &f, const DiffusionParams &params);

/// min_u 1/2 |u - f|^2 + alpha * TV_eps(u) by gradient descent with
/// adaptive step halving (eps = 1e-3 gray levels); stops when the relative
/// energy decrease falls below 1e-8.
Raster tv_denoise(const Raster &f, double alpha);

} // namespace dbi
