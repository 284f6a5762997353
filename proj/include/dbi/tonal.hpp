#pragma once

#include "dbi/inpaint.hpp"
#include "dbi/raster.hpp"

namespace dbi {

struct TonalConfig {
  double normal_eq_tolerance = 1e-8; // relative residual of C B^T (B C g - f)
  long max_outer_iters = 0;          // 0 means 2 * |mask|
  double min_objective_decrease = 1e-12; // early stop, relative per iteration
};

struct TonalStats {
  long iterations = 0;
  double rel_normal_residual = 0.0;
  bool converged = true;
  double objective = 0.0;               // |r(c,g*) - f|^2
  double interpolation_objective = 0.0; // |r(c,f) - f|^2
};

/// Least-squares optimal gray values g*: argmin |r(c,g) - f|^2, supported on
/// the mask (other entries 0). Matrix-free CGNR on the normal equations
/// (C B^T B C) g = C B^T f; every iteration costs one inpainting and one
/// adjoint solve. Starts from the interpolation values, so the final
/// objective never exceeds the interpolation objective.
Raster tonal_optimize(const Mask &mask, const Raster &f, InpaintOperator op,
                      const TonalConfig &cfg = {},
                      const SolveConfig &solve_cfg = {},
                      TonalStats *stats = nullptr);

} // namespace dbi
