#pragma once

#include "dbi/raster.hpp"

namespace dbi {

enum class InpaintOperator { Harmonic, Biharmonic };

const char *to_string(InpaintOperator op);

struct SolveConfig {
  double rel_tolerance = 1e-9; // residual reduction target
  long max_iters = 0;          // 0 means 10 * N
  bool use_dense_oracle = false; // route solves through the dense path, N <= 4096
};

struct SolveStats {
  long iterations = 0;
  double rel_residual = 0.0;
  bool converged = true;
  bool used_fallback = false; // biharmonic BiCGStab fallback engaged
};

/// Reconstruction r(c, f): mask pixels keep their value exactly, the rest
/// solves the reduced elliptic system (conjugate gradients on the SPD
/// restriction to unknown pixels, zero initial guess, relative Euclidean
/// residual). If stats is null, non-convergence throws NumericError;
/// otherwise it is reported through stats.
Raster inpaint(const Mask &mask, const Raster &values, InpaintOperator op,
               const SolveConfig &cfg = {}, SolveStats *stats = nullptr);

/// Solves the transposed system: x with M^T x = rhs, M the inpainting matrix.
/// Needed for the normal equations of tonal optimization.
Raster inpaint_adjoint(const Mask &mask, const Raster &rhs, InpaintOperator op,
                       const SolveConfig &cfg = {}, SolveStats *stats = nullptr);

/// Assembles the inpainting matrix explicitly and solves by dense LU.
/// Capped at N <= 4096 pixels.
Raster dense_oracle_inpaint(const Mask &mask, const Raster &values,
                            InpaintOperator op);
Raster dense_oracle_adjoint(const Mask &mask, const Raster &rhs,
                            InpaintOperator op);

} // namespace dbi
