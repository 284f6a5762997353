#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dbi/inpaint.hpp"
#include "dbi/masks.hpp"
#include "dbi/raster.hpp"
#include "dbi/tonal.hpp"

namespace dbi {

enum class Sampler { Poisson, LowDiscrepancy, ErrorDiffusion };

const char *to_string(Sampler s);

/// Shifted regular grids; the mask count is forced to r*s.
struct RegularStrategy {
  int r = 2;
  int s = 2;
};

/// Uniform density map, binarized by the chosen sampler.
struct RandomStrategy {
  double density = 0.1;
  Sampler sampler = Sampler::Poisson;
};

/// Edge-adaptive density map (smoothed Laplacian magnitude), binarized by
/// the chosen sampler.
struct AnalyticStrategy {
  double sigma = 1.0;
  double rho = 0.0;
  double density = 0.1;
  Sampler sampler = Sampler::Poisson;
};

struct DensificationStrategy {
  DensificationParams params;
};

using MaskStrategy = std::variant<RegularStrategy, RandomStrategy,
                                  AnalyticStrategy, DensificationStrategy>;

/// Number of distinct masks a strategy can produce (0 = unlimited).
std::size_t strategy_period(const MaskStrategy &strategy);

/// Mask `index` of the strategy's sequence. Seeded strategies use
/// derive_seed(master_seed, index); the low-discrepancy sampler uses the
/// index itself. The density map for density-based strategies can be
/// precomputed once with strategy_density_map and passed in.
Mask strategy_mask(const MaskStrategy &strategy, const Raster &f,
                   const DensityMap *density, std::size_t index,
                   std::uint64_t master_seed, InpaintOperator op,
                   const SolveConfig &cfg);

/// Density map backing the strategy, or an empty map for strategies that do
/// not sample from one (regular, densification).
DensityMap strategy_density_map(const MaskStrategy &strategy, const Raster &f);

struct DbiPlan {
  MaskStrategy strategy;
  int mask_count = 32;
  bool tonal = false;
  InpaintOperator op = InpaintOperator::Harmonic;
  std::uint64_t master_seed = 0;
  TonalConfig tonal_cfg{};
  bool record_timings = false; // wall_ms stays 0 unless enabled
};

struct MaskReport {
  int index = 0;
  double density = 0.0;
  double mask_mse_vs_input = 0.0; // at mask pixels, against the noisy input
  double mask_mse_vs_truth = 0.0; // at mask pixels, against ground truth (nan if absent)
  long iterations = 0;
  double wall_ms = 0.0;
};

struct DbiResult {
  Raster u;
  std::vector<MaskReport> reports;
  double mse_vs_input = 0.0;
  double mse_vs_truth = 0.0; // nan when no ground truth was given
  std::vector<Mask> masks;   // filled only when keep_masks is set
};

/// The averaging pipeline: generate mask_count masks per the strategy,
/// optionally tonal-optimize the gray values per mask, inpaint, and average
/// pixelwise. Deterministic given (plan, master_seed), independent of the
/// worker count.
DbiResult dbi_denoise(const Raster &f, const DbiPlan &plan,
                      const SolveConfig &cfg = {},
                      const Raster *truth = nullptr, bool keep_masks = false);

/// Monte-Carlo estimate of E[r(c,f)] from big_n strategy samples, harmonic
/// operator. When variance is non-null it receives the per-pixel population
/// variance of the individual reconstructions.
Raster estimate_expectation(const Raster &f, const MaskStrategy &strategy,
                            long big_n, std::uint64_t seed,
                            const SolveConfig &cfg = {},
                            Raster *variance = nullptr);

struct ConvergencePoint {
  long n = 0;
  double rmse = 0.0;
  double corrected_rmse = 0.0; // reference error removed in quadrature
};

struct ConvergenceFit {
  double slope = 0.0;
  bool degenerate = false; // all RMSE ~ 0 (deterministic strategy)
  double reference_error = 0.0;
  std::vector<ConvergencePoint> points;
};

/// Least-squares slope of log RMSE(u_n, reference) against log n. The
/// reference uses 16x the largest n; its own Monte-Carlo error is estimated
/// and subtracted in quadrature before fitting.
ConvergenceFit measure_convergence(const Raster &f,
                                   const MaskStrategy &strategy,
                                   const std::vector<long> &n_list,
                                   std::uint64_t seed,
                                   const SolveConfig &cfg = {});

struct Calibration1dRow {
  int r = 0;
  double density = 0.0;
  double time = 0.0;            // (1 - d^2) / (12 d^2)
  std::vector<double> kernel;   // empirical averaged-filter kernel, width 2r-1
  double kernel_error = 0.0;    // max |empirical - hat|
  double l2_rel_diff = 0.0;     // averaged filter vs explicit diffusion at T
};

/// For each spacing r: averages the r shifted-mask inpaintings of the signal,
/// extracts the induced convolution kernel from an impulse response, and
/// compares the filtered signal against explicit homogeneous diffusion run
/// to T = (1-d^2)/(12 d^2).
std::vector<Calibration1dRow> calibrate_1d(const std::vector<int> &r_list,
                                           const Raster &signal);

struct CalibrationResult {
  std::vector<double> densities;
  std::vector<double> times;   // fitted T(d)
  double beta = 0.0;
  double gamma = 0.0;
  double fit_residual = 0.0;   // RMS residual of the log-space fit
};

/// Tabulates T(d) = argmin_T || A_dbi(d) - (I + T L)^{-1} ||_F^2 on a
/// size x size grid (dense, capped at 4096 pixels), where A_dbi(d) is the
/// averaged inpainting matrix over `samples` uniform-density masks, then
/// fits T(d) ~ (1 - d^gamma) / (beta * d^gamma) in log space.
CalibrationResult calibrate_2d(int size, const std::vector<double> &densities,
                               long samples, const SolveConfig &cfg = {},
                               std::uint64_t seed = 0x2Du);

} // namespace dbi
