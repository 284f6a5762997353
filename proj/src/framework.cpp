#include "dbi/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "dbi/baselines.hpp"
#include "dbi/errors.hpp"
#include "dbi/parallel.hpp"
#include "dbi/rng.hpp"
#include "dense_util.hpp"

namespace dbi {

const char *to_string(Sampler s) {
  switch (s) {
    case Sampler::Poisson: return "poisson";
    case Sampler::LowDiscrepancy: return "ld";
    case Sampler::ErrorDiffusion: return "errdiff";
  }
  return "?";
}

std::size_t strategy_period(const MaskStrategy &strategy) {
  if (const auto *reg = std::get_if<RegularStrategy>(&strategy))
    return static_cast<std::size_t>(reg->r) * reg->s;
  return 0;
}

DensityMap strategy_density_map(const MaskStrategy &strategy, const Raster &f) {
  if (const auto *rnd = std::get_if<RandomStrategy>(&strategy)) {
    DensityMap d;
    d.map = Raster(f.width(), f.height(), rnd->density);
    d.target_density = rnd->density;
    return d;
  }
  if (const auto *ana = std::get_if<AnalyticStrategy>(&strategy))
    return analytic_density(f, ana->sigma, ana->rho, ana->density);
  return {};
}

namespace {

Mask sampled_mask(const DensityMap &density, Sampler sampler,
                  std::size_t index, std::uint64_t master_seed) {
  switch (sampler) {
    case Sampler::Poisson:
      return poisson_sample(density, derive_seed(master_seed, index));
    case Sampler::LowDiscrepancy:
      return ld_sample(density, index);
    case Sampler::ErrorDiffusion:
      return error_diffusion_sample(density, derive_seed(master_seed, index))
          .mask;
  }
  throw std::invalid_argument("unknown sampler");
}

} // namespace

Mask strategy_mask(const MaskStrategy &strategy, const Raster &f,
                   const DensityMap *density, std::size_t index,
                   std::uint64_t master_seed, InpaintOperator op,
                   const SolveConfig &cfg) {
  if (const auto *reg = std::get_if<RegularStrategy>(&strategy)) {
    const std::size_t period = static_cast<std::size_t>(reg->r) * reg->s;
    const auto grid = regular_masks({reg->r, reg->s}, f.width(), f.height());
    return grid[index % period];
  }
  if (const auto *dens = std::get_if<DensificationStrategy>(&strategy)) {
    DensificationParams params = dens->params;
    params.seed = derive_seed(master_seed, index);
    return densify(f, params, op, cfg);
  }
  DensityMap local;
  if (!density) {
    local = strategy_density_map(strategy, f);
    density = &local;
  }
  if (const auto *rnd = std::get_if<RandomStrategy>(&strategy))
    return sampled_mask(*density, rnd->sampler, index, master_seed);
  const auto &ana = std::get<AnalyticStrategy>(strategy);
  return sampled_mask(*density, ana.sampler, index, master_seed);
}

namespace {

constexpr std::size_t kPipelineBlock = 16;

struct PerMask {
  Raster v;
  Mask mask;
  MaskReport report;
};

PerMask run_pipeline(const Raster &f, const DbiPlan &plan,
                     const DensityMap *density, std::size_t index,
                     const SolveConfig &cfg, const Raster *truth) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  PerMask out;
  out.mask = strategy_mask(plan.strategy, f, density, index, plan.master_seed,
                           plan.op, cfg);
  Raster values = f;
  long iterations = 0;
  if (plan.tonal) {
    TonalStats tstats;
    values = tonal_optimize(out.mask, f, plan.op, plan.tonal_cfg, cfg, &tstats);
    iterations += tstats.iterations;
  }
  SolveStats sstats;
  out.v = inpaint(out.mask, values, plan.op, cfg, &sstats);
  if (!sstats.converged)
    throw NumericError("dbi_denoise: inpainting solve did not converge");
  iterations += sstats.iterations;

  out.report.index = static_cast<int>(index);
  out.report.density = out.mask.density();
  out.report.mask_mse_vs_input = mse_on_mask(out.v, f, out.mask);
  out.report.mask_mse_vs_truth =
      truth ? mse_on_mask(out.v, *truth, out.mask)
            : std::numeric_limits<double>::quiet_NaN();
  out.report.iterations = iterations;
  if (plan.record_timings) {
    const auto t1 = clock::now();
    out.report.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return out;
}

} // namespace

DbiResult dbi_denoise(const Raster &f, const DbiPlan &plan,
                      const SolveConfig &cfg, const Raster *truth,
                      bool keep_masks) {
  if (plan.mask_count < 1)
    throw std::invalid_argument("dbi_denoise: mask_count must be >= 1");
  if (truth && !truth->same_shape(f))
    throw std::invalid_argument("dbi_denoise: truth shape mismatch");

  std::size_t n = static_cast<std::size_t>(plan.mask_count);
  const std::size_t period = strategy_period(plan.strategy);
  if (period > 0) n = period; // regular grids: the shifts are the mask set

  const DensityMap density = strategy_density_map(plan.strategy, f);
  const DensityMap *density_ptr = density.map.size() > 0 ? &density : nullptr;

  DbiResult result;
  result.reports.resize(n);
  if (keep_masks) result.masks.resize(n);

  // Pixels contained in every mask stay interpolated; track the
  // intersection so averaging reproduces them exactly.
  Mask all_set(f.width(), f.height(), true);
  std::mutex intersect_mutex;

  result.u = block_mean_raster(
      n, kPipelineBlock,
      [&](std::size_t index) {
        PerMask pm = run_pipeline(f, plan, density_ptr, index, cfg, truth);
        result.reports[index] = pm.report;
        {
          std::lock_guard<std::mutex> lock(intersect_mutex);
          for (std::size_t i = 0; i < all_set.size(); ++i)
            if (!pm.mask.test(i)) all_set.set(i, false);
        }
        if (keep_masks) result.masks[index] = pm.mask;
        return std::move(pm.v);
      });

  if (!plan.tonal && !all_set.empty())
    for (std::size_t i = 0; i < f.size(); ++i)
      if (all_set.test(i)) result.u[i] = f[i];

  result.mse_vs_input = mse(result.u, f);
  result.mse_vs_truth = truth ? mse(result.u, *truth)
                              : std::numeric_limits<double>::quiet_NaN();
  return result;
}

Raster estimate_expectation(const Raster &f, const MaskStrategy &strategy,
                            long big_n, std::uint64_t seed,
                            const SolveConfig &cfg, Raster *variance) {
  if (big_n < 1)
    throw std::invalid_argument("estimate_expectation: big_n must be >= 1");
  const DensityMap density = strategy_density_map(strategy, f);
  const DensityMap *density_ptr = density.map.size() > 0 ? &density : nullptr;

  Raster second_moment;
  Raster mean = block_mean_raster2(
      static_cast<std::size_t>(big_n), kPipelineBlock,
      [&](std::size_t index) {
        const Mask m = strategy_mask(strategy, f, density_ptr, index, seed,
                                     InpaintOperator::Harmonic, cfg);
        return inpaint(m, f, InpaintOperator::Harmonic, cfg);
      },
      second_moment);
  if (variance) {
    *variance = Raster(f.width(), f.height());
    for (std::size_t i = 0; i < mean.size(); ++i)
      (*variance)[i] = std::max(0.0, second_moment[i] - mean[i] * mean[i]);
  }
  return mean;
}

ConvergenceFit measure_convergence(const Raster &f,
                                   const MaskStrategy &strategy,
                                   const std::vector<long> &n_list,
                                   std::uint64_t seed, const SolveConfig &cfg) {
  if (n_list.size() < 4)
    throw std::invalid_argument("measure_convergence: need >= 4 sample counts");
  long max_n = 0;
  for (long n : n_list) {
    if (n < 1) throw std::invalid_argument("measure_convergence: n must be >= 1");
    max_n = std::max(max_n, n);
  }
  const long big_n = 16 * max_n;

  // Reference plus an estimate of its own error from the two half-averages:
  // for seeded samplers the halves are independent (quarter of the squared
  // gap is the i.i.d. reference variance); for the low-discrepancy sequence
  // both halves track the limit at the sequence's own rate, so the estimate
  // stays rate-consistent instead of assuming Monte-Carlo scaling.
  const std::uint64_t ref_seed = derive_seed(seed, 0xA001);
  const DensityMap ref_density = strategy_density_map(strategy, f);
  const DensityMap *ref_density_ptr =
      ref_density.map.size() > 0 ? &ref_density : nullptr;

  struct RefAccum {
    Raster sum, sum_first, sum_second;
  };
  const std::size_t ref_block = 64;
  const std::size_t ref_blocks =
      (static_cast<std::size_t>(big_n) + ref_block - 1) / ref_block;
  std::vector<RefAccum> accums(ref_blocks);
  parallel_for(ref_blocks, [&](std::size_t b) {
    RefAccum acc{Raster(f.width(), f.height(), 0.0),
                 Raster(f.width(), f.height(), 0.0),
                 Raster(f.width(), f.height(), 0.0)};
    const std::size_t lo = b * ref_block;
    const std::size_t hi =
        std::min<std::size_t>(static_cast<std::size_t>(big_n), lo + ref_block);
    for (std::size_t index = lo; index < hi; ++index) {
      const Mask m = strategy_mask(strategy, f, ref_density_ptr, index,
                                   ref_seed, InpaintOperator::Harmonic, cfg);
      const Raster v = inpaint(m, f, InpaintOperator::Harmonic, cfg);
      Raster &half = index < static_cast<std::size_t>(big_n) / 2
                         ? acc.sum_first
                         : acc.sum_second;
      for (std::size_t i = 0; i < v.size(); ++i) {
        acc.sum[i] += v[i];
        half[i] += v[i];
      }
    }
    accums[b] = std::move(acc);
  });
  Raster reference(f.width(), f.height(), 0.0);
  Raster half_first(f.width(), f.height(), 0.0);
  Raster half_second(f.width(), f.height(), 0.0);
  for (const RefAccum &acc : accums)
    for (std::size_t i = 0; i < reference.size(); ++i) {
      reference[i] += acc.sum[i];
      half_first[i] += acc.sum_first[i];
      half_second[i] += acc.sum_second[i];
    }
  double ref_err_sq = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    reference[i] /= static_cast<double>(big_n);
    half_first[i] /= static_cast<double>(big_n / 2);
    half_second[i] /= static_cast<double>(big_n - big_n / 2);
    const double gap = half_first[i] - half_second[i];
    ref_err_sq += 0.25 * gap * gap;
  }
  ref_err_sq /= static_cast<double>(reference.size());

  // prefix averages of an independent stream
  const std::uint64_t est_seed = derive_seed(seed, 0xB002);
  const DensityMap density = strategy_density_map(strategy, f);
  const DensityMap *density_ptr = density.map.size() > 0 ? &density : nullptr;

  std::vector<Raster> samples(static_cast<std::size_t>(max_n));
  parallel_for(static_cast<std::size_t>(max_n), [&](std::size_t index) {
    const Mask m = strategy_mask(strategy, f, density_ptr, index, est_seed,
                                 InpaintOperator::Harmonic, cfg);
    samples[index] = inpaint(m, f, InpaintOperator::Harmonic, cfg);
  });

  ConvergenceFit fit;
  fit.reference_error = std::sqrt(ref_err_sq);
  std::vector<long> sorted = n_list;
  std::sort(sorted.begin(), sorted.end());
  Raster sum(f.width(), f.height(), 0.0);
  long consumed = 0;
  for (long n : sorted) {
    while (consumed < n) {
      const Raster &s = samples[static_cast<std::size_t>(consumed)];
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
      ++consumed;
    }
    Raster u_n(f.width(), f.height());
    for (std::size_t i = 0; i < sum.size(); ++i)
      u_n[i] = sum[i] / static_cast<double>(n);
    ConvergencePoint pt;
    pt.n = n;
    pt.rmse = std::sqrt(mse(u_n, reference));
    // never let the correction wipe out a point entirely
    pt.corrected_rmse = std::sqrt(std::max(pt.rmse * pt.rmse - ref_err_sq,
                                           1e-4 * pt.rmse * pt.rmse));
    fit.points.push_back(pt);
  }

  double ref_scale = 1.0;
  for (std::size_t i = 0; i < reference.size(); ++i)
    ref_scale = std::max(ref_scale, std::abs(reference[i]));
  bool all_zero = true;
  for (const auto &pt : fit.points)
    if (pt.rmse > 1e-10 * ref_scale) all_zero = false;
  if (all_zero) {
    fit.degenerate = true;
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }

  // least squares on (log n, log rmse)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (const auto &pt : fit.points) {
    const double y_val = std::max(pt.corrected_rmse, 1e-300);
    const double x = std::log(static_cast<double>(pt.n));
    const double y = std::log(y_val);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  return fit;
}

std::vector<Calibration1dRow> calibrate_1d(const std::vector<int> &r_list,
                                           const Raster &signal) {
  if (signal.height() != 1)
    throw std::invalid_argument("calibrate_1d: signal must be a single row");

  SolveConfig dense_cfg;
  dense_cfg.use_dense_oracle = true;

  std::vector<Calibration1dRow> rows;
  for (int r : r_list) {
    if (r < 1) throw std::invalid_argument("calibrate_1d: r must be >= 1");
    Calibration1dRow row;
    row.r = r;
    row.density = 1.0 / r;
    row.time = (1.0 - row.density * row.density) /
               (12.0 * row.density * row.density);

    // averaged shifted-mask filter applied to an impulse: read the kernel
    const int probe_len = std::max(8 * r + 1, 33);
    Raster impulse(probe_len, 1, 0.0);
    const int center = probe_len / 2;
    impulse(center, 0) = 1.0;
    Raster response(probe_len, 1, 0.0);
    const auto shift_masks = regular_masks({r, 1}, probe_len, 1);
    for (const Mask &m : shift_masks) {
      const Raster v = inpaint(m, impulse, InpaintOperator::Harmonic, dense_cfg);
      for (int x = 0; x < probe_len; ++x) response(x, 0) += v(x, 0) / r;
    }
    row.kernel.assign(2 * r - 1, 0.0);
    double err = 0.0;
    for (int x = 0; x < probe_len; ++x) {
      const int offset = x - center;
      // hat kernel: weight (r - |offset|) / r^2 inside the support
      const double expected =
          std::abs(offset) < r
              ? static_cast<double>(r - std::abs(offset)) / (r * r)
              : 0.0;
      err = std::max(err, std::abs(response(x, 0) - expected));
      if (std::abs(offset) < r)
        row.kernel[static_cast<std::size_t>(offset + r - 1)] = response(x, 0);
    }
    row.kernel_error = err;

    // filter the signal and compare against explicit diffusion at T
    Raster filtered(signal.width(), 1, 0.0);
    const auto masks = regular_masks({r, 1}, signal.width(), 1);
    for (const Mask &m : masks) {
      const Raster v = inpaint(m, signal, InpaintOperator::Harmonic, dense_cfg);
      for (int x = 0; x < signal.width(); ++x) filtered(x, 0) += v(x, 0) / r;
    }
    DiffusionParams dp;
    dp.total_time = row.time;
    dp.tau = 0.25;
    const Raster diffused = homogeneous_diffusion(signal, dp);
    double num = 0.0, den = 0.0;
    for (int x = 0; x < signal.width(); ++x) {
      const double d = filtered(x, 0) - diffused(x, 0);
      num += d * d;
      den += diffused(x, 0) * diffused(x, 0);
    }
    row.l2_rel_diff = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// || A - (I + T L)^{-1} ||_F^2
double hd_mismatch(const Eigen::MatrixXd &a_dbi, const Eigen::MatrixXd &L,
                   double T) {
  const Eigen::Index n = a_dbi.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + T * L;
  Eigen::MatrixXd a_hd =
      Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(
          Eigen::MatrixXd::Identity(n, n));
  return (a_dbi - a_hd).squaredNorm();
}

double best_diffusion_time(const Eigen::MatrixXd &a_dbi,
                           const Eigen::MatrixXd &L) {
  // coarse scan, then golden-section refinement on the bracketing interval
  const double t_max = 200.0;
  const int coarse = 40;
  double best_t = 0.0;
  double best_v = hd_mismatch(a_dbi, L, 0.0);
  for (int i = 1; i <= coarse; ++i) {
    // geometric spacing resolves the small-T region
    const double t = t_max * std::pow(1.0 / 4000.0, 1.0 - i / double(coarse));
    const double v = hd_mismatch(a_dbi, L, t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t / 1.5);
  double hi = std::min(t_max, std::max(best_t * 1.5, 1e-2));
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = hd_mismatch(a_dbi, L, c);
  double fd = hd_mismatch(a_dbi, L, d);
  for (int it = 0; it < 70 && (b - a) > 1e-9; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = hd_mismatch(a_dbi, L, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = hd_mismatch(a_dbi, L, d);
    }
  }
  const double t_ref = 0.5 * (a + b);
  return hd_mismatch(a_dbi, L, t_ref) < best_v ? t_ref : best_t;
}

} // namespace

CalibrationResult calibrate_2d(int size, const std::vector<double> &densities,
                               long samples, const SolveConfig &cfg,
                               std::uint64_t seed) {
  (void)cfg;
  if (size < 2 || static_cast<long>(size) * size > 4096)
    throw std::invalid_argument("calibrate_2d: size*size must be in [4,4096]");
  if (samples < 1)
    throw std::invalid_argument("calibrate_2d: samples must be >= 1");
  if (densities.empty())
    throw std::invalid_argument("calibrate_2d: empty density list");

  const Eigen::Index n = static_cast<Eigen::Index>(size) * size;
  const Eigen::SparseMatrix<double> l_sparse =
      detail::sparse_neg_laplacian(size, size);
  const Eigen::MatrixXd L = Eigen::MatrixXd(l_sparse);

  CalibrationResult result;
  result.densities = densities;
  result.times.resize(densities.size());

  for (std::size_t di = 0; di < densities.size(); ++di) {
    const double d = densities[di];
    if (!(d > 0.0 && d <= 1.0))
      throw std::invalid_argument("calibrate_2d: densities must be in (0,1]");
    DensityMap map;
    map.map = Raster(size, size, d);
    map.target_density = d;
    const std::uint64_t density_seed = derive_seed(seed, di);

    // E[ M^{-1} C ] over sampled masks, accumulated in fixed blocks
    const std::size_t blocks = 32;
    const std::size_t per_block =
        (static_cast<std::size_t>(samples) + blocks - 1) / blocks;
    std::vector<Eigen::MatrixXd> block_sums(blocks);
    parallel_for(blocks, [&](std::size_t b) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
      const std::size_t lo = b * per_block;
      const std::size_t hi =
          std::min<std::size_t>(samples, lo + per_block);
      for (std::size_t s = lo; s < hi; ++s) {
        const Mask mask = poisson_sample(map, derive_seed(density_seed, s));
        const Eigen::MatrixXd M =
            detail::dense_inpainting_matrix(mask, l_sparse);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        const auto set = mask.set_indices();
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, set.size());
        for (std::size_t k = 0; k < set.size(); ++k) rhs(set[k], k) = 1.0;
        const Eigen::MatrixXd cols = lu.solve(rhs);
        for (std::size_t k = 0; k < set.size(); ++k)
          acc.col(set[k]) += cols.col(static_cast<Eigen::Index>(k));
      }
      block_sums[b] = std::move(acc);
    });
    Eigen::MatrixXd a_dbi = Eigen::MatrixXd::Zero(n, n);
    for (const auto &bs : block_sums) a_dbi += bs;
    a_dbi /= static_cast<double>(samples);

    result.times[di] = d >= 1.0 ? 0.0 : best_diffusion_time(a_dbi, L);
  }

  // fit T(d) ~ (1 - d^gamma) / (beta d^gamma) in log space; for a fixed
  // gamma the optimal log(beta) is the mean log deviation
  auto fit_residual = [&](double gamma, double *log_beta_out) {
    double acc = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
      const double d = densities[i];
      const double t = result.times[i];
      if (t <= 0.0 || d >= 1.0) continue;
      acc += std::log((1.0 - std::pow(d, gamma)) / std::pow(d, gamma)) -
             std::log(t);
      ++m;
    }
    const double log_beta = m > 0 ? acc / m : 0.0;
    double rss = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
      const double d = densities[i];
      const double t = result.times[i];
      if (t <= 0.0 || d >= 1.0) continue;
      const double model =
          std::log((1.0 - std::pow(d, gamma)) / std::pow(d, gamma)) - log_beta;
      const double e = model - std::log(t);
      rss += e * e;
    }
    if (log_beta_out) *log_beta_out = log_beta;
    return m > 0 ? std::sqrt(rss / m) : 0.0;
  };

  double best_gamma = 1.0;
  double best_res = std::numeric_limits<double>::infinity();
  for (double gamma = 0.5; gamma <= 3.0 + 1e-12; gamma += 0.01) {
    const double res = fit_residual(gamma, nullptr);
    if (res < best_res) {
      best_res = res;
      best_gamma = gamma;
    }
  }
  // golden-section polish around the grid winner
  double a = std::max(0.4, best_gamma - 0.02);
  double b = std::min(3.1, best_gamma + 0.02);
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double e = a + gr * (b - a);
  double fc = fit_residual(c, nullptr);
  double fe = fit_residual(e, nullptr);
  for (int it = 0; it < 50; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - gr * (b - a);
      fc = fit_residual(c, nullptr);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + gr * (b - a);
      fe = fit_residual(e, nullptr);
    }
  }
  result.gamma = 0.5 * (a + b);
  double log_beta = 0.0;
  result.fit_residual = fit_residual(result.gamma, &log_beta);
  result.beta = std::exp(log_beta);
  return result;
}

} // namespace dbi
