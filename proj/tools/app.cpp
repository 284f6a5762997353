#include "app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "dbi/baselines.hpp"
#include "dbi/errors.hpp"
#include "dbi/framework.hpp"
#include "dbi/parallel.hpp"
#include "dbi/pnm.hpp"
#include "dbi/report.hpp"
#include "dbi/rng.hpp"
#include "dbi/synthetic.hpp"

namespace dbi::app {

namespace {

using nlohmann::json;

constexpr const char *kToolVersion = "dbi/1";

struct CommonFlags {
  int threads = 0;
  bool verbose = false;
};

void info(const CommonFlags &common, const std::string &msg) {
  if (common.verbose) std::cerr << "[dbi] " << msg << "\n";
}

void write_manifest(const std::string &primary_output, const json &manifest) {
  json full = manifest;
  full["tool"] = kToolVersion;
  write_text_file(primary_output + ".manifest.json", full.dump(2) + "\n");
}

Sampler parse_sampler_for(const std::string &strategy) {
  if (strategy == "ld") return Sampler::LowDiscrepancy;
  if (strategy == "errdiff") return Sampler::ErrorDiffusion;
  return Sampler::Poisson;
}

InpaintOperator parse_operator(const std::string &name) {
  if (name == "harmonic") return InpaintOperator::Harmonic;
  if (name == "biharmonic") return InpaintOperator::Biharmonic;
  throw CLI::ValidationError("--operator", "must be harmonic or biharmonic");
}

int regular_spacing_for_density(double density) {
  const int r = static_cast<int>(std::llround(std::sqrt(1.0 / density)));
  return std::max(1, r);
}

struct DenoiseArgs {
  std::string input, truth, out, report, dump_masks;
  std::string strategy = "random";
  std::string op = "harmonic";
  double density = 0.1;
  int masks = 32;
  bool tonal = false;
  double sigma = 1.0;
  double rho = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  int alpha = 16;
  double rel_tol = 1e-9;
  bool timings = false;
};

int run_denoise(const DenoiseArgs &a, const CommonFlags &common) {
  const Raster loaded = load_pgm(a.input);
  Raster truth_img;
  bool have_truth = false;
  if (!a.truth.empty()) {
    truth_img = load_pgm(a.truth);
    have_truth = true;
  }

  Raster f = loaded;
  if (a.noise > 0.0) {
    f = add_gaussian_noise(loaded, {a.noise, derive_seed(a.seed, 0xA11CE)});
    if (!have_truth) { // the clean input is the reference
      truth_img = loaded;
      have_truth = true;
    }
  }

  DbiPlan plan;
  plan.op = parse_operator(a.op);
  plan.tonal = a.tonal;
  plan.master_seed = a.seed;
  plan.mask_count = a.masks;
  plan.record_timings = a.timings;

  if (a.strategy == "regular") {
    const int r = regular_spacing_for_density(a.density);
    plan.strategy = RegularStrategy{r, r};
    if (a.masks != r * r)
      std::cerr << "[dbi] regular grid r=s=" << r << " forces " << r * r
                << " masks (requested " << a.masks << ")\n";
  } else if (a.strategy == "random") {
    plan.strategy = RandomStrategy{a.density, Sampler::Poisson};
  } else if (a.strategy == "analytic" || a.strategy == "ld" ||
             a.strategy == "errdiff") {
    plan.strategy = AnalyticStrategy{a.sigma, a.rho, a.density,
                                     parse_sampler_for(a.strategy)};
  } else if (a.strategy == "densify") {
    DensificationParams params;
    params.alpha = a.alpha;
    params.target_density = a.density;
    plan.strategy = DensificationStrategy{params};
  } else {
    throw CLI::ValidationError("--strategy",
                               "must be one of regular|random|analytic|ld|"
                               "errdiff|densify");
  }

  SolveConfig cfg;
  cfg.rel_tolerance = a.rel_tol;
  info(common, "running " + a.strategy + " denoising on " + a.input);
  const bool keep_masks = !a.dump_masks.empty();
  const DbiResult result = dbi_denoise(f, plan, cfg,
                                       have_truth ? &truth_img : nullptr,
                                       keep_masks);

  std::vector<std::string> outputs;
  save_pgm(a.out, result.u);
  outputs.push_back(a.out);
  if (!a.report.empty()) {
    write_text_file(a.report, render_denoise_report(result));
    outputs.push_back(a.report);
  }
  if (keep_masks) {
    std::filesystem::create_directories(a.dump_masks);
    for (std::size_t i = 0; i < result.masks.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "mask_%03zu.pbm", i);
      const std::string path =
          (std::filesystem::path(a.dump_masks) / name).string();
      save_pbm(path, result.masks[i]);
      outputs.push_back(path);
    }
    const DensityMap density = strategy_density_map(plan.strategy, f);
    if (density.map.size() > 0) {
      const auto base = std::filesystem::path(a.dump_masks) / "density";
      Raster preview = density.map;
      for (double &v : preview.data()) v *= 255.0;
      save_pgm(base.string() + ".pgm", preview);
      save_raster_f64(base.string() + ".f64", density.map);
      outputs.push_back(base.string() + ".pgm");
      outputs.push_back(base.string() + ".f64");
    }
  }

  json manifest;
  manifest["command"] = "denoise";
  manifest["flags"] = {{"input", a.input},     {"truth", a.truth},
                       {"strategy", a.strategy}, {"density", a.density},
                       {"masks", plan.mask_count}, {"operator", a.op},
                       {"tonal", a.tonal},     {"sigma", a.sigma},
                       {"rho", a.rho},         {"noise", a.noise},
                       {"seed", a.seed},       {"alpha", a.alpha},
                       {"rel_tolerance", a.rel_tol},
                       {"timings", a.timings}};
  manifest["outputs"] = outputs;
  manifest["schema"] = {{"report", "dbi-report/1"}};
  write_manifest(a.out, manifest);

  std::cout << "mse_vs_input=" << format_field(result.mse_vs_input);
  if (have_truth) std::cout << " mse_vs_truth=" << format_field(result.mse_vs_truth);
  std::cout << "\n";
  return 0;
}

struct CalibrateArgs {
  std::string mode = "1d";
  int r_min = 2;
  int r_max = 10;
  std::string signal; // optional PGM row source for 1d mode
  int size = 16;
  std::vector<double> densities = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  long samples = 1024;
  std::uint64_t seed = 0x2D;
  std::string out;
};

int run_calibrate(const CalibrateArgs &a, const CommonFlags &common) {
  json manifest;
  manifest["command"] = "calibrate";
  if (a.mode == "1d") {
    Raster signal;
    if (!a.signal.empty()) {
      const Raster img = load_pgm(a.signal);
      signal = Raster(img.width(), 1);
      const int row = img.height() / 2;
      for (int x = 0; x < img.width(); ++x) signal(x, 0) = img(x, row);
    } else {
      signal = synthetic_image("waves", 256, 1);
    }
    std::vector<int> r_list;
    for (int r = a.r_min; r <= a.r_max; ++r) r_list.push_back(r);
    if (r_list.empty())
      throw CLI::ValidationError("--r-min/--r-max", "empty spacing range");
    info(common, "1-D calibration");
    const auto rows = calibrate_1d(r_list, signal);
    write_text_file(a.out, render_calibrate_1d(rows));
    manifest["flags"] = {{"mode", a.mode},     {"r_min", a.r_min},
                         {"r_max", a.r_max},   {"signal", a.signal},
                         {"out", a.out}};
    manifest["schema"] = {{"report", "dbi-calibrate-1d/1"}};
  } else if (a.mode == "2d") {
    info(common, "2-D calibration");
    const CalibrationResult result =
        calibrate_2d(a.size, a.densities, a.samples, SolveConfig{}, a.seed);
    write_text_file(a.out, render_calibrate_2d(result));
    manifest["flags"] = {{"mode", a.mode},         {"size", a.size},
                         {"densities", a.densities}, {"samples", a.samples},
                         {"seed", a.seed},         {"out", a.out}};
    manifest["schema"] = {{"report", "dbi-calibrate-2d/1"}};
  } else {
    throw CLI::ValidationError("--mode", "must be 1d or 2d");
  }
  manifest["outputs"] = {a.out};
  write_manifest(a.out, manifest);
  return 0;
}

struct BenchArgs {
  std::vector<std::string> images;
  std::vector<double> noise_levels = {20.0};
  std::vector<std::string> methods = {"regular", "random", "analytic"};
  std::vector<double> densities = {0.05, 0.1, 0.2};
  std::vector<double> sigmas = {1.0, 2.0};
  std::vector<double> rhos = {0.0, 1.5};
  std::string op = "harmonic";
  std::string tonal = "off"; // off | on | both
  int masks = 8;
  int alpha = 16;
  bool enable_slow = false;
  std::uint64_t seed = 0;
  double rel_tol = 1e-7;
  std::string out;
};

int run_bench(const BenchArgs &a, const CommonFlags &common) {
  if (a.images.empty())
    throw CLI::ValidationError("--image", "at least one image required");
  if (a.densities.empty() || a.noise_levels.empty() || a.methods.empty())
    throw CLI::ValidationError("bench", "empty parameter grid");
  std::vector<bool> tonal_modes;
  if (a.tonal == "off") tonal_modes = {false};
  else if (a.tonal == "on") tonal_modes = {true};
  else if (a.tonal == "both") tonal_modes = {false, true};
  else throw CLI::ValidationError("--tonal", "must be off|on|both");

  SolveConfig cfg;
  cfg.rel_tolerance = a.rel_tol;
  const InpaintOperator op = parse_operator(a.op);

  std::vector<BenchRow> best_rows;
  for (const std::string &image_path : a.images) {
    const Raster clean = load_pgm(image_path);
    const std::string image_name =
        std::filesystem::path(image_path).stem().string();
    for (double sigma_n : a.noise_levels) {
      const Raster noisy = add_gaussian_noise(
          clean, {sigma_n, derive_seed(a.seed, 0xA11CE)});
      for (const std::string &method : a.methods) {
        if (method == "densify" && !a.enable_slow) {
          info(common, "skipping densify (pass --enable-slow to include)");
          continue;
        }
        for (bool tonal : tonal_modes) {
          BenchRow best;
          best.mse = std::numeric_limits<double>::infinity();
          auto consider = [&](const DbiPlan &plan, double density,
                              double sigma, double rho) {
            const DbiResult r = dbi_denoise(noisy, plan, cfg, &clean);
            if (r.mse_vs_truth < best.mse) {
              best = BenchRow{image_name, sigma_n,  method,
                              a.op,       tonal,    density,
                              sigma,      rho,      plan.mask_count,
                              r.mse_vs_truth};
              if (strategy_period(plan.strategy) > 0)
                best.masks =
                    static_cast<int>(strategy_period(plan.strategy));
            }
          };
          DbiPlan plan;
          plan.op = op;
          plan.tonal = tonal;
          plan.master_seed = a.seed;
          plan.mask_count = a.masks;
          if (method == "regular") {
            for (double d : a.densities) {
              const int r = regular_spacing_for_density(d);
              plan.strategy = RegularStrategy{r, r};
              consider(plan, 1.0 / (double(r) * r), 0.0, 0.0);
            }
          } else if (method == "random") {
            for (double d : a.densities) {
              plan.strategy = RandomStrategy{d, Sampler::Poisson};
              consider(plan, d, 0.0, 0.0);
            }
          } else if (method == "analytic" || method == "ld" ||
                     method == "errdiff") {
            for (double d : a.densities)
              for (double sg : a.sigmas)
                for (double rh : a.rhos) {
                  plan.strategy =
                      AnalyticStrategy{sg, rh, d, parse_sampler_for(method)};
                  consider(plan, d, sg, rh);
                }
          } else if (method == "densify") {
            for (double d : a.densities) {
              DensificationParams params;
              params.alpha = a.alpha;
              params.target_density = d;
              plan.strategy = DensificationStrategy{params};
              consider(plan, d, 0.0, 0.0);
            }
          } else {
            throw CLI::ValidationError("--method",
                                       "unknown method '" + method + "'");
          }
          if (std::isfinite(best.mse)) best_rows.push_back(best);
        }
      }
    }
  }

  write_text_file(a.out, render_bench(best_rows));
  json manifest;
  manifest["command"] = "bench";
  manifest["flags"] = {{"images", a.images},   {"noise", a.noise_levels},
                       {"methods", a.methods}, {"densities", a.densities},
                       {"sigmas", a.sigmas},   {"rhos", a.rhos},
                       {"operator", a.op},     {"tonal", a.tonal},
                       {"masks", a.masks},     {"alpha", a.alpha},
                       {"enable_slow", a.enable_slow}, {"seed", a.seed},
                       {"rel_tolerance", a.rel_tol}};
  manifest["outputs"] = {a.out};
  manifest["schema"] = {{"report", "dbi-bench/1"}};
  write_manifest(a.out, manifest);
  return 0;
}

struct SynthArgs {
  std::string kind = "shapes";
  int width = 256;
  int height = 256;
  std::string out;
};

int run_synth(const SynthArgs &a) {
  save_pgm(a.out, synthetic_image(a.kind, a.width, a.height));
  json manifest;
  manifest["command"] = "synth";
  manifest["flags"] = {{"kind", a.kind},
                       {"width", a.width},
                       {"height", a.height}};
  manifest["outputs"] = {a.out};
  write_manifest(a.out, manifest);
  return 0;
}

} // namespace

int run(const std::vector<std::string> &args) {
  CLI::App app{"Denoising by sparse inpainting: averaging, mask optimization, "
               "tonal optimization, diffusion baselines"};
  app.require_subcommand(1);

  CommonFlags common;
  app.add_option("--threads", common.threads,
                 "worker thread cap (default: available cores)");
  app.add_flag("--verbose", common.verbose, "progress log on stderr");

  DenoiseArgs dn;
  CLI::App *denoise = app.add_subcommand("denoise", "run the averaging pipeline");
  denoise->add_option("--input", dn.input, "noisy (or clean, with --noise) PGM")
      ->required();
  denoise->add_option("--truth", dn.truth, "ground-truth PGM for MSE columns");
  denoise->add_option("--strategy", dn.strategy,
                      "regular|random|analytic|ld|errdiff|densify");
  denoise->add_option("--density", dn.density, "target mask density in (0,1]");
  denoise->add_option("--masks", dn.masks, "number of masks to average");
  denoise->add_option("--operator", dn.op, "harmonic|biharmonic");
  denoise->add_flag("--tonal", dn.tonal, "least-squares gray value optimization");
  denoise->add_option("--sigma", dn.sigma, "pre-smoothing of the guidance image");
  denoise->add_option("--rho", dn.rho, "post-smoothing of the density map");
  denoise->add_option("--noise", dn.noise, "add Gaussian noise of this sigma first");
  denoise->add_option("--seed", dn.seed, "master seed")->envname("DBI_SEED");
  denoise->add_option("--alpha", dn.alpha, "densification candidates per step");
  denoise->add_option("--rel-tol", dn.rel_tol, "solver residual reduction");
  denoise->add_option("--out", dn.out, "output PGM")->required();
  denoise->add_option("--report", dn.report, "per-mask CSV report");
  denoise->add_option("--dump-masks", dn.dump_masks, "directory for mask PBMs");
  denoise->add_flag("--timings", dn.timings,
                    "record wall times in the report (breaks bit-identical "
                    "reruns)");

  CalibrateArgs cal;
  CLI::App *calibrate =
      app.add_subcommand("calibrate", "density/diffusion-time calibration");
  calibrate->add_option("--mode", cal.mode, "1d|2d")->required();
  calibrate->add_option("--r-min", cal.r_min, "smallest spacing (1d)");
  calibrate->add_option("--r-max", cal.r_max, "largest spacing (1d)");
  calibrate->add_option("--signal", cal.signal,
                        "PGM whose middle row is the 1-D test signal");
  calibrate->add_option("--size", cal.size, "grid side length (2d, size^2 <= 4096)");
  calibrate->add_option("--densities", cal.densities, "density list (2d)");
  calibrate->add_option("--samples", cal.samples, "sampled masks per density (2d)");
  calibrate->add_option("--seed", cal.seed, "sampling seed (2d)")
      ->envname("DBI_SEED");
  calibrate->add_option("--out", cal.out, "output CSV")->required();

  BenchArgs bench_args;
  CLI::App *bench = app.add_subcommand("bench", "grid-search MSE tables");
  bench->add_option("--image", bench_args.images, "clean input PGM (repeatable)")
      ->required();
  bench->add_option("--noise", bench_args.noise_levels, "noise sigmas");
  bench->add_option("--method", bench_args.methods,
                    "regular|random|analytic|ld|errdiff|densify (repeatable)");
  bench->add_option("--densities", bench_args.densities, "density grid");
  bench->add_option("--sigmas", bench_args.sigmas, "pre-smoothing grid");
  bench->add_option("--rhos", bench_args.rhos, "post-smoothing grid");
  bench->add_option("--operator", bench_args.op, "harmonic|biharmonic");
  bench->add_option("--tonal", bench_args.tonal, "off|on|both");
  bench->add_option("--masks", bench_args.masks, "masks per run");
  bench->add_option("--alpha", bench_args.alpha, "densification candidates");
  bench->add_flag("--enable-slow", bench_args.enable_slow,
                  "include the densification method");
  bench->add_option("--seed", bench_args.seed, "master seed")
      ->envname("DBI_SEED");
  bench->add_option("--rel-tol", bench_args.rel_tol, "solver tolerance");
  bench->add_option("--out", bench_args.out, "output CSV")->required();

  SynthArgs synth_args;
  CLI::App *synth = app.add_subcommand("synth", "write a procedural test image");
  synth->add_option("--kind", synth_args.kind, "shapes|waves|blobs|ramp|step");
  synth->add_option("--width", synth_args.width, "pixels");
  synth->add_option("--height", synth_args.height, "pixels");
  synth->add_option("--out", synth_args.out, "output PGM")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  set_default_threads(common.threads);
  try {
    if (denoise->parsed()) return run_denoise(dn, common);
    if (calibrate->parsed()) return run_calibrate(cal, common);
    if (bench->parsed()) return run_bench(bench_args, common);
    if (synth->parsed()) return run_synth(synth_args);
  } catch (const CLI::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError &e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

} // namespace dbi::app
