#pragma once

#include <string>

#include "dbi/framework.hpp"

namespace dbi {

// Versioned CSV schemas. Formatting is pinned: fixed six decimals, '.'
// separator, '\n' line endings, empty field for missing ground truth.
inline constexpr const char *kDenoiseReportSchema = "# dbi-report/1";
inline constexpr const char *kDenoiseReportHeader =
    "type,index,density,mse_vs_f,mse_vs_fr,iterations,wall_ms";
inline constexpr const char *kCalibrate1dSchema = "# dbi-calibrate-1d/1";
inline constexpr const char *kCalibrate1dHeader =
    "r,density,T,kernel_max_abs_error,l2_rel_diff";
inline constexpr const char *kCalibrate2dSchema = "# dbi-calibrate-2d/1";
inline constexpr const char *kCalibrate2dHeader =
    "density,T,beta,gamma,fit_residual";
inline constexpr const char *kBenchSchema = "# dbi-bench/1";
inline constexpr const char *kBenchHeader =
    "image,sigma_n,method,operator,tonal,density,sigma,rho,masks,mse";

/// Fixed-point decimal with 6 digits; NaN renders as the empty field.
std::string format_field(double v);

std::string render_denoise_report(const DbiResult &result);
std::string render_calibrate_1d(const std::vector<Calibration1dRow> &rows);
std::string render_calibrate_2d(const CalibrationResult &result);

struct BenchRow {
  std::string image;
  double sigma_n = 0.0;
  std::string method;
  std::string op;
  bool tonal = false;
  double density = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  int masks = 0;
  double mse = 0.0;
};

std::string render_bench(const std::vector<BenchRow> &rows);

void write_text_file(const std::string &path, const std::string &content);

} // namespace dbi
