#include "dbi/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbi/errors.hpp"

namespace dbi {

std::string format_field(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string render_denoise_report(const DbiResult &result) {
  std::ostringstream out;
  out << kDenoiseReportSchema << "\n" << kDenoiseReportHeader << "\n";
  long total_iters = 0;
  double total_ms = 0.0;
  double density_sum = 0.0;
  for (const MaskReport &r : result.reports) {
    out << "mask," << r.index << "," << format_field(r.density) << ","
        << format_field(r.mask_mse_vs_input) << ","
        << format_field(r.mask_mse_vs_truth) << "," << r.iterations << ","
        << format_field(r.wall_ms) << "\n";
    total_iters += r.iterations;
    total_ms += r.wall_ms;
    density_sum += r.density;
  }
  const double mean_density =
      result.reports.empty() ? 0.0
                             : density_sum / double(result.reports.size());
  out << "summary," << result.reports.size() << ","
      << format_field(mean_density) << "," << format_field(result.mse_vs_input)
      << "," << format_field(result.mse_vs_truth) << "," << total_iters << ","
      << format_field(total_ms) << "\n";
  return out.str();
}

std::string render_calibrate_1d(const std::vector<Calibration1dRow> &rows) {
  std::ostringstream out;
  out << kCalibrate1dSchema << "\n" << kCalibrate1dHeader << "\n";
  for (const auto &row : rows) {
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", row.kernel_error);
    out << row.r << "," << format_field(row.density) << ","
        << format_field(row.time) << "," << err << ","
        << format_field(row.l2_rel_diff) << "\n";
  }
  return out.str();
}

std::string render_calibrate_2d(const CalibrationResult &result) {
  std::ostringstream out;
  out << kCalibrate2dSchema << "\n" << kCalibrate2dHeader << "\n";
  for (std::size_t i = 0; i < result.densities.size(); ++i) {
    out << format_field(result.densities[i]) << ","
        << format_field(result.times[i]) << "," << format_field(result.beta)
        << "," << format_field(result.gamma) << ","
        << format_field(result.fit_residual) << "\n";
  }
  return out.str();
}

std::string render_bench(const std::vector<BenchRow> &rows) {
  std::ostringstream out;
  out << kBenchSchema << "\n" << kBenchHeader << "\n";
  for (const auto &r : rows) {
    out << r.image << "," << format_field(r.sigma_n) << "," << r.method << ","
        << r.op << "," << (r.tonal ? 1 : 0) << "," << format_field(r.density)
        << "," << format_field(r.sigma) << "," << format_field(r.rho) << ","
        << r.masks << "," << format_field(r.mse) << "\n";
  }
  return out.str();
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace dbi
