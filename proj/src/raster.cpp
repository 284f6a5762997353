#include "dbi/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbi/rng.hpp"

namespace dbi {

Raster::Raster(int width, int height, double fill)
    : nx_(width), ny_(height),
      data_(static_cast<std::size_t>(width) * height, fill) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("Raster: width and height must be >= 1");
}

double Raster::mean() const {
  double sum = 0.0;
  for (double v : data_) sum += v;
  return data_.empty() ? 0.0 : sum / static_cast<double>(data_.size());
}

double Raster::min_value() const {
  return *std::min_element(data_.begin(), data_.end());
}

double Raster::max_value() const {
  return *std::max_element(data_.begin(), data_.end());
}

bool Raster::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Mask::Mask(int width, int height, bool fill)
    : nx_(width), ny_(height),
      bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0),
      count_(fill ? static_cast<std::size_t>(width) * height : 0) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("Mask: width and height must be >= 1");
}

void Mask::set(std::size_t i, bool value) {
  const std::uint8_t bit = value ? 1 : 0;
  if (bits_[i] != bit) {
    count_ += value ? 1 : -1;
    bits_[i] = bit;
  }
}

std::vector<std::uint32_t> Mask::set_indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

void apply_neg_laplacian(const Raster &f, Raster &out) {
  const int nx = f.width();
  const int ny = f.height();
  if (!out.same_shape(f)) out = Raster(nx, ny);
  const double *src = f.data().data();
  double *dst = out.data().data();
  for (int x = 0; x < nx; ++x) {
    const double *col = src + static_cast<std::size_t>(x) * ny;
    const double *left = x > 0 ? col - ny : nullptr;
    const double *right = x < nx - 1 ? col + ny : nullptr;
    double *o = dst + static_cast<std::size_t>(x) * ny;
    for (int y = 0; y < ny; ++y) {
      const double c = col[y];
      double acc = 0.0;
      if (left) acc += c - left[y];
      if (right) acc += c - right[y];
      if (y > 0) acc += c - col[y - 1];
      if (y < ny - 1) acc += c - col[y + 1];
      o[y] = acc;
    }
  }
}

Raster apply_neg_laplacian(const Raster &f) {
  Raster out(f.width(), f.height());
  apply_neg_laplacian(f, out);
  return out;
}

Raster apply_bilaplacian(const Raster &f) {
  Raster tmp(f.width(), f.height());
  Raster out(f.width(), f.height());
  apply_neg_laplacian(f, tmp);
  apply_neg_laplacian(tmp, out);
  return out;
}

namespace {

// Half-sample mirroring: index -1 maps to 0, n maps to n-1. This extension
// makes the convolution operator symmetric, which keeps the mean exact.
int mirror_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double &w : k) w /= sum;
  return k;
}

} // namespace

Raster gaussian_convolve(const Raster &f, double sigma) {
  if (sigma < 0.0)
    throw std::invalid_argument("gaussian_convolve: sigma must be >= 0");
  if (sigma == 0.0) return f;
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int nx = f.width();
  const int ny = f.height();

  Raster tmp(nx, ny);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += kernel[t + radius] * f(mirror_index(x + t, nx), y);
      tmp(x, y) = acc;
    }
  }
  Raster out(nx, ny);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += kernel[t + radius] * tmp(x, mirror_index(y + t, ny));
      out(x, y) = acc;
    }
  }
  return out;
}

Raster add_gaussian_noise(const Raster &f, const NoiseSpec &spec) {
  if (spec.sigma_n < 0.0)
    throw std::invalid_argument("add_gaussian_noise: sigma_n must be >= 0");
  if (spec.sigma_n == 0.0) return f;
  Raster out = f;
  SplitMix64 rng(spec.seed);
  for (double &v : out.data()) v += spec.sigma_n * rng.normal();
  return out;
}

double mse(const Raster &a, const Raster &b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("mse: rasters differ in shape");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double mse_on_mask(const Raster &a, const Raster &b, const Mask &m) {
  if (!a.same_shape(b) || !m.same_shape(a))
    throw std::invalid_argument("mse_on_mask: shapes differ");
  if (m.empty())
    throw std::invalid_argument("mse_on_mask: empty mask");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!m.test(i)) continue;
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(m.count());
}

} // namespace dbi
