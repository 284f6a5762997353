#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dbi {

/// Real-valued pixel grid. Data is stored column by column (index of pixel
/// (x,y) is x*height + y), grid spacing is fixed at h = 1.
class Raster {
public:
  Raster() = default;
  Raster(int width, int height, double fill = 0.0);

  int width() const { return nx_; }
  int height() const { return ny_; }
  std::size_t size() const { return data_.size(); }

  double &operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }
  double &operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * ny_ + y;
  }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }

  bool same_shape(const Raster &other) const {
    return nx_ == other.nx_ && ny_ == other.ny_;
  }

  double mean() const;
  double min_value() const;
  double max_value() const;
  bool all_finite() const;

private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Binary raster marking the known pixels of an inpainting problem.
class Mask {
public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const { return nx_; }
  int height() const { return ny_; }
  std::size_t size() const { return bits_.size(); }

  bool test(std::size_t i) const { return bits_[i] != 0; }
  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(std::size_t i, bool value = true);
  void set(int x, int y, bool value = true) { set(index(x, y), value); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * ny_ + y;
  }

  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool full() const { return count_ == bits_.size(); }
  double density() const {
    return bits_.empty() ? 0.0 : static_cast<double>(count_) / bits_.size();
  }

  bool same_shape(const Raster &r) const {
    return nx_ == r.width() && ny_ == r.height();
  }

  const std::vector<std::uint8_t> &bits() const { return bits_; }

  /// Indices of set bits in increasing order.
  std::vector<std::uint32_t> set_indices() const;

private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

struct NoiseSpec {
  double sigma_n = 0.0;  // gray levels
  std::uint64_t seed = 0;
};

/// Five-point stencil of the negated Laplacian with reflecting boundaries:
/// at each pixel the sum of (center - neighbor) over existing 4-neighbors.
/// Row sums are zero, the operator is symmetric positive semidefinite.
Raster apply_neg_laplacian(const Raster &f);
void apply_neg_laplacian(const Raster &f, Raster &out);

/// Squared Neumann five-point operator. Encodes the reflecting conditions on
/// both the function and its Laplacian, and stays symmetric.
Raster apply_bilaplacian(const Raster &f);

/// Separable discrete Gaussian, kernel truncated at +-ceil(3*sigma) and
/// renormalized to sum 1, boundaries mirrored. sigma = 0 is the identity.
Raster gaussian_convolve(const Raster &f, double sigma);

/// f + n with n i.i.d. N(0, sigma_n^2). Values are not clipped.
Raster add_gaussian_noise(const Raster &f, const NoiseSpec &spec);

double mse(const Raster &a, const Raster &b);
double mse_on_mask(const Raster &a, const Raster &b, const Mask &m);

} // namespace dbi
