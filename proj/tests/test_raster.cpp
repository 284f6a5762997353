#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dbi/raster.hpp"
#include "dbi/rng.hpp"

using namespace dbi;

namespace {

Raster random_raster(int w, int h, std::uint64_t seed, double scale = 1.0) {
  Raster r(w, h);
  SplitMix64 rng(seed);
  for (auto &v : r.data()) v = scale * (rng.uniform() - 0.5);
  return r;
}

double dot(const Raster &a, const Raster &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace

TEST_CASE("negated Laplacian: constants are in the kernel") {
  const Raster k(7, 5, 3.25);
  const Raster out = apply_neg_laplacian(k);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("negated Laplacian: impulse stencil values") {
  Raster f(3, 3, 0.0);
  f(1, 1) = 1.0;
  const Raster out = apply_neg_laplacian(f);
  CHECK(out(1, 1) == doctest::Approx(4.0));
  CHECK(out(0, 1) == doctest::Approx(-1.0));
  CHECK(out(2, 1) == doctest::Approx(-1.0));
  CHECK(out(1, 0) == doctest::Approx(-1.0));
  CHECK(out(1, 2) == doctest::Approx(-1.0));
  CHECK(out(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("negated Laplacian: linear ramp has zero interior response") {
  Raster f(9, 1);
  for (int x = 0; x < 9; ++x) f(x, 0) = x;
  const Raster out = apply_neg_laplacian(f);
  for (int x = 1; x < 8; ++x) CHECK(out(x, 0) == doctest::Approx(0.0));
}

TEST_CASE("negated Laplacian: conserves mass and is symmetric") {
  const Raster f = random_raster(13, 11, 42, 10.0);
  const Raster g = random_raster(13, 11, 43, 10.0);
  const Raster lf = apply_neg_laplacian(f);
  const Raster lg = apply_neg_laplacian(g);
  double sum = 0.0;
  for (std::size_t i = 0; i < lf.size(); ++i) sum += lf[i];
  CHECK(std::abs(sum) < 1e-10);
  const double lhs = dot(lf, g);
  const double rhs = dot(f, lg);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("bilaplacian equals the squared stencil, impulse center is 20") {
  const Raster f = random_raster(8, 6, 7);
  const Raster twice = apply_neg_laplacian(apply_neg_laplacian(f));
  const Raster bi = apply_bilaplacian(f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(bi[i] == doctest::Approx(twice[i]));

  Raster impulse(5, 5, 0.0);
  impulse(2, 2) = 1.0;
  CHECK(apply_bilaplacian(impulse)(2, 2) == doctest::Approx(20.0));

  const Raster constant(4, 4, -2.5);
  const Raster out = apply_bilaplacian(constant);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("gaussian_convolve: identity at sigma 0, constant preserved") {
  const Raster f = random_raster(10, 9, 3);
  const Raster same = gaussian_convolve(f, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

  const Raster c(6, 6, 4.5);
  const Raster blurred = gaussian_convolve(c, 2.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(blurred[i] == doctest::Approx(4.5).epsilon(1e-12));

  CHECK_THROWS_AS(gaussian_convolve(f, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian_convolve: impulse reproduces the sampled kernel") {
  Raster f(21, 1, 0.0);
  f(10, 0) = 1.0;
  const Raster out = gaussian_convolve(f, 1.0);
  // tabulate the truncated renormalized kernel directly
  double weights[7];
  double sum = 0.0;
  for (int i = -3; i <= 3; ++i) {
    weights[i + 3] = std::exp(-0.5 * i * i);
    sum += weights[i + 3];
  }
  for (int i = -3; i <= 3; ++i)
    CHECK(out(10 + i, 0) == doctest::Approx(weights[i + 3] / sum).epsilon(1e-12));
  CHECK(out(14, 0) == 0.0);
}

TEST_CASE("gaussian_convolve: mean preserved under mirrored boundaries") {
  const Raster f = random_raster(17, 13, 11, 100.0);
  const Raster out = gaussian_convolve(f, 2.5);
  CHECK(out.mean() == doctest::Approx(f.mean()).epsilon(1e-12));
}

TEST_CASE("add_gaussian_noise: deterministic, unclipped, right moments") {
  const Raster f(256, 256, 128.0);
  const NoiseSpec spec{30.0, 1234};
  const Raster a = add_gaussian_noise(f, spec);
  const Raster b = add_gaussian_noise(f, spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  const Raster zero_noise = add_gaussian_noise(f, {0.0, 99});
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(zero_noise[i] == f[i]);

  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - f[i];
  mean /= double(a.size());
  CHECK(std::abs(mean) < 3.0 * 30.0 / 256.0); // CLT band

  double var = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - f[i] - mean;
    var += d * d;
  }
  var /= double(a.size());
  CHECK(std::sqrt(var) == doctest::Approx(30.0).epsilon(0.02));

  // unclipped: sigma 120 around 10 must go negative somewhere
  const Raster low(64, 64, 10.0);
  const Raster noisy = add_gaussian_noise(low, {120.0, 7});
  CHECK(noisy.min_value() < 0.0);
}

TEST_CASE("mse and mse_on_mask") {
  Raster a(2, 1);
  Raster b(2, 1);
  a(0, 0) = 0.0;
  a(1, 0) = 0.0;
  b(0, 0) = 3.0;
  b(1, 0) = 4.0;
  CHECK(mse(a, b) == doctest::Approx(12.5));
  CHECK(mse(b, a) == doctest::Approx(12.5));
  CHECK(mse(a, a) == 0.0);

  Raster c = a;
  for (auto &v : c.data()) v += 1.0;
  CHECK(mse(a, c) == doctest::Approx(1.0));

  Mask m(2, 1);
  m.set(1, 0);
  CHECK(mse_on_mask(a, b, m) == doctest::Approx(16.0));

  const Raster wrong(3, 1);
  CHECK_THROWS_AS(mse(a, wrong), std::invalid_argument);
  Mask empty(2, 1);
  CHECK_THROWS_AS(mse_on_mask(a, b, empty), std::invalid_argument);
}
