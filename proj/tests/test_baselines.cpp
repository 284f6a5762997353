#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dbi/baselines.hpp"
#include "dbi/raster.hpp"
#include "dbi/rng.hpp"
#include "dbi/synthetic.hpp"

using namespace dbi;

namespace {

Raster random_raster(int w, int h, std::uint64_t seed, double scale = 255.0) {
  Raster r(w, h);
  SplitMix64 rng(seed);
  for (auto &v : r.data()) v = scale * rng.uniform();
  return r;
}

} // namespace

TEST_CASE("homogeneous_diffusion: T=0 identity, one 1-D step, steady state") {
  const Raster f = random_raster(9, 9, 1);
  DiffusionParams p;
  p.total_time = 0.0;
  const Raster same = homogeneous_diffusion(f, p);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

  // single explicit step with tau = 1/4 on a row
  const Raster row = random_raster(16, 1, 2);
  p.total_time = 0.25;
  p.tau = 0.25;
  const Raster stepped = homogeneous_diffusion(row, p);
  for (int x = 1; x < 15; ++x) {
    const double expect =
        (row(x - 1, 0) + 2.0 * row(x, 0) + row(x + 1, 0)) / 4.0;
    CHECK(stepped(x, 0) == doctest::Approx(expect).epsilon(1e-12));
  }

  // long time: everything converges to the mean
  const Raster img = random_raster(16, 16, 3);
  p.total_time = 1e4;
  p.tau = 0.25;
  const Raster flat = homogeneous_diffusion(img, p);
  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(std::abs(flat[i] - img.mean()) < 1e-3);

  DiffusionParams bad;
  bad.total_time = 1.0;
  bad.tau = 0.5;
  CHECK_THROWS_AS(homogeneous_diffusion(img, bad), std::invalid_argument);
}

TEST_CASE("diffusion baselines: max-min principle and mean invariance") {
  const Raster f = random_raster(14, 11, 4);
  DiffusionParams p;
  p.total_time = 3.0;
  p.lambda = 8.0;
  const Raster outs[3] = {homogeneous_diffusion(f, p),
                          space_variant_diffusion(f, p),
                          nonlinear_diffusion(f, p)};
  for (const Raster &u : outs) {
    CHECK(u.min_value() >= f.min_value() - 1e-10);
    CHECK(u.max_value() <= f.max_value() + 1e-10);
    CHECK(u.mean() == doctest::Approx(f.mean()).epsilon(1e-10));
  }
}

TEST_CASE("space_variant_diffusion: huge lambda reduces to homogeneous") {
  const Raster f = random_raster(12, 12, 5);
  DiffusionParams p;
  p.total_time = 2.0;
  p.lambda = 1e9;
  const Raster sv = space_variant_diffusion(f, p);
  const Raster nl = nonlinear_diffusion(f, p);
  const Raster hd = homogeneous_diffusion(f, p);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::abs(sv[i] - hd[i]) < 1e-10);
    CHECK(std::abs(nl[i] - hd[i]) < 1e-10);
  }
}

TEST_CASE("space_variant_diffusion: constant image is a fixed point") {
  const Raster c(10, 10, 77.0);
  DiffusionParams p;
  p.total_time = 5.0;
  p.lambda = 3.0;
  const Raster u = space_variant_diffusion(c, p);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(u[i] == doctest::Approx(77.0).epsilon(1e-14));
}

TEST_CASE("nonlinear_diffusion: preserves a noisy step edge better") {
  // step edge + noise; compare plateau contrast at equal diffusion time
  const Raster clean = synthetic_image("step", 32, 16);
  const Raster noisy = add_gaussian_noise(clean, {15.0, 99});
  DiffusionParams p;
  p.total_time = 12.0;
  p.lambda = 6.0;
  const Raster nl = nonlinear_diffusion(noisy, p);
  const Raster hd = homogeneous_diffusion(noisy, p);

  auto contrast = [](const Raster &u) {
    double left = 0.0, right = 0.0;
    int nl_count = 0, nr_count = 0;
    for (int x = 0; x < u.width(); ++x)
      for (int y = 0; y < u.height(); ++y) {
        if (x < u.width() / 4) {
          left += u(x, y);
          ++nl_count;
        } else if (x >= 3 * u.width() / 4) {
          right += u(x, y);
          ++nr_count;
        }
      }
    return right / nr_count - left / nl_count;
  };
  const double true_contrast = 128.0;
  CHECK(contrast(nl) >= 0.90 * true_contrast);
  CHECK(contrast(nl) > contrast(hd));
}

TEST_CASE("tv_denoise: alpha 0 and constant input are identities") {
  const Raster f = random_raster(8, 8, 6);
  const Raster same = tv_denoise(f, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

  const Raster c(9, 9, 5.0);
  const Raster u = tv_denoise(c, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(u[i] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("tv_denoise: huge alpha flattens to the mean") {
  const Raster f = random_raster(16, 16, 7, 100.0);
  const Raster u = tv_denoise(f, 1e6);
  const double m = f.mean();
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(u[i] - m) < 1e-2);
}

TEST_CASE("tv_denoise: denoises a noisy step image") {
  const Raster clean = synthetic_image("step", 24, 24);
  const Raster noisy = add_gaussian_noise(clean, {20.0, 123});
  const Raster u = tv_denoise(noisy, 15.0);
  CHECK(mse(u, clean) < 0.5 * mse(noisy, clean));
}
