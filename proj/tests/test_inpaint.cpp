#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dbi/errors.hpp"
#include "dbi/inpaint.hpp"
#include "dbi/rng.hpp"

using namespace dbi;

namespace {

Raster random_raster(int w, int h, std::uint64_t seed, double scale = 255.0) {
  Raster r(w, h);
  SplitMix64 rng(seed);
  for (auto &v : r.data()) v = scale * rng.uniform();
  return r;
}

Mask random_mask(int w, int h, double density, std::uint64_t seed) {
  Mask m(w, h);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (rng.uniform() < density) m.set(i);
  if (m.empty()) m.set(std::size_t(seed % m.size()));
  return m;
}

double max_abs_diff(const Raster &a, const Raster &b) {
  double md = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    md = std::max(md, std::abs(a[i] - b[i]));
  return md;
}

double dot(const Raster &a, const Raster &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

const SolveConfig kTight{1e-12, 0, false};

} // namespace

TEST_CASE("inpaint: full mask returns the values verbatim") {
  const Raster f = random_raster(6, 5, 1);
  const Mask full(6, 5, true);
  for (auto op : {InpaintOperator::Harmonic, InpaintOperator::Biharmonic}) {
    const Raster u = inpaint(full, f, op);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(u[i] == f[i]);
  }
}

TEST_CASE("inpaint: 1-D harmonic equals linear interpolation") {
  Raster f(5, 1, 0.0);
  f(4, 0) = 4.0;
  Mask m(5, 1);
  m.set(0, 0);
  m.set(4, 0);
  const Raster u = inpaint(m, f, InpaintOperator::Harmonic, kTight);
  for (int x = 0; x < 5; ++x)
    CHECK(u(x, 0) == doctest::Approx(double(x)).epsilon(1e-9));
}

TEST_CASE("inpaint: iterative matches the dense oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Raster f = random_raster(6, 6, 100 + seed);
    const Mask m = random_mask(6, 6, 0.3, 200 + seed);
    for (auto op : {InpaintOperator::Harmonic, InpaintOperator::Biharmonic}) {
      const Raster it = inpaint(m, f, op, kTight);
      const Raster dense = dense_oracle_inpaint(m, f, op);
      CHECK(max_abs_diff(it, dense) < 1e-7);
    }
  }
}

TEST_CASE("inpaint: interpolation at mask pixels is exact") {
  const Raster f = random_raster(9, 7, 3);
  const Mask m = random_mask(9, 7, 0.2, 4);
  for (auto op : {InpaintOperator::Harmonic, InpaintOperator::Biharmonic}) {
    const Raster u = inpaint(m, f, op);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (m.test(i)) CHECK(u[i] == f[i]);
  }
}

TEST_CASE("inpaint: harmonic max-min principle") {
  const Raster f = random_raster(10, 10, 5);
  const Mask m = random_mask(10, 10, 0.15, 6);
  const Raster u = inpaint(m, f, InpaintOperator::Harmonic);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (m.test(i)) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
  CHECK(u.min_value() >= lo - 1e-6);
  CHECK(u.max_value() <= hi + 1e-6);
}

TEST_CASE("inpaint: linear in the data") {
  const Raster f = random_raster(8, 8, 21);
  const Raster g = random_raster(8, 8, 22);
  const Mask m = random_mask(8, 8, 0.25, 23);
  const double a = 1.7, b = -0.6;
  Raster combo(8, 8);
  for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f[i] + b * g[i];
  for (auto op : {InpaintOperator::Harmonic, InpaintOperator::Biharmonic}) {
    const Raster lhs = inpaint(m, combo, op, kTight);
    const Raster rf = inpaint(m, f, op, kTight);
    const Raster rg = inpaint(m, g, op, kTight);
    double scale = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
      scale = std::max(scale, std::abs(lhs[i]));
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(std::abs(lhs[i] - (a * rf[i] + b * rg[i])) < 1e-8 * scale);
  }
}

TEST_CASE("inpaint: superposition of echoes reproduces the reconstruction") {
  const Raster f = random_raster(8, 8, 31);
  const Mask m = random_mask(8, 8, 0.3, 32);
  const Raster u = inpaint(m, f, InpaintOperator::Harmonic, kTight);
  Raster sum(8, 8, 0.0);
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!m.test(k)) continue;
    Raster impulse(8, 8, 0.0);
    impulse[k] = 1.0;
    const Raster echo = inpaint(m, impulse, InpaintOperator::Harmonic, kTight);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += f[k] * echo[i];
  }
  CHECK(max_abs_diff(sum, u) < 1e-7);
}

TEST_CASE("inpaint: constant values stay constant under harmonic") {
  const Raster c(7, 6, 42.0);
  const Mask m = random_mask(7, 6, 0.2, 77);
  const Raster dense = dense_oracle_inpaint(m, c, InpaintOperator::Harmonic);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(dense[i] == doctest::Approx(42.0).epsilon(1e-12));
}

TEST_CASE("inpaint: empty mask and shape mismatch are rejected") {
  const Raster f = random_raster(4, 4, 1);
  const Mask empty(4, 4);
  CHECK_THROWS_AS(inpaint(empty, f, InpaintOperator::Harmonic),
                  std::invalid_argument);
  const Mask wrong(5, 4, true);
  CHECK_THROWS_AS(inpaint(wrong, f, InpaintOperator::Harmonic),
                  std::invalid_argument);
}

TEST_CASE("inpaint_adjoint: adjoint identity and dense agreement") {
  const Mask m = random_mask(8, 8, 0.3, 50);
  const Raster y = random_raster(8, 8, 51, 1.0);
  const Raster z = random_raster(8, 8, 52, 1.0);

  // <B C y, z> == <y, C B^T z>
  const Raster bcy = inpaint(m, y, InpaintOperator::Harmonic, kTight);
  Raster cbt_z = inpaint_adjoint(m, z, InpaintOperator::Harmonic, kTight);
  for (std::size_t i = 0; i < cbt_z.size(); ++i)
    if (!m.test(i)) cbt_z[i] = 0.0;
  const double lhs = dot(bcy, z);
  const double rhs = dot(y, cbt_z);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));

  // 6x6 against the dense transpose solve
  const Mask m6 = random_mask(6, 6, 0.3, 53);
  const Raster r6 = random_raster(6, 6, 54, 1.0);
  for (auto op : {InpaintOperator::Harmonic, InpaintOperator::Biharmonic}) {
    const Raster it = inpaint_adjoint(m6, r6, op, kTight);
    const Raster dense = dense_oracle_adjoint(m6, r6, op);
    CHECK(max_abs_diff(it, dense) < 1e-7);
  }
}

TEST_CASE("inpaint_adjoint: full mask is the identity") {
  const Raster rhs = random_raster(5, 5, 60, 1.0);
  const Mask full(5, 5, true);
  const Raster x = inpaint_adjoint(full, rhs, InpaintOperator::Biharmonic);
  for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(x[i] == rhs[i]);
}

TEST_CASE("dense oracle: full mask is the identity, size cap enforced") {
  const Raster f = random_raster(6, 4, 70);
  const Mask full(6, 4, true);
  const Raster u = dense_oracle_inpaint(full, f, InpaintOperator::Harmonic);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(u[i] == f[i]);

  const Raster big(70, 70, 1.0);
  const Mask big_mask(70, 70, true);
  CHECK_THROWS_AS(dense_oracle_inpaint(big_mask, big, InpaintOperator::Harmonic),
                  std::invalid_argument);
}

TEST_CASE("inpaint: solver reports stats") {
  const Raster f = random_raster(12, 12, 80);
  const Mask m = random_mask(12, 12, 0.1, 81);
  SolveStats stats;
  (void)inpaint(m, f, InpaintOperator::Harmonic, SolveConfig{}, &stats);
  CHECK(stats.converged);
  CHECK(stats.iterations > 0);
  CHECK(stats.rel_residual <= 1e-9);

  // starved iteration budget: reported through stats, thrown without them
  SolveConfig starved;
  starved.max_iters = 2;
  (void)inpaint(m, f, InpaintOperator::Harmonic, starved, &stats);
  CHECK_FALSE(stats.converged);
  CHECK(stats.rel_residual > 0.0);
  CHECK_THROWS_AS(inpaint(m, f, InpaintOperator::Harmonic, starved),
                  NumericError);
}
