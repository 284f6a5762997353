#include "dbi/inpaint.hpp"

#include <cmath>
#include <sstream>

#include "dbi/errors.hpp"
#include "dense_util.hpp"

namespace dbi {

const char *to_string(InpaintOperator op) {
  return op == InpaintOperator::Harmonic ? "harmonic" : "biharmonic";
}

namespace {

double dot(const Raster &a, const Raster &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void zero_on_mask(Raster &v, const Mask &mask) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask.test(i)) v[i] = 0.0;
}

// Op restricted to the unknown pixels: input must vanish on the mask, the
// result is truncated there. For the harmonic operator this is L_UU, for the
// biharmonic one (L^2)_UU; both are symmetric positive definite as long as
// the mask is non-empty.
void apply_reduced(const Raster &x, Raster &out, Raster &tmp, const Mask &mask,
                   InpaintOperator op) {
  if (op == InpaintOperator::Harmonic) {
    apply_neg_laplacian(x, out);
  } else {
    apply_neg_laplacian(x, tmp);
    apply_neg_laplacian(tmp, out);
  }
  zero_on_mask(out, mask);
}

long resolved_max_iters(const SolveConfig &cfg, std::size_t n) {
  return cfg.max_iters > 0 ? cfg.max_iters : static_cast<long>(10 * n);
}

void validate(const Mask &mask, const Raster &values) {
  if (!mask.same_shape(values))
    throw std::invalid_argument("inpaint: mask and raster shapes differ");
  if (mask.empty()) throw std::invalid_argument("inpaint: empty mask");
}

void report_or_throw(SolveStats &local, SolveStats *stats, const char *what) {
  if (stats) *stats = local;
  if (!local.converged && !stats) {
    std::ostringstream msg;
    msg << what << ": no convergence within " << local.iterations
        << " iterations, residual " << local.rel_residual;
    throw NumericError(msg.str());
  }
}

// CG on the reduced system A z = b. z and b live on the full grid and are
// zero at mask pixels.
SolveStats conjugate_gradients(Raster &z, const Raster &b, const Mask &mask,
                               InpaintOperator op, const SolveConfig &cfg) {
  SolveStats st;
  const std::size_t n = b.size();
  z = Raster(b.width(), b.height(), 0.0);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) return st;

  Raster r = b;
  Raster p = b;
  Raster q(b.width(), b.height());
  Raster tmp(b.width(), b.height());
  double rr = b_norm * b_norm;
  const double target = cfg.rel_tolerance * b_norm;
  const long max_iters = resolved_max_iters(cfg, n);

  while (st.iterations < max_iters && std::sqrt(rr) > target) {
    apply_reduced(p, q, tmp, mask, op);
    const double pq = dot(p, q);
    if (pq <= 0.0) break; // loss of positive definiteness in finite precision
    const double alpha = rr / pq;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++st.iterations;
  }
  st.rel_residual = std::sqrt(rr) / b_norm;
  st.converged = st.rel_residual <= cfg.rel_tolerance;
  return st;
}

// BiCGStab on the full system M u = rhs. Fallback for the rare case that the
// biharmonic CG stalls in finite precision.
SolveStats bicgstab_full(Raster &u, const Raster &rhs, const Mask &mask,
                         InpaintOperator op, const SolveConfig &cfg) {
  SolveStats st;
  st.used_fallback = true;
  const std::size_t n = rhs.size();
  auto apply_m = [&](const Raster &x, Raster &out, Raster &tmp) {
    if (op == InpaintOperator::Harmonic) {
      apply_neg_laplacian(x, out);
    } else {
      apply_neg_laplacian(x, tmp);
      apply_neg_laplacian(tmp, out);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (mask.test(i)) out[i] = x[i];
  };

  Raster tmp(rhs.width(), rhs.height());
  Raster r(rhs.width(), rhs.height());
  apply_m(u, r, tmp);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  Raster r0 = r;
  Raster p = r;
  Raster v(rhs.width(), rhs.height());
  Raster s(rhs.width(), rhs.height());
  Raster t(rhs.width(), rhs.height());
  double rho = dot(r0, r);
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) return st;
  const double target = cfg.rel_tolerance * rhs_norm;
  const long max_iters = resolved_max_iters(cfg, n);

  while (st.iterations < max_iters) {
    apply_m(p, v, tmp);
    const double alpha = rho / dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    apply_m(s, t, tmp);
    const double tt = dot(t, t);
    const double omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    ++st.iterations;
    if (std::sqrt(dot(r, r)) <= target) break;
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0 || omega == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i)
      p[i] = r[i] + beta * (p[i] - omega * v[i]);
  }
  st.rel_residual = std::sqrt(dot(r, r)) / rhs_norm;
  st.converged = st.rel_residual <= cfg.rel_tolerance;
  return st;
}

} // namespace

Raster inpaint(const Mask &mask, const Raster &values, InpaintOperator op,
               const SolveConfig &cfg, SolveStats *stats) {
  validate(mask, values);
  if (cfg.use_dense_oracle && values.size() <= 4096) {
    if (stats) *stats = SolveStats{};
    return dense_oracle_inpaint(mask, values, op);
  }
  if (mask.full()) {
    if (stats) *stats = SolveStats{};
    return values;
  }

  // Known values substituted as data: solve A z = -(Op f~)_U, u = f~ + z.
  Raster f_known(values.width(), values.height(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (mask.test(i)) f_known[i] = values[i];

  Raster b(values.width(), values.height());
  Raster tmp(values.width(), values.height());
  if (op == InpaintOperator::Harmonic) {
    apply_neg_laplacian(f_known, b);
  } else {
    apply_neg_laplacian(f_known, tmp);
    apply_neg_laplacian(tmp, b);
  }
  for (auto &v : b.data()) v = -v;
  zero_on_mask(b, mask);

  Raster z;
  SolveStats st = conjugate_gradients(z, b, mask, op, cfg);
  Raster u = f_known;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!mask.test(i)) u[i] = z[i];

  if (!st.converged && op == InpaintOperator::Biharmonic) {
    SolveStats fb = bicgstab_full(u, f_known, mask, op, cfg);
    fb.iterations += st.iterations;
    st = fb;
    // interpolation stays exact: mask rows of M are identity rows
    for (std::size_t i = 0; i < u.size(); ++i)
      if (mask.test(i)) u[i] = values[i];
  }

  if (!u.all_finite()) throw NumericError("inpaint: non-finite result");
  report_or_throw(st, stats, "inpaint");
  return u;
}

Raster inpaint_adjoint(const Mask &mask, const Raster &rhs, InpaintOperator op,
                       const SolveConfig &cfg, SolveStats *stats) {
  validate(mask, rhs);
  if (cfg.use_dense_oracle && rhs.size() <= 4096) {
    if (stats) *stats = SolveStats{};
    return dense_oracle_adjoint(mask, rhs, op);
  }
  if (mask.full()) {
    if (stats) *stats = SolveStats{};
    return rhs;
  }

  // M^T x = rhs decouples: Op_UU x_U = rhs_U, then
  // x_K = rhs_K - (Op x~_U)_K.
  Raster b = rhs;
  zero_on_mask(b, mask);
  Raster z;
  SolveStats st = conjugate_gradients(z, b, mask, op, cfg);

  Raster w(rhs.width(), rhs.height());
  Raster tmp(rhs.width(), rhs.height());
  if (op == InpaintOperator::Harmonic) {
    apply_neg_laplacian(z, w);
  } else {
    apply_neg_laplacian(z, tmp);
    apply_neg_laplacian(tmp, w);
  }
  Raster x = z;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mask.test(i)) x[i] = rhs[i] - w[i];

  if (!x.all_finite()) throw NumericError("inpaint_adjoint: non-finite result");
  report_or_throw(st, stats, "inpaint_adjoint");
  return x;
}

namespace {

Eigen::VectorXd to_eigen(const Raster &r) {
  return Eigen::Map<const Eigen::VectorXd>(r.data().data(),
                                           static_cast<Eigen::Index>(r.size()));
}

Raster from_eigen(const Eigen::VectorXd &v, int width, int height) {
  Raster out(width, height);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = v[static_cast<Eigen::Index>(i)];
  return out;
}

void check_oracle_size(const Raster &r) {
  if (r.size() > 4096)
    throw std::invalid_argument("dense oracle capped at 4096 pixels");
}

} // namespace

Raster dense_oracle_inpaint(const Mask &mask, const Raster &values,
                            InpaintOperator op) {
  validate(mask, values);
  check_oracle_size(values);
  const Eigen::MatrixXd M = detail::dense_inpainting_matrix(
      mask, detail::sparse_operator(values.width(), values.height(), op));
  Eigen::VectorXd rhs = to_eigen(values);
  for (Eigen::Index i = 0; i < rhs.size(); ++i)
    if (!mask.test(static_cast<std::size_t>(i))) rhs[i] = 0.0;
  const Eigen::VectorXd u = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
  Raster out = from_eigen(u, values.width(), values.height());
  // keep interpolation bit-exact
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask.test(i)) out[i] = values[i];
  return out;
}

Raster dense_oracle_adjoint(const Mask &mask, const Raster &rhs,
                            InpaintOperator op) {
  validate(mask, rhs);
  check_oracle_size(rhs);
  const Eigen::MatrixXd M = detail::dense_inpainting_matrix(
      mask, detail::sparse_operator(rhs.width(), rhs.height(), op));
  const Eigen::MatrixXd Mt = M.transpose();
  const Eigen::VectorXd x =
      Eigen::PartialPivLU<Eigen::MatrixXd>(Mt).solve(to_eigen(rhs));
  return from_eigen(x, rhs.width(), rhs.height());
}

} // namespace dbi
