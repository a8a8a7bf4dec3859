#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/recon/sense.hpp"

namespace cinerad {

struct CgResult {
  ArrayC x;                          // [T x N x N]
  std::vector<double> rel_residual;  // final ||r|| / ||b|| per phase
};

// Solves the regularized data-consistency system per cardiac phase,
//   (A_t^H A_t + lambda I) x_t = A_t^H y_t + lambda z_t,
// by conjugate gradients from x_t = z_t (or zero when no prior is given),
// running exactly n_iters iterations unless tol > 0 stops a phase early.
inline CgResult cg_solve_dc(const SenseOperator& op, const std::vector<ArrayC>& y, double lambda,
                            const ArrayC* z, std::size_t n_iters, double tol = 0.0) {
  const std::size_t tph = op.n_phases(), n = op.n;
  if (y.size() != tph) throw std::invalid_argument("cg_solve_dc: phase count mismatch");
  if (lambda < 0.0) throw std::invalid_argument("cg_solve_dc: lambda must be >= 0");
  if (z != nullptr && (z->ndim() != 3 || z->shape(0) != tph || z->shape(1) != n))
    throw std::invalid_argument("cg_solve_dc: prior shape mismatch");

  CgResult res;
  res.x = ArrayC({tph, n, n});
  res.rel_residual.resize(tph, 0.0);

  const std::size_t np = n * n;
  for (std::size_t t = 0; t < tph; ++t) {
    ArrayC b = sense_adjoint_phase(op, t, y[t], false);
    ArrayC x({n, n});
    if (z != nullptr)
      for (std::size_t i = 0; i < np; ++i) {
        const cdouble zi = z->flat(t * np + i);
        b.flat(i) += lambda * zi;
        x.flat(i) = zi;
      }

    const auto normal = [&](const ArrayC& v) {
      ArrayC out = sense_normal_phase(op, t, v);
      if (lambda != 0.0)
        for (std::size_t i = 0; i < np; ++i) out.flat(i) += lambda * v.flat(i);
      return out;
    };

    double bnorm = norm2(b);
    if (bnorm == 0.0) bnorm = 1.0;

    ArrayC r = b;
    {
      ArrayC ax = normal(x);
      for (std::size_t i = 0; i < np; ++i) r.flat(i) -= ax.flat(i);
    }
    ArrayC p = r;
    double rr = std::real(dotc(r, r));

    for (std::size_t it = 0; it < n_iters; ++it) {
      if (std::sqrt(rr) / bnorm <= tol) break;
      ArrayC ap = normal(p);
      const double pap = std::real(dotc(p, ap));
      if (!std::isfinite(pap) || pap <= 0.0) {
        if (rr <= 1e-300) break;  // converged to machine zero
        throw std::runtime_error("cg_solve_dc: breakdown, operator is not positive definite");
      }
      const double alpha = rr / pap;
      for (std::size_t i = 0; i < np; ++i) {
        x.flat(i) += alpha * p.flat(i);
        r.flat(i) -= alpha * ap.flat(i);
      }
      const double rr_next = std::real(dotc(r, r));
      if (!std::isfinite(rr_next)) throw std::runtime_error("cg_solve_dc: diverged");
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t i = 0; i < np; ++i) p.flat(i) = r.flat(i) + beta * p.flat(i);
    }

    res.rel_residual[t] = std::sqrt(rr) / bnorm;
    for (std::size_t i = 0; i < np; ++i) res.x.flat(t * np + i) = x.flat(i);
  }
  return res;
}

}  // namespace cinerad
