#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/parallel.hpp"

namespace cinerad {

// Temporal total variation of a [T x N x N] stack: the complex-magnitude l1
// norm of forward differences along the frame axis.
inline double temporal_tv(const ArrayC& x) {
  if (x.ndim() != 3) throw std::invalid_argument("temporal_tv: expected [T x N x N]");
  const std::size_t t = x.shape(0), np = x.shape(1) * x.shape(2);
  double acc = 0.0;
  for (std::size_t f = 0; f + 1 < t; ++f)
    for (std::size_t i = 0; i < np; ++i)
      acc += std::abs(x.flat((f + 1) * np + i) - x.flat(f * np + i));
  return acc;
}

// Proximal map of tau * temporal TV: per-pixel 1-d dual (Chambolle) ascent
// with step sigma = 1/4 and magnitude renormalization, n_inner iterations.
inline ArrayC temporal_tv_prox(const ArrayC& x, double tau, std::size_t n_inner = 5) {
  if (x.ndim() != 3) throw std::invalid_argument("temporal_tv_prox: expected [T x N x N]");
  if (tau < 0.0) throw std::invalid_argument("temporal_tv_prox: tau must be >= 0");
  const std::size_t t = x.shape(0), np = x.shape(1) * x.shape(2);
  ArrayC out = x;
  if (tau == 0.0 || t < 2) return out;

  const double sigma = 0.25;
  parallel_for(np, [&](std::size_t i) {
    std::vector<cdouble> u(t), p(t - 1, cdouble(0)), g(t - 1);
    for (std::size_t it = 0; it < n_inner; ++it) {
      // u = x - tau * D^T p, with (D^T p)_f = p_{f-1} - p_f at the interior.
      for (std::size_t f = 0; f < t; ++f) {
        cdouble dtp(0);
        if (f > 0) dtp += p[f - 1];
        if (f < t - 1) dtp -= p[f];
        u[f] = x.flat(f * np + i) - tau * dtp;
      }
      for (std::size_t f = 0; f + 1 < t; ++f) {
        g[f] = (u[f + 1] - u[f]) / tau;
        const cdouble cand = p[f] + sigma * g[f];
        p[f] = cand / (1.0 + sigma * std::abs(g[f]));
      }
    }
    for (std::size_t f = 0; f < t; ++f) {
      cdouble dtp(0);
      if (f > 0) dtp += p[f - 1];
      if (f < t - 1) dtp -= p[f];
      out.flat(f * np + i) = x.flat(f * np + i) - tau * dtp;
    }
  });
  return out;
}

}  // namespace cinerad
