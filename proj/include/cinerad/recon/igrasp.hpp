#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/recon/sense.hpp"
#include "cinerad/recon/tv.hpp"

namespace cinerad {

struct IgraspConfig {
  std::size_t n_iters = 50;
  double lambda_rel = 0.02;  // temporal TV weight relative to max |A^H y|
  std::size_t tv_inner = 5;
  std::size_t power_iters = 20;
  std::size_t max_backtracks = 30;
};

struct IgraspResult {
  CineImage image;
  std::vector<double> objective;  // F(x_k) for k = 0..n_iters, non-increasing
  double lambda = 0.0;
  double lipschitz = 0.0;  // gradient step scale after any escalations
  std::size_t n_backtracks = 0;
};

// Compressed-sensing cine reconstruction: minimizes
//   F(x) = 1/2 sum_t ||A_t x_t - y_t||^2 + lambda * TV_time(x)
// by monotone FISTA. Steps that would raise F trigger a 1.5x step-scale
// escalation; the iterate keeps its predecessor whenever no improving
// candidate is found, so the recorded objective never increases.
inline IgraspResult igrasp_reconstruct(const SenseOperator& op, const std::vector<ArrayC>& y,
                                       const IgraspConfig& cfg = {}) {
  const std::size_t tph = op.n_phases(), n = op.n, np = n * n;
  if (y.size() != tph) throw std::invalid_argument("igrasp_reconstruct: phase count mismatch");
  if (!(cfg.lambda_rel >= 0.0))
    throw std::invalid_argument("igrasp_reconstruct: lambda_rel must be >= 0");

  const auto fidelity = [&](const ArrayC& v, std::vector<ArrayC>* residual) {
    double acc = 0.0;
    std::vector<ArrayC> r = sense_forward(op, v);
    for (std::size_t t = 0; t < tph; ++t) {
      for (std::size_t m = 0; m < r[t].size(); ++m) {
        r[t].flat(m) -= y[t].flat(m);
        acc += std::norm(r[t].flat(m));
      }
    }
    if (residual != nullptr) *residual = std::move(r);
    return 0.5 * acc;
  };

  IgraspResult res;
  {
    ArrayC aty = sense_adjoint(op, y, false);
    double peak = 0.0;
    for (std::size_t i = 0; i < aty.size(); ++i) peak = std::max(peak, std::abs(aty.flat(i)));
    res.lambda = cfg.lambda_rel * peak;
  }
  double el = 1.05 * estimate_lipschitz(op, cfg.power_iters);

  ArrayC x_prev = sense_adjoint(op, y, true);  // gridding start
  double f_prev = fidelity(x_prev, nullptr) + res.lambda * temporal_tv(x_prev);
  if (!std::isfinite(f_prev)) throw std::runtime_error("igrasp_reconstruct: non-finite start");
  res.objective.push_back(f_prev);

  ArrayC yk = x_prev;
  double tk = 1.0;
  const std::size_t total = tph * np;

  for (std::size_t it = 0; it < cfg.n_iters; ++it) {
    std::vector<ArrayC> r_y;
    fidelity(yk, &r_y);
    ArrayC grad = sense_adjoint(op, r_y, false);

    ArrayC z;
    double fz = 0.0;
    for (std::size_t attempt = 0;; ++attempt) {
      ArrayC step({tph, n, n});
      for (std::size_t i = 0; i < total; ++i) step.flat(i) = yk.flat(i) - grad.flat(i) / el;
      z = temporal_tv_prox(step, res.lambda / el, cfg.tv_inner);
      fz = fidelity(z, nullptr) + res.lambda * temporal_tv(z);
      if (!std::isfinite(fz)) throw std::runtime_error("igrasp_reconstruct: diverged");
      if (fz <= f_prev || attempt >= cfg.max_backtracks) break;
      el *= 1.5;
      ++res.n_backtracks;
    }

    const bool accept = fz <= f_prev;
    const double f_new = accept ? fz : f_prev;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    ArrayC x_new = accept ? z : x_prev;

    // y_{k+1} = x_k + (t_k / t_{k+1}) (z_k - x_k) + ((t_k - 1) / t_{k+1}) (x_k - x_{k-1})
    const double a = tk / t_next, b = (tk - 1.0) / t_next;
    ArrayC y_next({tph, n, n});
    for (std::size_t i = 0; i < total; ++i)
      y_next.flat(i) = x_new.flat(i) + a * (z.flat(i) - x_new.flat(i)) +
                       b * (x_new.flat(i) - x_prev.flat(i));

    x_prev = std::move(x_new);
    f_prev = f_new;
    yk = std::move(y_next);
    tk = t_next;
    res.objective.push_back(f_new);
  }

  res.lipschitz = el;
  res.image = CineImage{std::move(x_prev)};
  return res;
}

}  // namespace cinerad
