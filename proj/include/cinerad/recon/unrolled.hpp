#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/recon/cg.hpp"
#include "cinerad/recon/resnet.hpp"
#include "cinerad/recon/sense.hpp"
#include "cinerad/recon/tv.hpp"

namespace cinerad {

enum class ProxKind { identity, temporal_tv, resnet };

struct UnrolledConfig {
  std::size_t n_stages = 6;
  std::size_t n_cg = 10;
  double lambda_rel = 0.05;  // data-consistency coupling relative to the Lipschitz estimate
  ProxKind prox = ProxKind::temporal_tv;
  double tv_tau_rel = 0.02;  // TV prox threshold relative to max |x_0|
  std::size_t tv_inner = 5;
  std::size_t power_iters = 20;
  const ProxWeights* weights = nullptr;  // required for ProxKind::resnet
};

struct UnrolledResult {
  CineImage image;
  double lambda = 0.0;
  double lipschitz = 0.0;
  double tv_tau = 0.0;
  std::vector<double> dc_before;  // ||A z_k - y|| / ||y|| entering each stage's solve
  std::vector<double> dc_after;   // same residual after the solve
  std::vector<double> change;     // ||x_{k+1} - x_k|| / ||x_k||
};

// Unrolled proximal-gradient reconstruction: starting from the gridding
// image, each stage applies the denoising prox (conditioned on progress
// k / K) and then re-enforces data consistency by a fixed-iteration CG solve
// of (A^H A + lambda I) x = A^H y + lambda z.
inline UnrolledResult unrolled_reconstruct(const SenseOperator& op, const std::vector<ArrayC>& y,
                                           const UnrolledConfig& cfg = {}) {
  const std::size_t tph = op.n_phases(), np = op.n * op.n;
  if (y.size() != tph) throw std::invalid_argument("unrolled_reconstruct: phase count mismatch");
  if (cfg.n_stages == 0) throw std::invalid_argument("unrolled_reconstruct: n_stages must be > 0");
  if (cfg.prox == ProxKind::resnet && cfg.weights == nullptr)
    throw std::invalid_argument("unrolled_reconstruct: resnet prox needs weights");

  UnrolledResult res;
  res.lipschitz = estimate_lipschitz(op, cfg.power_iters);
  res.lambda = cfg.lambda_rel * res.lipschitz;

  ArrayC x = sense_adjoint(op, y, true);  // gridding start
  double x0_peak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) x0_peak = std::max(x0_peak, std::abs(x.flat(i)));
  res.tv_tau = cfg.tv_tau_rel * x0_peak;

  double ynorm = 0.0;
  for (std::size_t t = 0; t < tph; ++t)
    for (std::size_t m = 0; m < y[t].size(); ++m) ynorm += std::norm(y[t].flat(m));
  ynorm = std::sqrt(ynorm);
  if (ynorm == 0.0) ynorm = 1.0;

  const auto dc_residual = [&](const ArrayC& v) {
    std::vector<ArrayC> f = sense_forward(op, v);
    double acc = 0.0;
    for (std::size_t t = 0; t < tph; ++t)
      for (std::size_t m = 0; m < f[t].size(); ++m) acc += std::norm(f[t].flat(m) - y[t].flat(m));
    return std::sqrt(acc) / ynorm;
  };

  for (std::size_t k = 0; k < cfg.n_stages; ++k) {
    const double stage = static_cast<double>(k) / static_cast<double>(cfg.n_stages);
    ArrayC z;
    switch (cfg.prox) {
      case ProxKind::identity:
        z = x;
        break;
      case ProxKind::temporal_tv:
        z = temporal_tv_prox(x, res.tv_tau, cfg.tv_inner);
        break;
      case ProxKind::resnet:
        z = resnet_prox_infer(x, stage, *cfg.weights);
        break;
    }
    res.dc_before.push_back(dc_residual(z));

    CgResult sol = cg_solve_dc(op, y, res.lambda, &z, cfg.n_cg);
    res.dc_after.push_back(dc_residual(sol.x));

    double dn = 0.0, xn = 0.0;
    for (std::size_t i = 0; i < tph * np; ++i) {
      dn += std::norm(sol.x.flat(i) - x.flat(i));
      xn += std::norm(x.flat(i));
    }
    res.change.push_back(xn > 0.0 ? std::sqrt(dn / xn) : 0.0);
    x = std::move(sol.x);
  }

  res.image = CineImage{std::move(x)};
  return res;
}

}  // namespace cinerad
