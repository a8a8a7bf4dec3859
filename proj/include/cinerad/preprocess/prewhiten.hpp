#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "cinerad/core/eigen_util.hpp"
#include "cinerad/core/log.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/core/types.hpp"

namespace cinerad {

// Sample covariance Psi = (1/M) sum_m n_m n_m^H from M noise-only coil
// vectors (rows of a [M x N_c] array).
inline ArrayC estimate_noise_cov(const ArrayC& noise_samples) {
  if (noise_samples.ndim() != 2)
    throw std::invalid_argument("estimate_noise_cov: expected [M x N_c] samples");
  const std::size_t m = noise_samples.shape(0), nc = noise_samples.shape(1);
  if (m == 0 || nc == 0) throw std::invalid_argument("estimate_noise_cov: empty input");
  for (std::size_t i = 0; i < noise_samples.size(); ++i) {
    const cdouble& v = noise_samples.flat(i);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("estimate_noise_cov: non-finite noise sample");
  }
  if (m <= nc)
    log::warn("estimate_noise_cov: only " + std::to_string(m) + " samples for " +
              std::to_string(nc) + " coils; covariance estimate is rank deficient");

  EMat x = to_eigen(noise_samples);
  EMat psi = (x.transpose() * x.conjugate()) / static_cast<double>(m);
  psi = (psi + psi.adjoint().eval()) * 0.5;  // enforce exact Hermitian symmetry
  return from_eigen(psi);
}

// Coil decorrelation transform W with W Psi W^H = I, from the Cholesky factor
// of the (slightly ridged) covariance: Psi = L L^H, W = L^{-1}.
struct NoiseWhitener {
  ArrayC w;      // [N_c x N_c]; whitened vector = w * v
  ArrayC w_inv;  // the Cholesky factor L; inverse transform for round trips

  std::size_t n_coils() const { return w.shape(0); }

  // Applies w to every length-N_c vector along the trailing axis.
  void apply_inplace(ArrayC& data) const {
    const std::size_t nc = n_coils();
    if (data.ndim() == 0 || data.shape(data.ndim() - 1) != nc)
      throw std::invalid_argument("NoiseWhitener: trailing axis must be coils");
    const std::size_t blocks = data.size() / nc;
    parallel_for(blocks, [&](std::size_t b) {
      cdouble* v = &data.flat(b * nc);
      std::vector<cdouble> tmp(nc, cdouble(0));
      for (std::size_t r = 0; r < nc; ++r)
        for (std::size_t c = 0; c < nc; ++c) tmp[r] += w(r, c) * v[c];
      for (std::size_t r = 0; r < nc; ++r) v[r] = tmp[r];
    });
  }
};

inline NoiseWhitener make_whitener(const ArrayC& psi, double ridge_rel = 1e-9) {
  if (psi.ndim() != 2 || psi.shape(0) != psi.shape(1))
    throw std::invalid_argument("make_whitener: covariance must be square");
  const std::size_t nc = psi.shape(0);
  EMat a = to_eigen(psi);
  const double ridge = ridge_rel * a.real().trace() / static_cast<double>(nc);
  a += ridge * EMat::Identity(nc, nc);
  Eigen::LLT<EMat> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("make_whitener: covariance is not positive definite");
  EMat l = llt.matrixL();
  EMat w = l.triangularView<Eigen::Lower>().solve(EMat::Identity(nc, nc));
  return NoiseWhitener{from_eigen(w), from_eigen(l)};
}

// Whitened copy of a radial acquisition; timestamps are preserved.
inline RadialKSpace prewhiten(const RadialKSpace& ks, const NoiseWhitener& w) {
  if (ks.n_coils() != w.n_coils())
    throw std::invalid_argument("prewhiten: coil count mismatch");
  RadialKSpace out = ks;
  w.apply_inplace(out.data);
  return out;
}

}  // namespace cinerad
