#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "cinerad/coil/soc.hpp"
#include "cinerad/core/eigen_util.hpp"
#include "cinerad/core/types.hpp"

namespace cinerad {

struct SvdCompression {
  ArrayC basis;                     // [N_c x N_v], principal coil directions
  std::vector<double> eigenvalues;  // all Gram eigenvalues, descending
  double retained_energy = 0.0;     // top-N_v eigenvalue mass / total
};

// Principal-component coil compression. Eigenvectors of the coil covariance
// G = sum_m v_m v_m^H maximize the energy captured by the conjugating
// projection v'_k = basis(:,k)^H v; the top n_virtual of them form the basis.
inline SvdCompression svd_compress_basis(const ArrayC& data, std::size_t n_virtual) {
  if (data.ndim() == 0) throw std::invalid_argument("svd_compress_basis: empty input");
  const std::size_t nc = data.shape(data.ndim() - 1);
  if (nc == 0 || data.size() == 0) throw std::invalid_argument("svd_compress_basis: empty input");
  if (n_virtual == 0 || n_virtual > nc)
    throw std::invalid_argument("svd_compress_basis: n_virtual must be in [1, N_c]");

  EMat g = EMat::Zero(nc, nc);
  EVec v(nc);
  const std::size_t blocks = data.size() / nc;
  for (std::size_t b = 0; b < blocks; ++b) {
    const cdouble* p = &data.flat(b * nc);
    for (std::size_t c = 0; c < nc; ++c) v(c) = p[c];
    g.noalias() += v * v.adjoint();  // (a, b): v_a conj(v_b)
  }
  g = ((g + g.adjoint()) * 0.5).eval();

  Eigen::SelfAdjointEigenSolver<EMat> eig(g);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("svd_compress_basis: eigensolver failed");

  SvdCompression out;
  out.basis = ArrayC({nc, n_virtual});
  out.eigenvalues.resize(nc);
  double total = 0.0, kept = 0.0;
  for (std::size_t k = 0; k < nc; ++k) {
    const Eigen::Index src = static_cast<Eigen::Index>(nc - 1 - k);
    out.eigenvalues[k] = eig.eigenvalues()(src);
    total += out.eigenvalues[k];
    if (k < n_virtual) {
      kept += out.eigenvalues[k];
      for (std::size_t c = 0; c < nc; ++c) out.basis(c, k) = eig.eigenvectors()(c, src);
    }
  }
  out.retained_energy = total > 0.0 ? kept / total : 1.0;
  return out;
}

}  // namespace cinerad
