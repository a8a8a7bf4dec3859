#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cinerad/coil/regions.hpp"
#include "cinerad/core/eigen_util.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/core/types.hpp"

namespace cinerad {

// Virtual coil combination weights. Column k of basis defines virtual coil k
// as v'_k = sum_c conj(basis(c, k)) * v_c.
struct VirtualCoilBasis {
  ArrayC basis;                    // [N_c x N_v]
  std::vector<double> sir_values;  // per virtual coil, descending
};

// Coil covariance of the signal core (A) and of the interference band (B):
// mean of v v^H over the masked sinogram columns, optionally restricted to a
// spoke subset.
inline std::pair<ArrayC, ArrayC> compute_covariances(
    const ArrayC& sino, const RegionMasks& masks,
    const std::vector<std::size_t>* spokes = nullptr) {
  if (sino.ndim() != 3) throw std::invalid_argument("compute_covariances: expected 3-d sinogram");
  if (sino.shape(0) != masks.n_readout)
    throw std::invalid_argument("compute_covariances: mask/readout length mismatch");
  const std::size_t nsp = sino.shape(1), nc = sino.shape(2);

  std::vector<std::size_t> all;
  if (spokes == nullptr) {
    all.resize(nsp);
    for (std::size_t s = 0; s < nsp; ++s) all[s] = s;
    spokes = &all;
  }
  if (spokes->empty()) throw std::invalid_argument("compute_covariances: empty spoke subset");

  const auto accumulate = [&](const std::vector<std::size_t>& rows) {
    EMat acc = EMat::Zero(nc, nc);
    for (std::size_t s : *spokes) {
      if (s >= nsp) throw std::out_of_range("compute_covariances: spoke index");
      for (std::size_t j : rows) {
        EVec v(nc);
        for (std::size_t c = 0; c < nc; ++c) v(c) = sino(j, s, c);
        acc.noalias() += v * v.adjoint();
      }
    }
    acc /= static_cast<double>(spokes->size() * rows.size());
    acc = ((acc + acc.adjoint()) * 0.5).eval();
    return from_eigen(acc);
  };
  return {accumulate(masks.signal), accumulate(masks.interference)};
}

// Maximizes the signal-to-interference ratio w^H A w / w^H B w by solving the
// generalized Hermitian eigenproblem on the ridged interference covariance
// Bt = B + eps_rel * tr(B) / N_c * I. Returned columns are Bt-orthonormal and
// ordered by descending ratio.
inline VirtualCoilBasis solve_sir(const ArrayC& a, const ArrayC& b, std::size_t n_virtual,
                                  double eps_rel = 1e-6) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1) || !a.same_shape(b))
    throw std::invalid_argument("solve_sir: covariances must be square and equally sized");
  const std::size_t nc = a.shape(0);
  if (n_virtual == 0 || n_virtual > nc)
    throw std::invalid_argument("solve_sir: n_virtual must be in [1, N_c]");

  EMat ae = to_eigen(a), be = to_eigen(b);
  const auto herm_err = [](const EMat& m) {
    const double n = m.norm();
    return n == 0.0 ? 0.0 : (m - m.adjoint()).norm() / n;
  };
  if (herm_err(ae) > 1e-8 || herm_err(be) > 1e-8)
    throw std::invalid_argument("solve_sir: covariances are not Hermitian");
  ae = ((ae + ae.adjoint()) * 0.5).eval();
  be = ((be + be.adjoint()) * 0.5).eval();

  const double ridge = eps_rel * be.real().trace() / static_cast<double>(nc);
  be += ridge * EMat::Identity(nc, nc);

  Eigen::LLT<EMat> llt(be);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("solve_sir: interference covariance is not positive definite");
  EMat l = llt.matrixL();
  EMat linv = l.triangularView<Eigen::Lower>().solve(EMat::Identity(nc, nc));
  EMat m = linv * ae * linv.adjoint();
  m = ((m + m.adjoint()) * 0.5).eval();

  Eigen::SelfAdjointEigenSolver<EMat> eig(m);
  if (eig.info() != Eigen::Success) throw std::runtime_error("solve_sir: eigensolver failed");

  VirtualCoilBasis out;
  out.basis = ArrayC({nc, n_virtual});
  out.sir_values.resize(n_virtual);
  for (std::size_t k = 0; k < n_virtual; ++k) {
    const Eigen::Index src = static_cast<Eigen::Index>(nc - 1 - k);  // ascending -> descending
    out.sir_values[k] = eig.eigenvalues()(src);
    EVec w = l.adjoint().triangularView<Eigen::Upper>().solve(eig.eigenvectors().col(src));
    for (std::size_t c = 0; c < nc; ++c) out.basis(c, k) = w(c);
  }
  return out;
}

// Projects the trailing coil axis onto virtual coils: out_k = basis(:,k)^H v.
inline ArrayC apply_coil_basis(const ArrayC& data, const ArrayC& basis) {
  if (basis.ndim() != 2) throw std::invalid_argument("apply_coil_basis: basis must be 2-d");
  const std::size_t nc = basis.shape(0), nv = basis.shape(1);
  if (data.ndim() == 0 || data.shape(data.ndim() - 1) != nc)
    throw std::invalid_argument("apply_coil_basis: trailing axis must be coils");

  std::vector<std::size_t> shape = data.shape();
  shape.back() = nv;
  ArrayC out(shape);
  const std::size_t blocks = data.size() / nc;
  parallel_for(blocks, [&](std::size_t bi) {
    const cdouble* v = &data.flat(bi * nc);
    cdouble* o = &out.flat(bi * nv);
    for (std::size_t k = 0; k < nv; ++k) {
      cdouble acc(0);
      for (std::size_t c = 0; c < nc; ++c) acc += std::conj(basis(c, k)) * v[c];
      o[k] = acc;
    }
  });
  return out;
}

inline RadialKSpace apply_coil_basis(const RadialKSpace& ks, const ArrayC& basis) {
  RadialKSpace out;
  out.spoke_timestamps = ks.spoke_timestamps;
  out.data = apply_coil_basis(ks.data, basis);
  return out;
}

}  // namespace cinerad
