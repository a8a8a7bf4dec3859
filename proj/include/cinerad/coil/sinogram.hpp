#pragma once

#include <stdexcept>
#include <vector>

#include "cinerad/core/parallel.hpp"
#include "cinerad/core/types.hpp"
#include "cinerad/nufft/fftw.hpp"

namespace cinerad {

// Projection-domain view of radial k-space: a centered, normalized inverse
// 1-D DFT along the readout axis maps each (spoke, coil) readout onto radial
// positions. Layout is unchanged: [N_RO x N_sp x N_c], axis 0 becomes radial
// position with r = 0 at index N_RO / 2.
inline ArrayC to_sinogram(const ArrayC& kspace) {
  if (kspace.ndim() != 3) throw std::invalid_argument("to_sinogram: expected 3-d k-space");
  const std::size_t nro = kspace.shape(0), nsp = kspace.shape(1), nc = kspace.shape(2);
  if (nro < 2 || nro % 2 != 0)
    throw std::invalid_argument("to_sinogram: readout length must be even and >= 2");

  ArrayC out(kspace.shape());
  parallel_for(nsp * nc, [&](std::size_t b) {
    const std::size_t s = b / nc, c = b % nc;
    std::vector<cdouble> tmp(nro), spec(nro);
    for (std::size_t j = 0; j < nro; ++j) tmp[j] = kspace((j + nro / 2) % nro, s, c);
    fft::c2c_1d(nro, tmp.data(), spec.data(), FFTW_BACKWARD);
    for (std::size_t r = 0; r < nro; ++r)
      out(r, s, c) = spec[(r + nro / 2) % nro] / static_cast<double>(nro);
  });
  return out;
}

// Exact inverse of to_sinogram.
inline ArrayC from_sinogram(const ArrayC& sino) {
  if (sino.ndim() != 3) throw std::invalid_argument("from_sinogram: expected 3-d sinogram");
  const std::size_t nro = sino.shape(0), nsp = sino.shape(1), nc = sino.shape(2);
  if (nro < 2 || nro % 2 != 0)
    throw std::invalid_argument("from_sinogram: readout length must be even and >= 2");

  ArrayC out(sino.shape());
  parallel_for(nsp * nc, [&](std::size_t b) {
    const std::size_t s = b / nc, c = b % nc;
    std::vector<cdouble> tmp(nro), spec(nro);
    for (std::size_t r = 0; r < nro; ++r)
      tmp[(r + nro / 2) % nro] = sino(r, s, c) * static_cast<double>(nro);
    fft::c2c_1d(nro, tmp.data(), spec.data(), FFTW_FORWARD);
    for (std::size_t j = 0; j < nro; ++j)
      out(j, s, c) = spec[(j + nro / 2) % nro] / static_cast<double>(nro);
  });
  return out;
}

}  // namespace cinerad
