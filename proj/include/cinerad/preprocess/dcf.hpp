#pragma once

#include <cmath>
#include <stdexcept>

#include "cinerad/core/types.hpp"

namespace cinerad {

// Radial density compensation: each sample weight is the area of its annular
// sector, w = |k_r| * dk * pi / N_sp with dk = 1 / N_RO; the k = 0 sample
// gets the shared center disc, w = pi * (dk / 2)^2 / N_sp.
inline DCFWeights compute_dcf(const ArrayD& coords) {
  if (coords.ndim() != 3 || coords.shape(2) != 2)
    throw std::invalid_argument("compute_dcf: expected [N_sp x N_RO x 2] coordinates");
  const std::size_t nsp = coords.shape(0), nro = coords.shape(1);
  if (nsp == 0 || nro == 0) throw std::invalid_argument("compute_dcf: empty trajectory");

  const double dk = 1.0 / static_cast<double>(nro);
  const double ring = dk * M_PI / static_cast<double>(nsp);
  const double center = M_PI * (dk / 2.0) * (dk / 2.0) / static_cast<double>(nsp);

  DCFWeights out;
  out.w = ArrayD({nsp, nro});
  for (std::size_t s = 0; s < nsp; ++s)
    for (std::size_t j = 0; j < nro; ++j) {
      const double kr = std::hypot(coords(s, j, 0), coords(s, j, 1));
      out.w(s, j) = kr < dk * 1e-6 ? center : kr * ring;
    }
  return out;
}

inline DCFWeights compute_dcf(const Trajectory& traj) { return compute_dcf(traj.coords); }

}  // namespace cinerad
