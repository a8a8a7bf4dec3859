#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/core/parallel.hpp"
#include "cinerad/core/types.hpp"

namespace cinerad {

struct PhaseCorrectionResult {
  RadialKSpace kspace;
  std::vector<double> phase_rad;  // rotation removed from each spoke
  std::size_t n_flagged = 0;      // spokes left untouched for lack of center signal
};

// Per-spoke zeroth-order phase alignment. Every spoke crosses k = 0 at
// readout index N_RO / 2; projecting that center sample onto the coil-mean
// reference gives a phase estimate c_s whose angle is removed from the whole
// spoke. The result is aligned up to one global phase common to all spokes.
inline PhaseCorrectionResult phase_correct(const RadialKSpace& ks) {
  const std::size_t nro = ks.n_readout(), nsp = ks.n_spokes(), nc = ks.n_coils();
  if (nro < 2 || nro % 2 != 0)
    throw std::invalid_argument("phase_correct: readout length must be even and >= 2");
  const std::size_t jc = nro / 2;

  std::vector<cdouble> ref(nc, cdouble(0));
  for (std::size_t s = 0; s < nsp; ++s)
    for (std::size_t c = 0; c < nc; ++c) ref[c] += ks.data(jc, s, c);
  for (cdouble& r : ref) r /= static_cast<double>(nsp);

  std::vector<cdouble> proj(nsp, cdouble(0));
  double max_mag = 0.0;
  for (std::size_t s = 0; s < nsp; ++s) {
    for (std::size_t c = 0; c < nc; ++c) proj[s] += ks.data(jc, s, c) * std::conj(ref[c]);
    max_mag = std::max(max_mag, std::abs(proj[s]));
  }
  const double tol = max_mag * 1e-12;

  PhaseCorrectionResult out;
  out.kspace = ks;
  out.phase_rad.assign(nsp, 0.0);
  for (std::size_t s = 0; s < nsp; ++s)
    if (std::abs(proj[s]) <= tol) ++out.n_flagged;

  parallel_for(nsp, [&](std::size_t s) {
    const double mag = std::abs(proj[s]);
    if (mag <= tol) return;
    const cdouble rot = std::conj(proj[s]) / mag;  // exp(-i arg c_s)
    out.phase_rad[s] = std::arg(proj[s]);
    for (std::size_t j = 0; j < nro; ++j)
      for (std::size_t c = 0; c < nc; ++c) out.kspace.data(j, s, c) *= rot;
  });
  return out;
}

}  // namespace cinerad
