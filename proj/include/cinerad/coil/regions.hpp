#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/core/ndarray.hpp"

namespace cinerad {

// Readout-axis index sets for the signal core and the streak-interference
// band of a sinogram. Radial positions span [-0.5, 0.5] inclusive:
// r_j = (j - (N_RO - 1) / 2) / (N_RO - 1).
struct RegionMasks {
  std::size_t n_readout = 0;
  std::vector<std::size_t> signal;        // |r_j| <= rho_signal
  std::vector<std::size_t> interference;  // |r_j| >= rho_interference
};

inline double region_position(std::size_t j, std::size_t n_readout) {
  return (static_cast<double>(j) - (static_cast<double>(n_readout) - 1.0) / 2.0) /
         (static_cast<double>(n_readout) - 1.0);
}

inline RegionMasks build_region_masks(std::size_t n_readout, double rho_signal = 0.25,
                                      double rho_interference = 0.375) {
  if (n_readout < 2) throw std::invalid_argument("build_region_masks: n_readout must be >= 2");
  if (!(rho_signal > 0.0) || !(rho_signal < rho_interference) || !(rho_interference <= 0.5))
    throw std::invalid_argument(
        "build_region_masks: need 0 < rho_signal < rho_interference <= 0.5");

  RegionMasks m;
  m.n_readout = n_readout;
  for (std::size_t j = 0; j < n_readout; ++j) {
    const double r = std::abs(region_position(j, n_readout));
    if (r <= rho_signal) m.signal.push_back(j);
    if (r >= rho_interference) m.interference.push_back(j);
  }
  if (m.signal.empty() || m.interference.empty())
    throw std::invalid_argument("build_region_masks: a region is empty at this readout length");
  return m;
}

}  // namespace cinerad
