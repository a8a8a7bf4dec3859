#pragma once

#include <cmath>
#include <stdexcept>

#include "cinerad/core/types.hpp"

namespace cinerad {

// Golden angle in degrees: 360 / (1 + sqrt(5)) = 111.24611797...
inline double golden_angle_deg() { return 360.0 / (1.0 + std::sqrt(5.0)); }

// Radial trajectory with angles theta_i = (i * increment) mod 180 and readout
// positions k_r(j) = -0.5 + j / n_readout in cycles/FOV. Sample (s, j) sits at
// (k_y, k_x) = k_r * (sin theta, cos theta); j = n_readout/2 is exactly k = 0.
inline Trajectory make_trajectory(std::size_t n_spokes, std::size_t n_readout,
                                  double angle_increment_deg = golden_angle_deg()) {
  if (n_spokes == 0) throw std::invalid_argument("make_trajectory: n_spokes must be positive");
  if (n_readout < 2 || n_readout % 2 != 0)
    throw std::invalid_argument("make_trajectory: n_readout must be even and >= 2");

  Trajectory t;
  t.coords = ArrayD({n_spokes, n_readout, 2});
  t.angles_deg.resize(n_spokes);
  for (std::size_t s = 0; s < n_spokes; ++s) {
    double a = std::fmod(static_cast<double>(s) * angle_increment_deg, 180.0);
    if (a < 0.0) a += 180.0;
    t.angles_deg[s] = a;
    const double sn = std::sin(a * M_PI / 180.0), cs = std::cos(a * M_PI / 180.0);
    for (std::size_t j = 0; j < n_readout; ++j) {
      const double kr = -0.5 + static_cast<double>(j) / static_cast<double>(n_readout);
      t.coords(s, j, 0) = kr * sn;
      t.coords(s, j, 1) = kr * cs;
    }
  }
  return t;
}

// Trajectory restricted to a subset of spokes, preserving order.
inline Trajectory subset_trajectory(const Trajectory& t, const std::vector<std::size_t>& spokes) {
  const std::size_t nro = t.n_readout();
  Trajectory out;
  out.coords = ArrayD({spokes.size(), nro, 2});
  out.angles_deg.resize(spokes.size());
  for (std::size_t i = 0; i < spokes.size(); ++i) {
    const std::size_t s = spokes[i];
    if (s >= t.n_spokes()) throw std::out_of_range("subset_trajectory: spoke index");
    out.angles_deg[i] = t.angles_deg.empty() ? 0.0 : t.angles_deg[s];
    for (std::size_t j = 0; j < nro; ++j)
      for (std::size_t d = 0; d < 2; ++d) out.coords(i, j, d) = t.coords(s, j, d);
  }
  return out;
}

}  // namespace cinerad
