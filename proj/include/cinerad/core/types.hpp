#pragma once

#include <cstddef>
#include <vector>

#include "cinerad/core/ndarray.hpp"

namespace cinerad {

// Raw multi-coil radial acquisition. data is [N_RO x N_sp x N_c];
// spoke_timestamps holds one acquisition time (seconds) per spoke.
struct RadialKSpace {
  ArrayC data;
  std::vector<double> spoke_timestamps;

  std::size_t n_readout() const { return data.ndim() == 3 ? data.dim(0) : 0; }
  std::size_t n_spokes() const { return data.ndim() == 3 ? data.dim(1) : 0; }
  std::size_t n_coils() const { return data.ndim() == 3 ? data.dim(2) : 0; }
};

// Sample coordinates in cycles/FOV. coords is [N_sp x N_RO x 2] ordered
// (k_y, k_x), each component in [-0.5, 0.5). angles_deg[i] is the spoke
// angle in degrees, in [0, 180).
struct Trajectory {
  ArrayD coords;
  std::vector<double> angles_deg;

  std::size_t n_spokes() const { return coords.ndim() == 3 ? coords.dim(0) : 0; }
  std::size_t n_readout() const { return coords.ndim() == 3 ? coords.dim(1) : 0; }
};

// Physiological record covering one acquisition: cardiac trigger times
// (sorted, seconds) and a respiratory bellows waveform sampled at a fixed
// rate from t = 0.
struct PhysioTrace {
  std::vector<double> triggers;
  std::vector<double> bellows;
  double bellows_rate_hz = 0;
  double duration_s = 0;

  double bellows_at(double t) const {
    // Linear interpolation, clamped at the ends of the record.
    if (bellows.empty()) return 0;
    double u = t * bellows_rate_hz;
    if (u <= 0) return bellows.front();
    if (u >= static_cast<double>(bellows.size() - 1)) return bellows.back();
    std::size_t i = static_cast<std::size_t>(u);
    double f = u - static_cast<double>(i);
    return bellows[i] * (1 - f) + bellows[i + 1] * f;
  }
};

// Respiratory gate: one keep flag per spoke plus the surrogate values and
// threshold that produced it.
struct GatingMask {
  std::vector<bool> keep;
  std::vector<double> surrogate;
  double threshold = 0;

  std::size_t n_kept() const {
    std::size_t n = 0;
    for (bool k : keep) n += k;
    return n;
  }
};

// Cardiac-phase-sorted k-space. Phase t owns data [N_RO x N_sp_t x N_c],
// trajectory [N_sp_t x N_RO x 2] and the source spoke indices it was
// gathered from (disjoint across phases).
struct BinnedKSpace {
  std::vector<ArrayC> per_phase_data;
  std::vector<ArrayD> per_phase_traj;
  std::vector<std::vector<std::size_t>> phase_index_sets;
  std::size_t n_source_spokes = 0;

  std::size_t n_phases() const { return per_phase_data.size(); }
};

// Complex coil sensitivity maps, [N_c x N x N]. Where nonzero, the
// root-sum-of-squares across coils is 1.
struct SensitivityMaps {
  ArrayC maps;

  std::size_t n_coils() const { return maps.ndim() == 3 ? maps.dim(0) : 0; }
  std::size_t matrix() const { return maps.ndim() == 3 ? maps.dim(1) : 0; }
};

// Dynamic image stack, [T x N x N] complex.
struct CineImage {
  ArrayC frames;

  std::size_t n_phases() const { return frames.ndim() == 3 ? frames.dim(0) : 0; }
  std::size_t matrix() const { return frames.ndim() == 3 ? frames.dim(1) : 0; }
};

// Density compensation, [N_sp x N_RO], strictly positive.
struct DCFWeights {
  ArrayD w;

  std::size_t n_spokes() const { return w.ndim() == 2 ? w.dim(0) : 0; }
  std::size_t n_readout() const { return w.ndim() == 2 ? w.dim(1) : 0; }
};

}  // namespace cinerad
