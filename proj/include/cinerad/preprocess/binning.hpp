#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cinerad/core/types.hpp"
#include "cinerad/preprocess/trajectory.hpp"

namespace cinerad {

struct CardiacBins {
  std::vector<std::vector<std::size_t>> phase_spokes;  // ascending spoke indices per phase
  std::size_t n_dropped = 0;                           // spokes outside [first, last) trigger
};

// Retrospective cardiac binning: a spoke at time ts inside the RR interval
// [r_j, r_{j+1}) maps to phase floor(T * (ts - r_j) / (r_{j+1} - r_j)),
// clamped to T - 1. Spokes before the first or at/after the last trigger are
// dropped.
inline CardiacBins bin_cardiac(const std::vector<double>& timestamps,
                               const std::vector<double>& triggers, std::size_t n_phases) {
  if (n_phases == 0) throw std::invalid_argument("bin_cardiac: n_phases must be positive");
  if (triggers.size() < 2) throw std::invalid_argument("bin_cardiac: need at least two triggers");
  if (!std::is_sorted(triggers.begin(), triggers.end()))
    throw std::invalid_argument("bin_cardiac: triggers must be sorted");

  CardiacBins bins;
  bins.phase_spokes.resize(n_phases);
  for (std::size_t s = 0; s < timestamps.size(); ++s) {
    const double ts = timestamps[s];
    auto it = std::upper_bound(triggers.begin(), triggers.end(), ts);
    if (it == triggers.begin() || it == triggers.end()) {
      ++bins.n_dropped;
      continue;
    }
    const double t1 = *it, t0 = *(it - 1);
    const double phi = (ts - t0) / (t1 - t0);
    auto t = static_cast<std::size_t>(std::floor(static_cast<double>(n_phases) * phi));
    if (t >= n_phases) t = n_phases - 1;
    bins.phase_spokes[t].push_back(s);
  }
  return bins;
}

// Respiratory gating by order statistic: the acceptance threshold is the
// k-th smallest surrogate value with k = ceil(keep_fraction * N); spokes with
// surrogate <= threshold are kept (ties may keep slightly more than k).
inline GatingMask gate_respiratory(const std::vector<double>& surrogate, double keep_fraction) {
  if (surrogate.empty()) throw std::invalid_argument("gate_respiratory: empty surrogate");
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
    throw std::invalid_argument("gate_respiratory: keep_fraction must be in (0, 1]");

  const std::size_t n = surrogate.size();
  auto k = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n)));
  if (k == 0) k = 1;
  if (k > n) k = n;
  std::vector<double> sorted = surrogate;
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  const double thr = sorted[k - 1];

  GatingMask mask;
  mask.surrogate = surrogate;
  mask.threshold = thr;
  mask.keep.resize(n);
  for (std::size_t s = 0; s < n; ++s) mask.keep[s] = surrogate[s] <= thr;
  return mask;
}

// Per-phase spoke lists with gated-out spokes removed.
inline std::vector<std::vector<std::size_t>> apply_gate(
    const std::vector<std::vector<std::size_t>>& phase_spokes, const GatingMask& mask) {
  std::vector<std::vector<std::size_t>> out(phase_spokes.size());
  for (std::size_t t = 0; t < phase_spokes.size(); ++t)
    for (std::size_t s : phase_spokes[t]) {
      if (s >= mask.keep.size()) throw std::out_of_range("apply_gate: spoke index");
      if (mask.keep[s]) out[t].push_back(s);
    }
  return out;
}

// Prospective undersampling: keep the earliest floor(|G_t| / R') spokes of
// each phase, where R' is the smallest per-phase rate whose total retained
// count does not exceed floor(G / r_accel) for G total available spokes.
// Phases that would end up empty make the request infeasible.
inline std::vector<std::vector<std::size_t>> select_spokes(
    const std::vector<std::vector<std::size_t>>& phase_spokes, double r_accel) {
  if (!(r_accel >= 1.0)) throw std::invalid_argument("select_spokes: r_accel must be >= 1");

  std::size_t total = 0;
  for (const auto& g : phase_spokes) total += g.size();
  const auto target =
      static_cast<std::size_t>(std::floor(static_cast<double>(total) / r_accel));

  const auto retained = [&](double rp) {
    std::size_t kept = 0;
    for (const auto& g : phase_spokes)
      kept += static_cast<std::size_t>(std::floor(static_cast<double>(g.size()) / rp));
    return kept;
  };

  double lo = 1.0, hi = 1.0;
  while (retained(hi) > target) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("select_spokes: cannot satisfy acceleration");
  }
  // retained() is non-increasing in rp; shrink [lo, hi] to the switch point.
  for (int it = 0; it < 200 && retained(lo) > target; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (retained(mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  const double rp = retained(lo) <= target ? lo : hi;

  std::vector<std::vector<std::size_t>> out(phase_spokes.size());
  std::string empty_list;
  for (std::size_t t = 0; t < phase_spokes.size(); ++t) {
    const auto keep = static_cast<std::size_t>(
        std::floor(static_cast<double>(phase_spokes[t].size()) / rp));
    if (keep == 0) {
      if (!empty_list.empty()) empty_list += ", ";
      empty_list += std::to_string(t);
      continue;
    }
    out[t].assign(phase_spokes[t].begin(), phase_spokes[t].begin() + keep);
  }
  if (!empty_list.empty())
    throw std::runtime_error("select_spokes: acceleration " + std::to_string(r_accel) +
                             " empties cardiac phase(s) " + empty_list);
  return out;
}

// Copies the selected spokes of each phase into contiguous per-phase k-space
// and trajectory blocks.
inline BinnedKSpace materialize_bins(const RadialKSpace& ks, const Trajectory& traj,
                                     const std::vector<std::vector<std::size_t>>& phase_spokes) {
  if (ks.n_spokes() != traj.n_spokes() || ks.n_readout() != traj.n_readout())
    throw std::invalid_argument("materialize_bins: k-space/trajectory mismatch");
  const std::size_t nro = ks.n_readout(), nc = ks.n_coils();

  BinnedKSpace out;
  out.n_source_spokes = ks.n_spokes();
  out.phase_index_sets = phase_spokes;
  out.per_phase_data.reserve(phase_spokes.size());
  out.per_phase_traj.reserve(phase_spokes.size());
  for (const auto& spokes : phase_spokes) {
    ArrayC data({nro, spokes.size(), nc});
    for (std::size_t i = 0; i < spokes.size(); ++i) {
      const std::size_t s = spokes[i];
      if (s >= ks.n_spokes()) throw std::out_of_range("materialize_bins: spoke index");
      for (std::size_t j = 0; j < nro; ++j)
        for (std::size_t c = 0; c < nc; ++c) data(j, i, c) = ks.data(j, s, c);
    }
    out.per_phase_data.push_back(std::move(data));
    out.per_phase_traj.push_back(subset_trajectory(traj, spokes).coords);
  }
  return out;
}

}  // namespace cinerad
