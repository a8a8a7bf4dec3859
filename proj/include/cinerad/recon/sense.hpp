#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cinerad/core/parallel.hpp"
#include "cinerad/core/rng.hpp"
#include "cinerad/core/types.hpp"
#include "cinerad/nufft/nufft.hpp"
#include "cinerad/preprocess/dcf.hpp"

namespace cinerad {

// Phase-resolved non-Cartesian SENSE encoding: frame t maps to coil samples
// through pixelwise sensitivity weighting followed by the frame's NUFFT.
// Sample vectors are stored [N_c x M_t] with m = spoke * N_RO + readout.
struct SenseOperator {
  std::size_t n = 0;
  SensitivityMaps maps;            // [N_c x N x N]
  std::vector<NufftPlan> plans;    // one per cardiac phase
  std::vector<ArrayD> dcf;         // per phase [N_sp_t x N_RO]

  std::size_t n_phases() const { return plans.size(); }
  std::size_t n_coils() const { return maps.n_coils(); }
  std::size_t n_samples(std::size_t t) const { return plans[t].n_samples; }
};

inline SenseOperator make_sense_operator(const BinnedKSpace& bins, const SensitivityMaps& maps,
                                         double alpha = 2.0, std::size_t width = 6) {
  SenseOperator op;
  op.n = maps.matrix();
  op.maps = maps;
  op.plans.reserve(bins.n_phases());
  op.dcf.reserve(bins.n_phases());
  for (std::size_t t = 0; t < bins.n_phases(); ++t) {
    if (bins.per_phase_traj[t].shape(0) == 0)
      throw std::invalid_argument("make_sense_operator: empty cardiac phase");
    op.plans.push_back(plan_nufft(op.n, bins.per_phase_traj[t], alpha, width));
    op.dcf.push_back(compute_dcf(bins.per_phase_traj[t]).w);
  }
  return op;
}

// Reorders binned k-space [N_RO x N_sp_t x N_c] into operator sample order.
inline std::vector<ArrayC> to_op_samples(const BinnedKSpace& bins) {
  std::vector<ArrayC> y;
  y.reserve(bins.n_phases());
  for (std::size_t t = 0; t < bins.n_phases(); ++t) {
    const ArrayC& d = bins.per_phase_data[t];
    const std::size_t nro = d.shape(0), nsp = d.shape(1), nc = d.shape(2);
    ArrayC out({nc, nsp * nro});
    for (std::size_t s = 0; s < nsp; ++s)
      for (std::size_t j = 0; j < nro; ++j)
        for (std::size_t c = 0; c < nc; ++c) out(c, s * nro + j) = d(j, s, c);
    y.push_back(std::move(out));
  }
  return y;
}

// A_t applied to one frame: [N x N] -> [N_c x M_t].
inline ArrayC sense_forward_phase(const SenseOperator& op, std::size_t t, const ArrayC& x) {
  const std::size_t n = op.n, nc = op.n_coils();
  ArrayC y({nc, op.n_samples(t)});
  ArrayC tmp({n, n});
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < n * n; ++i) tmp.flat(i) = x.flat(i) * op.maps.maps.flat(c * n * n + i);
    ArrayC s = nufft_forward(op.plans[t], tmp);
    for (std::size_t m = 0; m < s.size(); ++m) y(c, m) = s.flat(m);
  }
  return y;
}

// A_t^H applied to one phase's samples: [N_c x M_t] -> [N x N]. With
// use_dcf the samples are density-weighted first (gridding combine).
inline ArrayC sense_adjoint_phase(const SenseOperator& op, std::size_t t, const ArrayC& y,
                                  bool use_dcf) {
  const std::size_t n = op.n, nc = op.n_coils();
  if (y.ndim() != 2 || y.shape(0) != nc || y.shape(1) != op.n_samples(t))
    throw std::invalid_argument("sense_adjoint_phase: sample shape mismatch");
  ArrayC out({n, n});
  ArrayC row({op.n_samples(t)});
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t m = 0; m < row.size(); ++m) row.flat(m) = y(c, m);
    ArrayC g = nufft_adjoint(op.plans[t], row, use_dcf ? op.dcf[t].data() : nullptr);
    for (std::size_t i = 0; i < n * n; ++i)
      out.flat(i) += std::conj(op.maps.maps.flat(c * n * n + i)) * g.flat(i);
  }
  return out;
}

// A_t^H A_t x for one frame, the normal operator of the data term.
inline ArrayC sense_normal_phase(const SenseOperator& op, std::size_t t, const ArrayC& x) {
  return sense_adjoint_phase(op, t, sense_forward_phase(op, t, x), false);
}

inline std::vector<ArrayC> sense_forward(const SenseOperator& op, const ArrayC& x) {
  const std::size_t tph = op.n_phases(), n = op.n;
  if (x.ndim() != 3 || x.shape(0) != tph || x.shape(1) != n || x.shape(2) != n)
    throw std::invalid_argument("sense_forward: expected [T x N x N]");
  std::vector<ArrayC> y;
  y.reserve(tph);
  for (std::size_t t = 0; t < tph; ++t) {
    ArrayC frame({n, n});
    for (std::size_t i = 0; i < n * n; ++i) frame.flat(i) = x.flat(t * n * n + i);
    y.push_back(sense_forward_phase(op, t, frame));
  }
  return y;
}

inline ArrayC sense_adjoint(const SenseOperator& op, const std::vector<ArrayC>& y, bool use_dcf) {
  const std::size_t tph = op.n_phases(), n = op.n;
  if (y.size() != tph) throw std::invalid_argument("sense_adjoint: phase count mismatch");
  ArrayC x({tph, n, n});
  for (std::size_t t = 0; t < tph; ++t) {
    ArrayC frame = sense_adjoint_phase(op, t, y[t], use_dcf);
    for (std::size_t i = 0; i < n * n; ++i) x.flat(t * n * n + i) = frame.flat(i);
  }
  return x;
}

// Density-compensated adjoint of every phase: the direct (gridding) cine
// reconstruction.
inline CineImage gridding_recon(const SenseOperator& op, const std::vector<ArrayC>& y) {
  return CineImage{sense_adjoint(op, y, true)};
}

// Largest eigenvalue of A_t^H A_t on the best-sampled phase, by power
// iteration from a seeded random start. Block-diagonal over phases, so this
// approximates the spectral norm of the whole data term; iterative solvers
// add their own safety margin on top.
inline double estimate_lipschitz(const SenseOperator& op, std::size_t power_iters = 20,
                                 std::uint64_t seed = 0x11f5a1) {
  std::size_t t_star = 0;
  for (std::size_t t = 1; t < op.n_phases(); ++t)
    if (op.n_samples(t) > op.n_samples(t_star)) t_star = t;

  auto eng = seeded_engine(seed, 0x4c1b);
  std::normal_distribution<double> dist(0.0, 1.0);
  ArrayC v({op.n, op.n});
  for (std::size_t i = 0; i < v.size(); ++i) v.flat(i) = cdouble(dist(eng), dist(eng));

  double lam = 0.0;
  for (std::size_t it = 0; it < power_iters; ++it) {
    const double nv = norm2(v);
    if (nv == 0.0) throw std::runtime_error("estimate_lipschitz: degenerate operator");
    for (std::size_t i = 0; i < v.size(); ++i) v.flat(i) /= nv;
    v = sense_normal_phase(op, t_star, v);
    lam = norm2(v);  // Rayleigh quotient of the normalized previous iterate
  }
  if (!(lam > 0.0)) throw std::runtime_error("estimate_lipschitz: nonpositive estimate");
  return lam;
}

// Coil sensitivity estimation from pooled spokes: each coil image is the
// density-compensated adjoint of its samples through a Hann taper confined to
// |k| <= taper_radius (low spatial frequencies only), and maps are the coil
// images over their root-sum-of-squares, zeroed where the RSS falls below
// 1e-3 of its peak.
inline SensitivityMaps estimate_sensitivities(const ArrayC& data, const ArrayD& coords,
                                              std::size_t n, double taper_radius = 0.125,
                                              double alpha = 2.0, std::size_t width = 6) {
  if (data.ndim() != 3) throw std::invalid_argument("estimate_sensitivities: expected 3-d data");
  const std::size_t nro = data.shape(0), nsp = data.shape(1), nc = data.shape(2);
  if (coords.ndim() != 3 || coords.shape(0) != nsp || coords.shape(1) != nro)
    throw std::invalid_argument("estimate_sensitivities: data/trajectory mismatch");
  if (!(taper_radius > 0.0) || taper_radius > 0.5)
    throw std::invalid_argument("estimate_sensitivities: taper_radius must be in (0, 0.5]");

  const NufftPlan plan = plan_nufft(n, coords, alpha, width);
  const ArrayD w = compute_dcf(coords).w;

  ArrayC coil_imgs({nc, n, n});
  ArrayC row({nsp * nro});
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t s = 0; s < nsp; ++s)
      for (std::size_t j = 0; j < nro; ++j) {
        const double kr = std::hypot(coords(s, j, 0), coords(s, j, 1));
        const double h =
            kr < taper_radius ? 0.5 * (1.0 + std::cos(M_PI * kr / taper_radius)) : 0.0;
        row.flat(s * nro + j) = data(j, s, c) * h;
      }
    ArrayC g = nufft_adjoint(plan, row, w.data());
    for (std::size_t i = 0; i < n * n; ++i) coil_imgs.flat(c * n * n + i) = g.flat(i);
  }

  ArrayD rss({n, n});
  double peak = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < nc; ++c) acc += std::norm(coil_imgs.flat(c * n * n + i));
    rss.flat(i) = std::sqrt(acc);
    peak = std::max(peak, rss.flat(i));
  }
  if (peak == 0.0) throw std::runtime_error("estimate_sensitivities: zero signal");

  SensitivityMaps maps;
  maps.maps = ArrayC({nc, n, n});
  for (std::size_t i = 0; i < n * n; ++i) {
    if (rss.flat(i) < 1e-3 * peak) continue;
    for (std::size_t c = 0; c < nc; ++c)
      maps.maps.flat(c * n * n + i) = coil_imgs.flat(c * n * n + i) / rss.flat(i);
  }
  return maps;
}

}  // namespace cinerad
