#pragma once

// Dynamic digital phantom for golden-angle radial cine acquisitions: an
// analytic scene (background ellipse, beating blood-pool disc, one bright
// peripheral source) modulated by smooth synthetic coil profiles, sampled by
// exact nonuniform DFT along each spoke at that spoke's cardiac phase and
// respiratory state.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/core/rng.hpp"
#include "cinerad/core/types.hpp"

namespace cinerad {

struct PhantomConfig {
  std::size_t matrix_size = 128;
  std::size_t n_readout = 128;
  std::size_t n_coils = 8;

  double heart_center_y = 64.0;
  double heart_center_x = 53.8;
  double heart_r_min = 9.0;
  double heart_r_max = 16.6;
  double heart_intensity = 2.0;

  double periph_center_y = 64.0;
  double periph_center_x = 117.8;
  double periph_radius = 6.4;
  double periph_intensity = 6.0;

  double bg_semiaxis_y = 57.6;
  double bg_semiaxis_x = 51.2;

  double rr_mean_s = 0.9;
  double rr_jitter_s = 0.05;
  double resp_period_s = 4.0;
  double resp_depth_px = 3.8;

  double tr_s = 0.003;
  double duration_s = 12.0;
  double noise_sigma = 1.0;
};

// Geometry defaults scale with the matrix so small test phantoms keep the
// same anatomy-to-FOV proportions.
inline PhantomConfig default_phantom_config(std::size_t n) {
  PhantomConfig c;
  double fn = static_cast<double>(n);
  c.matrix_size = n;
  c.n_readout = n;
  c.heart_center_y = 0.50 * fn;
  c.heart_center_x = 0.42 * fn;
  c.heart_r_min = 0.07 * fn;
  c.heart_r_max = 0.13 * fn;
  c.periph_center_y = 0.50 * fn;
  c.periph_center_x = 0.92 * fn;
  c.periph_radius = 0.05 * fn;
  c.bg_semiaxis_y = 0.45 * fn;
  c.bg_semiaxis_x = 0.40 * fn;
  c.resp_depth_px = 0.03 * fn;
  return c;
}

inline void check_phantom_config(const PhantomConfig& c) {
  double half = static_cast<double>(c.matrix_size) / 2.0;
  if (c.matrix_size < 8 || c.matrix_size % 2 != 0)
    throw std::invalid_argument("phantom: matrix_size must be even, >= 8");
  if (c.n_readout < 2 || c.n_readout % 2 != 0)
    throw std::invalid_argument("phantom: n_readout must be even, >= 2");
  if (!(c.heart_r_min > 0) || !(c.heart_r_min < c.heart_r_max) || !(c.heart_r_max < half))
    throw std::invalid_argument("phantom: need 0 < heart_r_min < heart_r_max < N/2");
  if (!(c.tr_s > 0) || !(c.duration_s > 0) || !(c.rr_mean_s > 0) || !(c.resp_period_s > 0))
    throw std::invalid_argument("phantom: timing parameters must be positive");
  if (c.rr_jitter_s < 0 || c.rr_jitter_s >= c.rr_mean_s)
    throw std::invalid_argument("phantom: rr_jitter must be in [0, rr_mean)");
  if (c.noise_sigma < 0) throw std::invalid_argument("phantom: noise_sigma must be >= 0");
  if (c.n_coils < 1) throw std::invalid_argument("phantom: need at least one coil");
}

// Blood-pool radius over the cardiac cycle: r_max at phase 0, r_min at 0.5.
inline double heart_radius(const PhantomConfig& c, double phase) {
  return c.heart_r_max - (c.heart_r_max - c.heart_r_min) * (1.0 - std::cos(2.0 * M_PI * phase)) / 2.0;
}

namespace phantom_detail {

// 1-pixel linear edge; dist is the signed distance to the boundary.
inline double coverage(double dist) {
  double v = 0.5 - dist;
  return v < 0 ? 0 : (v > 1 ? 1 : v);
}

}  // namespace phantom_detail

inline ArrayD make_phantom_frame(const PhantomConfig& c, double cardiac_phase,
                                 double resp_displacement) {
  check_phantom_config(c);
  const std::size_t n = c.matrix_size;
  const double cy = static_cast<double>(n) / 2.0, cx = static_cast<double>(n) / 2.0;
  const double rh = heart_radius(c, cardiac_phase);
  ArrayD img({n, n});
  for (std::size_t ay = 0; ay < n; ++ay) {
    // The whole scene rides up and down with respiration.
    double y = static_cast<double>(ay) - resp_displacement;
    for (std::size_t ax = 0; ax < n; ++ax) {
      double x = static_cast<double>(ax);
      double ey = (y - cy) / c.bg_semiaxis_y, ex = (x - cx) / c.bg_semiaxis_x;
      double bg_dist = (std::sqrt(ey * ey + ex * ex) - 1.0) * std::min(c.bg_semiaxis_y, c.bg_semiaxis_x);
      double v = phantom_detail::coverage(bg_dist) * 1.0;
      double hd = std::hypot(y - c.heart_center_y, x - c.heart_center_x) - rh;
      double hc = phantom_detail::coverage(hd);
      v = v * (1.0 - hc) + c.heart_intensity * hc;
      double pd = std::hypot(y - c.periph_center_y, x - c.periph_center_x) - c.periph_radius;
      double pc = phantom_detail::coverage(pd);
      v = v * (1.0 - pc) + c.periph_intensity * pc;
      img(ay, ax) = v;
    }
  }
  return img;
}

// Smooth complex coil profiles: Gaussians centered on a ring of radius
// 0.6*(N/2), with a gentle per-coil linear phase ramp. Raw (unnormalized).
inline ArrayC simulate_coils_raw(std::size_t n_coils, std::size_t n) {
  ArrayC maps({n_coils, n, n});
  const double cy = static_cast<double>(n) / 2.0, cx = cy;
  const double ring = 0.6 * static_cast<double>(n) / 2.0;
  const double sigma = 0.45 * static_cast<double>(n);
  for (std::size_t c = 0; c < n_coils; ++c) {
    double phi = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(n_coils);
    double ccy = cy + ring * std::sin(phi), ccx = cx + ring * std::cos(phi);
    double ramp_y = 0.25 * std::sin(phi), ramp_x = 0.25 * std::cos(phi);
    for (std::size_t ay = 0; ay < n; ++ay) {
      for (std::size_t ax = 0; ax < n; ++ax) {
        double dy = static_cast<double>(ay) - ccy, dx = static_cast<double>(ax) - ccx;
        double amp = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
        double ph = 2.0 * M_PI *
                        (ramp_y * (static_cast<double>(ay) - cy) +
                         ramp_x * (static_cast<double>(ax) - cx)) /
                        static_cast<double>(n) +
                    2.0 * M_PI * static_cast<double>(c) / static_cast<double>(n_coils);
        maps(c, ay, ax) = amp * cdouble(std::cos(ph), std::sin(ph));
      }
    }
  }
  return maps;
}

inline SensitivityMaps normalize_rss(ArrayC maps) {
  const std::size_t nc = maps.dim(0), ny = maps.dim(1), nx = maps.dim(2);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      double rss = 0;
      for (std::size_t c = 0; c < nc; ++c) rss += std::norm(maps(c, y, x));
      rss = std::sqrt(rss);
      if (rss > 0)
        for (std::size_t c = 0; c < nc; ++c) maps(c, y, x) /= rss;
    }
  }
  return SensitivityMaps{std::move(maps)};
}

inline SensitivityMaps simulate_coils(std::size_t n_coils, std::size_t n) {
  return normalize_rss(simulate_coils_raw(n_coils, n));
}

// Cardiac triggers (one per R wave, jittered RR) plus a unit-amplitude
// sinusoidal bellows waveform sampled at 50 Hz.
inline PhysioTrace synth_physio(const PhantomConfig& c, std::uint64_t seed) {
  check_phantom_config(c);
  PhysioTrace p;
  p.duration_s = c.duration_s;
  p.bellows_rate_hz = 50.0;
  auto eng = seeded_engine(seed, 0xca4d1ac);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  double t = 0;
  while (t < c.duration_s) {
    p.triggers.push_back(t);
    t += c.rr_mean_s + c.rr_jitter_s * jitter(eng);
  }
  std::size_t m = static_cast<std::size_t>(c.duration_s * p.bellows_rate_hz);
  p.bellows.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double ti = static_cast<double>(i) / p.bellows_rate_hz;
    p.bellows[i] = std::sin(2.0 * M_PI * ti / c.resp_period_s);
  }
  return p;
}

// Bulk vertical shift driven by the bellows; expiration (bellows <= 0) is
// the rest position, inspiration displaces up to resp_depth_px.
inline double resp_displacement(const PhantomConfig& c, const PhysioTrace& p, double t) {
  return c.resp_depth_px * std::max(p.bellows_at(t), 0.0);
}

namespace phantom_detail {

// Cardiac phase for simulation: fractional position in the enclosing RR
// interval, extrapolated with the edge interval length outside the record.
inline double sim_cardiac_phase(const PhysioTrace& p, double t) {
  if (p.triggers.size() < 2) return 0.0;
  const auto& r = p.triggers;
  if (t < r.front()) {
    double rr = r[1] - r[0];
    double ph = std::fmod((t - r.front()) / rr, 1.0);
    return ph < 0 ? ph + 1.0 : ph;
  }
  if (t >= r.back()) {
    double rr = r[r.size() - 1] - r[r.size() - 2];
    return std::fmod((t - r.back()) / rr, 1.0);
  }
  auto it = std::upper_bound(r.begin(), r.end(), t);
  std::size_t j = static_cast<std::size_t>(it - r.begin()) - 1;
  return (t - r[j]) / (r[j + 1] - r[j]);
}

}  // namespace phantom_detail

struct SimulationResult {
  RadialKSpace kspace;
  CineImage ground_truth;
};

// Exact NDFT sampling of the coil-weighted dynamic scene, spoke by spoke.
// Each spoke is rendered at its own cardiac phase and respiratory shift;
// complex Gaussian noise (std noise_sigma per real/imag component) is drawn
// from a per-spoke deterministic stream. Ground truth is rendered at
// expiration (zero shift) at phase centers (t + 0.5) / T.
inline SimulationResult sample_radial(const PhantomConfig& c, const SensitivityMaps& maps,
                                      const Trajectory& traj, const PhysioTrace& trace,
                                      std::size_t n_truth_phases, std::uint64_t seed) {
  check_phantom_config(c);
  const std::size_t n = c.matrix_size;
  const std::size_t nsp = traj.n_spokes(), nro = traj.n_readout(), nc = maps.n_coils();
  if (maps.matrix() != n) throw std::invalid_argument("sample_radial: maps/matrix mismatch");
  if (nsp != static_cast<std::size_t>(c.duration_s / c.tr_s))
    throw std::invalid_argument("sample_radial: spoke count must be floor(duration/tr)");
  if (nro != c.n_readout) throw std::invalid_argument("sample_radial: readout length mismatch");

  RadialKSpace ks;
  ks.data = ArrayC({nro, nsp, nc});
  ks.spoke_timestamps.resize(nsp);
  for (std::size_t s = 0; s < nsp; ++s) ks.spoke_timestamps[s] = static_cast<double>(s) * c.tr_s;

  parallel_for(nsp, [&](std::size_t s) {
    const double ts = ks.spoke_timestamps[s];
    const double phase = phantom_detail::sim_cardiac_phase(trace, ts);
    const double disp = resp_displacement(c, trace, ts);
    ArrayD frame = make_phantom_frame(c, phase, disp);

    // Coil-weighted scene, coils contiguous per pixel; reused for every
    // readout sample of this spoke.
    std::vector<cdouble> cwf(n * n * nc);
    std::vector<bool> live(n * n);
    for (std::size_t ay = 0; ay < n; ++ay)
      for (std::size_t ax = 0; ax < n; ++ax) {
        double v = frame(ay, ax);
        live[ay * n + ax] = v != 0.0;
        if (v == 0.0) continue;
        for (std::size_t ci = 0; ci < nc; ++ci)
          cwf[(ay * n + ax) * nc + ci] = v * maps.maps(ci, ay, ax);
      }

    // The 2-d exponent separates per sample into row and column phase
    // vectors (2N sincos per sample instead of N^2).
    std::vector<cdouble> acc(nro * nc, cdouble(0));
    std::vector<cdouble> vy(n), vx(n);
    for (std::size_t j = 0; j < nro; ++j) {
      const double ky = traj.coords(s, j, 0), kx = traj.coords(s, j, 1);
      for (std::size_t a = 0; a < n; ++a) {
        double p = static_cast<double>(a) - static_cast<double>(n) / 2.0;
        double phy = -2.0 * M_PI * ky * p, phx = -2.0 * M_PI * kx * p;
        vy[a] = cdouble(std::cos(phy), std::sin(phy));
        vx[a] = cdouble(std::cos(phx), std::sin(phx));
      }
      cdouble* out = &acc[j * nc];
      for (std::size_t ay = 0; ay < n; ++ay) {
        const cdouble wy = vy[ay];
        const std::size_t row = ay * n;
        for (std::size_t ax = 0; ax < n; ++ax) {
          if (!live[row + ax]) continue;
          const cdouble w = wy * vx[ax];
          const cdouble* cp = &cwf[(row + ax) * nc];
          for (std::size_t ci = 0; ci < nc; ++ci) out[ci] += cp[ci] * w;
        }
      }
    }

    if (c.noise_sigma > 0) {
      auto eng = seeded_engine(seed, 0x5e0ca + s);
      std::normal_distribution<double> g(0.0, c.noise_sigma);
      for (std::size_t j = 0; j < nro; ++j)
        for (std::size_t ci = 0; ci < nc; ++ci) {
          double re = g(eng), im = g(eng);
          acc[j * nc + ci] += cdouble(re, im);
        }
    }
    for (std::size_t j = 0; j < nro; ++j)
      for (std::size_t ci = 0; ci < nc; ++ci) ks.data(j, s, ci) = acc[j * nc + ci];
  });

  CineImage truth;
  truth.frames = ArrayC({n_truth_phases, n, n});
  for (std::size_t t = 0; t < n_truth_phases; ++t) {
    double ph = (static_cast<double>(t) + 0.5) / static_cast<double>(n_truth_phases);
    ArrayD f = make_phantom_frame(c, ph, 0.0);
    for (std::size_t i = 0; i < n * n; ++i) truth.frames.flat(t * n * n + i) = f.flat(i);
  }
  return SimulationResult{std::move(ks), std::move(truth)};
}

}  // namespace cinerad
