#pragma once

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "cinerad/core/types.hpp"

namespace cinerad {

// Result of an invariant check: ok == true, or the first violation found,
// identified by a path into the object plus a human-readable message.
struct ValidationReport {
  bool ok = true;
  std::string path;
  std::string message;

  static ValidationReport good() { return {}; }
  static ValidationReport bad(std::string p, std::string m) {
    return {false, std::move(p), std::move(m)};
  }
};

namespace detail {

template <typename T>
inline bool finite(const std::complex<T>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
inline bool finite(double v) { return std::isfinite(v); }

template <typename T>
ValidationReport check_finite(const NdArray<T>& a, const std::string& name) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!finite(a.flat(i))) {
      std::ostringstream p;
      p << name << ".flat[" << i << "]";
      return ValidationReport::bad(p.str(), "non-finite value");
    }
  }
  return ValidationReport::good();
}

}  // namespace detail

inline ValidationReport validate(const RadialKSpace& k) {
  if (k.data.ndim() != 3)
    return ValidationReport::bad("data", "expected 3 dimensions [N_RO x N_sp x N_c]");
  if (k.spoke_timestamps.size() != k.n_spokes())
    return ValidationReport::bad("spoke_timestamps", "length must equal spoke count");
  for (std::size_t i = 1; i < k.spoke_timestamps.size(); ++i) {
    if (!(k.spoke_timestamps[i] > k.spoke_timestamps[i - 1])) {
      std::ostringstream p;
      p << "spoke_timestamps[" << i << "]";
      return ValidationReport::bad(p.str(), "timestamps must be strictly increasing");
    }
  }
  return detail::check_finite(k.data, "data");
}

inline ValidationReport validate(const Trajectory& t) {
  if (t.coords.ndim() != 3 || t.coords.dim(2) != 2)
    return ValidationReport::bad("coords", "expected shape [N_sp x N_RO x 2]");
  if (t.angles_deg.size() != t.n_spokes())
    return ValidationReport::bad("angles_deg", "length must equal spoke count");
  const std::size_t nsp = t.n_spokes(), nro = t.n_readout();
  for (std::size_t s = 0; s < nsp; ++s) {
    for (std::size_t j = 0; j < nro; ++j) {
      for (std::size_t a = 0; a < 2; ++a) {
        double v = t.coords(s, j, a);
        if (!std::isfinite(v) || v < -0.5 || v >= 0.5) {
          std::ostringstream p;
          p << "coords[" << s << "," << j << "," << a << "]";
          return ValidationReport::bad(p.str(), "component out of [-0.5, 0.5)");
        }
      }
    }
    // Collinearity through the origin: every sample's cross product with a
    // reference nonzero sample on the same spoke vanishes.
    double ry = 0, rx = 0;
    for (std::size_t j = 0; j < nro; ++j) {
      double y = t.coords(s, j, 0), x = t.coords(s, j, 1);
      if (y * y + x * x > ry * ry + rx * rx) ry = y, rx = x;
    }
    for (std::size_t j = 0; j < nro; ++j) {
      double y = t.coords(s, j, 0), x = t.coords(s, j, 1);
      if (std::abs(y * rx - x * ry) > 1e-9) {
        std::ostringstream p;
        p << "coords[" << s << "," << j << "]";
        return ValidationReport::bad(p.str(), "spoke samples not collinear through origin");
      }
    }
  }
  return ValidationReport::good();
}

inline ValidationReport validate(const PhysioTrace& p) {
  if (!(p.duration_s > 0)) return ValidationReport::bad("duration_s", "must be positive");
  if (!(p.bellows_rate_hz > 0))
    return ValidationReport::bad("bellows_rate_hz", "must be positive");
  for (std::size_t i = 0; i < p.triggers.size(); ++i) {
    if (p.triggers[i] < 0 || p.triggers[i] > p.duration_s) {
      std::ostringstream s;
      s << "triggers[" << i << "]";
      return ValidationReport::bad(s.str(), "trigger outside [0, duration]");
    }
    if (i > 0 && !(p.triggers[i] > p.triggers[i - 1])) {
      std::ostringstream s;
      s << "triggers[" << i << "]";
      return ValidationReport::bad(s.str(), "triggers must be strictly increasing");
    }
  }
  return ValidationReport::good();
}

inline ValidationReport validate(const GatingMask& g) {
  if (g.surrogate.size() != g.keep.size())
    return ValidationReport::bad("surrogate", "length must equal keep length");
  if (!std::isfinite(g.threshold))
    return ValidationReport::bad("threshold", "non-finite threshold");
  return ValidationReport::good();
}

inline ValidationReport validate(const BinnedKSpace& b) {
  const std::size_t T = b.n_phases();
  if (b.per_phase_traj.size() != T || b.phase_index_sets.size() != T)
    return ValidationReport::bad("per_phase_traj", "per-phase vectors must have equal length");
  std::set<std::size_t> seen;
  std::size_t nro = 0, nc = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& d = b.per_phase_data[t];
    if (d.ndim() != 3) {
      std::ostringstream p;
      p << "per_phase_data[" << t << "]";
      return ValidationReport::bad(p.str(), "expected 3 dimensions");
    }
    if (t == 0) nro = d.dim(0), nc = d.dim(2);
    if (d.dim(0) != nro || d.dim(2) != nc) {
      std::ostringstream p;
      p << "per_phase_data[" << t << "]";
      return ValidationReport::bad(p.str(), "readout/coil dims differ across phases");
    }
    if (d.dim(1) != b.phase_index_sets[t].size()) {
      std::ostringstream p;
      p << "per_phase_data[" << t << "]";
      return ValidationReport::bad(p.str(), "spoke count does not match index set");
    }
    const auto& tr = b.per_phase_traj[t];
    if (tr.ndim() != 3 || tr.dim(0) != d.dim(1) || tr.dim(1) != nro || tr.dim(2) != 2) {
      std::ostringstream p;
      p << "per_phase_traj[" << t << "]";
      return ValidationReport::bad(p.str(), "trajectory shape does not match data");
    }
    for (std::size_t i : b.phase_index_sets[t]) {
      if (i >= b.n_source_spokes) {
        std::ostringstream p;
        p << "phase_index_sets[" << t << "]";
        return ValidationReport::bad(p.str(), "index beyond source spoke count");
      }
      if (!seen.insert(i).second) {
        std::ostringstream p;
        p << "phase_index_sets[" << t << "]";
        return ValidationReport::bad(p.str(), "spoke index assigned to more than one phase");
      }
    }
  }
  return ValidationReport::good();
}

inline ValidationReport validate(const SensitivityMaps& s) {
  if (s.maps.ndim() != 3)
    return ValidationReport::bad("maps", "expected 3 dimensions [N_c x N x N]");
  auto fin = detail::check_finite(s.maps, "maps");
  if (!fin.ok) return fin;
  const std::size_t nc = s.n_coils(), ny = s.maps.dim(1), nx = s.maps.dim(2);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      double rss = 0;
      for (std::size_t c = 0; c < nc; ++c) rss += std::norm(s.maps(c, y, x));
      rss = std::sqrt(rss);
      if (rss > 0 && std::abs(rss - 1.0) > 1e-6) {
        std::ostringstream p;
        p << "maps[:," << y << "," << x << "]";
        return ValidationReport::bad(p.str(), "nonzero pixel without unit RSS");
      }
    }
  }
  return ValidationReport::good();
}

inline ValidationReport validate(const CineImage& c) {
  if (c.frames.ndim() != 3)
    return ValidationReport::bad("frames", "expected 3 dimensions [T x N x N]");
  return detail::check_finite(c.frames, "frames");
}

inline ValidationReport validate(const DCFWeights& d) {
  if (d.w.ndim() != 2)
    return ValidationReport::bad("w", "expected 2 dimensions [N_sp x N_RO]");
  for (std::size_t i = 0; i < d.w.size(); ++i) {
    if (!(d.w.flat(i) > 0) || !std::isfinite(d.w.flat(i))) {
      std::ostringstream p;
      p << "w.flat[" << i << "]";
      return ValidationReport::bad(p.str(), "weights must be strictly positive and finite");
    }
  }
  return ValidationReport::good();
}

}  // namespace cinerad
