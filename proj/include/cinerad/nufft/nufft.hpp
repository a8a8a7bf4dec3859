#pragma once

// Kaiser-Bessel gridding NUFFT between a square N x N image and arbitrary
// k-space sample positions in cycles/FOV.
//
// Convention shared with the direct-DFT oracle below:
//   s(k) = sum_p x(p) * exp(-i 2 pi k . p)
// with pixel indices p centered at 0 (range -N/2 .. N/2-1) and k components
// in [-0.5, 0.5). k = 0 therefore picks up the plain image sum, and the
// adjoint is the exact conjugate-transpose of the forward map.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/nufft/fftw.hpp"

namespace cinerad {

struct NufftPlan {
  std::size_t n = 0;      // image matrix
  std::size_t grid = 0;   // oversampled grid, even
  double alpha = 2.0;     // oversampling ratio
  std::size_t width = 6;  // kernel width J, in oversampled grid units
  double beta = 0;
  std::size_t n_samples = 0;

  std::vector<double> apod;  // 1D deapodization, length n, centered layout

  // Per-sample gridding taps: `width` taps per dimension, indices
  // pre-wrapped into [0, grid).
  std::vector<std::int32_t> iy, ix;  // [M * width]
  std::vector<float> wy, wx;         // [M * width]
};

namespace nufft_detail {

inline double kb_beta(double alpha, std::size_t width) {
  double a = (static_cast<double>(width) / alpha) * (alpha - 0.5);
  double arg = a * a - 0.8;
  if (arg <= 0) throw std::invalid_argument("nufft: kernel width/oversampling out of range");
  return M_PI * std::sqrt(arg);
}

// Continuous Fourier transform of the KB kernel at frequency f (grid
// units^-1); the image-domain response used for deapodization.
inline double kb_transform(double beta, std::size_t width, double f) {
  double t = M_PI * static_cast<double>(width) * f;
  double d = beta * beta - t * t;
  double J = static_cast<double>(width);
  if (d > 0) {
    double s = std::sqrt(d);
    return J * std::sinh(s) / (s * std::cyl_bessel_i(0.0, beta));
  }
  double s = std::sqrt(-d);
  if (s < 1e-12) return J / std::cyl_bessel_i(0.0, beta);
  return J * std::sin(s) / (s * std::cyl_bessel_i(0.0, beta));
}

struct KernelTable {
  std::vector<double> v;
  double step_inv = 1024.0;
  double half_width = 0;

  double operator()(double d) const {
    // d = |distance| in grid units, d <= half_width + 1.
    double t = d * step_inv;
    std::size_t i = static_cast<std::size_t>(t);
    if (i + 1 >= v.size()) return 0.0;
    double f = t - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
  }
};

inline KernelTable make_table(double beta, std::size_t width) {
  KernelTable tab;
  tab.half_width = static_cast<double>(width) / 2.0;
  const std::size_t samples_per_unit = 1 << 10;
  std::size_t len = static_cast<std::size_t>(tab.half_width * samples_per_unit) + 2;
  tab.v.resize(len + 2, 0.0);
  double i0b = std::cyl_bessel_i(0.0, beta);
  for (std::size_t i = 0; i <= len; ++i) {
    double u = static_cast<double>(i) / samples_per_unit;
    double r = 1.0 - (u / tab.half_width) * (u / tab.half_width);
    tab.v[i] = r <= 0 ? 0.0 : std::cyl_bessel_i(0.0, beta * std::sqrt(r)) / i0b;
  }
  return tab;
}

// Flatten [N_sp x N_RO x 2] or [M x 2] coordinate arrays to a sample list.
inline void flatten_coords(const ArrayD& coords, std::vector<double>& ky,
                           std::vector<double>& kx) {
  std::size_t m = 0;
  if (coords.ndim() == 3 && coords.dim(2) == 2)
    m = coords.dim(0) * coords.dim(1);
  else if (coords.ndim() == 2 && coords.dim(1) == 2)
    m = coords.dim(0);
  else
    throw std::invalid_argument("nufft: coords must be [N_sp x N_RO x 2] or [M x 2]");
  ky.resize(m);
  kx.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double y = coords.flat(2 * i), x = coords.flat(2 * i + 1);
    if (!(y >= -0.5) || !(y < 0.5) || !(x >= -0.5) || !(x < 0.5))
      throw std::invalid_argument("nufft: coordinate outside [-0.5, 0.5)");
    ky[i] = y;
    kx[i] = x;
  }
}

}  // namespace nufft_detail

inline NufftPlan plan_nufft(std::size_t n, const ArrayD& coords, double alpha = 2.0,
                            std::size_t width = 6) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("nufft: matrix size must be even, >= 2");
  if (alpha < 1.25) throw std::invalid_argument("nufft: oversampling must be >= 1.25");
  if (width < 2) throw std::invalid_argument("nufft: kernel width must be >= 2");

  NufftPlan p;
  p.n = n;
  p.alpha = alpha;
  p.width = width;
  std::size_t g = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
  g += g % 2;  // forced even
  p.grid = g;
  p.beta = nufft_detail::kb_beta(alpha, width);

  // Deapodization: inverse of the kernel's image-domain transform, centered.
  p.apod.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    double pix = static_cast<double>(a) - static_cast<double>(n) / 2.0;
    double v = nufft_detail::kb_transform(p.beta, width, pix / static_cast<double>(g));
    if (!(v > 0)) throw std::runtime_error("nufft: non-positive apodization value");
    p.apod[a] = v;
  }

  std::vector<double> ky, kx;
  nufft_detail::flatten_coords(coords, ky, kx);
  p.n_samples = ky.size();

  auto tab = nufft_detail::make_table(p.beta, width);
  const std::size_t J = width;
  const double half = static_cast<double>(J) / 2.0;
  const std::int64_t gi = static_cast<std::int64_t>(g);
  p.iy.resize(p.n_samples * J);
  p.ix.resize(p.n_samples * J);
  p.wy.resize(p.n_samples * J);
  p.wx.resize(p.n_samples * J);
  for (std::size_t m = 0; m < p.n_samples; ++m) {
    double gy = ky[m] * static_cast<double>(g);
    double gx = kx[m] * static_cast<double>(g);
    std::int64_t y0 = static_cast<std::int64_t>(std::ceil(gy - half));
    std::int64_t x0 = static_cast<std::int64_t>(std::ceil(gx - half));
    for (std::size_t a = 0; a < J; ++a) {
      std::int64_t ya = y0 + static_cast<std::int64_t>(a);
      std::int64_t xa = x0 + static_cast<std::int64_t>(a);
      p.iy[m * J + a] = static_cast<std::int32_t>(((ya % gi) + gi) % gi);
      p.ix[m * J + a] = static_cast<std::int32_t>(((xa % gi) + gi) % gi);
      p.wy[m * J + a] = static_cast<float>(tab(std::abs(gy - static_cast<double>(ya))));
      p.wx[m * J + a] = static_cast<float>(tab(std::abs(gx - static_cast<double>(xa))));
    }
  }
  return p;
}

inline ArrayC nufft_forward(const NufftPlan& p, const ArrayC& image) {
  if (image.ndim() != 2 || image.dim(0) != p.n || image.dim(1) != p.n)
    throw std::invalid_argument("nufft_forward: image shape mismatch");
  const std::size_t n = p.n, g = p.grid, J = p.width;

  std::vector<cdouble> buf(g * g, cdouble(0));
  // Deapodize and embed with the centered pixel (index N/2) at grid index 0.
  for (std::size_t ay = 0; ay < n; ++ay) {
    std::size_t ry = (ay + g - n / 2) % g;
    double fy = 1.0 / p.apod[ay];
    for (std::size_t ax = 0; ax < n; ++ax) {
      std::size_t rx = (ax + g - n / 2) % g;
      buf[ry * g + rx] = image(ay, ax) * (fy / p.apod[ax]);
    }
  }
  std::vector<cdouble> spec(g * g);
  fft::c2c_2d(g, g, buf.data(), spec.data(), -1);

  ArrayC out({p.n_samples});
  const cdouble* S = spec.data();
  parallel_for(p.n_samples, [&](std::size_t m) {
    const std::int32_t* riy = &p.iy[m * J];
    const std::int32_t* rix = &p.ix[m * J];
    const float* fy = &p.wy[m * J];
    const float* fx = &p.wx[m * J];
    cdouble acc(0);
    for (std::size_t a = 0; a < J; ++a) {
      const cdouble* row = S + static_cast<std::size_t>(riy[a]) * g;
      cdouble racc(0);
      for (std::size_t b = 0; b < J; ++b)
        racc += static_cast<double>(fx[b]) * row[rix[b]];
      acc += static_cast<double>(fy[a]) * racc;
    }
    out.flat(m) = acc;
  });
  return out;
}

inline ArrayC nufft_adjoint(const NufftPlan& p, const ArrayC& samples,
                            const double* dcf = nullptr) {
  if (samples.size() != p.n_samples)
    throw std::invalid_argument("nufft_adjoint: sample count mismatch");
  const std::size_t n = p.n, g = p.grid, J = p.width;

  std::vector<cdouble> spec(g * g, cdouble(0));
  for (std::size_t m = 0; m < p.n_samples; ++m) {
    cdouble v = samples.flat(m);
    if (dcf) v *= dcf[m];
    const std::int32_t* riy = &p.iy[m * J];
    const std::int32_t* rix = &p.ix[m * J];
    const float* fy = &p.wy[m * J];
    const float* fx = &p.wx[m * J];
    for (std::size_t a = 0; a < J; ++a) {
      cdouble vy = v * static_cast<double>(fy[a]);
      cdouble* row = spec.data() + static_cast<std::size_t>(riy[a]) * g;
      for (std::size_t b = 0; b < J; ++b)
        row[rix[b]] += vy * static_cast<double>(fx[b]);
    }
  }
  std::vector<cdouble> buf(g * g);
  fft::c2c_2d(g, g, spec.data(), buf.data(), +1);

  ArrayC out({n, n});
  for (std::size_t ay = 0; ay < n; ++ay) {
    std::size_t ry = (ay + g - n / 2) % g;
    double fy = 1.0 / p.apod[ay];
    for (std::size_t ax = 0; ax < n; ++ax) {
      std::size_t rx = (ax + g - n / 2) % g;
      out(ay, ax) = buf[ry * g + rx] * (fy / p.apod[ax]);
    }
  }
  return out;
}

// Brute-force oracle, same convention, independent of the gridding path.
inline ArrayC direct_dft(const ArrayD& coords, const ArrayC& image) {
  std::vector<double> ky, kx;
  nufft_detail::flatten_coords(coords, ky, kx);
  if (image.ndim() != 2) throw std::invalid_argument("direct_dft: image must be 2-d");
  const std::size_t ny = image.dim(0), nx = image.dim(1);
  ArrayC out({ky.size()});
  parallel_for(ky.size(), [&](std::size_t m) {
    std::vector<cdouble> vx(nx);
    for (std::size_t ax = 0; ax < nx; ++ax) {
      double px = static_cast<double>(ax) - static_cast<double>(nx) / 2.0;
      double ph = -2.0 * M_PI * kx[m] * px;
      vx[ax] = cdouble(std::cos(ph), std::sin(ph));
    }
    cdouble acc(0);
    for (std::size_t ay = 0; ay < ny; ++ay) {
      double py = static_cast<double>(ay) - static_cast<double>(ny) / 2.0;
      double ph = -2.0 * M_PI * ky[m] * py;
      cdouble vy(std::cos(ph), std::sin(ph));
      cdouble racc(0);
      for (std::size_t ax = 0; ax < nx; ++ax) racc += image(ay, ax) * vx[ax];
      acc += vy * racc;
    }
    out.flat(m) = acc;
  });
  return out;
}

inline ArrayC direct_dft_adjoint(const ArrayD& coords, const ArrayC& samples, std::size_t n) {
  std::vector<double> ky, kx;
  nufft_detail::flatten_coords(coords, ky, kx);
  if (samples.size() != ky.size())
    throw std::invalid_argument("direct_dft_adjoint: sample count mismatch");
  const std::size_t M = ky.size();
  // Per-sample x-phase table, exp(+i 2 pi kx px); built once, no recurrences.
  std::vector<cdouble> vx(M * n);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t ax = 0; ax < n; ++ax) {
      double px = static_cast<double>(ax) - static_cast<double>(n) / 2.0;
      double ph = 2.0 * M_PI * kx[m] * px;
      vx[m * n + ax] = cdouble(std::cos(ph), std::sin(ph));
    }
  }
  ArrayC out({n, n});
  parallel_for(n, [&](std::size_t ay) {
    double py = static_cast<double>(ay) - static_cast<double>(n) / 2.0;
    for (std::size_t m = 0; m < M; ++m) {
      double ph = 2.0 * M_PI * ky[m] * py;
      cdouble z = samples.flat(m) * cdouble(std::cos(ph), std::sin(ph));
      const cdouble* row = &vx[m * n];
      for (std::size_t ax = 0; ax < n; ++ax) out(ay, ax) += z * row[ax];
    }
  });
  return out;
}

}  // namespace cinerad
