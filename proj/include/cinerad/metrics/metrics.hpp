#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/types.hpp"
#include "cinerad/nufft/fftw.hpp"

namespace cinerad {

inline ArrayD magnitude(const ArrayC& a) {
  ArrayD out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out.flat(i) = std::abs(a.flat(i));
  return out;
}

// Peak signal-to-noise ratio in dB over the whole array, with the peak taken
// from the reference: 20 log10(max|ref| / sqrt(MSE)). Identical inputs give
// +infinity.
inline double psnr(const ArrayD& ref, const ArrayD& test) {
  if (!ref.same_shape(test)) throw std::invalid_argument("psnr: shape mismatch");
  if (ref.size() == 0) throw std::invalid_argument("psnr: empty input");
  double peak = 0.0, se = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    peak = std::max(peak, std::abs(ref.flat(i)));
    const double d = ref.flat(i) - test.flat(i);
    se += d * d;
  }
  const double mse = se / static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  if (peak == 0.0) throw std::invalid_argument("psnr: reference is identically zero");
  return 20.0 * std::log10(peak / std::sqrt(mse));
}

// Per-frame PSNR along the leading axis of a [T x ...] stack, each frame
// against the stack-wide reference peak.
inline std::vector<double> psnr_per_frame(const ArrayD& ref, const ArrayD& test) {
  if (!ref.same_shape(test)) throw std::invalid_argument("psnr_per_frame: shape mismatch");
  if (ref.ndim() < 2) throw std::invalid_argument("psnr_per_frame: expected a frame stack");
  const std::size_t t = ref.shape(0), per = ref.size() / t;
  double peak = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) peak = std::max(peak, std::abs(ref.flat(i)));
  if (peak == 0.0) throw std::invalid_argument("psnr_per_frame: reference is identically zero");

  std::vector<double> out(t);
  for (std::size_t f = 0; f < t; ++f) {
    double se = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      const double d = ref.flat(f * per + i) - test.flat(f * per + i);
      se += d * d;
    }
    const double mse = se / static_cast<double>(per);
    out[f] = mse == 0.0 ? std::numeric_limits<double>::infinity()
                        : 20.0 * std::log10(peak / std::sqrt(mse));
  }
  return out;
}

namespace metrics_detail {

inline std::vector<double> gaussian_window(std::size_t width, double sigma) {
  std::vector<double> w(width);
  const double c = (static_cast<double>(width) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    const double d = static_cast<double>(i) - c;
    w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable valid-region convolution of a [ny x nx] plane with a symmetric
// window; output is [(ny - w + 1) x (nx - w + 1)].
inline std::vector<double> valid_conv(const double* img, std::size_t ny, std::size_t nx,
                                      const std::vector<double>& win) {
  const std::size_t w = win.size(), oy = ny - w + 1, ox = nx - w + 1;
  std::vector<double> horiz(ny * ox), out(oy * ox);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < ox; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w; ++k) acc += win[k] * img[y * nx + x + k];
      horiz[y * ox + x] = acc;
    }
  for (std::size_t y = 0; y < oy; ++y)
    for (std::size_t x = 0; x < ox; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w; ++k) acc += win[k] * horiz[(y + k) * ox + x];
      out[y * ox + x] = acc;
    }
  return out;
}

inline double ssim_plane(const double* ref, const double* test, std::size_t ny, std::size_t nx,
                         double inv_peak, const std::vector<double>& win, double c1, double c2) {
  const std::size_t n = ny * nx;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ref[i] * inv_peak;
    y[i] = test[i] * inv_peak;
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = valid_conv(x.data(), ny, nx, win), my = valid_conv(y.data(), ny, nx, win);
  const auto mxx = valid_conv(xx.data(), ny, nx, win), myy = valid_conv(yy.data(), ny, nx, win);
  const auto mxy = valid_conv(xy.data(), ny, nx, win);

  double acc = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cxy = mxy[i] - mx[i] * my[i];
    acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
           ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return acc / static_cast<double>(mx.size());
}

}  // namespace metrics_detail

struct SsimResult {
  std::vector<double> per_frame;
  double mean = 0.0;
  double stddev = 0.0;
};

// Mean structural similarity with an 11 x 11 Gaussian window (sigma 1.5),
// valid-region convolution, and stabilizers c1 = 0.01^2, c2 = 0.03^2 on
// inputs normalized by the reference peak. Accepts [N x N] or [T x N x N].
inline SsimResult ssim(const ArrayD& ref, const ArrayD& test, std::size_t window = 11,
                       double sigma = 1.5) {
  if (!ref.same_shape(test)) throw std::invalid_argument("ssim: shape mismatch");
  if (ref.ndim() != 2 && ref.ndim() != 3) throw std::invalid_argument("ssim: expected 2-d or 3-d");
  const std::size_t t = ref.ndim() == 3 ? ref.shape(0) : 1;
  const std::size_t ny = ref.shape(ref.ndim() - 2), nx = ref.shape(ref.ndim() - 1);
  if (ny < window || nx < window)
    throw std::invalid_argument("ssim: image smaller than the window");

  double peak = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) peak = std::max(peak, std::abs(ref.flat(i)));
  if (peak == 0.0) throw std::invalid_argument("ssim: reference is identically zero");

  const auto win = metrics_detail::gaussian_window(window, sigma);
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;

  SsimResult out;
  out.per_frame.resize(t);
  for (std::size_t f = 0; f < t; ++f)
    out.per_frame[f] = metrics_detail::ssim_plane(&ref.flat(f * ny * nx), &test.flat(f * ny * nx),
                                                  ny, nx, 1.0 / peak, win, c1, c2);
  for (double v : out.per_frame) out.mean += v;
  out.mean /= static_cast<double>(t);
  for (double v : out.per_frame) out.stddev += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(out.stddev / static_cast<double>(t));
  return out;
}

// Streak-artifact ratio of a single image: the reference is the image itself
// passed through a radial Hann low-pass (unity at k = 0, zero at and beyond
// k = 0.5 * lowpass_frac cycles/pixel); the score is mean |I - I_ref| over
// mean I_ref, restricted to pixels with I_ref above 5% of its peak. The
// ratio is invariant to positive rescaling of the input.
inline double sar(const ArrayD& image, double lowpass_frac = 0.5) {
  if (image.ndim() != 2) throw std::invalid_argument("sar: expected a 2-d image");
  if (!(lowpass_frac > 0.0) || lowpass_frac > 1.0)
    throw std::invalid_argument("sar: lowpass_frac must be in (0, 1]");
  const std::size_t ny = image.shape(0), nx = image.shape(1);
  const double kmax = 0.5 * lowpass_frac;

  std::vector<cdouble> buf(ny * nx);
  for (std::size_t i = 0; i < ny * nx; ++i) buf[i] = image.flat(i);
  fft::c2c_2d(ny, nx, buf.data(), buf.data(), FFTW_FORWARD);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double fy =
        (iy < (ny + 1) / 2 ? static_cast<double>(iy) : static_cast<double>(iy) - ny) / ny;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double fx =
          (ix < (nx + 1) / 2 ? static_cast<double>(ix) : static_cast<double>(ix) - nx) / nx;
      const double k = std::hypot(fy, fx);
      const double h = k < kmax ? 0.5 * (1.0 + std::cos(M_PI * k / kmax)) : 0.0;
      buf[iy * nx + ix] *= h;
    }
  }
  fft::c2c_2d(ny, nx, buf.data(), buf.data(), FFTW_BACKWARD);

  std::vector<double> ref(ny * nx);
  double peak = 0.0;
  const double inv_n = 1.0 / static_cast<double>(ny * nx);
  for (std::size_t i = 0; i < ny * nx; ++i) {
    ref[i] = std::abs(buf[i]) * inv_n;
    peak = std::max(peak, ref[i]);
  }
  if (peak == 0.0) return 0.0;

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ny * nx; ++i) {
    if (ref[i] <= 0.05 * peak) continue;
    num += std::abs(image.flat(i) - ref[i]);
    den += ref[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

inline double sar(const ArrayC& image, double lowpass_frac = 0.5) {
  return sar(magnitude(image), lowpass_frac);
}

// Time-position profile: magnitude along one image column for every frame,
// [T x N]. Defaults to the center column.
inline ArrayD xt_profile(const ArrayC& frames, std::size_t column = SIZE_MAX) {
  if (frames.ndim() != 3) throw std::invalid_argument("xt_profile: expected [T x N x N]");
  const std::size_t t = frames.shape(0), ny = frames.shape(1), nx = frames.shape(2);
  if (column == SIZE_MAX) column = nx / 2;
  if (column >= nx) throw std::out_of_range("xt_profile: column out of range");
  ArrayD out({t, ny});
  for (std::size_t f = 0; f < t; ++f)
    for (std::size_t y = 0; y < ny; ++y) out(f, y) = std::abs(frames(f, y, column));
  return out;
}

}  // namespace cinerad
