#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "cinerad/core/ndarray.hpp"

namespace cinerad::fft {

// Cached FFTW plans. Plans are created once per (shape, direction) with
// FFTW_ESTIMATE | FFTW_UNALIGNED: estimate keeps planning deterministic,
// unaligned lets the plan execute on any caller buffer. Plan creation is
// serialized; execution via fftw_execute_dft is thread-safe.
namespace detail {

inline std::mutex& planner_mu() {
  static std::mutex m;
  return m;
}

inline fftw_plan plan_2d(int ny, int nx, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lk(planner_mu());
  auto key = std::make_tuple(ny, nx, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(ny) * nx);
  fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(ny) * nx);
  fftw_plan p = fftw_plan_dft_2d(ny, nx, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  cache[key] = p;
  return p;
}

inline fftw_plan plan_1d(int n, int sign) {
  static std::map<std::tuple<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lk(planner_mu());
  auto key = std::make_tuple(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(n));
  fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(n));
  fftw_plan p = fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  cache[key] = p;
  return p;
}

}  // namespace detail

// Unnormalized 2D DFT. sign -1: exp(-i2pi...), sign +1: exp(+i2pi...).
// The cached plans are strictly out-of-place; aliased calls (in == out)
// bounce through a scratch copy since FFTW forbids executing an
// out-of-place plan on overlapping arrays.
inline void c2c_2d(std::size_t ny, std::size_t nx, const cdouble* in, cdouble* out, int sign) {
  fftw_plan p = detail::plan_2d(static_cast<int>(ny), static_cast<int>(nx), sign);
  if (in == out) {
    std::vector<cdouble> tmp(in, in + ny * nx);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
    return;
  }
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

inline void c2c_1d(std::size_t n, const cdouble* in, cdouble* out, int sign) {
  fftw_plan p = detail::plan_1d(static_cast<int>(n), sign);
  if (in == out) {
    std::vector<cdouble> tmp(in, in + n);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
    return;
  }
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace cinerad::fft
