#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cinerad/core/ndarray.hpp"

namespace cinerad {

// Binary PGM (P5) preview with percentile windowing: values map linearly
// from [0, p99] to [0, 255], clamped above.
inline void write_pgm(const std::string& path, const ArrayD& img, double percentile = 99.0) {
  if (img.ndim() != 2) throw std::invalid_argument("write_pgm: expected a 2-d image");
  const std::size_t ny = img.shape(0), nx = img.shape(1);

  std::vector<double> vals(img.data(), img.data() + img.size());
  for (double& v : vals) v = std::abs(v);
  const auto k = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(vals.size()) - 1.0,
                       percentile / 100.0 * static_cast<double>(vals.size())));
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k), vals.end());
  double hi = vals[k];
  if (hi <= 0.0) hi = 1.0;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  f << "P5\n" << nx << " " << ny << "\n255\n";
  std::vector<unsigned char> row(nx);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      const double v = std::abs(img(y, x)) / hi * 255.0;
      row[x] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
    }
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(nx));
  }
  if (!f) throw std::runtime_error("write_pgm: write failed for " + path);
}

// Frame montage of a [T x N x N] magnitude stack, tiled row-major into a
// near-square grid with 1-pixel separators, shared window across frames.
inline ArrayD montage(const ArrayD& stack) {
  if (stack.ndim() != 3) throw std::invalid_argument("montage: expected [T x N x N]");
  const std::size_t t = stack.shape(0), ny = stack.shape(1), nx = stack.shape(2);
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(t))));
  const std::size_t rows = (t + cols - 1) / cols;

  ArrayD out({rows * (ny + 1) - 1, cols * (nx + 1) - 1});
  for (std::size_t f = 0; f < t; ++f) {
    const std::size_t r0 = (f / cols) * (ny + 1), c0 = (f % cols) * (nx + 1);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) out(r0 + y, c0 + x) = stack(f, y, x);
  }
  return out;
}

}  // namespace cinerad
