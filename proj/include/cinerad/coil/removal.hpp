#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cinerad/core/types.hpp"
#include "cinerad/metrics/metrics.hpp"

namespace cinerad {

struct CoilRemovalResult {
  std::vector<std::size_t> kept;  // ascending coil indices retained
  std::vector<double> scores;     // streak-artifact ratio per input coil
  double threshold = 0.0;         // cutoff actually applied
};

// Streak-based coil rejection: each coil's single-coil image is scored with
// the streak-artifact ratio and coils above threshold_rel times the median
// score are dropped. At least max(1, N_c / 2) coils survive; when the cutoff
// would remove more, the lowest-scoring coils are kept instead.
inline CoilRemovalResult detect_streak_coils(const ArrayC& coil_images,
                                             double threshold_rel = 1.5,
                                             double lowpass_frac = 0.5) {
  if (coil_images.ndim() != 3)
    throw std::invalid_argument("detect_streak_coils: expected [N_c x N x N] images");
  if (!(threshold_rel >= 1.0))
    throw std::invalid_argument("detect_streak_coils: threshold_rel must be >= 1");
  const std::size_t nc = coil_images.shape(0);
  const std::size_t ny = coil_images.shape(1), nx = coil_images.shape(2);
  if (nc == 0) throw std::invalid_argument("detect_streak_coils: no coils");

  CoilRemovalResult out;
  out.scores.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    ArrayD img({ny, nx});
    for (std::size_t i = 0; i < ny * nx; ++i)
      img.flat(i) = std::abs(coil_images.flat(c * ny * nx + i));
    out.scores[c] = sar(img, lowpass_frac);
  }

  std::vector<double> sorted = out.scores;
  std::sort(sorted.begin(), sorted.end());
  const double median =
      nc % 2 == 1 ? sorted[nc / 2] : 0.5 * (sorted[nc / 2 - 1] + sorted[nc / 2]);
  out.threshold = threshold_rel * median;
  for (std::size_t c = 0; c < nc; ++c)
    if (out.scores[c] <= out.threshold) out.kept.push_back(c);

  const std::size_t min_keep = std::max<std::size_t>(1, nc / 2);
  if (out.kept.size() < min_keep) {
    std::vector<std::size_t> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.scores[a] < out.scores[b]; });
    out.kept.assign(order.begin(), order.begin() + min_keep);
    std::sort(out.kept.begin(), out.kept.end());
    out.threshold = out.scores[order[min_keep - 1]];
  }
  return out;
}

// Copies a subset of the trailing coil axis.
inline ArrayC select_coils(const ArrayC& data, const std::vector<std::size_t>& kept) {
  if (data.ndim() == 0) throw std::invalid_argument("select_coils: empty input");
  const std::size_t nc = data.shape(data.ndim() - 1);
  if (kept.empty()) throw std::invalid_argument("select_coils: empty selection");
  for (std::size_t c : kept)
    if (c >= nc) throw std::out_of_range("select_coils: coil index");

  std::vector<std::size_t> shape = data.shape();
  shape.back() = kept.size();
  ArrayC out(shape);
  const std::size_t blocks = data.size() / nc;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < kept.size(); ++k)
      out.flat(b * kept.size() + k) = data.flat(b * nc + kept[k]);
  return out;
}

}  // namespace cinerad
