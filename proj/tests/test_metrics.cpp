#include <cmath>

#include "catch2/catch_amalgamated.hpp"
#include "cinerad/metrics/metrics.hpp"
#include "helpers.hpp"

using namespace cinerad;

namespace {

ArrayD smooth_scene(std::size_t n) {
  ArrayD img({n, n});
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double dy = (static_cast<double>(y) - 0.5 * double(n)) / (0.22 * double(n));
      const double dx = (static_cast<double>(x) - 0.5 * double(n)) / (0.22 * double(n));
      img(y, x) = std::exp(-0.5 * (dy * dy + dx * dx));
    }
  return img;
}

}  // namespace

TEST_CASE("psnr follows its closed form", "[metrics]") {
  const std::size_t n = 8;
  ArrayD ref({n, n}), test({n, n});
  ref.fill(0.25);
  ref(0, 0) = 1.0;  // reference peak 1
  for (std::size_t i = 0; i < ref.size(); ++i) test.flat(i) = ref.flat(i) + 0.1;
  // MSE = 0.01 against peak 1: exactly 20 dB.
  CHECK(psnr(ref, test) == Catch::Approx(20.0).epsilon(1e-12));

  // Scaling both images together leaves the score unchanged.
  ArrayD ref2 = ref, test2 = test;
  for (std::size_t i = 0; i < n * n; ++i) {
    ref2.flat(i) *= 7.0;
    test2.flat(i) *= 7.0;
  }
  CHECK(psnr(ref2, test2) == Catch::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("identical images score infinite psnr", "[metrics]") {
  ArrayD a({4, 4});
  test_helpers::fill_gaussian(a, 81);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);
}

TEST_CASE("per-frame psnr scores each frame against its own twin", "[metrics]") {
  const std::size_t t = 3, n = 8;
  ArrayD ref({t, n, n}), test({t, n, n});
  ref.fill(0.5);
  test.fill(0.5);
  for (std::size_t f = 0; f < t; ++f) {
    ref(f, 0, 0) = 1.0;
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) test(f, y, x) += 0.1 * static_cast<double>(f + 1);
  }
  test(0, 0, 0) = ref(0, 0, 0) + 0.1;
  test(1, 0, 0) = ref(1, 0, 0) + 0.2;
  test(2, 0, 0) = ref(2, 0, 0) + 0.3;
  const std::vector<double> pf = psnr_per_frame(ref, test);
  REQUIRE(pf.size() == t);
  CHECK(pf[0] == Catch::Approx(20.0).epsilon(1e-12));
  CHECK(pf[1] == Catch::Approx(20.0 * std::log10(1.0 / 0.2)).epsilon(1e-12));
  CHECK(pf[2] == Catch::Approx(20.0 * std::log10(1.0 / 0.3)).epsilon(1e-12));
}

TEST_CASE("gaussian window normalizes and peaks centrally", "[metrics]") {
  const auto w = metrics_detail::gaussian_window(11, 1.5);
  REQUIRE(w.size() == 11);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(w[i] == Catch::Approx(w[10 - i]).epsilon(1e-12));
    CHECK(w[i] < w[i + 1]);
  }
}

TEST_CASE("structural similarity of an image with itself is one", "[metrics]") {
  const std::size_t t = 2, n = 24;
  ArrayD stack({t, n, n});
  const ArrayD scene = smooth_scene(n);
  for (std::size_t f = 0; f < t; ++f)
    for (std::size_t i = 0; i < n * n; ++i) stack.flat(f * n * n + i) = scene.flat(i);

  const SsimResult res = ssim(stack, stack);
  REQUIRE(res.per_frame.size() == t);
  CHECK(res.mean == Catch::Approx(1.0).margin(1e-9));
  CHECK(res.stddev == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("structural similarity decays with noise level", "[metrics]") {
  const std::size_t n = 32;
  const ArrayD scene = smooth_scene(n);
  ArrayD ref({1, n, n}), a({1, n, n}), b({1, n, n});
  ArrayD noise({n, n});
  test_helpers::fill_gaussian(noise, 82);
  for (std::size_t i = 0; i < n * n; ++i) {
    ref.flat(i) = scene.flat(i);
    a.flat(i) = scene.flat(i) + 0.05 * noise.flat(i);
    b.flat(i) = scene.flat(i) + 0.20 * noise.flat(i);
  }
  const double sa = ssim(ref, a).mean;
  const double sb = ssim(ref, b).mean;
  CHECK(sa < 1.0);
  CHECK(sb < sa);
  CHECK(sa > 0.5);
}

TEST_CASE("streak ratio rises with high-frequency contamination", "[metrics]") {
  const std::size_t n = 48;
  const ArrayD clean = smooth_scene(n);
  ArrayD striped({n, n});
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      striped(y, x) =
          clean(y, x) * (1.0 + 0.6 * std::cos(2.0 * M_PI * 0.4 * static_cast<double>(x)));

  const double s_clean = sar(clean);
  const double s_striped = sar(striped);
  CHECK(s_clean < 0.05);
  CHECK(s_striped > 5.0 * s_clean);

  ArrayD flat({n, n});
  flat.fill(3.0);
  CHECK(sar(flat) == 0.0);
}

TEST_CASE("streak ratio is exactly invariant to power-of-two scaling", "[metrics]") {
  const std::size_t n = 32;
  ArrayD img({n, n});
  test_helpers::fill_gaussian(img, 83);
  for (std::size_t i = 0; i < img.size(); ++i) img.flat(i) = std::abs(img.flat(i));
  ArrayD scaled({n, n});
  for (std::size_t i = 0; i < img.size(); ++i) scaled.flat(i) = 4.0 * img.flat(i);
  // Binary scaling is lossless through the transform chain, so the ratio is
  // bit-identical, not merely close.
  CHECK(sar(scaled) == sar(img));
}

TEST_CASE("profile extracts one column of magnitudes over time", "[metrics]") {
  const std::size_t t = 3, n = 6;
  ArrayC frames({t, n, n});
  test_helpers::fill_gaussian(frames, 84);
  const ArrayD prof = xt_profile(frames);
  REQUIRE(prof.shape(0) == t);
  REQUIRE(prof.shape(1) == n);
  for (std::size_t f = 0; f < t; ++f)
    for (std::size_t y = 0; y < n; ++y)
      CHECK(prof(f, y) == std::abs(frames(f, y, n / 2)));

  const ArrayD prof2 = xt_profile(frames, 1);
  for (std::size_t f = 0; f < t; ++f)
    for (std::size_t y = 0; y < n; ++y)
      CHECK(prof2(f, y) == std::abs(frames(f, y, std::size_t{1})));
  CHECK_THROWS(xt_profile(frames, n));
}
