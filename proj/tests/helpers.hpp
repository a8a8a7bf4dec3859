#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/rng.hpp"

namespace test_helpers {

using cinerad::ArrayC;
using cinerad::ArrayD;
using cinerad::cdouble;

inline void fill_gaussian(ArrayC& a, std::uint64_t seed, std::uint64_t stream = 0) {
  auto eng = cinerad::seeded_engine(seed, stream);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < a.size(); ++i) a.flat(i) = {g(eng), g(eng)};
}

inline void fill_gaussian(ArrayD& a, std::uint64_t seed, std::uint64_t stream = 0) {
  auto eng = cinerad::seeded_engine(seed, stream);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < a.size(); ++i) a.flat(i) = g(eng);
}

// Unique scratch path; the OS cleans /tmp, tests overwrite their own names.
inline std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cinerad_test_" + name)).string();
}

}  // namespace test_helpers
