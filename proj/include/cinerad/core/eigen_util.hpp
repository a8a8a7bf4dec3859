#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "cinerad/core/ndarray.hpp"

namespace cinerad {

using EMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic>;
using EVec = Eigen::Matrix<cdouble, Eigen::Dynamic, 1>;

inline EMat to_eigen(const ArrayC& a) {
  if (a.ndim() != 2) throw std::invalid_argument("to_eigen: expected a 2-d array");
  EMat m(a.shape(0), a.shape(1));
  for (std::size_t r = 0; r < a.shape(0); ++r)
    for (std::size_t c = 0; c < a.shape(1); ++c) m(r, c) = a(r, c);
  return m;
}

inline ArrayC from_eigen(const EMat& m) {
  ArrayC a({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a(r, c) = m(r, c);
  return a;
}

}  // namespace cinerad
