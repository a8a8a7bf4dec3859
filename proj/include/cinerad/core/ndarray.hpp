#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cinerad {

using cdouble = std::complex<double>;
using cfloat = std::complex<float>;

// Dense row-major n-d array; last index varies fastest. This layout is also
// the on-disk payload order of the array container format.
template <typename T>
class NdArray {
public:
  NdArray() = default;

  explicit NdArray(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(count(shape_)) {}

  NdArray(std::vector<std::size_t> shape, T fill)
      : shape_(std::move(shape)), data_(count(shape_), fill) {}

  NdArray(std::vector<std::size_t> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_))
      throw std::invalid_argument("NdArray: data size does not match shape");
  }

  std::size_t ndim() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t shape(std::size_t d) const { return shape_.at(d); }
  std::size_t dim(std::size_t d) const { return shape_.at(d); }

  // Row-major stride of dimension d, in elements.
  std::size_t stride(std::size_t d) const {
    std::size_t s = 1;
    for (std::size_t i = shape_.size(); i-- > d + 1;) s *= shape_[i];
    return s;
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  template <typename... Ix>
  T& operator()(Ix... ix) {
    return data_[offset(ix...)];
  }
  template <typename... Ix>
  const T& operator()(Ix... ix) const {
    return data_[offset(ix...)];
  }

  T& flat(std::size_t i) { return data_[i]; }
  const T& flat(std::size_t i) const { return data_[i]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(const NdArray& o) const { return shape_ == o.shape_; }

  bool empty() const { return data_.empty(); }

private:
  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  template <typename... Ix>
  std::size_t offset(Ix... ix) const {
    constexpr std::size_t n = sizeof...(Ix);
    const std::array<std::size_t, n> idx{static_cast<std::size_t>(ix)...};
    std::size_t off = 0;
    for (std::size_t d = 0; d < n; ++d) off = off * shape_[d] + idx[d];
    // Trailing dimensions beyond the supplied indices are not allowed.
    return off;
  }

  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

using ArrayC = NdArray<cdouble>;
using ArrayD = NdArray<double>;

template <typename T>
double norm2(const NdArray<T>& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(std::complex<double>(a.flat(i)));
  return std::sqrt(s);
}

inline double rel_l2(const ArrayC& a, const ArrayC& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("rel_l2: shape mismatch");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.flat(i) - b.flat(i));
    den += std::norm(b.flat(i));
  }
  return std::sqrt(num) / (std::sqrt(den) + 1e-300);
}

inline cdouble dotc(const ArrayC& a, const ArrayC& b) {
  // <a, b> with conjugation on the first argument.
  if (!a.same_shape(b)) throw std::invalid_argument("dotc: shape mismatch");
  cdouble s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.flat(i)) * b.flat(i);
  return s;
}

}  // namespace cinerad
