#pragma once

// Array container I/O. Files are NPY v1.0: magic, a Python-literal header
// carrying dtype/order/shape, then the raw little-endian payload. Payload is
// written in row-major (C) order; fortran_order files are rejected.

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cinerad/core/ndarray.hpp"

namespace cinerad::npy {

template <typename T>
struct dtype_traits;

template <>
struct dtype_traits<float> {
  static constexpr const char* descr = "<f4";
};
template <>
struct dtype_traits<double> {
  static constexpr const char* descr = "<f8";
};
template <>
struct dtype_traits<std::int64_t> {
  static constexpr const char* descr = "<i8";
};
template <>
struct dtype_traits<std::complex<float>> {
  static constexpr const char* descr = "<c8";
};
template <>
struct dtype_traits<std::complex<double>> {
  static constexpr const char* descr = "<c16";
};

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

inline std::string shape_tuple(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << shape[i];
    if (i + 1 < shape.size() || shape.size() == 1) os << ",";
    if (i + 1 < shape.size()) os << " ";
  }
  os << ")";
  return os.str();
}

template <typename T>
void write(const std::string& path, const NdArray<T>& arr) {
  std::string dict = std::string("{'descr': '") + dtype_traits<T>::descr +
                     "', 'fortran_order': False, 'shape': " + shape_tuple(arr.shape()) + ", }";
  // Pad with spaces so that magic+version+len+header is a multiple of 64,
  // terminated by a newline.
  std::size_t base = 6 + 2 + 2 + dict.size() + 1;
  std::size_t pad = (64 - base % 64) % 64;
  dict += std::string(pad, ' ');
  dict += '\n';

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("npy: cannot open for write: " + path);
  const unsigned char magic[8] = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
  f.write(reinterpret_cast<const char*>(magic), 8);
  std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
  unsigned char lenb[2] = {static_cast<unsigned char>(hlen & 0xff),
                           static_cast<unsigned char>(hlen >> 8)};
  f.write(reinterpret_cast<const char*>(lenb), 2);
  f.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  f.write(reinterpret_cast<const char*>(arr.data()),
          static_cast<std::streamsize>(arr.size() * sizeof(T)));
  if (!f) throw std::runtime_error("npy: short write: " + path);
}

namespace detail {

inline std::string find_string_value(const std::string& dict, const std::string& key,
                                     const std::string& path) {
  auto kpos = dict.find("'" + key + "'");
  if (kpos == std::string::npos)
    throw std::runtime_error("npy: malformed header (missing " + key + "): " + path);
  auto q1 = dict.find('\'', dict.find(':', kpos));
  auto q2 = dict.find('\'', q1 + 1);
  if (q1 == std::string::npos || q2 == std::string::npos)
    throw std::runtime_error("npy: malformed header (bad " + key + "): " + path);
  return dict.substr(q1 + 1, q2 - q1 - 1);
}

}  // namespace detail

inline Header read_header(std::ifstream& f, const std::string& path) {
  unsigned char magic[8];
  f.read(reinterpret_cast<char*>(magic), 8);
  if (!f || magic[0] != 0x93 || std::memcmp(magic + 1, "NUMPY", 5) != 0)
    throw std::runtime_error("npy: malformed magic: " + path);
  if (magic[6] != 1 || magic[7] != 0)
    throw std::runtime_error("npy: unsupported version: " + path);
  unsigned char lenb[2];
  f.read(reinterpret_cast<char*>(lenb), 2);
  if (!f) throw std::runtime_error("npy: malformed header: " + path);
  std::size_t hlen = lenb[0] | (static_cast<std::size_t>(lenb[1]) << 8);
  std::string dict(hlen, '\0');
  f.read(dict.data(), static_cast<std::streamsize>(hlen));
  if (!f) throw std::runtime_error("npy: malformed header: " + path);

  Header h;
  h.descr = detail::find_string_value(dict, "descr", path);
  auto fpos = dict.find("'fortran_order'");
  if (fpos == std::string::npos)
    throw std::runtime_error("npy: malformed header (missing fortran_order): " + path);
  h.fortran_order = dict.find("True", fpos) != std::string::npos &&
                    dict.find("True", fpos) < dict.find(',', fpos);
  auto spos = dict.find("'shape'");
  if (spos == std::string::npos)
    throw std::runtime_error("npy: malformed header (missing shape): " + path);
  auto p1 = dict.find('(', spos);
  auto p2 = dict.find(')', p1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    throw std::runtime_error("npy: malformed header (bad shape): " + path);
  std::string tup = dict.substr(p1 + 1, p2 - p1 - 1);
  std::istringstream ts(tup);
  std::string tok;
  while (std::getline(ts, tok, ',')) {
    std::string trimmed;
    for (char c : tok)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed.empty()) continue;
    h.shape.push_back(static_cast<std::size_t>(std::stoull(trimmed)));
  }
  return h;
}

inline Header peek(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("npy: cannot open: " + path);
  return read_header(f, path);
}

template <typename T>
NdArray<T> read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("npy: cannot open: " + path);
  Header h = read_header(f, path);
  if (h.descr != dtype_traits<T>::descr)
    throw std::runtime_error("npy: dtype mismatch: expected " +
                             std::string(dtype_traits<T>::descr) + ", file has " + h.descr +
                             ": " + path);
  if (h.fortran_order)
    throw std::runtime_error("npy: fortran_order payloads are not supported: " + path);
  NdArray<T> arr(h.shape);
  f.read(reinterpret_cast<char*>(arr.data()),
         static_cast<std::streamsize>(arr.size() * sizeof(T)));
  if (static_cast<std::size_t>(f.gcount()) != arr.size() * sizeof(T))
    throw std::runtime_error("npy: truncated payload: " + path);
  return arr;
}

}  // namespace cinerad::npy
