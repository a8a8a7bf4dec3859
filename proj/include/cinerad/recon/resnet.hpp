#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/core/rng.hpp"

namespace cinerad {

// 3 x 3 x 3 convolution weights, [C_out x C_in x 3 x 3 x 3] with one bias per
// output channel.
struct ConvKernel {
  NdArray<float> w;
  std::vector<float> b;

  std::size_t c_out() const { return w.shape(0); }
  std::size_t c_in() const { return w.shape(1); }
};

// Inference weights of the residual spatiotemporal denoiser: a stem conv
// lifting [re, im, stage] to `channels` feature maps, `n_blocks` residual
// pairs, and a head conv back to [re, im] that is added to the input.
struct ProxWeights {
  std::size_t channels = 0;
  std::size_t n_blocks = 0;
  ConvKernel stem;                                     // 3 -> channels
  std::vector<std::pair<ConvKernel, ConvKernel>> blocks;  // channels -> channels, twice
  ConvKernel head;                                     // channels -> 2
};

namespace resnet_detail {

inline ConvKernel random_kernel(std::size_t c_out, std::size_t c_in, float scale,
                                std::mt19937_64& eng) {
  ConvKernel k;
  k.w = NdArray<float>({c_out, c_in, 3, 3, 3});
  k.b.assign(c_out, 0.0f);
  if (scale != 0.0f) {
    std::normal_distribution<double> dist(0.0, scale);
    for (std::size_t i = 0; i < k.w.size(); ++i) k.w.flat(i) = static_cast<float>(dist(eng));
  }
  return k;
}

// Circular 3-d convolution over (t, y, x); channels dense, double
// accumulation per output voxel.
inline NdArray<float> conv3d_circular(const NdArray<float>& in, const ConvKernel& k) {
  const std::size_t ci = in.shape(0), nt = in.shape(1), ny = in.shape(2), nx = in.shape(3);
  if (ci != k.c_in()) throw std::invalid_argument("conv3d_circular: channel mismatch");
  const std::size_t co = k.c_out();

  NdArray<float> out({co, nt, ny, nx});
  parallel_for(nt, [&](std::size_t t) {
    const std::array<std::size_t, 3> tt{(t + nt - 1) % nt, t, (t + 1) % nt};
    for (std::size_t y = 0; y < ny; ++y) {
      const std::array<std::size_t, 3> yy{(y + ny - 1) % ny, y, (y + 1) % ny};
      for (std::size_t x = 0; x < nx; ++x) {
        const std::array<std::size_t, 3> xx{(x + nx - 1) % nx, x, (x + 1) % nx};
        for (std::size_t o = 0; o < co; ++o) {
          double acc = k.b[o];
          for (std::size_t c = 0; c < ci; ++c)
            for (std::size_t dt = 0; dt < 3; ++dt)
              for (std::size_t dy = 0; dy < 3; ++dy)
                for (std::size_t dx = 0; dx < 3; ++dx)
                  acc += static_cast<double>(k.w(o, c, dt, dy, dx)) *
                         static_cast<double>(in(c, tt[dt], yy[dy], xx[dx]));
          out(o, t, y, x) = static_cast<float>(acc);
        }
      }
    }
  });
  return out;
}

inline void relu_inplace(NdArray<float>& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.flat(i) < 0.0f) a.flat(i) = 0.0f;
}

}  // namespace resnet_detail

// Zero-mean Gaussian weights with the given standard deviation and zero
// biases; scale 0 yields the exact identity mapping.
inline ProxWeights make_prox_weights(std::size_t channels, std::size_t n_blocks, float scale,
                                     std::uint64_t seed) {
  if (channels == 0) throw std::invalid_argument("make_prox_weights: channels must be positive");
  auto eng = seeded_engine(seed, 0x9e5f);
  ProxWeights w;
  w.channels = channels;
  w.n_blocks = n_blocks;
  w.stem = resnet_detail::random_kernel(channels, 3, scale, eng);
  for (std::size_t i = 0; i < n_blocks; ++i)
    w.blocks.emplace_back(resnet_detail::random_kernel(channels, channels, scale, eng),
                          resnet_detail::random_kernel(channels, channels, scale, eng));
  w.head = resnet_detail::random_kernel(2, channels, scale, eng);
  return w;
}

// Weight container format: a little-endian uint32 byte length, a JSON header
// naming each tensor and its shape in payload order, then the raw float32
// little-endian payloads, contiguous and unpadded.
inline void save_prox_weights(const std::string& path, const ProxWeights& w) {
  nlohmann::json header;
  header["kind"] = "prox-resnet";
  header["version"] = 1;
  header["channels"] = w.channels;
  header["blocks"] = w.n_blocks;

  std::vector<std::pair<std::string, const ConvKernel*>> order;
  order.emplace_back("stem", &w.stem);
  for (std::size_t i = 0; i < w.n_blocks; ++i) {
    order.emplace_back("block" + std::to_string(i) + ".conv1", &w.blocks[i].first);
    order.emplace_back("block" + std::to_string(i) + ".conv2", &w.blocks[i].second);
  }
  order.emplace_back("head", &w.head);

  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, k] : order) {
    tensors.push_back({{"name", name + ".w"}, {"shape", k->w.shape()}});
    tensors.push_back({{"name", name + ".b"}, {"shape", {k->b.size()}}});
  }
  header["tensors"] = tensors;

  const std::string hs = header.dump();
  if (hs.size() > 0xffffffffull) throw std::runtime_error("save_prox_weights: header too large");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_prox_weights: cannot open " + path);
  const auto len = static_cast<std::uint32_t>(hs.size());
  std::array<char, 4> lenb{static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                           static_cast<char>((len >> 16) & 0xff),
                           static_cast<char>((len >> 24) & 0xff)};
  f.write(lenb.data(), 4);
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, k] : order) {
    f.write(reinterpret_cast<const char*>(k->w.data()),
            static_cast<std::streamsize>(k->w.size() * sizeof(float)));
    f.write(reinterpret_cast<const char*>(k->b.data()),
            static_cast<std::streamsize>(k->b.size() * sizeof(float)));
  }
  if (!f) throw std::runtime_error("save_prox_weights: write failed for " + path);
}

inline ProxWeights load_prox_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_prox_weights: cannot open " + path);
  std::array<unsigned char, 4> lenb{};
  f.read(reinterpret_cast<char*>(lenb.data()), 4);
  if (!f) throw std::runtime_error("load_prox_weights: truncated header length");
  const std::uint32_t len = static_cast<std::uint32_t>(lenb[0]) |
                            (static_cast<std::uint32_t>(lenb[1]) << 8) |
                            (static_cast<std::uint32_t>(lenb[2]) << 16) |
                            (static_cast<std::uint32_t>(lenb[3]) << 24);
  std::string hs(len, '\0');
  f.read(hs.data(), static_cast<std::streamsize>(len));
  if (!f) throw std::runtime_error("load_prox_weights: truncated header");

  nlohmann::json header = nlohmann::json::parse(hs, nullptr, false);
  if (header.is_discarded() || header.value("kind", "") != "prox-resnet")
    throw std::runtime_error("load_prox_weights: not a weight container");
  if (header.value("version", 0) != 1)
    throw std::runtime_error("load_prox_weights: unsupported container version");

  ProxWeights w;
  w.channels = header.at("channels").get<std::size_t>();
  w.n_blocks = header.at("blocks").get<std::size_t>();
  if (w.channels == 0) throw std::runtime_error("load_prox_weights: invalid channel count");

  const auto read_tensor = [&](const nlohmann::json& spec) {
    std::vector<std::size_t> shape = spec.at("shape").get<std::vector<std::size_t>>();
    NdArray<float> t(shape);
    f.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * 4));
    if (!f) throw std::runtime_error("load_prox_weights: truncated payload");
    return t;
  };
  const auto& tensors = header.at("tensors");
  std::size_t idx = 0;
  const auto read_kernel = [&](std::size_t c_out, std::size_t c_in) {
    if (idx + 2 > tensors.size())
      throw std::runtime_error("load_prox_weights: missing tensors");
    ConvKernel k;
    k.w = read_tensor(tensors[idx++]);
    if (k.w.ndim() != 5 || k.w.shape(0) != c_out || k.w.shape(1) != c_in ||
        k.w.shape(2) != 3 || k.w.shape(3) != 3 || k.w.shape(4) != 3)
      throw std::runtime_error("load_prox_weights: unexpected kernel shape");
    NdArray<float> b = read_tensor(tensors[idx++]);
    if (b.ndim() != 1 || b.shape(0) != c_out)
      throw std::runtime_error("load_prox_weights: unexpected bias shape");
    k.b.assign(b.data(), b.data() + b.size());
    return k;
  };

  w.stem = read_kernel(w.channels, 3);
  for (std::size_t i = 0; i < w.n_blocks; ++i) {
    ConvKernel c1 = read_kernel(w.channels, w.channels);
    ConvKernel c2 = read_kernel(w.channels, w.channels);
    w.blocks.emplace_back(std::move(c1), std::move(c2));
  }
  w.head = read_kernel(2, w.channels);
  return w;
}

// Residual denoiser inference on a [T x N x N] complex stack. The input is
// presented as [re, im, stage] channels; each residual block adds
// conv2(relu(conv1(u))); the head's two channels are added back onto the
// input, so all-zero weights reproduce the input exactly. `stage` in [0, 1]
// conditions the network on unroll progress.
inline ArrayC resnet_prox_infer(const ArrayC& x, double stage, const ProxWeights& w) {
  if (x.ndim() != 3) throw std::invalid_argument("resnet_prox_infer: expected [T x N x N]");
  if (!(stage >= 0.0 && stage <= 1.0))
    throw std::invalid_argument("resnet_prox_infer: stage must be in [0, 1]");
  const std::size_t nt = x.shape(0), ny = x.shape(1), nx = x.shape(2);

  NdArray<float> in({3, nt, ny, nx});
  const std::size_t vol = nt * ny * nx;
  for (std::size_t i = 0; i < vol; ++i) {
    in.flat(i) = static_cast<float>(x.flat(i).real());
    in.flat(vol + i) = static_cast<float>(x.flat(i).imag());
    in.flat(2 * vol + i) = static_cast<float>(stage);
  }

  using namespace resnet_detail;
  NdArray<float> u = conv3d_circular(in, w.stem);
  for (const auto& [c1, c2] : w.blocks) {
    NdArray<float> v = conv3d_circular(u, c1);
    relu_inplace(v);
    NdArray<float> r = conv3d_circular(v, c2);
    for (std::size_t i = 0; i < u.size(); ++i) u.flat(i) += r.flat(i);
  }
  NdArray<float> h = conv3d_circular(u, w.head);

  ArrayC out(x.shape());
  for (std::size_t i = 0; i < vol; ++i)
    out.flat(i) = x.flat(i) + cdouble(h.flat(i), h.flat(vol + i));
  return out;
}

}  // namespace cinerad
