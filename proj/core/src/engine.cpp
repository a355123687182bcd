#include "sparks/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparks/threads.hpp"

namespace sparks {

int IndexCodedModel::bits_per_index() const noexcept {
  int b = 0;
  while ((1 << b) < n()) ++b;
  return b;
}

void IndexCodedModel::validate() const {
  if (kernel_size < 2 || kernel_size > 5)
    throw std::invalid_argument("model kernel size out of range");
  const int count = n();
  if (count < 2 || (count & (count - 1)) != 0)
    throw std::invalid_argument("model sub-codebook size must be a power of two >= 2");
  for (const Codeword& w : codewords)
    if (w.kernel_size != kernel_size)
      throw std::invalid_argument("codeword kernel size mismatch in model");
  for (const EngineLayer& l : layers) {
    if (l.c_out <= 0 || l.c_in <= 0 || l.kernel <= 0 || l.stride <= 0 || l.pad < 0)
      throw std::invalid_argument("bad layer geometry");
    if (l.is_real()) {
      if (l.weights.size() !=
          static_cast<std::size_t>(l.c_out) * l.c_in * l.kernel * l.kernel)
        throw std::invalid_argument("real layer weight count mismatch");
    } else {
      if (l.kernel != kernel_size)
        throw std::invalid_argument("index-coded layer kernel differs from the shared codebook");
      const std::size_t kernels = static_cast<std::size_t>(l.c_out) * l.c_in;
      if (l.packed_indices.size() != packed_index_bytes(kernels, bits_per_index()))
        throw std::invalid_argument("packed index payload size mismatch");
      for (std::size_t p = 0; p < kernels; ++p)
        if (unpack_index(l.packed_indices, bits_per_index(), p) >=
            static_cast<std::uint32_t>(count))
          throw std::invalid_argument("codeword index out of range in layer");
    }
    if (l.has_affine() &&
        (l.scale.size() != static_cast<std::size_t>(l.c_out) ||
         l.bias.size() != static_cast<std::size_t>(l.c_out)))
      throw std::invalid_argument("affine parameter count mismatch");
  }
}

std::size_t packed_index_bytes(std::size_t count, int bits) {
  return (count * static_cast<std::size_t>(bits) + 7) / 8;
}

std::uint32_t unpack_index(std::span<const std::uint8_t> packed, int bits, std::size_t pos) {
  std::uint32_t value = 0;
  const std::size_t base = pos * static_cast<std::size_t>(bits);
  for (int b = 0; b < bits; ++b) {
    const std::size_t bit = base + static_cast<std::size_t>(b);
    if (packed[bit >> 3] & (1u << (bit & 7))) value |= (1u << b);
  }
  return value;
}

void pack_index(std::span<std::uint8_t> packed, int bits, std::size_t pos, std::uint32_t value) {
  const std::size_t base = pos * static_cast<std::size_t>(bits);
  for (int b = 0; b < bits; ++b) {
    const std::size_t bit = base + static_cast<std::size_t>(b);
    if (value & (1u << b))
      packed[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    else
      packed[bit >> 3] &= static_cast<std::uint8_t>(~(1u << (bit & 7)));
  }
}

namespace {

// Correlation of one +-1 kernel with one input channel; padding adds 0.
void correlate_slice(const Tensor3b& input, int channel, const Codeword& word, int stride,
                     int pad, int out_h, int out_w, std::int32_t* out) {
  const int k = word.kernel_size;
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      std::int32_t acc = 0;
      const int y0 = y * stride - pad;
      const int x0 = x * stride - pad;
      for (int ky = 0; ky < k; ++ky) {
        const int yy = y0 + ky;
        if (yy < 0 || yy >= input.h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int xx = x0 + kx;
          if (xx < 0 || xx >= input.w) continue;
          acc += word.sign_at(ky * k + kx) * input.at(channel, yy, xx);
        }
      }
      out[y * out_w + x] = acc;
    }
  }
}

}  // namespace

LutTensor precompute_lut(const Tensor3b& input, std::span<const Codeword> codewords,
                         int stride, int pad, const LutOptions& options, OpCounter* counter) {
  if (codewords.empty()) throw std::invalid_argument("empty codeword list");
  const int k = codewords.front().kernel_size;
  if (options.validate_binary) {
    for (std::int8_t v : input.v)
      if (v != 1 && v != -1)
        throw std::invalid_argument("precompute_lut input must be +-1");
  }
  const int out_h = (input.h + 2 * pad - k) / stride + 1;
  const int out_w = (input.w + 2 * pad - k) / stride + 1;
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("degenerate output geometry");

  LutTensor lut;
  lut.n = static_cast<int>(codewords.size());
  lut.c = input.c;
  lut.h = out_h;
  lut.w = out_w;
  lut.v.assign(static_cast<std::size_t>(lut.n) * lut.c * out_h * out_w, 0);

  // Mirror pairs: slice of the element-wise opposite codeword is the
  // negated slice. Pair each word with the first earlier opposite.
  std::vector<int> mirror_of(codewords.size(), -1);
  if (options.mirror_fast_path) {
    for (std::size_t j = 0; j < codewords.size(); ++j)
      for (std::size_t p = 0; p < j; ++p)
        if (codewords[p] == codewords[j].opposite()) {
          mirror_of[j] = static_cast<int>(p);
          break;
        }
  }

  const std::size_t slices = codewords.size() * static_cast<std::size_t>(input.c);
  parallel_for(slices, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const int j = static_cast<int>(s / input.c);
      const int ci = static_cast<int>(s % input.c);
      if (mirror_of[j] >= 0) continue;
      correlate_slice(input, ci, codewords[j], stride, pad, out_h, out_w,
                      &lut.v[((static_cast<std::size_t>(j) * lut.c + ci) * out_h) * out_w]);
    }
  });
  for (std::size_t j = 0; j < codewords.size(); ++j) {
    if (mirror_of[j] < 0) continue;
    const std::size_t dst = static_cast<std::size_t>(j) * lut.c * out_h * out_w;
    const std::size_t src = static_cast<std::size_t>(mirror_of[j]) * lut.c * out_h * out_w;
    for (std::size_t t = 0; t < static_cast<std::size_t>(lut.c) * out_h * out_w; ++t)
      lut.v[dst + t] = -lut.v[src + t];
  }

  if (counter != nullptr) {
    // BOPs_1 = H_out * W_out * C_in * K^2 * n, in half-BOP units.
    counter->half_bops += 2ll * out_h * out_w * input.c * k * k *
                          static_cast<long long>(codewords.size());
  }
  return lut;
}

Tensor3i reconstruct_output(const LutTensor& lut, const EngineLayer& layer,
                            OpCounter* counter) {
  if (layer.is_real()) throw std::invalid_argument("reconstruct_output needs an index-coded layer");
  if (layer.c_in != lut.c) throw std::invalid_argument("LUT/layer channel mismatch");
  int bits = 0;
  while ((1 << bits) < lut.n) ++bits;

  Tensor3i out(layer.c_out, lut.h, lut.w, 0);
  const std::size_t plane = static_cast<std::size_t>(lut.h) * lut.w;
  parallel_for(static_cast<std::size_t>(layer.c_out), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t o = lo; o < hi; ++o) {
      std::int32_t* dst = &out.v[o * plane];
      for (int ci = 0; ci < layer.c_in; ++ci) {
        const std::uint32_t j =
            unpack_index(layer.packed_indices, bits, o * layer.c_in + ci);
        const std::int32_t* src = &lut.v[(static_cast<std::size_t>(j) * lut.c + ci) * plane];
        for (std::size_t t = 0; t < plane; ++t) dst[t] += src[t];
      }
    }
  });

  if (counter != nullptr) {
    // BOPs_2 = C_out * (C_in * H_out * W_out - 1) / 2: the gather-sum adds
    // C_in*H*W values per output channel; additions count half a BOP each.
    counter->half_bops +=
        static_cast<long long>(layer.c_out) *
        (static_cast<long long>(layer.c_in) * lut.h * lut.w - 1);
  }
  return out;
}

Tensor3i direct_conv_reference(const Tensor3b& input, std::span<const Codeword> kernels,
                               int c_out, int stride, int pad) {
  if (kernels.size() != static_cast<std::size_t>(c_out) * input.c)
    throw std::invalid_argument("kernel count mismatch in direct_conv_reference");
  const int k = kernels.front().kernel_size;
  const int out_h = (input.h + 2 * pad - k) / stride + 1;
  const int out_w = (input.w + 2 * pad - k) / stride + 1;
  Tensor3i out(c_out, out_h, out_w, 0);
  std::vector<std::int32_t> slice(static_cast<std::size_t>(out_h) * out_w);
  for (int o = 0; o < c_out; ++o) {
    for (int ci = 0; ci < input.c; ++ci) {
      correlate_slice(input, ci, kernels[static_cast<std::size_t>(o) * input.c + ci], stride,
                      pad, out_h, out_w, slice.data());
      for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) out.at(o, y, x) += slice[y * out_w + x];
    }
  }
  return out;
}

namespace {

Tensor3b binarize(const Tensor3d& x) {
  Tensor3b b(x.c, x.h, x.w);
  for (std::size_t i = 0; i < x.v.size(); ++i) b.v[i] = x.v[i] >= 0.0 ? 1 : -1;  // sign(0)=+1
  return b;
}

Tensor3d global_average_pool(const Tensor3d& x) {
  Tensor3d out(x.c, 1, 1);
  const double denom = static_cast<double>(x.h) * x.w;
  for (int ci = 0; ci < x.c; ++ci) {
    double s = 0.0;
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) s += x.at(ci, y, xx);
    out.at(ci, 0, 0) = s / denom;
  }
  return out;
}

Tensor3d real_conv(const Tensor3d& x, const EngineLayer& layer) {
  const int k = layer.kernel;
  const int out_h = layer.out_h(x.h);
  const int out_w = layer.out_w(x.w);
  Tensor3d out(layer.c_out, out_h, out_w, 0.0);
  for (int o = 0; o < layer.c_out; ++o) {
    for (int y = 0; y < out_h; ++y) {
      for (int xx = 0; xx < out_w; ++xx) {
        double acc = 0.0;
        const int y0 = y * layer.stride - layer.pad;
        const int x0 = xx * layer.stride - layer.pad;
        for (int ci = 0; ci < layer.c_in; ++ci)
          for (int ky = 0; ky < k; ++ky) {
            const int yy = y0 + ky;
            if (yy < 0 || yy >= x.h) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int xc = x0 + kx;
              if (xc < 0 || xc >= x.w) continue;
              acc += static_cast<double>(
                         layer.weights[((static_cast<std::size_t>(o) * layer.c_in + ci) * k +
                                        ky) * k + kx]) *
                     x.at(ci, yy, xc);
            }
          }
        out.at(o, y, xx) = acc;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> infer(const IndexCodedModel& model, const Tensor3d& input,
                          const InferOptions& options, OpCounter* counter) {
  model.validate();
  Tensor3d cur = input;
  const int bits = model.bits_per_index();

  for (const EngineLayer& layer : model.layers) {
    if (layer.pool_before()) cur = global_average_pool(cur);
    if (layer.c_in != cur.c)
      throw std::invalid_argument("layer expects " + std::to_string(layer.c_in) +
                                  " channels, got " + std::to_string(cur.c));
    if (cur.h + 2 * layer.pad < layer.kernel || cur.w + 2 * layer.pad < layer.kernel)
      throw std::invalid_argument("feature map smaller than kernel");

    Tensor3d next;
    if (layer.is_real()) {
      next = real_conv(cur, layer);
    } else {
      const Tensor3b binary = binarize(cur);
      Tensor3i acc;
      if (options.use_reference) {
        const std::size_t kernels = static_cast<std::size_t>(layer.c_out) * layer.c_in;
        std::vector<Codeword> materialized(kernels);
        for (std::size_t p = 0; p < kernels; ++p)
          materialized[p] = model.codewords[unpack_index(layer.packed_indices, bits, p)];
        acc = direct_conv_reference(binary, materialized, layer.c_out, layer.stride, layer.pad);
      } else {
        const LutTensor lut =
            precompute_lut(binary, model.codewords, layer.stride, layer.pad, options.lut, counter);
        acc = reconstruct_output(lut, layer, counter);
      }
      next = Tensor3d(acc.c, acc.h, acc.w);
      for (std::size_t i = 0; i < acc.v.size(); ++i) next.v[i] = acc.v[i];
    }
    if (layer.has_affine()) {
      const std::size_t plane = static_cast<std::size_t>(next.h) * next.w;
      for (int o = 0; o < next.c; ++o)
        for (std::size_t t = 0; t < plane; ++t) {
          double& v = next.v[o * plane + t];
          v = static_cast<double>(layer.scale[o]) * v + static_cast<double>(layer.bias[o]);
        }
    }
    cur = std::move(next);
  }
  return cur.v;
}

}  // namespace sparks
