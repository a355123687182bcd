#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparks/codebook.hpp"
#include "sparks/tensor.hpp"

namespace sparks {

// Layer record flags (also the on-disk encoding).
inline constexpr std::uint16_t kLayerHasAffine = 1u << 0;  // per-channel scale+bias
inline constexpr std::uint16_t kLayerRealWeights = 1u << 1;
inline constexpr std::uint16_t kLayerPoolBefore = 1u << 2;  // global average pool first

struct EngineLayer {
  int c_out = 0, c_in = 0, kernel = 0, stride = 1, pad = 0;
  std::uint16_t flags = 0;
  std::vector<std::uint8_t> packed_indices;  // index-coded layers
  std::vector<float> weights;                // real layers: c_out*c_in*k*k
  std::vector<float> scale, bias;            // when kLayerHasAffine

  bool has_affine() const noexcept { return flags & kLayerHasAffine; }
  bool is_real() const noexcept { return flags & kLayerRealWeights; }
  bool pool_before() const noexcept { return flags & kLayerPoolBefore; }
  int out_h(int in_h) const noexcept { return (in_h + 2 * pad - kernel) / stride + 1; }
  int out_w(int in_w) const noexcept { return (in_w + 2 * pad - kernel) / stride + 1; }
};

// A network whose binarized layers store one shared sub-codebook plus a
// log2(n)-bit codeword index per kernel.
struct IndexCodedModel {
  int kernel_size = 0;
  std::vector<Codeword> codewords;  // size n, power of two
  std::vector<EngineLayer> layers;

  int n() const noexcept { return static_cast<int>(codewords.size()); }
  int bits_per_index() const noexcept;
  void validate() const;
};

// log2(n)-bit little-endian fields packed LSB-first into little-endian
// bytes; position = c_out * C_in + c_in.
std::uint32_t unpack_index(std::span<const std::uint8_t> packed, int bits, std::size_t pos);
void pack_index(std::span<std::uint8_t> packed, int bits, std::size_t pos, std::uint32_t value);
std::size_t packed_index_bytes(std::size_t count, int bits);

// Pre-convolution results, T[j][c][y][x] = codeword j (x) input channel c.
struct LutTensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<std::int32_t> v;

  std::int32_t& at(int j, int ci, int y, int x) {
    return v[((static_cast<std::size_t>(j) * c + ci) * h + y) * w + x];
  }
  std::int32_t at(int j, int ci, int y, int x) const {
    return v[((static_cast<std::size_t>(j) * c + ci) * h + y) * w + x];
  }
};

// Debug cost meter in half-BOP units (one BOP = one fused xnor+popcount
// step = two bit-wise ops; a plain addition costs one half-BOP).
struct OpCounter {
  long long half_bops = 0;
  long long bops() const noexcept { return half_bops / 2; }
};

struct LutOptions {
  bool validate_binary = true;  // reject non +-1 inputs (first layer relaxes this)
  bool mirror_fast_path = false;  // derive a codeword's slice by negating its opposite
};

// Cross-correlate every codeword with every input channel once. Zero
// padding contributes nothing to the dot products.
LutTensor precompute_lut(const Tensor3b& input, std::span<const Codeword> codewords,
                         int stride, int pad, const LutOptions& options = {},
                         OpCounter* counter = nullptr);

// out[o] = sum_c T[index(o, c)][c]; gather-and-sum per output channel.
Tensor3i reconstruct_output(const LutTensor& lut, const EngineLayer& layer,
                            OpCounter* counter = nullptr);

// Naive integer convolution with materialized +-1 kernels (one Codeword per
// (o, c) pair, o-major). Semantic ground truth for the LUT path.
Tensor3i direct_conv_reference(const Tensor3b& input, std::span<const Codeword> kernels,
                               int c_out, int stride, int pad);

struct InferOptions {
  bool use_reference = false;  // direct convolution instead of the LUT path
  LutOptions lut;
};

// Full forward pass: real layers run in fp32/double, binarized layers
// binarize their input (sign, ties to +1) and run the integer path.
// Returns the final feature map flattened.
std::vector<double> infer(const IndexCodedModel& model, const Tensor3d& input,
                          const InferOptions& options = {}, OpCounter* counter = nullptr);

}  // namespace sparks
