#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparks/engine.hpp"

namespace sparks {

// SPKS: index-coded model. Little-endian throughout.
//   "SPKS" | version u16 | K u8 | log2(n) u8
//   codeword section: n * ceil(K^2/8) bytes, pattern bits LSB-first
//   layer count u16
//   per layer: C_out,C_in,K,stride,pad,flags as u16 each, then the payload
//   (packed log2(n)-bit indices, or f32 kernels when the real-weights flag
//   is set), then f32 scales and biases when the affine flag is set.
//
// SPK1: 1-bit baseline, same skeleton; the 4th header byte holds K^2 and
// binarized layers store raw K^2-bit kernel patterns back to back instead
// of codeword indices (no codeword section).

inline constexpr std::size_t kModelHeaderBytes = 8;
inline constexpr std::size_t kLayerGeometryBytes = 12;

std::size_t codeword_record_bytes(int kernel_size);
std::size_t spks_codeword_section_bytes(int kernel_size, int n);
std::size_t spks_index_payload_bytes(const EngineLayer& layer, int n);
std::size_t spk1_kernel_payload_bytes(int c_out, int c_in, int kernel_size);

void save_model(const IndexCodedModel& model, const std::string& path);
IndexCodedModel load_model(const std::string& path);

// 1-bit baseline model: every binarized kernel stored as its own pattern.
struct OneBitLayer {
  int c_out = 0, c_in = 0, kernel = 0, stride = 1, pad = 0;
  std::uint16_t flags = 0;
  std::vector<Codeword> kernels;  // (o, c) o-major when not real
  std::vector<float> weights;     // real layers
  std::vector<float> scale, bias;

  bool has_affine() const noexcept { return flags & kLayerHasAffine; }
  bool is_real() const noexcept { return flags & kLayerRealWeights; }
};

struct OneBitModel {
  int kernel_size = 0;
  std::vector<OneBitLayer> layers;
};

void save_onebit_model(const OneBitModel& model, const std::string& path);
OneBitModel load_onebit_model(const std::string& path);

// Materialize every index into its codeword pattern.
OneBitModel expand_to_onebit(const IndexCodedModel& model);

// Serialized codebook/sub-codebook file ("SPKB"): header as above with
// log2 field = bits per index of the stored set, followed by the codeword
// section only.
void save_codeword_set(const std::vector<Codeword>& words, const std::string& path);
std::vector<Codeword> load_codeword_set(const std::string& path);

}  // namespace sparks
