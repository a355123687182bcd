#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sparks {

// Minimal dense CHW tensor.
template <typename T>
struct Tensor3 {
  int c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor3() = default;
  Tensor3(int c_, int h_, int w_, T fill = T{})
      : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, fill) {}

  T& at(int ci, int y, int x) {
    return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  T at(int ci, int y, int x) const {
    return v[(static_cast<std::size_t>(ci) * h + y) * w + x];
  }
  std::size_t size() const { return v.size(); }
};

using Tensor3d = Tensor3<double>;
using Tensor3i = Tensor3<std::int32_t>;
using Tensor3b = Tensor3<std::int8_t>;  // +-1 entries

// Raw headerless little-endian tensor files with a "<path>.desc" sidecar
// holding "shape=<d0>,<d1>,...;dtype=<u8|f32>".
struct RawTensor {
  std::vector<std::size_t> shape;
  std::string dtype;                // "u8" or "f32"
  std::vector<std::uint8_t> bytes;  // raw payload

  std::size_t element_count() const;
  std::vector<float> as_f32() const;
};

void write_raw_tensor(const std::string& path, const void* data, std::size_t byte_count,
                      const std::vector<std::size_t>& shape, const std::string& dtype);
RawTensor read_raw_tensor(const std::string& path);

}  // namespace sparks
