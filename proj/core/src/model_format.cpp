#include "sparks/model_format.hpp"

#include <cstring>
#include <fstream>

#include "sparks/errors.hpp"

namespace sparks {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(const std::uint8_t* p, std::size_t count) { bytes_.insert(bytes_.end(), p, p + count); }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const std::uint16_t v =
        static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  float f32() {
    need(4);
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::vector<std::uint8_t> raw(std::size_t count) {
    need(count);
    std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }

 private:
  void need(std::size_t count) {
    if (pos_ + count > bytes_.size())
      throw FormatError("truncated file", pos_);
  }

  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("short write to " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_codeword(Writer& w, const Codeword& word) {
  const std::size_t record = codeword_record_bytes(word.kernel_size);
  for (std::size_t b = 0; b < record; ++b)
    w.u8(static_cast<std::uint8_t>((word.bits >> (8 * b)) & 0xff));
}

Codeword read_codeword(Reader& r, int kernel_size) {
  const std::size_t record = codeword_record_bytes(kernel_size);
  std::uint32_t bits = 0;
  for (std::size_t b = 0; b < record; ++b)
    bits |= static_cast<std::uint32_t>(r.u8()) << (8 * b);
  const int k2 = kernel_size * kernel_size;
  const std::uint32_t mask = k2 == 32 ? 0xffffffffu : ((1u << k2) - 1u);
  if (bits & ~mask) throw FormatError("codeword has bits above K^2", r.offset());
  return Codeword{bits, kernel_size};
}

void write_layer_geometry(Writer& w, int c_out, int c_in, int kernel, int stride, int pad,
                          std::uint16_t flags) {
  w.u16(static_cast<std::uint16_t>(c_out));
  w.u16(static_cast<std::uint16_t>(c_in));
  w.u16(static_cast<std::uint16_t>(kernel));
  w.u16(static_cast<std::uint16_t>(stride));
  w.u16(static_cast<std::uint16_t>(pad));
  w.u16(flags);
}

int log2_exact(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

}  // namespace

std::size_t codeword_record_bytes(int kernel_size) {
  return (static_cast<std::size_t>(kernel_size) * kernel_size + 7) / 8;
}

std::size_t spks_codeword_section_bytes(int kernel_size, int n) {
  return static_cast<std::size_t>(n) * codeword_record_bytes(kernel_size);
}

std::size_t spks_index_payload_bytes(const EngineLayer& layer, int n) {
  return packed_index_bytes(static_cast<std::size_t>(layer.c_out) * layer.c_in, log2_exact(n));
}

std::size_t spk1_kernel_payload_bytes(int c_out, int c_in, int kernel_size) {
  return (static_cast<std::size_t>(c_out) * c_in * kernel_size * kernel_size + 7) / 8;
}

void save_model(const IndexCodedModel& model, const std::string& path) {
  model.validate();
  Writer w;
  w.u8('S');
  w.u8('P');
  w.u8('K');
  w.u8('S');
  w.u16(1);
  w.u8(static_cast<std::uint8_t>(model.kernel_size));
  w.u8(static_cast<std::uint8_t>(model.bits_per_index()));
  for (const Codeword& word : model.codewords) write_codeword(w, word);
  w.u16(static_cast<std::uint16_t>(model.layers.size()));
  for (const EngineLayer& l : model.layers) {
    write_layer_geometry(w, l.c_out, l.c_in, l.kernel, l.stride, l.pad, l.flags);
    if (l.is_real())
      for (float v : l.weights) w.f32(v);
    else
      w.raw(l.packed_indices.data(), l.packed_indices.size());
    if (l.has_affine()) {
      for (float v : l.scale) w.f32(v);
      for (float v : l.bias) w.f32(v);
    }
  }
  write_file(path, w.bytes());
}

IndexCodedModel load_model(const std::string& path) {
  Reader r(read_file(path));
  if (r.u8() != 'S' || r.u8() != 'P' || r.u8() != 'K' || r.u8() != 'S')
    throw FormatError("bad magic, expected SPKS", 0);
  const std::uint16_t version = r.u16();
  if (version != 1) throw FormatError("unsupported version " + std::to_string(version), 4);
  IndexCodedModel model;
  model.kernel_size = r.u8();
  const int bits = r.u8();
  if (model.kernel_size < 2 || model.kernel_size > 5)
    throw FormatError("kernel size out of range", 6);
  if (bits < 1 || bits > model.kernel_size * model.kernel_size)
    throw FormatError("bits per index out of range", 7);
  const int n = 1 << bits;
  model.codewords.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) model.codewords.push_back(read_codeword(r, model.kernel_size));
  const int layer_count = r.u16();
  for (int li = 0; li < layer_count; ++li) {
    EngineLayer l;
    l.c_out = r.u16();
    l.c_in = r.u16();
    l.kernel = r.u16();
    l.stride = r.u16();
    l.pad = r.u16();
    l.flags = r.u16();
    if (l.c_out == 0 || l.c_in == 0 || l.kernel == 0 || l.stride == 0)
      throw FormatError("bad layer geometry", r.offset());
    if (l.is_real()) {
      l.weights.resize(static_cast<std::size_t>(l.c_out) * l.c_in * l.kernel * l.kernel);
      for (float& v : l.weights) v = r.f32();
    } else {
      l.packed_indices =
          r.raw(packed_index_bytes(static_cast<std::size_t>(l.c_out) * l.c_in, bits));
    }
    if (l.has_affine()) {
      l.scale.resize(static_cast<std::size_t>(l.c_out));
      for (float& v : l.scale) v = r.f32();
      l.bias.resize(static_cast<std::size_t>(l.c_out));
      for (float& v : l.bias) v = r.f32();
    }
    model.layers.push_back(std::move(l));
  }
  if (!r.done()) throw FormatError("trailing bytes after last layer", r.offset());
  model.validate();
  return model;
}

void save_onebit_model(const OneBitModel& model, const std::string& path) {
  Writer w;
  w.u8('S');
  w.u8('P');
  w.u8('K');
  w.u8('1');
  w.u16(1);
  w.u8(static_cast<std::uint8_t>(model.kernel_size));
  w.u8(static_cast<std::uint8_t>(model.kernel_size * model.kernel_size));
  w.u16(static_cast<std::uint16_t>(model.layers.size()));
  const int k2 = model.kernel_size * model.kernel_size;
  for (const OneBitLayer& l : model.layers) {
    write_layer_geometry(w, l.c_out, l.c_in, l.kernel, l.stride, l.pad, l.flags);
    if (l.is_real()) {
      for (float v : l.weights) w.f32(v);
    } else {
      std::vector<std::uint8_t> packed(spk1_kernel_payload_bytes(l.c_out, l.c_in, model.kernel_size), 0);
      for (std::size_t p = 0; p < l.kernels.size(); ++p)
        pack_index(packed, k2, p, l.kernels[p].bits);
      w.raw(packed.data(), packed.size());
    }
    if (l.has_affine()) {
      for (float v : l.scale) w.f32(v);
      for (float v : l.bias) w.f32(v);
    }
  }
  write_file(path, w.bytes());
}

OneBitModel load_onebit_model(const std::string& path) {
  Reader r(read_file(path));
  if (r.u8() != 'S' || r.u8() != 'P' || r.u8() != 'K' || r.u8() != '1')
    throw FormatError("bad magic, expected SPK1", 0);
  if (r.u16() != 1) throw FormatError("unsupported version", 4);
  OneBitModel model;
  model.kernel_size = r.u8();
  const int bits_per_kernel = r.u8();
  if (model.kernel_size < 2 || model.kernel_size > 5)
    throw FormatError("kernel size out of range", 6);
  const int k2 = model.kernel_size * model.kernel_size;
  if (bits_per_kernel != k2) throw FormatError("bits per kernel must equal K^2", 7);
  const int layer_count = r.u16();
  for (int li = 0; li < layer_count; ++li) {
    OneBitLayer l;
    l.c_out = r.u16();
    l.c_in = r.u16();
    l.kernel = r.u16();
    l.stride = r.u16();
    l.pad = r.u16();
    l.flags = r.u16();
    if (l.c_out == 0 || l.c_in == 0 || l.kernel == 0 || l.stride == 0)
      throw FormatError("bad layer geometry", r.offset());
    if (l.is_real()) {
      l.weights.resize(static_cast<std::size_t>(l.c_out) * l.c_in * l.kernel * l.kernel);
      for (float& v : l.weights) v = r.f32();
    } else {
      const std::size_t kernels = static_cast<std::size_t>(l.c_out) * l.c_in;
      const auto packed = r.raw(spk1_kernel_payload_bytes(l.c_out, l.c_in, model.kernel_size));
      l.kernels.resize(kernels);
      for (std::size_t p = 0; p < kernels; ++p)
        l.kernels[p] = Codeword{unpack_index(packed, k2, p), model.kernel_size};
    }
    if (l.has_affine()) {
      l.scale.resize(static_cast<std::size_t>(l.c_out));
      for (float& v : l.scale) v = r.f32();
      l.bias.resize(static_cast<std::size_t>(l.c_out));
      for (float& v : l.bias) v = r.f32();
    }
    model.layers.push_back(std::move(l));
  }
  if (!r.done()) throw FormatError("trailing bytes after last layer", r.offset());
  return model;
}

OneBitModel expand_to_onebit(const IndexCodedModel& model) {
  model.validate();
  OneBitModel out;
  out.kernel_size = model.kernel_size;
  const int bits = model.bits_per_index();
  for (const EngineLayer& l : model.layers) {
    OneBitLayer ol;
    ol.c_out = l.c_out;
    ol.c_in = l.c_in;
    ol.kernel = l.kernel;
    ol.stride = l.stride;
    ol.pad = l.pad;
    ol.flags = l.flags;
    ol.weights = l.weights;
    ol.scale = l.scale;
    ol.bias = l.bias;
    if (!l.is_real()) {
      const std::size_t kernels = static_cast<std::size_t>(l.c_out) * l.c_in;
      ol.kernels.resize(kernels);
      for (std::size_t p = 0; p < kernels; ++p)
        ol.kernels[p] = model.codewords[unpack_index(l.packed_indices, bits, p)];
    }
    out.layers.push_back(std::move(ol));
  }
  return out;
}

void save_codeword_set(const std::vector<Codeword>& words, const std::string& path) {
  if (words.empty()) throw std::invalid_argument("cannot save an empty codeword set");
  const int kernel_size = words.front().kernel_size;
  Writer w;
  w.u8('S');
  w.u8('P');
  w.u8('K');
  w.u8('B');
  w.u16(1);
  w.u8(static_cast<std::uint8_t>(kernel_size));
  w.u8(static_cast<std::uint8_t>(log2_exact(static_cast<int>(words.size()))));
  for (const Codeword& word : words) write_codeword(w, word);
  write_file(path, w.bytes());
}

std::vector<Codeword> load_codeword_set(const std::string& path) {
  Reader r(read_file(path));
  if (r.u8() != 'S' || r.u8() != 'P' || r.u8() != 'K' || r.u8() != 'B')
    throw FormatError("bad magic, expected SPKB", 0);
  if (r.u16() != 1) throw FormatError("unsupported version", 4);
  const int kernel_size = r.u8();
  const int bits = r.u8();
  if (kernel_size < 2 || kernel_size > 5) throw FormatError("kernel size out of range", 6);
  const std::size_t count = std::size_t{1} << bits;
  std::vector<Codeword> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) words.push_back(read_codeword(r, kernel_size));
  if (!r.done()) throw FormatError("trailing bytes after codeword section", r.offset());
  return words;
}

}  // namespace sparks
