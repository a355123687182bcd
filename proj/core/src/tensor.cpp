#include "sparks/tensor.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparks {

std::size_t RawTensor::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<float> RawTensor::as_f32() const {
  if (dtype != "f32") throw std::invalid_argument("tensor dtype is not f32");
  std::vector<float> out(bytes.size() / 4);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

void write_raw_tensor(const std::string& path, const void* data, std::size_t byte_count,
                      const std::vector<std::size_t>& shape, const std::string& dtype) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(byte_count));
  if (!f) throw std::runtime_error("short write to " + path);

  std::ofstream d(path + ".desc", std::ios::trunc);
  if (!d) throw std::runtime_error("cannot open " + path + ".desc for writing");
  d << "shape=";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) d << ',';
    d << shape[i];
  }
  d << ";dtype=" << dtype << "\n";
}

RawTensor read_raw_tensor(const std::string& path) {
  std::ifstream d(path + ".desc");
  if (!d) throw std::runtime_error("missing descriptor " + path + ".desc");
  std::string line;
  std::getline(d, line);

  RawTensor t;
  const auto shape_pos = line.find("shape=");
  const auto dtype_pos = line.find(";dtype=");
  if (shape_pos == std::string::npos || dtype_pos == std::string::npos)
    throw std::runtime_error("malformed descriptor for " + path);
  std::string shape_str = line.substr(shape_pos + 6, dtype_pos - (shape_pos + 6));
  t.dtype = line.substr(dtype_pos + 7);
  while (!t.dtype.empty() && (t.dtype.back() == '\n' || t.dtype.back() == '\r' || t.dtype.back() == ' '))
    t.dtype.pop_back();
  if (t.dtype != "u8" && t.dtype != "f32")
    throw std::runtime_error("unsupported dtype '" + t.dtype + "' in " + path + ".desc");

  std::stringstream ss(shape_str);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) t.shape.push_back(static_cast<std::size_t>(std::stoull(tok)));
  if (t.shape.empty()) throw std::runtime_error("empty shape in " + path + ".desc");

  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  t.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

  const std::size_t unit = (t.dtype == "f32") ? 4 : 1;
  if (t.bytes.size() != t.element_count() * unit)
    throw std::runtime_error("payload size of " + path + " does not match its descriptor");
  return t;
}

}  // namespace sparks
