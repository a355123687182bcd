#include "sparks/accounting.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "sparks/errors.hpp"
#include "sparks/log.hpp"

namespace sparks {

void LayerSpec::validate() const {
  if (in_w <= 0 || in_h <= 0 || in_c <= 0 || out_w <= 0 || out_h <= 0 || out_c <= 0 ||
      k_w <= 0 || k_h <= 0)
    throw std::invalid_argument("layer '" + name + "' has non-positive dimensions");
}

std::string BitMode::label() const {
  if (is_one_bit()) return "1-bit";
  return "n=" + std::to_string(*n);
}

namespace {

int log2_exact(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  if ((1 << b) != n) throw std::invalid_argument("n must be a power of two, got " + std::to_string(n));
  return b;
}

}  // namespace

long long storage_bits(const LayerSpec& layer, const BitMode& mode) {
  layer.validate();
  if (!layer.binarized)
    throw std::invalid_argument("storage_bits applies to binarized layers only");
  const long long base = layer.out_c * layer.in_c * layer.k_w * layer.k_h;
  if (mode.is_one_bit()) return base;
  const long long scaled = base * log2_exact(*mode.n);
  const long long k2 = layer.k_w * layer.k_h;
  if (scaled % k2 != 0)
    throw AccountingError("non-integer sub-bit storage for layer '" + layer.name + "'");
  return scaled / k2;
}

long long bops(const LayerSpec& layer, const BitMode& mode) {
  layer.validate();
  if (!layer.binarized) throw std::invalid_argument("bops applies to binarized layers only");
  const long long base =
      layer.in_c * layer.out_w * layer.out_h * layer.k_w * layer.k_h * layer.out_c;
  if (mode.is_one_bit()) return base;
  const LutBops parts = bops_lut_parts(layer, *mode.n);
  return std::min(base, parts.precompute + parts.gather);
}

LutBops bops_lut_parts(const LayerSpec& layer, int n) {
  layer.validate();
  log2_exact(n);
  LutBops parts;
  parts.precompute = layer.in_c * layer.out_w * layer.out_h * layer.k_w * layer.k_h * n;
  const long long summed = layer.in_c * layer.out_w * layer.out_h - 1;
  const long long numerator = layer.out_c * summed;
  if (numerator % 2 != 0)
    log_warn("gather BOPs for layer '" + layer.name + "' are odd before halving; flooring");
  parts.gather = numerator / 2;
  return parts;
}

AccountingReport report(const std::vector<LayerSpec>& arch, const std::vector<BitMode>& modes) {
  if (arch.empty()) throw std::invalid_argument("empty architecture spec");
  if (modes.empty()) throw std::invalid_argument("no accounting modes requested");
  AccountingReport rep;
  rep.modes = modes;
  rep.total_storage.assign(modes.size(), 0);
  rep.total_bops.assign(modes.size(), 0);
  for (const LayerSpec& layer : arch) {
    layer.validate();
    ReportRow row;
    row.name = layer.name;
    row.binarized = layer.binarized;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (!layer.binarized) {
        row.storage.push_back(-1);
        row.bops.push_back(-1);
        continue;
      }
      const long long s = storage_bits(layer, modes[m]);
      const long long b = bops(layer, modes[m]);
      row.storage.push_back(s);
      row.bops.push_back(b);
      rep.total_storage[m] += s;
      rep.total_bops[m] += b;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

Ratio compression_ratio(int n, int kernel_size) {
  const int k2 = kernel_size * kernel_size;
  if (log2_exact(n) > k2) throw std::invalid_argument("n exceeds the full codebook size");
  return Ratio{log2_exact(n), static_cast<long long>(k2)};
}

std::vector<LayerSpec> resnet18_spec() {
  std::vector<LayerSpec> arch;
  auto conv = [&](const std::string& name, long long in_wh, long long in_c, long long out_wh,
                  long long out_c) {
    arch.push_back(LayerSpec{name, in_wh, in_wh, in_c, out_wh, out_wh, out_c, 3, 3, true});
  };
  arch.push_back(LayerSpec{"conv1", 224, 224, 3, 112, 112, 64, 7, 7, false});
  conv("conv2-1a", 56, 64, 56, 64);
  conv("conv2-1b", 56, 64, 56, 64);
  conv("conv2-2a", 56, 64, 56, 64);
  conv("conv2-2b", 56, 64, 56, 64);
  conv("conv3-1a", 56, 64, 28, 128);
  conv("conv3-1b", 28, 128, 28, 128);
  conv("conv3-2a", 28, 128, 28, 128);
  conv("conv3-2b", 28, 128, 28, 128);
  conv("conv4-1a", 28, 128, 14, 256);
  conv("conv4-1b", 14, 256, 14, 256);
  conv("conv4-2a", 14, 256, 14, 256);
  conv("conv4-2b", 14, 256, 14, 256);
  conv("conv5-1a", 14, 256, 7, 512);
  conv("conv5-1b", 7, 512, 7, 512);
  conv("conv5-2a", 7, 512, 7, 512);
  conv("conv5-2b", 7, 512, 7, 512);
  arch.push_back(LayerSpec{"fc1000", 1, 1, 512, 1, 1, 1000, 1, 1, false});
  return arch;
}

std::vector<LayerSpec> parse_arch_lines(std::istream& in, const std::string& origin) {
  std::vector<LayerSpec> arch;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    LayerSpec spec;
    int binarized = 0;
    if (!(ss >> spec.name)) continue;  // blank line
    if (!(ss >> spec.in_w >> spec.in_h >> spec.in_c >> spec.out_w >> spec.out_h >>
          spec.out_c >> spec.k_w >> spec.k_h >> binarized))
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected 'name in_w in_h in_c out_w out_h out_c k_w k_h binarized'");
    std::string extra;
    if (ss >> extra)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": trailing token '" +
                                  extra + "'");
    spec.binarized = binarized != 0;
    spec.validate();
    arch.push_back(std::move(spec));
  }
  return arch;
}

std::vector<LayerSpec> parse_arch_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open architecture spec " + path);
  return parse_arch_lines(f, path);
}

void write_report_csv(const AccountingReport& rep, std::ostream& out) {
  out << "name";
  for (const BitMode& m : rep.modes) out << ",storage_" << m.label();
  for (const BitMode& m : rep.modes) out << ",bops_" << m.label();
  out << '\n';
  auto cell = [&](long long v) {
    if (v < 0)
      out << ",-";
    else
      out << ',' << v;
  };
  for (const ReportRow& row : rep.rows) {
    out << row.name;
    for (long long v : row.storage) cell(v);
    for (long long v : row.bops) cell(v);
    out << '\n';
  }
  out << "Total";
  for (long long v : rep.total_storage) out << ',' << v;
  for (long long v : rep.total_bops) out << ',' << v;
  out << '\n';
}

void write_report_table(const AccountingReport& rep, std::ostream& out) {
  const int name_w = 10, col_w = 14;
  out << std::left << std::setw(name_w) << "layer";
  for (const BitMode& m : rep.modes)
    out << std::right << std::setw(col_w) << ("stor " + m.label());
  for (const BitMode& m : rep.modes)
    out << std::right << std::setw(col_w) << ("bops " + m.label());
  out << '\n';
  auto cell = [&](long long v) {
    if (v < 0)
      out << std::right << std::setw(col_w) << "-";
    else
      out << std::right << std::setw(col_w) << v;
  };
  for (const ReportRow& row : rep.rows) {
    out << std::left << std::setw(name_w) << row.name;
    for (long long v : row.storage) cell(v);
    for (long long v : row.bops) cell(v);
    out << '\n';
  }
  out << std::left << std::setw(name_w) << "Total";
  for (long long v : rep.total_storage) out << std::right << std::setw(col_w) << v;
  for (long long v : rep.total_bops) out << std::right << std::setw(col_w) << v;
  out << '\n';
}

}  // namespace sparks
