#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sparks {

// One architecture row: spatial geometry of a convolution (or fc) layer.
struct LayerSpec {
  std::string name;
  long long in_w = 0, in_h = 0, in_c = 0;
  long long out_w = 0, out_h = 0, out_c = 0;
  long long k_w = 0, k_h = 0;
  bool binarized = false;

  void validate() const;
};

// Either the 1-bit baseline or an index-coded sub-bit mode with |U| = n.
struct BitMode {
  std::optional<int> n;  // nullopt = 1-bit

  static BitMode one_bit() { return {}; }
  static BitMode sub_bit(int n) { return {n}; }
  bool is_one_bit() const { return !n.has_value(); }
  std::string label() const;
};

// Exact integer storage (bits) for one binarized layer.
// 1-bit: C_out*C_in*K_w*K_h; sub-bit: that value * log2(n)/(K_w*K_h).
long long storage_bits(const LayerSpec& layer, const BitMode& mode);

// Exact integer BOPs. Base = C_in*W_out*H_out*K_w*K_h*C_out; sub-bit takes
// min(base, lut + gather) with lut = C_in*W_out*H_out*K_w*K_h*n and
// gather = C_out*(C_in*W_out*H_out - 1)/2.
long long bops(const LayerSpec& layer, const BitMode& mode);

// The two LUT-path cost terms before the min() clamp (the engine's debug
// counter measures exactly their sum).
struct LutBops {
  long long precompute = 0;  // BOPs_1
  long long gather = 0;      // BOPs_2
};
LutBops bops_lut_parts(const LayerSpec& layer, int n);

struct ReportRow {
  std::string name;
  bool binarized = false;
  std::vector<long long> storage;  // per mode; -1 on non-binarized rows
  std::vector<long long> bops;
};

struct AccountingReport {
  std::vector<BitMode> modes;
  std::vector<ReportRow> rows;
  std::vector<long long> total_storage;  // per mode, binarized rows only
  std::vector<long long> total_bops;
};

AccountingReport report(const std::vector<LayerSpec>& arch, const std::vector<BitMode>& modes);

// Exact value of log2(n)/K^2 as a fraction.
struct Ratio {
  long long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Ratio compression_ratio(int n, int kernel_size);

// The ResNet-18 geometry used throughout the complexity analysis (first
// conv and classifier carried as non-binarized rows).
std::vector<LayerSpec> resnet18_spec();

// Line format: name in_w in_h in_c out_w out_h out_c k_w k_h binarized.
// '#' comments and blank lines are skipped.
std::vector<LayerSpec> parse_arch_file(const std::string& path);
std::vector<LayerSpec> parse_arch_lines(std::istream& in, const std::string& origin);

void write_report_csv(const AccountingReport& rep, std::ostream& out);
void write_report_table(const AccountingReport& rep, std::ostream& out);

}  // namespace sparks
