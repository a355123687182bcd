#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace sparks {

// One K x K binary (+-1) kernel, bit-packed row-major: bit t of `bits`
// encodes kernel position (t / K, t % K), bit value 1 <-> weight +1.
// Only the low K*K bits may be set.
struct Codeword {
  std::uint32_t bits = 0;
  int kernel_size = 0;

  int weight_count() const noexcept { return kernel_size * kernel_size; }
  // Entry at flat position t as +-1.
  int sign_at(int t) const noexcept { return (bits >> t) & 1u ? 1 : -1; }
  std::vector<double> to_vector() const;
  Codeword opposite() const noexcept {
    const std::uint32_t mask = (kernel_size * kernel_size == 32)
                                   ? 0xffffffffu
                                   : ((1u << (kernel_size * kernel_size)) - 1u);
    return Codeword{bits ^ mask, kernel_size};
  }
  friend bool operator==(const Codeword&, const Codeword&) = default;
};

// The full codebook of all 2^(K*K) binary kernels, ordered so that
// word(i).bits == i. Words are synthesized on access; nothing is stored
// beyond K (N = 2^25 at K=5 would be silly to materialize).
class Codebook {
 public:
  explicit Codebook(int kernel_size);

  int kernel_size() const noexcept { return kernel_size_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << (kernel_size_ * kernel_size_); }
  Codeword word(std::uint64_t index) const;

 private:
  int kernel_size_ = 0;
};

Codebook build_full_codebook(int kernel_size);

// An ordered selection of n distinct codeword indices; n a power of two so
// each kernel index costs exactly log2(n) bits.
struct SubCodebook {
  int kernel_size = 0;
  std::vector<std::uint32_t> indices;

  int n() const noexcept { return static_cast<int>(indices.size()); }
  int bits_per_index() const noexcept;
  void validate(const Codebook& book) const;
};

struct CodewordHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

// Per-entry sign with sign(0) = +1; equals the nearest codeword in the full
// codebook. Throws std::invalid_argument on NaN entries.
Codeword sign_binarize(std::span<const double> kernel, int kernel_size);

// Nearest codeword within a sub-codebook by L2 distance, computed as the
// dot-product argmax; ties break toward the lowest local index.
std::pair<int, Codeword> nearest_codeword(std::span<const double> kernel,
                                          const SubCodebook& sub,
                                          const Codebook& book);

CodewordHistogram codeword_histogram(std::span<const Codeword> assignments,
                                     const Codebook& book);

// Selection baselines. Each returns exactly n distinct indices.
SubCodebook select_topn_frequent(const CodewordHistogram& hist, int n, const Codebook& book);
SubCodebook select_random(std::uint64_t seed, int n, const Codebook& book);
SubCodebook select_equal_interval(int n, const Codebook& book);

// CSV export: header "index,count", one row per codeword.
void write_histogram_csv(const CodewordHistogram& hist, std::ostream& out);

}  // namespace sparks
