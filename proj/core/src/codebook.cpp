#include "sparks/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sparks/rng.hpp"

namespace sparks {

std::vector<double> Codeword::to_vector() const {
  std::vector<double> v(weight_count());
  for (int t = 0; t < weight_count(); ++t) v[t] = sign_at(t);
  return v;
}

Codebook::Codebook(int kernel_size) : kernel_size_(kernel_size) {
  if (kernel_size < 2 || kernel_size > 5)
    throw std::invalid_argument("codebook kernel size must be in [2, 5], got " +
                                std::to_string(kernel_size));
}

Codeword Codebook::word(std::uint64_t index) const {
  if (index >= size())
    throw std::invalid_argument("codeword index " + std::to_string(index) + " out of range");
  return Codeword{static_cast<std::uint32_t>(index), kernel_size_};
}

Codebook build_full_codebook(int kernel_size) { return Codebook(kernel_size); }

int SubCodebook::bits_per_index() const noexcept {
  int b = 0;
  while ((1 << b) < n()) ++b;
  return b;
}

void SubCodebook::validate(const Codebook& book) const {
  if (kernel_size != book.kernel_size())
    throw std::invalid_argument("sub-codebook kernel size mismatch");
  const int count = n();
  if (count < 2 || (count & (count - 1)) != 0)
    throw std::invalid_argument("sub-codebook size must be a power of two >= 2, got " +
                                std::to_string(count));
  std::vector<std::uint32_t> sorted(indices);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("sub-codebook indices must be distinct");
  if (!sorted.empty() && sorted.back() >= book.size())
    throw std::invalid_argument("sub-codebook index out of range");
}

Codeword sign_binarize(std::span<const double> kernel, int kernel_size) {
  const int count = kernel_size * kernel_size;
  if (static_cast<int>(kernel.size()) != count)
    throw std::invalid_argument("kernel size mismatch in sign_binarize");
  std::uint32_t bits = 0;
  for (int t = 0; t < count; ++t) {
    if (std::isnan(kernel[t]))
      throw std::invalid_argument("NaN entry in kernel at position " + std::to_string(t));
    if (kernel[t] >= 0.0) bits |= (1u << t);  // sign(0) = +1
  }
  return Codeword{bits, kernel_size};
}

std::pair<int, Codeword> nearest_codeword(std::span<const double> kernel,
                                          const SubCodebook& sub,
                                          const Codebook& book) {
  sub.validate(book);
  const int count = book.kernel_size() * book.kernel_size();
  if (static_cast<int>(kernel.size()) != count)
    throw std::invalid_argument("kernel size mismatch in nearest_codeword");
  // ||u - w||^2 = K^2 - 2<u,w> + ||w||^2, so argmin distance = argmax <u,w>.
  int best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < sub.n(); ++j) {
    const Codeword u = book.word(sub.indices[j]);
    double dot = 0.0;
    for (int t = 0; t < count; ++t) dot += u.sign_at(t) * kernel[t];
    if (dot > best_dot) {
      best_dot = dot;
      best = j;
    }
  }
  return {best, book.word(sub.indices[best])};
}

CodewordHistogram codeword_histogram(std::span<const Codeword> assignments,
                                     const Codebook& book) {
  CodewordHistogram hist;
  hist.counts.assign(book.size(), 0);
  for (const Codeword& w : assignments) {
    if (w.kernel_size != book.kernel_size())
      throw std::invalid_argument("codeword kernel size mismatch in histogram");
    ++hist.counts[w.bits];
    ++hist.total;
  }
  return hist;
}

SubCodebook select_topn_frequent(const CodewordHistogram& hist, int n, const Codebook& book) {
  if (hist.counts.size() != book.size())
    throw std::invalid_argument("histogram size mismatch");
  std::vector<std::uint32_t> order(hist.counts.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return hist.counts[a] > hist.counts[b];  // ties keep lower index first
  });
  SubCodebook sub{book.kernel_size(), {order.begin(), order.begin() + n}};
  sub.validate(book);
  return sub;
}

SubCodebook select_random(std::uint64_t seed, int n, const Codebook& book) {
  const std::uint64_t size = book.size();
  if (static_cast<std::uint64_t>(n) > size)
    throw std::invalid_argument("cannot select " + std::to_string(n) + " of " +
                                std::to_string(size) + " codewords");
  // Floyd's sampling keeps memory at O(n) even for K=5.
  Rng rng(seed);
  std::vector<std::uint32_t> picked;
  picked.reserve(n);
  for (std::uint64_t j = size - n; j < size; ++j) {
    const std::uint32_t t = static_cast<std::uint32_t>(rng.below(j + 1));
    if (std::find(picked.begin(), picked.end(), t) == picked.end())
      picked.push_back(t);
    else
      picked.push_back(static_cast<std::uint32_t>(j));
  }
  SubCodebook sub{book.kernel_size(), std::move(picked)};
  sub.validate(book);
  return sub;
}

SubCodebook select_equal_interval(int n, const Codebook& book) {
  const std::uint64_t size = book.size();
  if (n < 2 || static_cast<std::uint64_t>(n) > size)
    throw std::invalid_argument("equal-interval selection needs 2 <= n <= N");
  SubCodebook sub{book.kernel_size(), {}};
  sub.indices.reserve(n);
  // Evenly spaced grid over [0, N-1], endpoints included.
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * static_cast<double>(size - 1) /
                     static_cast<double>(n - 1);
    sub.indices.push_back(static_cast<std::uint32_t>(std::llround(s)));
  }
  sub.validate(book);
  return sub;
}

void write_histogram_csv(const CodewordHistogram& hist, std::ostream& out) {
  out << "index,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out << i << ',' << hist.counts[i] << '\n';
}

}  // namespace sparks
