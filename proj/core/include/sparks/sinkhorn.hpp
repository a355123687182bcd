#pragma once

#include <cstdint>
#include <vector>

#include "sparks/matrix.hpp"

namespace sparks {

// Row/column sums of the relaxed permutation are within this of 1 at the
// default k >= 10 for bounded inputs.
inline constexpr double kDoublyStochasticTol = 1e-6;

struct SinkhornConfig {
  int iterations = 10;   // k
  double tau = 1e-2;     // temperature
  bool gumbel = true;    // perturb logits with Gumbel noise
  std::uint64_t seed = 0;

  void validate() const;
};

// Everything recorded by a forward pass that the exact backward replay
// needs: the log-domain matrix after each row and each column normalization,
// plus the exponentiated final output.
struct SinkhornTape {
  SinkhornConfig config;
  std::size_t n = 0;
  std::vector<Matrix> row_normed;  // log domain, one per iteration
  std::vector<Matrix> col_normed;  // log domain, one per iteration
  Matrix pgs;                      // exp(col_normed.back())

  const Matrix& log_pgs() const { return col_normed.back(); }
};

// epsilon[i][j] = -log(-log(u)), u uniform on (0,1) clamped away from the
// endpoints; deterministic in the seed.
Matrix gumbel_noise(std::uint64_t seed, std::size_t n);

// k alternating row-then-column normalizations of exp((X + eps) / tau),
// done entirely in the log domain. eps is omitted when cfg.gumbel is false.
SinkhornTape sinkhorn_forward(const Matrix& logits, const SinkhornConfig& cfg);

// Exact gradient of <g_pgs, P_GS> with respect to the logits, replayed
// backwards through the recorded normalization chain and the 1/tau scaling.
Matrix sinkhorn_backward(const SinkhornTape& tape, const Matrix& g_pgs);

// max(|row sum - 1|, |col sum - 1|) over all rows/columns of m.
double doubly_stochastic_gap(const Matrix& m);

}  // namespace sparks
