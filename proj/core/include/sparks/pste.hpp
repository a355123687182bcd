#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "sparks/assignment.hpp"
#include "sparks/codebook.hpp"
#include "sparks/matrix.hpp"
#include "sparks/sinkhorn.hpp"

namespace sparks {

// Per-kernel local index into the current sub-codebook, one entry per
// (output-channel, input-channel) pair in flattened order.
using AssignmentMap = std::vector<int>;

// plain: learn a permutation over all N codewords.
// symmetric: learn over the (N-2)/2 representatives with bit patterns
// 1..(N-2)/2; picking a representative also picks its sign-mirror, and the
// all-minus-one / all-plus-one codewords stay pinned in the selection.
enum class SelectionMode { kPlain, kSymmetric };

SelectionMode default_selection_mode(int kernel_size);

struct SelectionState {
  SelectionMode mode = SelectionMode::kPlain;
  int n = 0;                       // sub-codebook size
  SinkhornConfig cfg;              // cfg.seed is the base noise seed
  Matrix logits;                   // N' x N' learnable
  std::vector<std::uint32_t> pinned;
  std::uint64_t step = 0;          // forward counter, also the noise stream id

  std::optional<SinkhornTape> last_tape;
  std::optional<Permutation> last_perm;
  SubCodebook current;

  std::size_t reduced_dim() const noexcept { return logits.rows(); }
  // Selected permutation columns: n in plain mode, (n-2)/2 in symmetric.
  int selected_columns() const noexcept {
    return mode == SelectionMode::kPlain ? n : (n - 2) / 2;
  }
};

// Logits start i.i.d. uniform(-init_scale, init_scale), seeded. init_scale
// <= 0 selects the default, which is cfg.tau: scaled by 1/tau the initial
// matrix then sits in the soft region of the relaxation where gradients
// still rank all candidates (a +-0.1 init at tau=0.01 starts saturated and
// the selection freezes).
SelectionState make_selection_state(const Codebook& book, int n, SelectionMode mode,
                                    const SinkhornConfig& cfg, std::uint64_t init_seed,
                                    double init_scale = 0.0);

// Sinkhorn -> Hungarian -> first-columns selection (Gumbel noise stream
// advances every call when enabled). Updates state.current/last_tape/
// last_perm and returns the new sub-codebook.
SubCodebook forward_select(SelectionState& state, const Codebook& book);

// Straight-through weight gradient: passes g_what where w is strictly
// inside (-1, 1), zero elsewhere.
std::vector<double> ste_weight_grad(std::span<const double> g_what,
                                    std::span<const double> weights);

// Accumulate per-kernel binary-weight gradients onto their assigned
// codeword columns: column j = sum of g_what over kernels with assign == j.
Matrix codeword_gradients(std::span<const std::vector<double>> g_what_per_kernel,
                          const AssignmentMap& assign, int n);

// g(P_real) = B^T g(U) V^T, identity pass-through to g(P_GS), then exact
// Sinkhorn backward to the logits. In symmetric mode the mirrored column's
// gradient folds onto its representative with a negated sign.
Matrix pste_backward(SelectionState& state, const Matrix& g_u, const Codebook& book);

// Frobenius norm of (P_real - P_GS) for the last forward pass.
double permutation_gap(const SelectionState& state);

struct PermGapSample {
  std::uint64_t step = 0;
  int k = 0;
  double tau = 0.0;
  double gap = 0.0;
};

// CSV: "step,k,tau,gap".
void write_perm_gap_csv(std::span<const PermGapSample> samples, std::ostream& out);

// CSV: "step,selected_index_0,...,selected_index_{n-1}".
void write_selection_trace_csv(
    std::span<const std::pair<std::uint64_t, std::vector<std::uint32_t>>> rows,
    std::ostream& out);

}  // namespace sparks
