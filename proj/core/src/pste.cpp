#include "sparks/pste.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparks/errors.hpp"
#include "sparks/rng.hpp"

namespace sparks {

SelectionMode default_selection_mode(int kernel_size) {
  return kernel_size == 3 ? SelectionMode::kSymmetric : SelectionMode::kPlain;
}

SelectionState make_selection_state(const Codebook& book, int n, SelectionMode mode,
                                    const SinkhornConfig& cfg, std::uint64_t init_seed,
                                    double init_scale) {
  cfg.validate();
  const std::uint64_t full = book.size();
  if (n < 2 || (n & (n - 1)) != 0 || static_cast<std::uint64_t>(n) > full)
    throw std::invalid_argument("sub-codebook size must be a power of two in [2, N]");

  SelectionState state;
  state.mode = mode;
  state.n = n;
  state.cfg = cfg;

  std::size_t dim;
  if (mode == SelectionMode::kSymmetric) {
    if (n < 4)
      throw std::invalid_argument("symmetric mode needs n >= 4 (two pinned + mirrored pairs)");
    if (n % 2 != 0) throw std::invalid_argument("symmetric mode needs even n");
    dim = static_cast<std::size_t>((full - 2) / 2);
    state.pinned = {0u, static_cast<std::uint32_t>(full - 1)};
  } else {
    dim = static_cast<std::size_t>(full);
  }

  if (init_scale <= 0.0) init_scale = cfg.tau;
  Rng rng(init_seed);
  state.logits = Matrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      state.logits(i, j) = rng.uniform(-init_scale, init_scale);
  return state;
}

SubCodebook forward_select(SelectionState& state, const Codebook& book) {
  const int cols = state.selected_columns();
  if (cols < 1) throw std::invalid_argument("selection needs at least one permutation column");

  SinkhornConfig cfg = state.cfg;
  if (cfg.gumbel) cfg.seed = mix_seed(state.cfg.seed, state.step);  // fresh noise per pass
  state.last_tape = sinkhorn_forward(state.logits, cfg);
  state.last_perm = hungarian_max(state.last_tape->pgs);
  ++state.step;

  SubCodebook sub;
  sub.kernel_size = book.kernel_size();
  if (state.mode == SelectionMode::kPlain) {
    for (int j = 0; j < cols; ++j)
      sub.indices.push_back(static_cast<std::uint32_t>(state.last_perm->map[j]));
  } else {
    const std::uint32_t last = static_cast<std::uint32_t>(book.size() - 1);
    sub.indices = {0u, last};
    for (int j = 0; j < cols; ++j) {
      const std::uint32_t rep = static_cast<std::uint32_t>(state.last_perm->map[j]) + 1u;
      sub.indices.push_back(rep);
      sub.indices.push_back(last - rep);
    }
  }
  sub.validate(book);
  state.current = sub;
  return sub;
}

std::vector<double> ste_weight_grad(std::span<const double> g_what,
                                    std::span<const double> weights) {
  if (g_what.size() != weights.size())
    throw std::invalid_argument("shape mismatch in ste_weight_grad");
  std::vector<double> g(g_what.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = (weights[i] > -1.0 && weights[i] < 1.0) ? g_what[i] : 0.0;
  return g;
}

Matrix codeword_gradients(std::span<const std::vector<double>> g_what_per_kernel,
                          const AssignmentMap& assign, int n) {
  if (g_what_per_kernel.size() != assign.size())
    throw std::invalid_argument("assignment/gradient count mismatch");
  if (g_what_per_kernel.empty()) return Matrix(0, static_cast<std::size_t>(n));
  const std::size_t k2 = g_what_per_kernel[0].size();
  Matrix g_u(k2, static_cast<std::size_t>(n), 0.0);
  for (std::size_t c = 0; c < assign.size(); ++c) {
    const int j = assign[c];
    if (j < 0 || j >= n)
      throw std::invalid_argument("assignment index " + std::to_string(j) + " out of range");
    const auto& g = g_what_per_kernel[c];
    if (g.size() != k2) throw std::invalid_argument("inconsistent gradient length");
    for (std::size_t t = 0; t < k2; ++t) g_u(t, static_cast<std::size_t>(j)) += g[t];
  }
  return g_u;
}

Matrix pste_backward(SelectionState& state, const Matrix& g_u, const Codebook& book) {
  if (!state.last_tape || !state.last_perm)
    throw StateError("pste_backward called before forward_select");
  const std::size_t k2 =
      static_cast<std::size_t>(book.kernel_size() * book.kernel_size());
  if (g_u.rows() != k2 || g_u.cols() != static_cast<std::size_t>(state.n))
    throw std::invalid_argument("g_u must be K^2 x n");

  const std::size_t dim = state.reduced_dim();
  const int cols = state.selected_columns();
  Matrix g_preal(dim, dim, 0.0);

  if (state.mode == SelectionMode::kPlain) {
    // g(P_real)[i][j] = <b_i, g_u[:, j]> for selected columns, zero beyond.
    for (int j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < dim; ++i) {
        const Codeword b = book.word(i);
        double dot = 0.0;
        for (std::size_t t = 0; t < k2; ++t)
          dot += b.sign_at(static_cast<int>(t)) * g_u(t, static_cast<std::size_t>(j));
        g_preal(i, static_cast<std::size_t>(j)) = dot;
      }
    }
  } else {
    // Sub-codebook layout is [0, N-1, r_0, m_0, r_1, m_1, ...]. The mirror
    // m_j is the sign-flipped representative, so its gradient folds in
    // negated; pinned columns never touch the permutation.
    for (int j = 0; j < cols; ++j) {
      const std::size_t rep_col = static_cast<std::size_t>(2 + 2 * j);
      const std::size_t mir_col = rep_col + 1;
      for (std::size_t i = 0; i < dim; ++i) {
        const Codeword b = book.word(i + 1);  // representative bit patterns are 1..dim
        double dot = 0.0;
        for (std::size_t t = 0; t < k2; ++t)
          dot += b.sign_at(static_cast<int>(t)) * (g_u(t, rep_col) - g_u(t, mir_col));
        g_preal(i, static_cast<std::size_t>(j)) = dot;
      }
    }
  }

  // PSTE identity pass-through: g(P_GS) := g(P_real).
  return sinkhorn_backward(*state.last_tape, g_preal);
}

double permutation_gap(const SelectionState& state) {
  if (!state.last_tape || !state.last_perm)
    throw StateError("permutation_gap called before forward_select");
  const Matrix& pgs = state.last_tape->pgs;
  const std::size_t dim = pgs.rows();
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double real = (state.last_perm->map[j] == static_cast<int>(i)) ? 1.0 : 0.0;
      const double d = real - pgs(i, j);
      sum += d * d;
    }
  return std::sqrt(sum);
}

void write_perm_gap_csv(std::span<const PermGapSample> samples, std::ostream& out) {
  out << "step,k,tau,gap\n";
  for (const auto& s : samples)
    out << s.step << ',' << s.k << ',' << s.tau << ',' << s.gap << '\n';
}

void write_selection_trace_csv(
    std::span<const std::pair<std::uint64_t, std::vector<std::uint32_t>>> rows,
    std::ostream& out) {
  if (rows.empty()) {
    out << "step\n";
    return;
  }
  out << "step";
  for (std::size_t j = 0; j < rows.front().second.size(); ++j) out << ",selected_index_" << j;
  out << '\n';
  for (const auto& [step, sel] : rows) {
    out << step;
    for (std::uint32_t idx : sel) out << ',' << idx;
    out << '\n';
  }
}

}  // namespace sparks
