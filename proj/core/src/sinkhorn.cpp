#include "sparks/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparks/rng.hpp"

namespace sparks {

void SinkhornConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("sinkhorn iteration count must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("sinkhorn temperature must be > 0");
}

Matrix gumbel_noise(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  Matrix eps(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double u = rng.u01();
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      eps(i, j) = -std::log(-std::log(u));
    }
  return eps;
}

namespace {

// In-place log-domain row normalization: L[i][j] -= logsumexp(L[i][:]).
void normalize_rows(Matrix& m) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double mx = m(i, 0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::exp(m(i, j) - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t j = 0; j < n; ++j) m(i, j) -= lse;
  }
}

void normalize_cols(Matrix& m) {
  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double mx = m(0, j);
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, m(i, j));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::exp(m(i, j) - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t i = 0; i < n; ++i) m(i, j) -= lse;
  }
}

}  // namespace

SinkhornTape sinkhorn_forward(const Matrix& logits, const SinkhornConfig& cfg) {
  cfg.validate();
  if (logits.rows() != logits.cols()) throw std::invalid_argument("logits must be square");
  if (!logits.all_finite()) throw std::invalid_argument("logits contain NaN/inf");

  const std::size_t n = logits.rows();
  SinkhornTape tape;
  tape.config = cfg;
  tape.n = n;
  tape.row_normed.reserve(cfg.iterations);
  tape.col_normed.reserve(cfg.iterations);

  Matrix log_m = logits;
  if (cfg.gumbel) {
    const Matrix eps = gumbel_noise(cfg.seed, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) log_m(i, j) += eps(i, j);
  }
  const double inv_tau = 1.0 / cfg.tau;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) log_m(i, j) *= inv_tau;

  for (int it = 0; it < cfg.iterations; ++it) {
    normalize_rows(log_m);
    tape.row_normed.push_back(log_m);
    normalize_cols(log_m);
    tape.col_normed.push_back(log_m);
  }

  tape.pgs = log_m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) tape.pgs(i, j) = std::exp(log_m(i, j));
  return tape;
}

Matrix sinkhorn_backward(const SinkhornTape& tape, const Matrix& g_pgs) {
  const std::size_t n = tape.n;
  if (g_pgs.rows() != n || g_pgs.cols() != n)
    throw std::invalid_argument("cotangent shape mismatch in sinkhorn_backward");
  if (tape.row_normed.empty()) throw std::invalid_argument("empty tape");

  // d<g, exp(L)>/dL = g .* exp(L)
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = g_pgs(i, j) * tape.pgs(i, j);

  // For Y = L - lse(L) (per row or column), with softmax(Y) = exp(Y):
  // gL = gY - exp(Y) .* sum(gY) over the normalized axis.
  for (int it = tape.config.iterations - 1; it >= 0; --it) {
    const Matrix& col_out = tape.col_normed[static_cast<std::size_t>(it)];
    for (std::size_t j = 0; j < n; ++j) {
      double colsum = 0.0;
      for (std::size_t i = 0; i < n; ++i) colsum += g(i, j);
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= std::exp(col_out(i, j)) * colsum;
    }
    const Matrix& row_out = tape.row_normed[static_cast<std::size_t>(it)];
    for (std::size_t i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) rowsum += g(i, j);
      for (std::size_t j = 0; j < n; ++j) g(i, j) -= std::exp(row_out(i, j)) * rowsum;
    }
  }

  const double inv_tau = 1.0 / tape.config.tau;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) *= inv_tau;
  return g;
}

double doubly_stochastic_gap(const Matrix& m) {
  const std::size_t n = m.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m(i, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace sparks
