#include "sparks/assignment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparks {

bool Permutation::is_bijection() const {
  std::vector<bool> seen(map.size(), false);
  for (int r : map) {
    if (r < 0 || r >= static_cast<int>(map.size()) || seen[static_cast<std::size_t>(r)])
      return false;
    seen[static_cast<std::size_t>(r)] = true;
  }
  return true;
}

Matrix Permutation::to_matrix() const {
  Matrix p(map.size(), map.size(), 0.0);
  for (std::size_t j = 0; j < map.size(); ++j)
    p(static_cast<std::size_t>(map[j]), j) = 1.0;
  return p;
}

Permutation hungarian_max(const Matrix& reward) {
  if (reward.rows() != reward.cols()) throw std::invalid_argument("reward must be square");
  if (!reward.all_finite()) throw std::invalid_argument("reward contains NaN/inf");
  const int n = static_cast<int>(reward.rows());

  // Shortest-augmenting-path assignment on cost = -reward, 1-based
  // potentials as in the classical formulation.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[col 1..n] = row (1-based)
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -reward(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Permutation perm;
  perm.map.assign(n, -1);
  for (int j = 1; j <= n; ++j) perm.map[j - 1] = match[j] - 1;
  assert(perm.is_bijection());
  return perm;
}

Permutation brute_force_assignment(const Matrix& reward) {
  if (reward.rows() != reward.cols()) throw std::invalid_argument("reward must be square");
  const int n = static_cast<int>(reward.rows());
  if (n > 9) throw std::invalid_argument("brute_force_assignment is limited to N <= 9");

  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), 0);
  Permutation best{map};
  double best_value = -std::numeric_limits<double>::infinity();
  do {
    double value = 0.0;
    for (int j = 0; j < n; ++j) value += reward(static_cast<std::size_t>(map[j]), j);
    if (value > best_value) {  // strict: first (lexicographically smallest) wins ties
      best_value = value;
      best.map = map;
    }
  } while (std::next_permutation(map.begin(), map.end()));
  return best;
}

double assignment_objective(const Matrix& reward, const Permutation& perm) {
  double value = 0.0;
  for (std::size_t j = 0; j < perm.map.size(); ++j)
    value += reward(static_cast<std::size_t>(perm.map[j]), j);
  return value;
}

}  // namespace sparks
