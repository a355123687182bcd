#pragma once

#include <cstdint>
#include <vector>

#include "sparks/matrix.hpp"

namespace sparks {

// A permutation as a column-to-row map: map[j] is the row assigned to
// column j; P[map[j]][j] = 1 in matrix form.
struct Permutation {
  std::vector<int> map;

  std::size_t size() const noexcept { return map.size(); }
  bool is_bijection() const;
  Matrix to_matrix() const;
};

// Maximize sum_j reward(map[j], j) over permutations. O(N^3) shortest
// augmenting path solver; deterministic (fixed scanning order breaks ties).
// Throws std::invalid_argument on NaN entries.
Permutation hungarian_max(const Matrix& reward);

// Exhaustive maximum over all N! permutations; ties toward the
// lexicographically smallest map. Test oracle, N <= 9.
Permutation brute_force_assignment(const Matrix& reward);

double assignment_objective(const Matrix& reward, const Permutation& perm);

}  // namespace sparks
