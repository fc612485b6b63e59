#pragma once

#include <utility>
#include <vector>

#include "eigenform/errors.hpp"

namespace eigenform {

// Unordered boundary-vertex pairs {j1, j2}, 1 <= j1 < j2 <= N, enumerated
// lexicographically. The linear indices 0 .. N(N-1)/2 - 1 are the coordinate
// system for every coefficient vector in the library. Vertices are 0-based
// internally; PairIndex carries the 1-based labels used in reports.

inline int pair_count(int n_boundary) {
  return n_boundary * (n_boundary - 1) / 2;
}

// Natural lower bound 1/#pairs for the largest coefficient of a normalized form.
inline double m_tilde(int n_boundary) {
  return 1.0 / static_cast<double>(pair_count(n_boundary));
}

inline int pair_linear(int n_boundary, int i, int j) {
  if (i < 0 || j <= i || j >= n_boundary)
    throw DimensionError("pair_linear: need 0 <= i < j < n_boundary");
  return i * n_boundary - i * (i + 1) / 2 + (j - i - 1);
}

inline std::pair<int, int> pair_vertices(int n_boundary, int linear) {
  if (linear < 0 || linear >= pair_count(n_boundary))
    throw DimensionError("pair_vertices: linear index out of range");
  int i = 0;
  int row = n_boundary - 1;
  while (linear >= row) {
    linear -= row;
    --row;
    ++i;
  }
  return {i, i + 1 + linear};
}

inline std::vector<std::pair<int, int>> all_pairs(int n_boundary) {
  std::vector<std::pair<int, int>> out;
  out.reserve(pair_count(n_boundary));
  for (int i = 0; i < n_boundary; ++i)
    for (int j = i + 1; j < n_boundary; ++j) out.emplace_back(i, j);
  return out;
}

struct PairIndex {
  int j1 = 1;  // 1-based, j1 < j2
  int j2 = 2;
  int linear = 0;
};

inline PairIndex make_pair_index(int n_boundary, int linear) {
  auto [i, j] = pair_vertices(n_boundary, linear);
  return PairIndex{i + 1, j + 1, linear};
}

}  // namespace eigenform
