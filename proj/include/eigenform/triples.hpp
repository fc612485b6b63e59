#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eigenform/errors.hpp"
#include "eigenform/pairs.hpp"

namespace eigenform {

// Combinatorial seed of a finitely ramified self-similar set: N boundary
// vertices, M first-subdivision vertices, and k injections placing a boundary
// copy into each cell. Vertices are indices 0..M-1; boundary vertex j+1 is
// index j, so the fixed-point condition reads cell_maps[j][j] == j.
struct FractalTriple {
  int n_boundary = 0;                       // N
  int n_total = 0;                          // M
  std::vector<std::vector<int>> cell_maps;  // k rows of N vertex indices
  std::vector<std::string> labels;          // optional, size 0 or M

  int n_cells() const { return static_cast<int>(cell_maps.size()); }
};

struct ConditionFailure {
  std::string condition;  // "a", "b", "c", "coverage", "injectivity"
  std::string witness;
};

struct ValidationReport {
  bool pass = false;
  std::vector<ConditionFailure> failures;
};

namespace detail {

inline std::string join_indices(const std::vector<int>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

}  // namespace detail

// Structural defects (shape, ranges) throw DimensionError; the five defining
// conditions are reported with witnesses instead, all of them, not just the
// first.
inline ValidationReport validate_triple(const FractalTriple& t) {
  const int n = t.n_boundary;
  const int m = t.n_total;
  const int k = t.n_cells();
  if (n < 2) throw DimensionError("triple: n_boundary must be >= 2");
  if (m < n) throw DimensionError("triple: n_total must be >= n_boundary");
  if (k < n) throw DimensionError("triple: need at least n_boundary cells");
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(t.cell_maps[i].size()) != n) {
      std::ostringstream os;
      os << "triple: cell " << i + 1 << " has " << t.cell_maps[i].size()
         << " entries, expected " << n;
      throw DimensionError(os.str());
    }
    for (int j = 0; j < n; ++j) {
      int v = t.cell_maps[i][j];
      if (v < 0 || v >= m) {
        std::ostringstream os;
        os << "triple: cell " << i + 1 << " entry " << j + 1
           << " out of range: " << v;
        throw DimensionError(os.str());
      }
    }
  }
  if (!t.labels.empty() && static_cast<int>(t.labels.size()) != m)
    throw DimensionError("triple: labels must have n_total entries");

  ValidationReport rep;

  for (int i = 0; i < k; ++i) {
    std::set<int> seen;
    for (int j = 0; j < n; ++j) {
      if (!seen.insert(t.cell_maps[i][j]).second) {
        std::ostringstream os;
        os << "(i=" << i + 1 << ",h=" << j + 1
           << "): repeated image " << t.cell_maps[i][j];
        rep.failures.push_back({"injectivity", os.str()});
      }
    }
  }

  for (int j = 0; j < n; ++j) {
    if (t.cell_maps[j][j] != j) {
      std::ostringstream os;
      os << "(i=" << j + 1 << ",j=" << j + 1 << "): psi_" << j + 1 << "(P_"
         << j + 1 << ") = " << t.cell_maps[j][j] << ", expected " << j;
      rep.failures.push_back({"a", os.str()});
    }
  }

  // A boundary index may appear only at its own diagonal slot.
  for (int i = 0; i < k; ++i)
    for (int h = 0; h < n; ++h) {
      int j = t.cell_maps[i][h];
      if (j < n && !(i == j && h == j)) {
        std::ostringstream os;
        os << "(i=" << i + 1 << ",h=" << h + 1 << ",j=" << j + 1 << ")";
        rep.failures.push_back({"b", os.str()});
      }
    }

  std::vector<char> covered(m, 0);
  for (const auto& row : t.cell_maps)
    for (int v : row) covered[v] = 1;
  for (int v = 0; v < m; ++v)
    if (!covered[v]) {
      std::ostringstream os;
      os << "vertex " << v << " is in no cell";
      rep.failures.push_back({"coverage", os.str()});
    }

  // Condition c: union of per-cell complete graphs must be connected. BFS over
  // cells avoids materializing the edge set.
  {
    std::vector<std::vector<int>> cells_of(m);
    for (int i = 0; i < k; ++i)
      for (int v : t.cell_maps[i]) cells_of[v].push_back(i);
    std::vector<char> vertex_seen(m, 0), cell_seen(k, 0);
    std::queue<int> q;
    q.push(t.cell_maps[0][0]);
    vertex_seen[t.cell_maps[0][0]] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int c : cells_of[v]) {
        if (cell_seen[c]) continue;
        cell_seen[c] = 1;
        for (int w : t.cell_maps[c])
          if (!vertex_seen[w]) {
            vertex_seen[w] = 1;
            q.push(w);
          }
      }
    }
    std::vector<int> unreachable;
    for (int v = 0; v < m; ++v)
      if (!vertex_seen[v] && covered[v]) unreachable.push_back(v);
    if (!unreachable.empty())
      rep.failures.push_back(
          {"c", "component " + detail::join_indices(unreachable)});
  }

  rep.pass = rep.failures.empty();
  return rep;
}

inline void ensure_valid(const FractalTriple& t) {
  ValidationReport rep = validate_triple(t);
  if (!rep.pass) {
    std::string msg = "invalid triple:";
    for (const auto& f : rep.failures)
      msg += " [" + f.condition + " " + f.witness + "]";
    throw Error(msg);
  }
}

// Catalog of standard fixtures. Layouts:
//   interval:  P1 -- M -- P2, two half cells.
//   gasket:    midpoints Q12,Q13,Q23 = 3,4,5; corner cell j keeps P_j.
//   vicsek:    X arrangement of five 1/3-scale squares. Corners P1..P4 = 0..3,
//              center-square corners c1..c4 = 4..7 (c_j touches corner cell j),
//              wings 8..15 (two per corner cell, nothing shares them). Corner
//              cell j maps the corner opposite P_j onto c_j.
//   snowflake: hexagon P1..P6 = 0..5 plus center cell, all scale 1/3. Corner
//              cell j meets the center cell at t_j = 6+j (image of the
//              opposite corner from both sides), meets the next cell at
//              s_j = 12+j via psi_j(P_{j+2}) = psi_{j+1}(P_{j+5}) (corner
//              labels mod 6), and keeps two unshared wings 18+2j, 19+2j.
//   tripod:    three segments joined at a center C=3; arm tips A1,A2,A3 =
//              4,5,6; cells (P1,C,A1), (A2,P2,C), (C,A3,P3).
inline FractalTriple builtin(std::string_view name) {
  FractalTriple t;
  if (name == "interval") {
    t.n_boundary = 2;
    t.n_total = 3;
    t.cell_maps = {{0, 2}, {2, 1}};
  } else if (name == "gasket") {
    t.n_boundary = 3;
    t.n_total = 6;
    t.cell_maps = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  } else if (name == "vicsek") {
    t.n_boundary = 4;
    t.n_total = 16;
    t.cell_maps = {{0, 8, 4, 9},
                   {10, 1, 11, 5},
                   {6, 12, 2, 13},
                   {14, 7, 15, 3},
                   {4, 5, 6, 7}};
  } else if (name == "snowflake") {
    t.n_boundary = 6;
    t.n_total = 30;
    t.cell_maps.assign(7, std::vector<int>(6, -1));
    for (int j = 0; j < 6; ++j) {
      auto& row = t.cell_maps[j];
      row[j] = j;
      row[(j + 3) % 6] = 6 + j;
      row[(j + 2) % 6] = 12 + j;
      row[(j + 4) % 6] = 12 + (j + 5) % 6;
      row[(j + 1) % 6] = 18 + 2 * j;
      row[(j + 5) % 6] = 19 + 2 * j;
    }
    for (int i = 0; i < 6; ++i) t.cell_maps[6][i] = 6 + i;
  } else if (name == "tripod") {
    t.n_boundary = 3;
    t.n_total = 7;
    t.cell_maps = {{0, 3, 4}, {5, 1, 3}, {3, 6, 2}};
  } else {
    throw UnknownName("unknown builtin triple: " + std::string(name));
  }
  ensure_valid(t);
  return t;
}

// Per-cell image edges (endpoints sorted), the assembly pattern for level-1
// forms.
inline std::vector<std::vector<std::pair<int, int>>> cell_edge_set(
    const FractalTriple& t) {
  std::vector<std::vector<std::pair<int, int>>> out(t.n_cells());
  for (int i = 0; i < t.n_cells(); ++i) {
    out[i].reserve(pair_count(t.n_boundary));
    for (int j1 = 0; j1 < t.n_boundary; ++j1)
      for (int j2 = j1 + 1; j2 < t.n_boundary; ++j2) {
        int a = t.cell_maps[i][j1];
        int b = t.cell_maps[i][j2];
        out[i].emplace_back(std::min(a, b), std::max(a, b));
      }
  }
  return out;
}

}  // namespace eigenform
