#include "cpspectra/reference_maps.hpp"

#include <cmath>

namespace cpspectra {

namespace {

// E_ij^* X E_ij = x_ii E_jj, so each unit moves one diagonal entry.
std::vector<Matrix> units(Index m, std::initializer_list<std::pair<Index, Index>> pairs) {
  std::vector<Matrix> out;
  for (auto [i, j] : pairs) {
    out.push_back(unit(m, i, j));
  }
  return out;
}

} // namespace

CpMap corner_trace_map() { return CpMap(units(2, {{0, 0}, {1, 0}}), AlgebraShape({2})); }

CpMap fibonacci_map() {
  return CpMap(units(3, {{0, 0}, {2, 0}, {0, 1}, {2, 1}, {1, 2}}), AlgebraShape({2, 1}));
}

CpMap doubled_trace_map() {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  Matrix b(2, 2);
  b << 1, -1, 1, -1;
  return CpMap({a, b}, AlgebraShape({1, 1}));
}

CpMap path_graph_map() {
  return CpMap(units(3, {{1, 0}, {0, 1}, {2, 1}, {1, 2}}), AlgebraShape({1, 1, 1}));
}

CpMap depolarizing_map(Index m) {
  // sum_ij E_ij^* X E_ij / m = trace(X) I / m
  std::vector<Matrix> kraus;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      kraus.push_back(unit(m, i, j) / std::sqrt(static_cast<double>(m)));
    }
  }
  return CpMap(std::move(kraus));
}

std::vector<Matrix> golden_pair() {
  Matrix a(2, 2);
  a << 1, 1, 0, 1;
  Matrix b(2, 2);
  b << 1, 0, 1, 1;
  return {a, b};
}

} // namespace cpspectra
