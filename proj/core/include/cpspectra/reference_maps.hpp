#ifndef CPSPECTRA_REFERENCE_MAPS_HPP
#define CPSPECTRA_REFERENCE_MAPS_HPP

// Small CP maps with closed-form spectral data, used by tests, benchmarks
// and the `check` subcommand. Entries named a, b, ... below are read off
// the diagonal blocks in order.

#include <vector>

#include "cpspectra/cpmap.hpp"

namespace cpspectra {

/// [[a, b], [c, d]] -> (a + d) E_00 on M_2. r = 1, ||tau^n|| = 2.
CpMap corner_trace_map();

/// On M_2 + M_1: (a + e) on the first two diagonal slots, d on the last.
/// r is the golden ratio.
CpMap fibonacci_map();

/// X -> 2 trace(X) I on M_1 + M_1, written with the Kraus pair
/// [[1,1],[1,1]], [[1,-1],[1,-1]] that shares the invariant line (1, 1).
CpMap doubled_trace_map();

/// (a, b, c) -> (b, a + c, b) on M_1 + M_1 + M_1, the adjacency map of a
/// three-vertex path. Eigenvalues 0, +-sqrt(2).
CpMap path_graph_map();

/// X -> trace(X) I / m on M_m.
CpMap depolarizing_map(Index m);

/// {[[1,1],[0,1]], [[1,0],[1,1]]}, joint spectral radius the golden ratio.
std::vector<Matrix> golden_pair();

} // namespace cpspectra

#endif
