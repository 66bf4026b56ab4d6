#pragma once

#include "wcalc/types.hpp"

#include <array>
#include <vector>

namespace wcalc {

struct SimplexOptions {
  // Pivot cap; 0 picks a size-dependent default.
  long max_pivots = 0;
  // Entering-arc threshold relative to the cost scale.
  double pivot_tolerance = 1e-11;
};

struct TransportSolution {
  double cost = 0.0;        // primal optimum of sum_ij c_ij x_ij
  double dual_value = 0.0;  // sum_i a_i u_i + sum_j b_j v_j for the cleaned duals
  std::vector<std::array<Index, 2>> support;
  std::vector<double> flows;  // aligned with support, all > 0
  Vec u, v;                   // duals with u_i + v_j <= c_ij exactly on all pairs
  long pivots = 0;
};

// Exact solver for the dense balanced transportation problem
//   min sum c_ij x_ij,  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0
// by primal network simplex on the complete bipartite graph (block pivot
// search, north-west-corner start). Requires sum a = sum b (checked to 1e-9)
// and throws SolverError with the best feasible bound if the pivot cap hits.
TransportSolution solve_transport(const Mat& cost, const Vec& a, const Vec& b,
                                  const SimplexOptions& opts = {});

}  // namespace wcalc
