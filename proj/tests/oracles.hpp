#pragma once

// Test-only oracles, independent of the library's solver paths.

#include "wcalc/measure.hpp"
#include "wcalc/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace wcalc::oracle {

// Exact optimum of the dense transportation LP by enumerating all basis
// candidates (cell subsets of size n+m-1 that form a spanning tree of the
// bipartite graph) and keeping the feasible ones. Exponential; for tiny
// instances only.
inline double transport_by_vertex_enumeration(const Mat& cost, const Vec& a, const Vec& b) {
  const Index n = cost.rows(), m = cost.cols();
  const int cells = static_cast<int>(n * m);
  const int need = static_cast<int>(n + m - 1);
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> pick(static_cast<size_t>(need));
  std::iota(pick.begin(), pick.end(), 0);

  auto evaluate = [&]() {
    // peel leaves of the candidate tree to solve the flows uniquely
    std::vector<std::vector<int>> incident(static_cast<size_t>(n + m));
    for (int c : pick) {
      const Index i = c / m, j = c % m;
      incident[static_cast<size_t>(i)].push_back(c);
      incident[static_cast<size_t>(n + j)].push_back(c);
    }
    Vec rem_a = a, rem_b = b;
    std::vector<double> flow(static_cast<size_t>(cells), 0.0);
    std::vector<bool> done_cell(static_cast<size_t>(cells), false);
    std::vector<bool> done_node(static_cast<size_t>(n + m), false);
    for (int round = 0; round < need; ++round) {
      bool progressed = false;
      for (Index v = 0; v < n + m; ++v) {
        if (done_node[static_cast<size_t>(v)]) continue;
        int open = -1, open_count = 0;
        for (int c : incident[static_cast<size_t>(v)])
          if (!done_cell[static_cast<size_t>(c)]) {
            open = c;
            ++open_count;
          }
        if (open_count != 1) continue;
        const Index i = open / m, j = open % m;
        const double f = (v < n) ? rem_a[v] : rem_b[v - n];
        flow[static_cast<size_t>(open)] = f;
        rem_a[i] -= f;
        rem_b[j] -= f;
        done_cell[static_cast<size_t>(open)] = true;
        done_node[static_cast<size_t>(v)] = true;
        progressed = true;
      }
      if (!progressed) break;
    }
    for (int c : pick)
      if (!done_cell[static_cast<size_t>(c)]) return;  // cycle: not a tree
    for (int c : pick)
      if (flow[static_cast<size_t>(c)] < -1e-12) return;  // infeasible basis
    double total = 0.0;
    for (int c : pick) total += std::max(0.0, flow[static_cast<size_t>(c)]) * cost(c / m, c % m);
    best = std::min(best, total);
  };

  // lexicographic subset enumeration
  while (true) {
    evaluate();
    int k = need - 1;
    while (k >= 0 && pick[static_cast<size_t>(k)] == cells - need + k) --k;
    if (k < 0) break;
    ++pick[static_cast<size_t>(k)];
    for (int q = k + 1; q < need; ++q)
      pick[static_cast<size_t>(q)] = pick[static_cast<size_t>(q - 1)] + 1;
  }
  return best;
}

inline double w2_by_vertex_enumeration(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  Mat cost(mu.size(), nu.size());
  for (Index i = 0; i < mu.size(); ++i)
    for (Index j = 0; j < nu.size(); ++j)
      cost(i, j) = (mu.atom(i) - nu.atom(j)).squaredNorm();
  return std::sqrt(transport_by_vertex_enumeration(cost, mu.weights(), nu.weights()));
}

// Uniform-weight matching oracle: min over permutations, n <= 8.
inline double w2_by_permutations(const Mat& x, const Mat& y) {
  const Index n = x.cols();
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (Index i = 0; i < n; ++i)
      c += (x.col(i) - y.col(perm[static_cast<size_t>(i)])).squaredNorm();
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(n));
}

}  // namespace wcalc::oracle
