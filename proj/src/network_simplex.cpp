#include "wcalc/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace wcalc {

namespace {

// Spanning-tree basis of the complete bipartite transportation graph.
// Nodes 0..n-1 are rows, n..n+m-1 are columns; basic cells are tree edges.
struct Basis {
  Index n = 0, m = 0;
  std::vector<Index> cell_row, cell_col;  // per basic cell
  std::vector<double> flow;
  std::vector<std::vector<int>> adj;  // node -> incident basic cell ids
  std::vector<Index> parent;
  std::vector<int> pred;  // basic cell connecting node to parent
  std::vector<Index> depth;
  std::vector<double> pot;  // u on rows, v on columns

  Index col_node(Index j) const { return n + j; }

  void detach(int cell, Index node) {
    auto& list = adj[static_cast<size_t>(node)];
    list.erase(std::find(list.begin(), list.end(), cell));
  }

  // Rebuild parent/depth/potentials from the adjacency of basic cells.
  // The tree has n+m nodes, so this is linear in the instance size.
  void refresh(const Mat& c) {
    const Index N = n + m;
    std::fill(parent.begin(), parent.end(), Index{-1});
    parent[0] = 0;
    pred[0] = -1;
    depth[0] = 0;
    pot[0] = 0.0;
    std::vector<Index> stack{0};
    Index visited = 1;
    while (!stack.empty()) {
      const Index x = stack.back();
      stack.pop_back();
      for (int cell : adj[static_cast<size_t>(x)]) {
        const Index i = cell_row[static_cast<size_t>(cell)];
        const Index j = cell_col[static_cast<size_t>(cell)];
        const Index y = (x < n) ? col_node(j) : i;
        if (parent[static_cast<size_t>(y)] >= 0) continue;
        parent[static_cast<size_t>(y)] = x;
        pred[static_cast<size_t>(y)] = cell;
        depth[static_cast<size_t>(y)] = depth[static_cast<size_t>(x)] + 1;
        pot[static_cast<size_t>(y)] = c(i, j) - pot[static_cast<size_t>(x)];
        stack.push_back(y);
        ++visited;
      }
    }
    if (visited != N) throw SolverError("transport basis lost connectivity");
  }
};

}  // namespace

TransportSolution solve_transport(const Mat& cost, const Vec& a, const Vec& b,
                                  const SimplexOptions& opts) {
  const Index n = cost.rows(), m = cost.cols();
  require(n > 0 && m > 0, "empty transport instance");
  require(a.size() == n && b.size() == m, "marginal size mismatch");
  require((a.array() >= 0).all() && (b.array() >= 0).all(), "negative marginal");
  require(std::abs(a.sum() - b.sum()) <= 1e-9 * std::max(1.0, a.sum()),
          "unbalanced transport instance");
  require(cost.allFinite(), "non-finite transport cost");

  Basis B;
  B.n = n;
  B.m = m;
  const size_t nbasic = static_cast<size_t>(n + m - 1);
  B.cell_row.resize(nbasic);
  B.cell_col.resize(nbasic);
  B.flow.resize(nbasic);
  B.adj.assign(static_cast<size_t>(n + m), {});
  B.parent.assign(static_cast<size_t>(n + m), -1);
  B.pred.assign(static_cast<size_t>(n + m), -1);
  B.depth.assign(static_cast<size_t>(n + m), 0);
  B.pot.assign(static_cast<size_t>(n + m), 0.0);

  // North-west corner start: advances one marginal index per step, which
  // yields exactly n+m-1 basic cells (some possibly with zero flow).
  {
    Index i = 0, j = 0;
    double ra = a[0], rb = b[0];
    size_t k = 0;
    while (true) {
      const double t = std::min(ra, rb);
      B.cell_row[k] = i;
      B.cell_col[k] = j;
      B.flow[k] = t;
      B.adj[static_cast<size_t>(i)].push_back(static_cast<int>(k));
      B.adj[static_cast<size_t>(B.col_node(j))].push_back(static_cast<int>(k));
      ++k;
      ra -= t;
      rb -= t;
      if (i == n - 1 && j == m - 1) break;
      if (ra <= rb && i < n - 1) {
        ++i;
        ra = a[i];
      } else {
        ++j;
        rb = (j < m) ? b[j] : 0.0;
      }
    }
    if (k != nbasic) throw SolverError("north-west corner basis has wrong size");
  }
  B.refresh(cost);

  const double cost_scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = opts.pivot_tolerance * cost_scale;
  const long max_pivots =
      opts.max_pivots > 0 ? opts.max_pivots : 200L * static_cast<long>(n + m) + 20000L;
  const long total_cells = static_cast<long>(n) * static_cast<long>(m);
  const long block = std::max<long>(64, static_cast<long>(std::sqrt(static_cast<double>(total_cells))));

  long pivots = 0;
  long scan_pos = 0;
  long degenerate_run = 0;
  const long bland_threshold = 8L * static_cast<long>(n + m) + 64;

  std::vector<int> cycle_cells;
  cycle_cells.reserve(static_cast<size_t>(n + m));

  while (true) {
    // entering arc: most negative reduced cost within a scanning block
    // (Bland-like first-negative rule after a long degenerate run)
    Index ei = -1, ej = -1;
    const bool bland = degenerate_run > bland_threshold;
    {
      double best = -tol;
      long seen = 0;
      long p = bland ? 0 : scan_pos;
      if (p >= total_cells) p = 0;
      while (seen < total_cells) {
        const long stop = std::min<long>(seen + block, total_cells);
        for (; seen < stop; ++seen, ++p) {
          if (p == total_cells) p = 0;
          const Index j = static_cast<Index>(p / n);  // column-major sweep
          const Index i = static_cast<Index>(p % n);
          const double r = cost(i, j) - B.pot[static_cast<size_t>(i)] -
                           B.pot[static_cast<size_t>(B.col_node(j))];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
            if (bland) break;
          }
        }
        if (ei >= 0) break;
      }
      scan_pos = p;
    }
    if (ei < 0) break;  // optimal

    // cycle created by the entering cell: walk both endpoints to their join
    cycle_cells.clear();
    {
      Index x = ei, y = B.col_node(ej);
      std::vector<int> up_from_row, up_from_col;
      while (B.depth[static_cast<size_t>(x)] > B.depth[static_cast<size_t>(y)]) {
        up_from_row.push_back(B.pred[static_cast<size_t>(x)]);
        x = B.parent[static_cast<size_t>(x)];
      }
      while (B.depth[static_cast<size_t>(y)] > B.depth[static_cast<size_t>(x)]) {
        up_from_col.push_back(B.pred[static_cast<size_t>(y)]);
        y = B.parent[static_cast<size_t>(y)];
      }
      while (x != y) {
        up_from_row.push_back(B.pred[static_cast<size_t>(x)]);
        up_from_col.push_back(B.pred[static_cast<size_t>(y)]);
        x = B.parent[static_cast<size_t>(x)];
        y = B.parent[static_cast<size_t>(y)];
      }
      // cycle order: entering edge, then col-side path up, then row-side down
      cycle_cells.push_back(-1);  // placeholder for the entering edge
      for (int c : up_from_col) cycle_cells.push_back(c);
      for (auto it = up_from_row.rbegin(); it != up_from_row.rend(); ++it)
        cycle_cells.push_back(*it);
    }

    // adjacent cycle edges share a node, so signs alternate; entering is +
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (size_t k = 1; k < cycle_cells.size(); k += 2) {
      const double f = B.flow[static_cast<size_t>(cycle_cells[k])];
      if (f < theta) {
        theta = f;
        leaving = cycle_cells[k];
      }
    }
    if (leaving < 0) throw SolverError("transport cycle without leaving arc");

    for (size_t k = 1; k < cycle_cells.size(); ++k) {
      double& f = B.flow[static_cast<size_t>(cycle_cells[k])];
      f += (k % 2 == 0) ? theta : -theta;
      if (f < 0) f = 0.0;
    }

    // swap leaving -> entering in place
    B.detach(leaving, B.cell_row[static_cast<size_t>(leaving)]);
    B.detach(leaving, B.col_node(B.cell_col[static_cast<size_t>(leaving)]));
    B.cell_row[static_cast<size_t>(leaving)] = ei;
    B.cell_col[static_cast<size_t>(leaving)] = ej;
    B.flow[static_cast<size_t>(leaving)] = theta;
    B.adj[static_cast<size_t>(ei)].push_back(leaving);
    B.adj[static_cast<size_t>(B.col_node(ej))].push_back(leaving);
    B.refresh(cost);

    degenerate_run = (theta == 0.0) ? degenerate_run + 1 : 0;
    if (++pivots > max_pivots) {
      double bound = 0.0;
      for (size_t k = 0; k < nbasic; ++k)
        bound += B.flow[k] * cost(B.cell_row[k], B.cell_col[k]);
      throw SolverError("transport pivot limit reached after " + std::to_string(pivots) +
                        " pivots; best feasible cost " + std::to_string(bound));
    }
  }

  TransportSolution sol;
  sol.pivots = pivots;
  for (size_t k = 0; k < nbasic; ++k) {
    if (B.flow[k] > 0.0) {
      sol.support.push_back({B.cell_row[k], B.cell_col[k]});
      sol.flows.push_back(B.flow[k]);
      sol.cost += B.flow[k] * cost(B.cell_row[k], B.cell_col[k]);
    }
  }

  // Double c-transform of the tree potentials: the resulting pair is
  // admissible with exact arithmetic, u_i + v_j <= c_ij for all (i, j).
  sol.v = Vec(m);
  sol.u = Vec(n);
  for (Index j = 0; j < m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) best = std::min(best, cost(i, j) - B.pot[static_cast<size_t>(i)]);
    sol.v[j] = best;
  }
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < m; ++j) best = std::min(best, cost(i, j) - sol.v[j]);
    sol.u[i] = best;
  }
  sol.dual_value = a.dot(sol.u) + b.dot(sol.v);
  return sol;
}

}  // namespace wcalc
