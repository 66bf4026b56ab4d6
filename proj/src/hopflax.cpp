#include "wcalc/hopflax.hpp"

#include "wcalc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wcalc {

FiniteMetricSpace::FiniteMetricSpace(Mat dist, std::vector<std::string> labels)
    : dist_(std::move(dist)), labels_(std::move(labels)) {
  const Index n = dist_.rows();
  require(n > 0 && dist_.cols() == n, "distance matrix must be square and nonempty");
  require(dist_.allFinite(), "non-finite distance entry");
  for (Index i = 0; i < n; ++i) {
    require(dist_(i, i) == 0.0, "nonzero diagonal at " + std::to_string(i));
    for (Index j = 0; j < n; ++j) {
      require(dist_(i, j) == dist_(j, i),
              "asymmetric distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      require(dist_(i, j) >= 0.0, "negative distance");
    }
  }
  if (n <= 200) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k)
          require(dist_(i, k) <= dist_(i, j) + dist_(j, k) + 1e-12,
                  "triangle inequality fails on (" + std::to_string(i) + "," +
                      std::to_string(j) + "," + std::to_string(k) + ")");
  }
  if (labels_.empty()) {
    labels_.reserve(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) labels_.push_back("p" + std::to_string(i));
  }
  require(static_cast<Index>(labels_.size()) == n, "label count mismatch");
}

FiniteMetricSpace metric_space_from_measures(const std::vector<EmpiricalMeasure>& measures) {
  const Index n = static_cast<Index>(measures.size());
  require(n > 0, "need at least one measure");
  Mat d = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = w2(measures[static_cast<size_t>(i)], measures[static_cast<size_t>(j)]);
      d(j, i) = d(i, j);
    }
  return FiniteMetricSpace(std::move(d));
}

FiniteMetricSpace truncate_distance(const FiniteMetricSpace& space, double a) {
  require(a > 0, "truncation level must be positive");
  return FiniteMetricSpace(space.matrix().cwiseMin(a), space.labels());
}

double lip_constant(const FiniteMetricSpace& space, const Vec& f) {
  require(f.size() == space.size(), "value vector size mismatch");
  double lip = 0.0;
  for (Index i = 0; i < space.size(); ++i)
    for (Index j = i + 1; j < space.size(); ++j)
      if (space.dist(i, j) > 0.0)
        lip = std::max(lip, std::abs(f[i] - f[j]) / space.dist(i, j));
  return lip;
}

namespace {

// argmin data of the inf-convolution at one point and one time
struct PointMin {
  double value;
  double d_plus;
};

PointMin minimize_at(const FiniteMetricSpace& space, const Vec& f, Index x, double t, double q) {
  const double denom = q * std::pow(t, q - 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (Index y = 0; y < space.size(); ++y)
    best = std::min(best, std::pow(space.dist(x, y), q) / denom + f[y]);
  const double tol = 1e-12 * (1.0 + std::abs(best));
  double dp = 0.0;
  for (Index y = 0; y < space.size(); ++y) {
    const double obj = std::pow(space.dist(x, y), q) / denom + f[y];
    if (obj <= best + tol) dp = std::max(dp, space.dist(x, y));
  }
  return {best, dp};
}

}  // namespace

HopfLaxResult hopf_lax(const FiniteMetricSpace& space, const Vec& f, double t, double q) {
  require(t > 0, "time must be positive");
  require(q > 1, "exponent must exceed 1");
  require(f.size() == space.size(), "value vector size mismatch");
  require(f.allFinite(), "non-finite f");
  HopfLaxResult res;
  res.t = t;
  res.q_exponent = q;
  res.q_values.resize(space.size());
  res.d_plus.resize(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    const PointMin pm = minimize_at(space, f, x, t, q);
    res.q_values[x] = pm.value;
    res.d_plus[x] = pm.d_plus;
  }
  return res;
}

double check_slope_bound(const FiniteMetricSpace& space, const Vec& f, double t, double q) {
  const HopfLaxResult hl = hopf_lax(space, f, t, q);
  const double p = q / (q - 1.0);
  const double lip = lip_constant(space, f);
  const double bound = std::pow(q * lip, p);
  double margin = -std::numeric_limits<double>::infinity();
  for (Index x = 0; x < space.size(); ++x)
    margin = std::max(margin, std::pow(hl.d_plus[x] / t, q) - bound);
  check(margin <= 1e-9 * (1.0 + bound), "slope bound violated by " + std::to_string(margin));
  return margin;
}

double verify_identity_25(const FiniteMetricSpace& space, const Vec& f, double t,
                          int quad_points, double q) {
  require(quad_points >= 64, "need at least 64 quadrature points");
  require(t > 0 && q > 1, "invalid parameters");
  const double p = q / (q - 1.0);

  double worst = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    const double lhs = (f[x] - minimize_at(space, f, x, t, q).value) / t;

    auto dp_at = [&](double r) { return minimize_at(space, f, x, r * t, q).d_plus; };

    // D+_{rt} f(x) is a step function of r: resolve its pieces on a grid,
    // bisect each jump, then integrate every piece in closed form.
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(quad_points) + 1);
    grid.push_back(1e-14);
    for (int k = 1; k <= quad_points; ++k)
      grid.push_back(static_cast<double>(k) / static_cast<double>(quad_points));

    std::vector<double> cuts{0.0};
    std::vector<double> piece_dp;  // value on (cuts[i], cuts[i+1]]
    double cur = dp_at(grid[0]);
    for (size_t g = 1; g < grid.size(); ++g) {
      const double nxt = dp_at(grid[g]);
      if (nxt != cur) {
        double lo = grid[g - 1], hi = grid[g];
        while (hi - lo > 1e-13) {
          const double mid = 0.5 * (lo + hi);
          if (dp_at(mid) == cur)
            lo = mid;
          else
            hi = mid;
        }
        cuts.push_back(hi);
        piece_dp.push_back(cur);
        cur = dp_at(grid[g]);
      }
    }
    cuts.push_back(1.0);
    piece_dp.push_back(cur);

    // integral of (D/(rt))^q over a piece: (D/t)^q [r^{1-q}/(1-q)]
    double integral = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double D = piece_dp[i];
      if (D == 0.0) continue;
      const double ra = std::max(cuts[i], 1e-14), rb = cuts[i + 1];
      if (rb <= ra) continue;
      const double anti = (std::pow(rb, 1.0 - q) - std::pow(ra, 1.0 - q)) / (1.0 - q);
      integral += std::pow(D / t, q) * anti;
    }
    const double rhs = integral / p;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace wcalc
