#pragma once

#include "wcalc/measure.hpp"
#include "wcalc/types.hpp"

#include <string>
#include <vector>

namespace wcalc {

/// Finite metric space: symmetric nonnegative distance matrix with zero
/// diagonal; the triangle inequality is verified at construction for
/// instances of at most 200 points.
class FiniteMetricSpace {
 public:
  explicit FiniteMetricSpace(Mat dist, std::vector<std::string> labels = {});

  Index size() const { return dist_.rows(); }
  double dist(Index i, Index j) const { return dist_(i, j); }
  const Mat& matrix() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double diameter() const { return dist_.maxCoeff(); }

 private:
  Mat dist_;
  std::vector<std::string> labels_;
};

// pairwise W_2 distances of a list of measures
FiniteMetricSpace metric_space_from_measures(const std::vector<EmpiricalMeasure>& measures);

// min(d, a), still a metric
FiniteMetricSpace truncate_distance(const FiniteMetricSpace& space, double a);

// max over pairs of |f(x)-f(y)| / d(x,y)
double lip_constant(const FiniteMetricSpace& space, const Vec& f);

struct HopfLaxResult {
  Vec q_values;  // Q_t f
  Vec d_plus;    // max distance over the argmin set (ties within 1e-12)
  double t;
  double q_exponent;
};

// Q_t f(x) = min_y d(x,y)^q / (q t^{q-1}) + f(y)
HopfLaxResult hopf_lax(const FiniteMetricSpace& space, const Vec& f, double t, double q);

// max_x (d_plus[x]/t)^q - (q Lip(f))^p with p the conjugate exponent;
// nonpositive up to rounding
double check_slope_bound(const FiniteMetricSpace& space, const Vec& f, double t, double q);

// max_x | (f(x) - Q_t f(x))/t  -  (1/p) int_0^1 (D+_{rt} f(x) / (rt))^q dr |
// The argmin correspondence is piecewise constant in r; breakpoints are
// located by bisection and each piece is integrated by Gauss-Legendre.
double verify_identity_25(const FiniteMetricSpace& space, const Vec& f, double t,
                          int quad_points, double q = 2.0);

}  // namespace wcalc
