#pragma once

#include "wcalc/measure.hpp"
#include "wcalc/network_simplex.hpp"
#include "wcalc/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace wcalc {

/// Coupling between two empirical measures, stored sparsely.
class TransportPlan {
 public:
  struct Entry {
    Index i, j;
    double mass;
  };

  TransportPlan(EmpiricalMeasure source, EmpiricalMeasure target, std::vector<Entry> entries);

  const EmpiricalMeasure& source() const { return source_; }
  const EmpiricalMeasure& target() const { return target_; }
  const std::vector<Entry>& entries() const { return entries_; }

  double cost_squared() const;  // sum over entries of mass * |x_i - y_j|^2

  // atoms (1-t)x_i + t y_j weighted by the plan masses
  EmpiricalMeasure interpolate(double t) const;

 private:
  EmpiricalMeasure source_, target_;
  std::vector<Entry> entries_;
};

struct W2Options {
  long max_entries = 4'000'000;  // refuse larger dense instances
  SimplexOptions simplex;
};

struct W2Result {
  double cost;  // W_2 distance (not squared)
  TransportPlan plan;
  Vec dual_source, dual_target;  // u on source atoms, v on target atoms,
                                 // u_i + v_j <= |x_i - y_j|^2 everywhere
  double duality_gap;            // cost^2 - dual value, >= 0 up to rounding
};

// Exact quadratic-cost optimal transport between empirical measures.
W2Result w2_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  const W2Options& opts = {});

double w2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Quantile-coupling closed form for d = 1; independent of the simplex path.
double w2_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Normalized convex potential pair (phi, phi*): phi lives on the atoms of
/// the ball-supported measure, phi* is the max-affine conjugate on R^d with
/// the atoms as slopes, phi*(0) = 0. Ties in the argmax are broken by lowest
/// grid index.
class PotentialPair {
 public:
  PotentialPair(Mat grid, Vec phi, Mat conj_slopes, Vec conj_intercepts, double radius,
                double anchor, double gap);

  const Mat& grid() const { return grid_; }
  const Vec& phi_values() const { return phi_; }
  double radius() const { return radius_; }
  double anchor_constant() const { return anchor_; }
  double duality_gap() const { return gap_; }

  double phi_star(const Vec& y) const;
  Index argmax_index(const Vec& y) const;
  Vec phi_star_gradient(const Vec& y) const;  // a.e. gradient = argmax grid atom

  // Convex extension of phi off the grid, max-affine with the second
  // marginal's atoms as slopes; coincides with phi on the grid at optimality.
  double phi_from_conjugate(const Vec& x) const;

 private:
  Mat grid_;   // d x G, atoms of nu
  Vec phi_;    // values on grid, min = 0
  Mat conj_slopes_;
  Vec conj_intercepts_;
  double radius_, anchor_, gap_;
};

// Dual pair of Theorem-normalized convex potentials for W_2(nu, mu) with
// supp(nu) inside the closed ball B(0, R).
PotentialPair kantorovich_potentials(const EmpiricalMeasure& nu, const EmpiricalMeasure& mu,
                                     double R, const W2Options& opts = {});

// W_2^2(mu, nu) - (int u dmu + int v dnu) for an admissible pair; throws if
// u_i + v_j > |x_i - y_j|^2 somewhere (reports the worst pair).
double duality_gap(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const Vec& u,
                   const Vec& v);

/// Gaussian measure N(mean, cov) with PSD covariance (eigenvalues clamped at 0).
struct GaussianMeasure {
  Vec mean;
  Mat cov;

  GaussianMeasure(Vec mean_, Mat cov_);
  Index dim() const { return mean.size(); }
};

// Bures-Wasserstein closed form via symmetric eigendecompositions.
double gaussian_w2(const GaussianMeasure& g1, const GaussianMeasure& g2);

EmpiricalMeasure sample_gaussian(const GaussianMeasure& g, Index n_samples, std::uint64_t seed,
                                 std::uint64_t stream = 0);

// lhs = int f d(mu - nu), rhs = L W_2(mu, nu); checks |f(x)-f(y)| <= L|x-y|
// on all atom pairs first.
std::pair<double, double> lipschitz_pairing_bound_check(
    const std::function<double(const Vec&)>& f, double L, const EmpiricalMeasure& mu,
    const EmpiricalMeasure& nu);

}  // namespace wcalc
