#pragma once

#include "wcalc/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace wcalc {

/// Finitely supported probability measure on R^d: distinct atoms (columns)
/// with positive weights summing to 1. Immutable after construction.
class EmpiricalMeasure {
 public:
  // Merges exactly-equal atom columns (summing their weights) and normalizes
  // the weights to total mass 1. Atom order is first occurrence.
  EmpiricalMeasure(Mat atoms, Vec weights);

  Index dim() const { return atoms_.rows(); }
  Index size() const { return atoms_.cols(); }

  const Mat& atoms() const { return atoms_; }
  const Vec& weights() const { return weights_; }
  Vec atom(Index i) const { return atoms_.col(i); }
  double weight(Index i) const { return weights_[i]; }

  Vec mean() const { return atoms_ * weights_; }

  // integral of |x|^2, equal to W_2^2(mu, delta_0)
  double second_moment() const;

  // integral of f
  double integrate(const std::function<double(const Vec&)>& f) const;

 private:
  Mat atoms_;    // d x n
  Vec weights_;  // n
};

EmpiricalMeasure make_measure(const std::vector<std::vector<double>>& atoms,
                              const std::vector<double>& weights);

EmpiricalMeasure dirac(const Vec& x);
EmpiricalMeasure dirac1d(double x);

double second_moment(const EmpiricalMeasure& mu);

// Atoms mapped through `map`, weights preserved, exact duplicates merged.
EmpiricalMeasure pushforward(const EmpiricalMeasure& mu,
                             const std::function<Vec(const Vec&)>& map);

// (i + t u)# mu for a field sampled on the atoms of mu.
EmpiricalMeasure translate_by_field(const EmpiricalMeasure& mu, const VectorField& u, double t);

EmpiricalMeasure translate(const EmpiricalMeasure& mu, const Vec& c);

/// Finite positive weighted collection of empirical measures (the reference
/// measure on P_2(R^d)). Masses need not sum to 1.
class MetaMeasure {
 public:
  struct Component {
    double mass;
    EmpiricalMeasure measure;
  };

  explicit MetaMeasure(std::vector<Component> components);

  Index size() const { return static_cast<Index>(components_.size()); }
  const Component& component(Index i) const { return components_[static_cast<size_t>(i)]; }
  const std::vector<Component>& components() const { return components_; }

  double total_mass() const { return total_mass_; }

  MetaMeasure normalized() const;

 private:
  std::vector<Component> components_;
  double total_mass_;
};

// integral against the lifted measure: sum_i mass_i sum_j w_ij H(mu_i, x_ij)
double lift_integral(const MetaMeasure& m,
                     const std::function<double(const EmpiricalMeasure&, const Vec&)>& H);

}  // namespace wcalc
