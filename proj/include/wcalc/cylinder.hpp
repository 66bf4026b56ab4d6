#pragma once

#include "wcalc/measure.hpp"
#include "wcalc/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wcalc {

/// C^1 scalar feature on R^d with its gradient in closed form.
struct SmoothFeature {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

/// C^1 outer function on R^N with its partial derivatives.
struct OuterFunction {
  std::string name;
  Index arity;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> partials;
};

/// F(mu) = psi(<phi_1, mu>, ..., <phi_N, mu>).
class CylinderFunction {
 public:
  CylinderFunction(OuterFunction outer, std::vector<SmoothFeature> features);

  Index arity() const { return static_cast<Index>(features_.size()); }
  const OuterFunction& outer() const { return outer_; }
  const std::vector<SmoothFeature>& features() const { return features_; }

  Vec feature_averages(const EmpiricalMeasure& mu) const;

  double eval(const EmpiricalMeasure& mu) const;

  // Wasserstein differential DF(mu, x) = sum_n d_n psi(L(mu)) grad phi_n(x)
  Vec differential(const EmpiricalMeasure& mu, const Vec& x) const;

  // DF[mu] sampled on the atoms, one column per atom
  VectorField differential_field(const EmpiricalMeasure& mu) const;

  // ||DF[mu]||_{L^2(mu)}, the asymptotic Lipschitz constant at mu
  double grad_norm(const EmpiricalMeasure& mu) const;

 private:
  OuterFunction outer_;
  std::vector<SmoothFeature> features_;
};

// int <DF(mu,.), u> dmu for a field on the atoms of mu
double directional_derivative(const CylinderFunction& F, const EmpiricalMeasure& mu,
                              const VectorField& u);

// |F((i+eps T)#mu) - F(mu)| / W_2((i+eps T)#mu, mu) with T = DF[mu]; the
// lower estimator for lip F, converging to grad_norm as eps -> 0.
double lip_lower_estimate(const CylinderFunction& F, const EmpiricalMeasure& mu, double eps);

// |grad_norm(F) - grad_norm(G)| after checking F == G on the probe measures.
double representation_invariance_check(const CylinderFunction& F, const CylinderFunction& G,
                                       const EmpiricalMeasure& mu,
                                       const std::vector<EmpiricalMeasure>& probes);

// algebra: all results are again cylinder functions with closed-form partials
CylinderFunction add(const CylinderFunction& F, const CylinderFunction& G);
CylinderFunction scale(const CylinderFunction& F, double alpha);
CylinderFunction multiply(const CylinderFunction& F, const CylinderFunction& G);
CylinderFunction compose(const CylinderFunction& F, const std::function<double(double)>& eta,
                         const std::function<double(double)>& eta_prime,
                         const std::string& name = "eta");

namespace features {

// exp(-|x - c|^2 / width^2)
SmoothFeature gaussian_bump(const Vec& center, double width);
// x_k * exp(-|x - c|^2 / width^2)
SmoothFeature coord_bump(Index k, const Vec& center, double width);
// prod_i x_i^{e_i}; unbounded, intended for compactly supported test measures
SmoothFeature monomial(const std::vector<int>& exponents);
SmoothFeature coordinate(Index k, Index dim);

}  // namespace features

namespace outers {

OuterFunction constant(double c, Index arity);
OuterFunction linear(const Vec& coeffs, double intercept = 0.0);
OuterFunction square();            // s -> s^2, arity 1
OuterFunction power(int k);        // s -> s^k, arity 1
OuterFunction tanh_outer();        // s -> tanh(s), arity 1
OuterFunction product(Index arity);  // (s_1,...,s_N) -> prod s_i

}  // namespace outers

// F = <phi, .> as a cylinder function with identity outer
CylinderFunction linear_functional(const SmoothFeature& phi);

// self-consistency probe: max relative mismatch between the declared gradient
// and central differences of the value at random points
double feature_gradient_consistency(const SmoothFeature& phi, Index dim, std::uint64_t seed,
                                    int n_probes = 32, double step = 1e-5, double box = 2.0);
double outer_partials_consistency(const OuterFunction& psi, std::uint64_t seed, int n_probes = 32,
                                  double step = 1e-5, double box = 1.0);

}  // namespace wcalc
