#pragma once

#include "wcalc/cylinder.hpp"
#include "wcalc/measure.hpp"
#include "wcalc/types.hpp"

#include <utility>
#include <vector>

namespace wcalc {

// sum_i mass_i grad_norm(F, mu_i)^p
double pre_cheeger(const CylinderFunction& F, const MetaMeasure& m, double p);

// int <DF, DG> over the lifted measure; symmetric, diagonal equals pre_cheeger(.,.,2)
double pre_cheeger_bilinear(const CylinderFunction& F, const CylinderFunction& G,
                            const MetaMeasure& m);

// Gamma(F,G)[mu] = int <DF(mu,.), DG(mu,.)> dmu
double carre_du_champ(const CylinderFunction& F, const CylinderFunction& G,
                      const EmpiricalMeasure& mu);

// |pCE2(F+G) + pCE2(F-G) - 2 pCE2(F) - 2 pCE2(G)|
double parallelogram_check(const CylinderFunction& F, const CylinderFunction& G,
                           const MetaMeasure& m);

struct SobolevFit {
  std::vector<SmoothFeature> dictionary;  // without the constant
  Vec coefficients;                       // c_0 (constant) then one per feature
  double lambda = 0.0;
  double misfit = 0.0;  // sum_i mass_i (F_c(mu_i) - y_i)^2
  double energy = 0.0;  // pCE_2 of the fitted function

  CylinderFunction function() const;
};

// Penalized least squares over F_c = c_0 + sum_j c_j <phi_j, .>, sample i
// weighted by the mass of the i-th component of m.
SobolevFit sobolev_fit(const std::vector<std::pair<EmpiricalMeasure, double>>& samples,
                       const MetaMeasure& m, const std::vector<SmoothFeature>& dictionary,
                       double lambda);

struct MDifferential {
  // per component of m: projection of DF[mu_i] onto span{grad phi_j} in
  // L^2(mu_i), and what is left over
  std::vector<VectorField> projected;
  std::vector<VectorField> residual;
  std::vector<Vec> span_coefficients;  // h_j(mu_i)
  std::vector<bool> ridge_used;        // degenerate Gram regularized at 1e-12
};

// m-Wasserstein differential of F relative to the structured span: the
// per-component L^2(mu_i)-orthogonal projection of DF[mu_i].
MDifferential m_differential_linear(const CylinderFunction& F, const MetaMeasure& m,
                                    const std::vector<SmoothFeature>& span);

// max over components of |int <projected, residual> dmu_i|
double residual_orthogonality_report(const MDifferential& md, const MetaMeasure& m);

}  // namespace wcalc
