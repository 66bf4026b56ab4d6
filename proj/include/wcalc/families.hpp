#pragma once

#include "wcalc/cylinder.hpp"
#include "wcalc/energy.hpp"
#include "wcalc/measure.hpp"
#include "wcalc/transport.hpp"
#include "wcalc/types.hpp"

#include <utility>
#include <vector>

namespace wcalc {

struct DiracEmbeddingResult {
  double wasserstein_energy;  // pre-Cheeger of psi o <phi> over sum mass delta_{delta_w}
  double euclidean_energy;    // sum mass |grad(psi o phi)(w)|^2
};

// The Dirac embedding is an isometry, so both energies agree to rounding.
DiracEmbeddingResult dirac_embedding_energy(const OuterFunction& psi, const SmoothFeature& phi,
                                            const Mat& grid, const Vec& masses);

/// Family mu_w = lambda(. - w) for a reference measure symmetric about 0.
struct TranslationFamily {
  EmpiricalMeasure lambda0;
  std::vector<std::pair<Vec, double>> omegas;  // translation, mass

  TranslationFamily(EmpiricalMeasure lambda, std::vector<std::pair<Vec, double>> omegas_);

  EmpiricalMeasure measure_at(Index i) const;
  MetaMeasure meta() const;
};

struct TranslationRow {
  Vec omega;
  double f_hat;              // F(lambda(. - w))
  Vec dm_closed_form;        // sum_j d_j psi (grad phi_j * lambda)(w)
  Vec dm_projected;          // constant-span projection coefficient
  double dm_norm_sq;
  double df_norm_sq;         // int |DF|^2 dmu_w
  double residual_norm_sq;
  double closed_vs_projected;  // |closed form - projection|
  double orthogonality;        // |int <proj, residual> dmu_w|
  double pythagoras_gap;       // |df_norm_sq - dm_norm_sq - residual_norm_sq|
};

std::vector<TranslationRow> translation_family_report(const TranslationFamily& tf,
                                                      const CylinderFunction& F);

struct GaussianCheckRow {
  double closed_form;
  double empirical;
  double relative_error;  // |closed - empirical| / max(closed, small)
};

std::vector<GaussianCheckRow> gaussian_family_check(
    const std::vector<std::pair<GaussianMeasure, GaussianMeasure>>& pairs, Index n_samples,
    std::uint64_t seed);

}  // namespace wcalc
