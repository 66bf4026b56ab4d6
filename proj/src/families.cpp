#include "wcalc/families.hpp"

#include <cmath>
#include <utility>

namespace wcalc {

DiracEmbeddingResult dirac_embedding_energy(const OuterFunction& psi, const SmoothFeature& phi,
                                            const Mat& grid, const Vec& masses) {
  require(grid.cols() == masses.size(), "grid/mass size mismatch");
  require(psi.arity == 1, "embedding check uses a single feature");
  CylinderFunction F(psi, {phi});

  double wass = 0.0, eucl = 0.0;
  for (Index i = 0; i < grid.cols(); ++i) {
    const Vec w = grid.col(i);
    const EmpiricalMeasure delta = dirac(w);
    const double gn = F.grad_norm(delta);
    wass += masses[i] * gn * gn;

    // classical chain rule at the point
    Vec s(1);
    s[0] = phi.value(w);
    const Vec euclidean_grad = psi.partials(s)[0] * phi.grad(w);
    eucl += masses[i] * euclidean_grad.squaredNorm();
  }
  return {wass, eucl};
}

TranslationFamily::TranslationFamily(EmpiricalMeasure lambda,
                                     std::vector<std::pair<Vec, double>> omegas_)
    : lambda0(std::move(lambda)), omegas(std::move(omegas_)) {
  require(!omegas.empty(), "translation family needs at least one omega");
  // symmetry about the origin: the atom set is closed under negation with
  // matched weights
  for (Index i = 0; i < lambda0.size(); ++i) {
    const Vec neg = -lambda0.atom(i);
    bool found = false;
    for (Index j = 0; j < lambda0.size(); ++j) {
      if ((lambda0.atom(j) - neg).norm() == 0.0) {
        require(lambda0.weight(j) == lambda0.weight(i),
                "asymmetric weights at atom " + std::to_string(i));
        found = true;
        break;
      }
    }
    require(found, "atom set not closed under negation (atom " + std::to_string(i) + ")");
  }
  for (const auto& [w, mass] : omegas) {
    require(w.size() == lambda0.dim(), "translation dimension mismatch");
    require(mass > 0, "omega mass must be positive");
  }
}

EmpiricalMeasure TranslationFamily::measure_at(Index i) const {
  return translate(lambda0, omegas[static_cast<size_t>(i)].first);
}

MetaMeasure TranslationFamily::meta() const {
  std::vector<MetaMeasure::Component> comps;
  comps.reserve(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i)
    comps.push_back({omegas[i].second, measure_at(static_cast<Index>(i))});
  return MetaMeasure(std::move(comps));
}

std::vector<TranslationRow> translation_family_report(const TranslationFamily& tf,
                                                      const CylinderFunction& F) {
  const Index d = tf.lambda0.dim();
  const MetaMeasure m = tf.meta();

  // constant vector fields = gradients of the coordinate functions
  std::vector<SmoothFeature> span;
  for (Index k = 0; k < d; ++k) span.push_back(features::coordinate(k, d));
  const MDifferential md = m_differential_linear(F, m, span);

  std::vector<TranslationRow> rows;
  rows.reserve(tf.omegas.size());
  for (Index i = 0; i < m.size(); ++i) {
    const EmpiricalMeasure mu_w = m.component(i).measure;
    TranslationRow row;
    row.omega = tf.omegas[static_cast<size_t>(i)].first;
    row.f_hat = F.eval(mu_w);

    // closed form: the lambda-average of DF[mu_w], i.e. the convolution
    // (sum_j d_j psi grad phi_j) * lambda evaluated at omega
    const VectorField df = F.differential_field(mu_w);
    Vec closed = Vec::Zero(d);
    for (Index q = 0; q < mu_w.size(); ++q) closed += mu_w.weight(q) * df.col(q);
    row.dm_closed_form = closed;

    row.dm_projected = md.span_coefficients[static_cast<size_t>(i)];

    double dm2 = 0.0, dfn = 0.0, res2 = 0.0, ortho = 0.0;
    for (Index q = 0; q < mu_w.size(); ++q) {
      dm2 += mu_w.weight(q) * md.projected[static_cast<size_t>(i)].col(q).squaredNorm();
      dfn += mu_w.weight(q) * df.col(q).squaredNorm();
      res2 += mu_w.weight(q) * md.residual[static_cast<size_t>(i)].col(q).squaredNorm();
      ortho += mu_w.weight(q) * md.projected[static_cast<size_t>(i)].col(q).dot(
                                    md.residual[static_cast<size_t>(i)].col(q));
    }
    row.dm_norm_sq = dm2;
    row.df_norm_sq = dfn;
    row.residual_norm_sq = res2;
    row.closed_vs_projected = (closed - row.dm_projected).norm();
    row.orthogonality = std::abs(ortho);
    row.pythagoras_gap = std::abs(dfn - dm2 - res2);

    check(row.closed_vs_projected <= 1e-8, "closed form disagrees with projection");
    check(dm2 <= dfn + 1e-10, "projection norm exceeds differential norm");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GaussianCheckRow> gaussian_family_check(
    const std::vector<std::pair<GaussianMeasure, GaussianMeasure>>& pairs, Index n_samples,
    std::uint64_t seed) {
  std::vector<GaussianCheckRow> rows;
  rows.reserve(pairs.size());
  std::uint64_t stream = 0;
  for (const auto& [g1, g2] : pairs) {
    const double closed = gaussian_w2(g1, g2);
    const bool same = g1.mean == g2.mean && g1.cov == g2.cov;
    const EmpiricalMeasure s1 = sample_gaussian(g1, n_samples, seed, stream++);
    const EmpiricalMeasure s2 =
        same ? s1 : sample_gaussian(g2, n_samples, seed, stream);
    ++stream;
    const double emp = w2(s1, s2);
    const double rel = std::abs(closed - emp) / std::max(closed, 1e-3);
    rows.push_back({closed, emp, rel});
  }
  return rows;
}

}  // namespace wcalc
