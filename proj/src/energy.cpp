#include "wcalc/energy.hpp"

#include <cmath>

namespace wcalc {

double pre_cheeger(const CylinderFunction& F, const MetaMeasure& m, double p) {
  require(p > 1.0 && std::isfinite(p), "exponent must lie in (1, inf)");
  double s = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    const auto& c = m.component(i);
    s += c.mass * std::pow(F.grad_norm(c.measure), p);
  }
  return s;
}

double carre_du_champ(const CylinderFunction& F, const CylinderFunction& G,
                      const EmpiricalMeasure& mu) {
  const VectorField df = F.differential_field(mu), dg = G.differential_field(mu);
  double s = 0.0;
  for (Index i = 0; i < mu.size(); ++i) s += mu.weight(i) * df.col(i).dot(dg.col(i));
  return s;
}

double pre_cheeger_bilinear(const CylinderFunction& F, const CylinderFunction& G,
                            const MetaMeasure& m) {
  double s = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    const auto& c = m.component(i);
    s += c.mass * carre_du_champ(F, G, c.measure);
  }
  return s;
}

double parallelogram_check(const CylinderFunction& F, const CylinderFunction& G,
                           const MetaMeasure& m) {
  const double ef = pre_cheeger(F, m, 2.0);
  const double eg = pre_cheeger(G, m, 2.0);
  const double ep = pre_cheeger(add(F, G), m, 2.0);
  const double em = pre_cheeger(add(F, scale(G, -1.0)), m, 2.0);
  const double defect = std::abs(ep + em - 2.0 * ef - 2.0 * eg);
  check(defect <= 1e-10 * (1.0 + ef + eg), "parallelogram identity violated");
  return defect;
}

CylinderFunction SobolevFit::function() const {
  std::vector<SmoothFeature> feats = dictionary;
  const Index d = coefficients.size();
  require(d == static_cast<Index>(dictionary.size()) + 1, "coefficient/dictionary mismatch");
  return CylinderFunction(outers::linear(coefficients.tail(d - 1), coefficients[0]), feats);
}

SobolevFit sobolev_fit(const std::vector<std::pair<EmpiricalMeasure, double>>& samples,
                       const MetaMeasure& m, const std::vector<SmoothFeature>& dictionary,
                       double lambda) {
  require(!samples.empty(), "no samples");
  require(static_cast<Index>(samples.size()) == m.size(),
          "sample count does not match the components of m");
  require(lambda >= 0.0, "lambda must be nonnegative");
  const Index S = static_cast<Index>(samples.size());
  const Index J = static_cast<Index>(dictionary.size());
  const Index D = J + 1;  // constant + features

  // design matrix A_{i0} = 1, A_{ij} = <phi_j, mu_i>; weights = masses of m
  Mat A(S, D);
  Vec y(S), w(S);
  for (Index i = 0; i < S; ++i) {
    const auto& mu_i = samples[static_cast<size_t>(i)].first;
    // samples must coincide with the components of m (weights come from m)
    require(mu_i.size() == m.component(i).measure.size() &&
                mu_i.atoms() == m.component(i).measure.atoms(),
            "sample measure " + std::to_string(i) + " does not match component of m");
    A(i, 0) = 1.0;
    for (Index j = 0; j < J; ++j)
      A(i, j + 1) = mu_i.integrate(dictionary[static_cast<size_t>(j)].value);
    y[i] = samples[static_cast<size_t>(i)].second;
    w[i] = m.component(i).mass;
  }

  // gradient Gram over the lifted measure; the constant column is unpenalized
  Mat K = Mat::Zero(D, D);
  for (Index i = 0; i < S; ++i) {
    const auto& mu_i = m.component(i).measure;
    for (Index a = 0; a < J; ++a) {
      for (Index b = a; b < J; ++b) {
        double acc = 0.0;
        for (Index q = 0; q < mu_i.size(); ++q)
          acc += mu_i.weight(q) * dictionary[static_cast<size_t>(a)]
                                      .grad(mu_i.atom(q))
                                      .dot(dictionary[static_cast<size_t>(b)].grad(mu_i.atom(q)));
        K(a + 1, b + 1) += w[i] * acc;
        if (a != b) K(b + 1, a + 1) += w[i] * acc;
      }
    }
  }

  const Mat normal = A.transpose() * w.asDiagonal() * A + lambda * K;
  const Vec rhs = A.transpose() * (w.asDiagonal() * y);

  Eigen::FullPivLU<Mat> lu(normal);
  if (!lu.isInvertible()) {
    throw SolverError("singular normal system at lambda = " + std::to_string(lambda) +
                      " (rank " + std::to_string(lu.rank()) + " of " + std::to_string(D) + ")");
  }
  const Vec c = lu.solve(rhs);

  SobolevFit fit;
  fit.dictionary = dictionary;
  fit.coefficients = c;
  fit.lambda = lambda;
  const Vec r = A * c - y;
  fit.misfit = r.dot(w.asDiagonal() * r);
  fit.energy = c.dot(K * c);
  return fit;
}

MDifferential m_differential_linear(const CylinderFunction& F, const MetaMeasure& m,
                                    const std::vector<SmoothFeature>& span) {
  require(!span.empty(), "projection span must be nonempty");
  const Index J = static_cast<Index>(span.size());

  MDifferential md;
  md.projected.reserve(static_cast<size_t>(m.size()));
  md.residual.reserve(static_cast<size_t>(m.size()));

  for (Index i = 0; i < m.size(); ++i) {
    const EmpiricalMeasure& mu = m.component(i).measure;
    const VectorField df = F.differential_field(mu);

    // gradients of the span features on the atoms
    std::vector<VectorField> basis;
    basis.reserve(static_cast<size_t>(J));
    for (Index j = 0; j < J; ++j) {
      VectorField g(mu.dim(), mu.size());
      for (Index q = 0; q < mu.size(); ++q)
        g.col(q) = span[static_cast<size_t>(j)].grad(mu.atom(q));
      basis.push_back(std::move(g));
    }

    Mat gram = Mat::Zero(J, J);
    Vec rhs = Vec::Zero(J);
    for (Index a = 0; a < J; ++a) {
      for (Index q = 0; q < mu.size(); ++q)
        rhs[a] += mu.weight(q) * basis[static_cast<size_t>(a)].col(q).dot(df.col(q));
      for (Index b = a; b < J; ++b) {
        double acc = 0.0;
        for (Index q = 0; q < mu.size(); ++q)
          acc += mu.weight(q) *
                 basis[static_cast<size_t>(a)].col(q).dot(basis[static_cast<size_t>(b)].col(q));
        gram(a, b) = acc;
        gram(b, a) = acc;
      }
    }

    bool ridge = false;
    Eigen::LDLT<Mat> ldlt(gram);
    Vec coef;
    const double scale = std::max(1.0, gram.diagonal().maxCoeff());
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13) {
      ridge = true;
      coef = Eigen::LDLT<Mat>(gram + 1e-12 * scale * Mat::Identity(J, J)).solve(rhs);
    } else {
      coef = ldlt.solve(rhs);
      if (!coef.allFinite()) {
        ridge = true;
        coef = Eigen::LDLT<Mat>(gram + 1e-12 * scale * Mat::Identity(J, J)).solve(rhs);
      }
    }

    VectorField proj = VectorField::Zero(mu.dim(), mu.size());
    for (Index j = 0; j < J; ++j) proj += coef[j] * basis[static_cast<size_t>(j)];

    md.projected.push_back(proj);
    md.residual.push_back(df - proj);
    md.span_coefficients.push_back(coef);
    md.ridge_used.push_back(ridge);
  }
  return md;
}

double residual_orthogonality_report(const MDifferential& md, const MetaMeasure& m) {
  require(static_cast<Index>(md.projected.size()) == m.size(), "component count mismatch");
  double worst = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    const EmpiricalMeasure& mu = m.component(i).measure;
    double inner = 0.0;
    for (Index q = 0; q < mu.size(); ++q)
      inner += mu.weight(q) *
               md.projected[static_cast<size_t>(i)].col(q).dot(md.residual[static_cast<size_t>(i)].col(q));
    worst = std::max(worst, std::abs(inner));
  }
  return worst;
}

}  // namespace wcalc
