#include "wcalc/cylinder.hpp"

#include "wcalc/rng.hpp"
#include "wcalc/transport.hpp"

#include <cmath>
#include <utility>

namespace wcalc {

CylinderFunction::CylinderFunction(OuterFunction outer, std::vector<SmoothFeature> features)
    : outer_(std::move(outer)), features_(std::move(features)) {
  require(!features_.empty(), "cylinder function needs at least one feature");
  require(outer_.arity == static_cast<Index>(features_.size()),
          "outer arity " + std::to_string(outer_.arity) + " does not match feature count " +
              std::to_string(features_.size()));
}

Vec CylinderFunction::feature_averages(const EmpiricalMeasure& mu) const {
  Vec L(arity());
  for (Index k = 0; k < arity(); ++k)
    L[k] = mu.integrate(features_[static_cast<size_t>(k)].value);
  return L;
}

double CylinderFunction::eval(const EmpiricalMeasure& mu) const {
  const double v = outer_.value(feature_averages(mu));
  require(std::isfinite(v), "non-finite cylinder value");
  return v;
}

Vec CylinderFunction::differential(const EmpiricalMeasure& mu, const Vec& x) const {
  require(x.allFinite(), "non-finite evaluation point");
  const Vec dpsi = outer_.partials(feature_averages(mu));
  Vec out = Vec::Zero(mu.dim());
  for (Index k = 0; k < arity(); ++k)
    out += dpsi[k] * features_[static_cast<size_t>(k)].grad(x);
  return out;
}

VectorField CylinderFunction::differential_field(const EmpiricalMeasure& mu) const {
  const Vec dpsi = outer_.partials(feature_averages(mu));
  VectorField out = VectorField::Zero(mu.dim(), mu.size());
  for (Index k = 0; k < arity(); ++k) {
    const auto& g = features_[static_cast<size_t>(k)].grad;
    for (Index i = 0; i < mu.size(); ++i) out.col(i) += dpsi[k] * g(mu.atom(i));
  }
  return out;
}

double CylinderFunction::grad_norm(const EmpiricalMeasure& mu) const {
  const VectorField df = differential_field(mu);
  double s = 0.0;
  for (Index i = 0; i < mu.size(); ++i) s += mu.weight(i) * df.col(i).squaredNorm();
  return std::sqrt(s);
}

double directional_derivative(const CylinderFunction& F, const EmpiricalMeasure& mu,
                              const VectorField& u) {
  require(u.rows() == mu.dim() && u.cols() == mu.size(), "field/atom mismatch");
  const VectorField df = F.differential_field(mu);
  double s = 0.0;
  for (Index i = 0; i < mu.size(); ++i) s += mu.weight(i) * df.col(i).dot(u.col(i));
  return s;
}

double lip_lower_estimate(const CylinderFunction& F, const EmpiricalMeasure& mu, double eps) {
  require(eps > 0, "eps must be positive");
  const VectorField T = F.differential_field(mu);
  if (T.norm() == 0.0) return 0.0;
  const EmpiricalMeasure pushed = translate_by_field(mu, T, eps);
  const double dist = w2(pushed, mu);
  if (dist == 0.0) return 0.0;
  return std::abs(F.eval(pushed) - F.eval(mu)) / dist;
}

double representation_invariance_check(const CylinderFunction& F, const CylinderFunction& G,
                                       const EmpiricalMeasure& mu,
                                       const std::vector<EmpiricalMeasure>& probes) {
  for (size_t p = 0; p < probes.size(); ++p) {
    const double a = F.eval(probes[p]), b = G.eval(probes[p]);
    require(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)),
            "representations disagree on probe " + std::to_string(p));
  }
  return std::abs(F.grad_norm(mu) - G.grad_norm(mu));
}

namespace {

std::vector<SmoothFeature> concat(const std::vector<SmoothFeature>& a,
                                  const std::vector<SmoothFeature>& b) {
  std::vector<SmoothFeature> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

CylinderFunction add(const CylinderFunction& F, const CylinderFunction& G) {
  const Index nf = F.arity(), ng = G.arity();
  OuterFunction pf = F.outer(), pg = G.outer();
  OuterFunction out{
      "(" + pf.name + "+" + pg.name + ")", nf + ng,
      [pf, pg, nf, ng](const Vec& s) { return pf.value(s.head(nf)) + pg.value(s.tail(ng)); },
      [pf, pg, nf, ng](const Vec& s) {
        Vec d(nf + ng);
        d.head(nf) = pf.partials(s.head(nf));
        d.tail(ng) = pg.partials(s.tail(ng));
        return d;
      }};
  return CylinderFunction(std::move(out), concat(F.features(), G.features()));
}

CylinderFunction scale(const CylinderFunction& F, double alpha) {
  OuterFunction p = F.outer();
  OuterFunction out{std::to_string(alpha) + "*" + p.name, p.arity,
                    [p, alpha](const Vec& s) { return alpha * p.value(s); },
                    [p, alpha](const Vec& s) { return Vec(alpha * p.partials(s)); }};
  return CylinderFunction(std::move(out), F.features());
}

CylinderFunction multiply(const CylinderFunction& F, const CylinderFunction& G) {
  const Index nf = F.arity(), ng = G.arity();
  OuterFunction pf = F.outer(), pg = G.outer();
  OuterFunction out{
      "(" + pf.name + "*" + pg.name + ")", nf + ng,
      [pf, pg, nf, ng](const Vec& s) { return pf.value(s.head(nf)) * pg.value(s.tail(ng)); },
      [pf, pg, nf, ng](const Vec& s) {
        const double a = pf.value(s.head(nf)), b = pg.value(s.tail(ng));
        Vec d(nf + ng);
        d.head(nf) = b * pf.partials(s.head(nf));
        d.tail(ng) = a * pg.partials(s.tail(ng));
        return d;
      }};
  return CylinderFunction(std::move(out), concat(F.features(), G.features()));
}

CylinderFunction compose(const CylinderFunction& F, const std::function<double(double)>& eta,
                         const std::function<double(double)>& eta_prime,
                         const std::string& name) {
  OuterFunction p = F.outer();
  OuterFunction out{name + "o" + p.name, p.arity,
                    [p, eta](const Vec& s) { return eta(p.value(s)); },
                    [p, eta_prime](const Vec& s) {
                      return Vec(eta_prime(p.value(s)) * p.partials(s));
                    }};
  return CylinderFunction(std::move(out), F.features());
}

namespace features {

SmoothFeature gaussian_bump(const Vec& center, double width) {
  require(width > 0, "bump width must be positive");
  const Vec c = center;
  const double inv2 = 1.0 / (width * width);
  return SmoothFeature{
      "gauss", [c, inv2](const Vec& x) { return std::exp(-(x - c).squaredNorm() * inv2); },
      [c, inv2](const Vec& x) {
        return Vec(-2.0 * inv2 * std::exp(-(x - c).squaredNorm() * inv2) * (x - c));
      }};
}

SmoothFeature coord_bump(Index k, const Vec& center, double width) {
  require(width > 0, "bump width must be positive");
  require(k >= 0 && k < center.size(), "coordinate index out of range");
  const Vec c = center;
  const double inv2 = 1.0 / (width * width);
  return SmoothFeature{"coord_bump",
                       [c, inv2, k](const Vec& x) {
                         return x[k] * std::exp(-(x - c).squaredNorm() * inv2);
                       },
                       [c, inv2, k](const Vec& x) {
                         const double e = std::exp(-(x - c).squaredNorm() * inv2);
                         Vec g = -2.0 * inv2 * e * x[k] * (x - c);
                         g[k] += e;
                         return g;
                       }};
}

SmoothFeature monomial(const std::vector<int>& exponents) {
  for (int e : exponents) require(e >= 0, "monomial exponents must be nonnegative");
  const std::vector<int> ex = exponents;
  auto value = [ex](const Vec& x) {
    require(x.size() == static_cast<Index>(ex.size()), "monomial dimension mismatch");
    double v = 1.0;
    for (size_t i = 0; i < ex.size(); ++i) v *= std::pow(x[static_cast<Index>(i)], ex[i]);
    return v;
  };
  auto grad = [ex](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    for (size_t i = 0; i < ex.size(); ++i) {
      if (ex[i] == 0) continue;
      double v = ex[i] * std::pow(x[static_cast<Index>(i)], ex[i] - 1);
      for (size_t jj = 0; jj < ex.size(); ++jj)
        if (jj != i) v *= std::pow(x[static_cast<Index>(jj)], ex[jj]);
      g[static_cast<Index>(i)] = v;
    }
    return g;
  };
  return SmoothFeature{"monomial", value, grad};
}

SmoothFeature coordinate(Index k, Index dim) {
  require(k >= 0 && k < dim, "coordinate index out of range");
  return SmoothFeature{"x" + std::to_string(k), [k](const Vec& x) { return x[k]; },
                       [k, dim](const Vec&) {
                         Vec g = Vec::Zero(dim);
                         g[k] = 1.0;
                         return g;
                       }};
}

}  // namespace features

namespace outers {

OuterFunction constant(double c, Index arity) {
  return OuterFunction{"const", arity, [c](const Vec&) { return c; },
                       [arity](const Vec&) { return Vec(Vec::Zero(arity)); }};
}

OuterFunction linear(const Vec& coeffs, double intercept) {
  const Vec c = coeffs;
  return OuterFunction{"linear", c.size(),
                       [c, intercept](const Vec& s) { return c.dot(s) + intercept; },
                       [c](const Vec&) { return c; }};
}

OuterFunction square() {
  return OuterFunction{"square", 1, [](const Vec& s) { return s[0] * s[0]; },
                       [](const Vec& s) {
                         Vec d(1);
                         d[0] = 2.0 * s[0];
                         return d;
                       }};
}

OuterFunction power(int k) {
  require(k >= 1, "power must be >= 1");
  return OuterFunction{"pow" + std::to_string(k), 1,
                       [k](const Vec& s) { return std::pow(s[0], k); },
                       [k](const Vec& s) {
                         Vec d(1);
                         d[0] = k * std::pow(s[0], k - 1);
                         return d;
                       }};
}

OuterFunction tanh_outer() {
  return OuterFunction{"tanh", 1, [](const Vec& s) { return std::tanh(s[0]); },
                       [](const Vec& s) {
                         Vec d(1);
                         const double t = std::tanh(s[0]);
                         d[0] = 1.0 - t * t;
                         return d;
                       }};
}

OuterFunction product(Index arity) {
  require(arity >= 1, "product arity must be >= 1");
  return OuterFunction{"prod", arity,
                       [](const Vec& s) { return s.prod(); },
                       [](const Vec& s) {
                         Vec d(s.size());
                         for (Index k = 0; k < s.size(); ++k) {
                           double v = 1.0;
                           for (Index j = 0; j < s.size(); ++j)
                             if (j != k) v *= s[j];
                           d[k] = v;
                         }
                         return d;
                       }};
}

}  // namespace outers

CylinderFunction linear_functional(const SmoothFeature& phi) {
  return CylinderFunction(outers::linear(Vec::Ones(1)), {phi});
}

double feature_gradient_consistency(const SmoothFeature& phi, Index dim, std::uint64_t seed,
                                    int n_probes, double step, double box) {
  Rng rng(seed, 17);
  double worst = 0.0;
  for (int p = 0; p < n_probes; ++p) {
    const Vec x = rng.uniform_vec(dim, -box, box);
    const Vec g = phi.grad(x);
    for (Index k = 0; k < dim; ++k) {
      Vec xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      const double fd = (phi.value(xp) - phi.value(xm)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - g[k]) / (1.0 + std::abs(g[k])));
    }
  }
  return worst;
}

double outer_partials_consistency(const OuterFunction& psi, std::uint64_t seed, int n_probes,
                                  double step, double box) {
  Rng rng(seed, 23);
  double worst = 0.0;
  for (int p = 0; p < n_probes; ++p) {
    const Vec s = rng.uniform_vec(psi.arity, -box, box);
    const Vec d = psi.partials(s);
    for (Index k = 0; k < psi.arity; ++k) {
      Vec sp = s, sm = s;
      sp[k] += step;
      sm[k] -= step;
      const double fd = (psi.value(sp) - psi.value(sm)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - d[k]) / (1.0 + std::abs(d[k])));
    }
  }
  return worst;
}

}  // namespace wcalc
