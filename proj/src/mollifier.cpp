#include "wcalc/mollifier.hpp"

#include "wcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wcalc {

namespace {

int default_nodes_per_axis(Index d) {
  switch (d) {
    case 1:
      return 33;
    case 2:
      return 13;
    default:
      return 7;
  }
}

// Kronecker lattice in the unit cube based on the generalized golden ratio,
// filtered to the unit ball.
Mat ball_lattice(Index d, int n) {
  double phi = 1.5;
  for (int it = 0; it < 64; ++it)
    phi = std::pow(1.0 + phi, 1.0 / (static_cast<double>(d) + 1.0));
  Vec alpha(d);
  for (Index j = 0; j < d; ++j) alpha[j] = std::pow(1.0 / phi, static_cast<double>(j + 1));

  Mat pts(d, n);
  int got = 0;
  long k = 1;
  while (got < n) {
    Vec u(d);
    for (Index j = 0; j < d; ++j) {
      const double v = static_cast<double>(k) * alpha[j];
      u[j] = 2.0 * (v - std::floor(v)) - 1.0;
    }
    if (u.norm() <= 1.0) pts.col(got++) = u;
    ++k;
  }
  return pts;
}

}  // namespace

MollifierFamily::MollifierFamily(Mat nodes, Vec weights, double eps, double c_eps,
                                 double kernel_moment, int nodes_per_axis, int hat_uniform)
    : nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      eps_(eps),
      c_eps_(c_eps),
      kernel_moment_(kernel_moment),
      nodes_per_axis_(nodes_per_axis),
      hat_uniform_(hat_uniform) {}

double MollifierFamily::kernel(const Vec& z) const {
  const double r2 = z.squaredNorm();
  if (r2 >= 1.0) return 0.0;
  const double d = static_cast<double>(dim());
  // (1-|z|^2)^3 normalized to unit integral on the ball
  const double norm_const = std::tgamma(0.5 * d + 4.0) / (6.0 * std::pow(3.14159265358979323846, 0.5 * d));
  const double t = 1.0 - r2;
  return norm_const * t * t * t;
}

MollifierFamily MollifierFamily::make(Index dim, double eps, int nodes_per_axis,
                                      int hat_uniform) {
  require(dim >= 1 && dim <= 3, "mollifier quadrature supports d <= 3");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
  if (nodes_per_axis <= 0) nodes_per_axis = default_nodes_per_axis(dim);
  require(hat_uniform >= 1, "need at least one uniform node");

  auto [gx, gw] = gauss_legendre(nodes_per_axis);

  // tensor grid restricted to the open unit ball, weighted by the kernel
  std::vector<Vec> keep;
  std::vector<double> wraw;
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  const double d = static_cast<double>(dim);
  const double norm_const =
      std::tgamma(0.5 * d + 4.0) / (6.0 * std::pow(3.14159265358979323846, 0.5 * d));
  while (true) {
    Vec z(dim);
    double w = 1.0;
    for (Index j = 0; j < dim; ++j) {
      z[j] = gx[idx[static_cast<size_t>(j)]];
      w *= gw[idx[static_cast<size_t>(j)]];
    }
    const double r2 = z.squaredNorm();
    if (r2 < 1.0) {
      const double t = 1.0 - r2;
      keep.push_back(z);
      wraw.push_back(w * norm_const * t * t * t);
    }
    Index j = 0;
    for (; j < dim; ++j) {
      if (++idx[static_cast<size_t>(j)] < nodes_per_axis) break;
      idx[static_cast<size_t>(j)] = 0;
    }
    if (j == dim) break;
  }

  Mat nodes(dim, static_cast<Index>(keep.size()));
  Vec weights(static_cast<Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    nodes.col(static_cast<Index>(k)) = keep[k];
    weights[static_cast<Index>(k)] = wraw[k];
  }
  weights /= weights.sum();

  // C_eps is the second moment of the scheme itself, so moment identities of
  // mollified measures hold to rounding; it matches eps^2 d/(d+8) up to
  // quadrature error.
  double moment = 0.0;
  for (Index k = 0; k < nodes.cols(); ++k) moment += weights[k] * nodes.col(k).squaredNorm();

  return MollifierFamily(std::move(nodes), std::move(weights), eps, eps * eps * moment, moment,
                         nodes_per_axis, hat_uniform);
}

MollifierFamily MollifierFamily::refined() const {
  return make(dim(), eps_, 2 * nodes_per_axis_ + 1, hat_uniform_);
}

EmpiricalMeasure mollify(const EmpiricalMeasure& mu, const MollifierFamily& fam) {
  require(mu.dim() == fam.dim(), "dimension mismatch");
  const Index K = fam.nodes().cols();
  Mat atoms(mu.dim(), mu.size() * K);
  Vec w(mu.size() * K);
  for (Index i = 0; i < mu.size(); ++i) {
    for (Index k = 0; k < K; ++k) {
      atoms.col(i * K + k) = mu.atom(i) + fam.eps() * fam.nodes().col(k);
      w[i * K + k] = mu.weight(i) * fam.node_weights()[k];
    }
  }
  return EmpiricalMeasure(std::move(atoms), std::move(w));
}

EmpiricalMeasure hat_measure(const EmpiricalMeasure& nu, const MollifierFamily& fam,
                             int n_uniform) {
  require(n_uniform >= 1, "need at least one uniform node");
  const double radius = 1.0 / fam.eps();
  const EmpiricalMeasure nu_eps = mollify(nu, fam);

  std::vector<Index> inside;
  for (Index i = 0; i < nu_eps.size(); ++i)
    if (nu_eps.atom(i).norm() <= radius) inside.push_back(i);
  if (inside.empty())
    throw InputError("hat measure: all mollified mass lies outside B(0," +
                     std::to_string(radius) + ")");

  const double d = static_cast<double>(fam.dim());
  const double extra_mass =
      std::pow(fam.eps(), d + 3.0) * unit_ball_volume(fam.dim()) * std::pow(radius, d);

  const Mat lattice = ball_lattice(fam.dim(), n_uniform);
  Mat atoms(fam.dim(), static_cast<Index>(inside.size()) + n_uniform);
  Vec w(static_cast<Index>(inside.size()) + n_uniform);
  for (size_t k = 0; k < inside.size(); ++k) {
    atoms.col(static_cast<Index>(k)) = nu_eps.atom(inside[k]);
    w[static_cast<Index>(k)] = nu_eps.weight(inside[k]);
  }
  for (int k = 0; k < n_uniform; ++k) {
    atoms.col(static_cast<Index>(inside.size()) + k) = radius * lattice.col(k);
    w[static_cast<Index>(inside.size()) + k] = extra_mass / static_cast<double>(n_uniform);
  }
  return EmpiricalMeasure(std::move(atoms), std::move(w));  // constructor renormalizes
}

std::pair<double, double> contraction_check(const EmpiricalMeasure& sigma,
                                            const EmpiricalMeasure& sigma_prime,
                                            const MollifierFamily& fam, double slack) {
  const double lhs = w2(mollify(sigma, fam), mollify(sigma_prime, fam));
  const double rhs = w2(sigma, sigma_prime);
  check(lhs <= rhs + slack, "mollification contraction violated: " + std::to_string(lhs) +
                                " > " + std::to_string(rhs));
  return {lhs, rhs};
}

double f_nu_eps(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                const MollifierFamily& fam) {
  const double c = w2(mollify(mu, fam), hat_measure(nu, fam, fam.hat_uniform_nodes()));
  return 0.5 * c * c;
}

PotentialDictionary::PotentialDictionary(EmpiricalMeasure nu_hat, MollifierFamily fam,
                                         std::vector<Entry> entries)
    : nu_hat_(std::move(nu_hat)), fam_(std::move(fam)), entries_(std::move(entries)) {
  require(!entries_.empty(), "dictionary must be nonempty");
}

double PotentialDictionary::u_h(Index h, const Vec& x) const {
  const Entry& e = entries_[static_cast<size_t>(h)];
  return 0.5 * x.squaredNorm() - e.pair.phi_star(x) + e.a_h;
}

double PotentialDictionary::integral_u(Index h, const EmpiricalMeasure& mu_eps) const {
  const Entry& e = entries_[static_cast<size_t>(h)];
  double s = 0.0;
  for (Index i = 0; i < mu_eps.size(); ++i) {
    const Vec x = mu_eps.atom(i);
    s += mu_eps.weight(i) * (0.5 * x.squaredNorm() - e.pair.phi_star(x));
  }
  return s + e.a_h;
}

PotentialDictionary build_dictionary(const EmpiricalMeasure& nu, const MollifierFamily& fam,
                                     const std::vector<EmpiricalMeasure>& dict_measures) {
  require(!dict_measures.empty(), "dictionary list is empty");
  const double radius = 1.0 / fam.eps();
  EmpiricalMeasure nu_hat = hat_measure(nu, fam, fam.hat_uniform_nodes());

  std::vector<PotentialDictionary::Entry> entries;
  entries.reserve(dict_measures.size());
  for (const auto& mu_h : dict_measures) {
    EmpiricalMeasure mu_h_eps = mollify(mu_h, fam);
    PotentialPair pair = kantorovich_potentials(nu_hat, mu_h_eps, radius);
    double a_h = 0.0;
    for (Index g = 0; g < nu_hat.size(); ++g)
      a_h += nu_hat.weight(g) *
             (0.5 * nu_hat.atom(g).squaredNorm() - pair.phi_values()[g]);
    entries.push_back({mu_h, std::move(mu_h_eps), std::move(pair), a_h});
  }
  return PotentialDictionary(std::move(nu_hat), fam, std::move(entries));
}

double g_eps_k(const PotentialDictionary& dict, const EmpiricalMeasure& mu, Index k) {
  require(k >= 1 && k <= dict.size(), "k out of dictionary range");
  const EmpiricalMeasure mu_eps = mollify(mu, dict.family());
  double best = -std::numeric_limits<double>::infinity();
  for (Index h = 0; h < k; ++h) best = std::max(best, dict.integral_u(h, mu_eps));
  return best;
}

std::pair<double, double> g_lipschitz_check(const PotentialDictionary& dict,
                                            const EmpiricalMeasure& mu,
                                            const EmpiricalMeasure& mu_prime, Index k,
                                            double slack) {
  const double lhs = std::abs(g_eps_k(dict, mu, k) - g_eps_k(dict, mu_prime, k));
  const double eps = dict.family().eps();
  const double rhs = (std::sqrt(mu.second_moment()) + std::sqrt(mu_prime.second_moment()) +
                      1.0 / eps + dict.family().c_eps()) *
                     w2(mu, mu_prime);
  check(lhs <= rhs + slack, "dictionary Lipschitz bound violated");
  return {lhs, rhs};
}

std::pair<double, double> gradient_bound_check(const PotentialDictionary& dict,
                                               const EmpiricalMeasure& mu, Index h) {
  require(h >= 0 && h < dict.size(), "h out of dictionary range");
  const auto& fam = dict.family();
  const auto& pair = dict.entry(h).pair;

  double lhs = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = mu.atom(i);
    Vec conv_grad = Vec::Zero(mu.dim());
    for (Index k = 0; k < fam.nodes().cols(); ++k)
      conv_grad += fam.node_weights()[k] *
                   pair.phi_star_gradient(x - fam.eps() * fam.nodes().col(k));
    lhs += mu.weight(i) * (x - conv_grad).squaredNorm();
  }

  const double c = w2(mollify(mu, fam), dict.nu_hat());
  return {lhs, c * c};
}

TruncationMap arctan_truncation() {
  return TruncationMap{
      "arctan",
      [](double s) { return s > 0.0 ? std::atan(0.5 * s * s) : 0.0; },
      [](double s) { return s > 0.0 ? s / (1.0 + 0.25 * s * s * s * s) : 0.0; },
      0.0, std::numeric_limits<double>::infinity()};
}

TruncationMap identity_truncation(double lo, double hi) {
  require(lo < hi, "empty interval");
  return TruncationMap{"identity", [](double s) { return s; }, [](double) { return 1.0; }, lo,
                       hi};
}

std::pair<Vec, Vec> truncation_compose(const TruncationMap& zeta, const Vec& F_values,
                                       const Vec& G_values) {
  require(F_values.size() == G_values.size(), "value vector size mismatch");
  Vec composed(F_values.size()), bound(F_values.size());
  for (Index i = 0; i < F_values.size(); ++i) {
    composed[i] = zeta.zeta(F_values[i]);
    bound[i] = zeta.derivative(F_values[i]) * G_values[i];
  }
  return {composed, bound};
}

}  // namespace wcalc
