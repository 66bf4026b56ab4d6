#pragma once

#include "wcalc/measure.hpp"
#include "wcalc/transport.hpp"
#include "wcalc/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace wcalc {

/// Radially symmetric mollifier (1-|x|^2)^3 on the unit ball together with a
/// deterministic quadrature for convolution: node offsets closed under
/// negation, weights summing to 1.
class MollifierFamily {
 public:
  // nodes_per_axis controls the tensor Gauss-Legendre rule mapped to the
  // ball (d <= 3); hat_uniform is the lattice size of the uniform part of
  // hat measures.
  static MollifierFamily make(Index dim, double eps, int nodes_per_axis = 0,
                              int hat_uniform = 64);

  Index dim() const { return nodes_.rows(); }
  double eps() const { return eps_; }
  const Mat& nodes() const { return nodes_; }          // offsets in the unit ball
  const Vec& node_weights() const { return weights_; }  // sum to 1
  double c_eps() const { return c_eps_; }              // eps^2 * kernel second moment
  double kernel_moment() const { return kernel_moment_; }
  int hat_uniform_nodes() const { return hat_uniform_; }

  double kernel(const Vec& z) const;  // normalized profile

  MollifierFamily refined() const;  // doubled nodes per axis, for convergence studies

 private:
  MollifierFamily(Mat nodes, Vec weights, double eps, double c_eps, double kernel_moment,
                  int nodes_per_axis, int hat_uniform);

  Mat nodes_;
  Vec weights_;
  double eps_, c_eps_, kernel_moment_;
  int nodes_per_axis_, hat_uniform_;
};

// quadrature surrogate of mu * kappa_eps: every atom is replaced by the
// scaled node cloud; the mean is preserved exactly by symmetry
EmpiricalMeasure mollify(const EmpiricalMeasure& mu, const MollifierFamily& fam);

// mollifies, truncates to the closed ball B(0,1/eps), mixes in the uniform
// lattice with total extra mass eps^{d+3} Leb(B(0,1/eps)), renormalizes
EmpiricalMeasure hat_measure(const EmpiricalMeasure& nu, const MollifierFamily& fam,
                             int n_uniform);

// lhs = W_2(mollify sigma, mollify sigma'), rhs = W_2(sigma, sigma')
std::pair<double, double> contraction_check(const EmpiricalMeasure& sigma,
                                            const EmpiricalMeasure& sigma_prime,
                                            const MollifierFamily& fam, double slack = 1e-3);

// F^eps_nu(mu) = 1/2 W_2^2(mollify mu, hat nu)
double f_nu_eps(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                const MollifierFamily& fam);

/// Dictionary of potentials u_{eps,h}(x) = |x|^2/2 - phi*_h(x) + a_h built
/// from normalized pairs between the hat measure of nu and mollified
/// dictionary measures.
class PotentialDictionary {
 public:
  struct Entry {
    EmpiricalMeasure mu_h;       // original dictionary measure
    EmpiricalMeasure mu_h_eps;   // its mollification
    PotentialPair pair;          // potentials of (hat nu, mu_h_eps)
    double a_h;                  // int (|y|^2/2 - phi_h) d hat_nu
  };

  PotentialDictionary(EmpiricalMeasure nu_hat, MollifierFamily fam, std::vector<Entry> entries);

  Index size() const { return static_cast<Index>(entries_.size()); }
  const Entry& entry(Index h) const { return entries_[static_cast<size_t>(h)]; }
  const EmpiricalMeasure& nu_hat() const { return nu_hat_; }
  const MollifierFamily& family() const { return fam_; }

  double u_h(Index h, const Vec& x) const;
  // int u_h d(mu_eps) for an already mollified measure
  double integral_u(Index h, const EmpiricalMeasure& mu_eps) const;

 private:
  EmpiricalMeasure nu_hat_;
  MollifierFamily fam_;
  std::vector<Entry> entries_;
};

PotentialDictionary build_dictionary(const EmpiricalMeasure& nu, const MollifierFamily& fam,
                                     const std::vector<EmpiricalMeasure>& dict_measures);

// G_{eps,k}(mu) = max_{1<=h<=k} int u_{eps,h} d mu_eps
double g_eps_k(const PotentialDictionary& dict, const EmpiricalMeasure& mu, Index k);

// lhs = |G_k(mu) - G_k(mu')|, rhs = (m2(mu)^1/2 + m2(mu')^1/2 + 1/eps + C_eps) W_2(mu,mu')
std::pair<double, double> g_lipschitz_check(const PotentialDictionary& dict,
                                            const EmpiricalMeasure& mu,
                                            const EmpiricalMeasure& mu_prime, Index k,
                                            double slack = 1e-6);

// lhs = int |x - grad(phi*_h conv kappa_eps)(x)|^2 dmu, rhs = 2 F^eps_nu(mu);
// the bound is the paper inequality when mu is the h-th dictionary measure
std::pair<double, double> gradient_bound_check(const PotentialDictionary& dict,
                                               const EmpiricalMeasure& mu, Index h);

/// Nondecreasing Lipschitz reparametrization, C^1 with positive derivative
/// on a declared interval.
struct TruncationMap {
  std::string name;
  std::function<double(double)> zeta;
  std::function<double(double)> derivative;
  double smooth_lo, smooth_hi;
};

TruncationMap arctan_truncation();  // s -> arctan(s^2/2) for s > 0, 0 otherwise
TruncationMap identity_truncation(double lo, double hi);

// composed = zeta(F), bound = zeta'(F) .* G
std::pair<Vec, Vec> truncation_compose(const TruncationMap& zeta, const Vec& F_values,
                                       const Vec& G_values);

}  // namespace wcalc
