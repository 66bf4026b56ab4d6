#include "wcalc/transport.hpp"

#include "wcalc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wcalc {

namespace {

Mat squared_distance_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  Mat c(mu.size(), nu.size());
  for (Index j = 0; j < nu.size(); ++j)
    c.col(j) = (mu.atoms().colwise() - nu.atom(j)).colwise().squaredNorm().transpose();
  return c;
}

}  // namespace

TransportPlan::TransportPlan(EmpiricalMeasure source, EmpiricalMeasure target,
                             std::vector<Entry> entries)
    : source_(std::move(source)), target_(std::move(target)), entries_(std::move(entries)) {
  Vec row = Vec::Zero(source_.size()), col = Vec::Zero(target_.size());
  for (const auto& e : entries_) {
    require(e.i >= 0 && e.i < source_.size() && e.j >= 0 && e.j < target_.size(),
            "plan entry out of range");
    require(e.mass >= 0, "negative plan mass");
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  require((row - source_.weights()).cwiseAbs().maxCoeff() <= 1e-9,
          "plan row sums do not match source weights");
  require((col - target_.weights()).cwiseAbs().maxCoeff() <= 1e-9,
          "plan column sums do not match target weights");
}

double TransportPlan::cost_squared() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.mass * (source_.atom(e.i) - target_.atom(e.j)).squaredNorm();
  return s;
}

EmpiricalMeasure TransportPlan::interpolate(double t) const {
  Mat atoms(source_.dim(), static_cast<Index>(entries_.size()));
  Vec w(static_cast<Index>(entries_.size()));
  for (size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    atoms.col(static_cast<Index>(k)) = (1.0 - t) * source_.atom(e.i) + t * target_.atom(e.j);
    w[static_cast<Index>(k)] = e.mass;
  }
  return EmpiricalMeasure(atoms, w);
}

W2Result w2_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const W2Options& opts) {
  require(mu.dim() == nu.dim(), "dimension mismatch: " + std::to_string(mu.dim()) + " vs " +
                                    std::to_string(nu.dim()));
  require(static_cast<long>(mu.size()) * static_cast<long>(nu.size()) <= opts.max_entries,
          "transport instance exceeds the dense size limit");

  const Mat c = squared_distance_matrix(mu, nu);
  TransportSolution sol = solve_transport(c, mu.weights(), nu.weights(), opts.simplex);

  std::vector<TransportPlan::Entry> entries;
  entries.reserve(sol.support.size());
  for (size_t k = 0; k < sol.support.size(); ++k)
    entries.push_back({sol.support[k][0], sol.support[k][1], sol.flows[k]});

  W2Result res{std::sqrt(std::max(0.0, sol.cost)),
               TransportPlan(mu, nu, std::move(entries)),
               sol.u,
               sol.v,
               sol.cost - sol.dual_value};
  return res;
}

double w2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return w2_exact(mu, nu).cost;
}

double w2_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  require(mu.dim() == 1 && nu.dim() == 1, "w2_1d requires dimension 1");

  auto sorted = [](const EmpiricalMeasure& m) {
    std::vector<Index> idx(static_cast<size_t>(m.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::sort(idx.begin(), idx.end(),
              [&](Index a, Index b) { return m.atoms()(0, a) < m.atoms()(0, b); });
    return idx;
  };
  const auto ia = sorted(mu), ib = sorted(nu);

  // sweep the common CDF, pairing quantile slabs
  double cost = 0.0;
  size_t a = 0, b = 0;
  double ra = mu.weight(ia[0]), rb = nu.weight(ib[0]);
  while (true) {
    const double t = std::min(ra, rb);
    const double diff = mu.atoms()(0, ia[a]) - nu.atoms()(0, ib[b]);
    cost += t * diff * diff;
    ra -= t;
    rb -= t;
    const bool last_a = (a + 1 == ia.size()), last_b = (b + 1 == ib.size());
    if (last_a && last_b) break;
    if (ra <= rb && !last_a) {
      ra = mu.weight(ia[++a]);
    } else if (!last_b) {
      rb = nu.weight(ib[++b]);
    } else {
      ra = mu.weight(ia[++a]);
    }
  }
  return std::sqrt(std::max(0.0, cost));
}

PotentialPair::PotentialPair(Mat grid, Vec phi, Mat conj_slopes, Vec conj_intercepts,
                             double radius, double anchor, double gap)
    : grid_(std::move(grid)),
      phi_(std::move(phi)),
      conj_slopes_(std::move(conj_slopes)),
      conj_intercepts_(std::move(conj_intercepts)),
      radius_(radius),
      anchor_(anchor),
      gap_(gap) {}

Index PotentialPair::argmax_index(const Vec& y) const {
  Index best = 0;
  double best_val = grid_.col(0).dot(y) - phi_[0];
  for (Index g = 1; g < grid_.cols(); ++g) {
    const double v = grid_.col(g).dot(y) - phi_[g];
    if (v > best_val) {  // strict: ties keep the lowest index
      best_val = v;
      best = g;
    }
  }
  return best;
}

double PotentialPair::phi_star(const Vec& y) const {
  const Index g = argmax_index(y);
  return grid_.col(g).dot(y) - phi_[g];
}

Vec PotentialPair::phi_star_gradient(const Vec& y) const { return grid_.col(argmax_index(y)); }

double PotentialPair::phi_from_conjugate(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < conj_slopes_.cols(); ++i)
    best = std::max(best, conj_slopes_.col(i).dot(x) - conj_intercepts_[i]);
  return best;
}

PotentialPair kantorovich_potentials(const EmpiricalMeasure& nu, const EmpiricalMeasure& mu,
                                     double R, const W2Options& opts) {
  require(R > 0, "radius must be positive");
  for (Index g = 0; g < nu.size(); ++g)
    require(nu.atom(g).norm() <= R * (1.0 + 1e-12),
            "support atom " + std::to_string(g) + " outside B(0,R)");

  W2Result ot = w2_exact(mu, nu, opts);  // duals: u on mu atoms, v on nu atoms
  if (!(ot.duality_gap <= 1e-7 * (1.0 + ot.cost * ot.cost) && ot.duality_gap >= -1e-9))
    throw SolverError("infeasible dual: gap " + std::to_string(ot.duality_gap));

  // u_i + v_g <= |y_i - x_g|^2 is Fenchel-Young for
  //   phi(x_g) = (|x_g|^2 - v_g)/2,  psi(y_i) = (|y_i|^2 - u_i)/2.
  Vec phi(nu.size());
  for (Index g = 0; g < nu.size(); ++g)
    phi[g] = 0.5 * (nu.atom(g).squaredNorm() - ot.dual_target[g]);
  Vec psi(mu.size());
  for (Index i = 0; i < mu.size(); ++i)
    psi[i] = 0.5 * (mu.atom(i).squaredNorm() - ot.dual_source[i]);

  // shift so that min phi = 0, which is phi*(0) = 0 for the max-affine conjugate
  const double shift = phi.minCoeff();
  phi.array() -= shift;
  psi.array() += shift;

  return PotentialPair(nu.atoms(), phi, mu.atoms(), psi, R, shift, ot.duality_gap);
}

double duality_gap(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const Vec& u,
                   const Vec& v) {
  require(u.size() == mu.size() && v.size() == nu.size(), "dual vector size mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  Index wi = 0, wj = 0;
  for (Index i = 0; i < mu.size(); ++i) {
    for (Index j = 0; j < nu.size(); ++j) {
      const double slack = u[i] + v[j] - (mu.atom(i) - nu.atom(j)).squaredNorm();
      if (slack > worst) {
        worst = slack;
        wi = i;
        wj = j;
      }
    }
  }
  require(worst <= 1e-9, "inadmissible dual pair: u+v exceeds cost by " + std::to_string(worst) +
                             " at atoms (" + std::to_string(wi) + "," + std::to_string(wj) + ")");
  const double c = w2(mu, nu);
  return c * c - (mu.weights().dot(u) + nu.weights().dot(v));
}

GaussianMeasure::GaussianMeasure(Vec mean_, Mat cov_) : mean(std::move(mean_)), cov(std::move(cov_)) {
  require(cov.rows() == mean.size() && cov.cols() == mean.size(), "covariance shape mismatch");
  require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()),
          "covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
  require(es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()),
          "covariance has a negative eigenvalue beyond the clamp tolerance");
  // clamp tiny negative eigenvalues to zero
  Vec ev = es.eigenvalues().cwiseMax(0.0);
  cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  cov = 0.5 * (cov + cov.transpose());
}

namespace {

Mat psd_sqrt(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double gaussian_w2(const GaussianMeasure& g1, const GaussianMeasure& g2) {
  require(g1.dim() == g2.dim(), "dimension mismatch");
  const Mat r1 = psd_sqrt(g1.cov);
  const Mat cross = psd_sqrt(r1 * g2.cov * r1);
  const double d2 = (g1.mean - g2.mean).squaredNorm() + g1.cov.trace() + g2.cov.trace() -
                    2.0 * cross.trace();
  return std::sqrt(std::max(0.0, d2));
}

EmpiricalMeasure sample_gaussian(const GaussianMeasure& g, Index n_samples, std::uint64_t seed,
                                 std::uint64_t stream) {
  require(n_samples > 0, "need at least one sample");
  Rng rng(seed, stream);
  const Mat root = psd_sqrt(g.cov);
  Mat atoms(g.dim(), n_samples);
  for (Index k = 0; k < n_samples; ++k) atoms.col(k) = g.mean + root * rng.normal_vec(g.dim());
  return EmpiricalMeasure(atoms, Vec::Constant(n_samples, 1.0 / static_cast<double>(n_samples)));
}

std::pair<double, double> lipschitz_pairing_bound_check(
    const std::function<double(const Vec&)>& f, double L, const EmpiricalMeasure& mu,
    const EmpiricalMeasure& nu) {
  auto values = [&](const EmpiricalMeasure& m) {
    Vec v(m.size());
    for (Index i = 0; i < m.size(); ++i) v[i] = f(m.atom(i));
    return v;
  };
  const Vec fmu = values(mu), fnu = values(nu);

  auto check_pairs = [&](const EmpiricalMeasure& a, const Vec& fa, const EmpiricalMeasure& b,
                         const Vec& fb) {
    for (Index i = 0; i < a.size(); ++i)
      for (Index j = 0; j < b.size(); ++j) {
        const double gap = std::abs(fa[i] - fb[j]) - L * (a.atom(i) - b.atom(j)).norm();
        require(gap <= 1e-12 * std::max(1.0, L),
                "Lipschitz precondition fails on atom pair by " + std::to_string(gap));
      }
  };
  check_pairs(mu, fmu, nu, fnu);
  check_pairs(mu, fmu, mu, fmu);
  check_pairs(nu, fnu, nu, fnu);

  const double lhs = mu.weights().dot(fmu) - nu.weights().dot(fnu);
  const double rhs = L * w2(mu, nu);
  check(lhs <= rhs + 1e-9, "pairing bound violated");
  return {lhs, rhs};
}

}  // namespace wcalc
