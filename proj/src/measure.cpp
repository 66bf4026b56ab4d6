#include "wcalc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wcalc {

namespace {

bool columns_equal(const Mat& a, Index i, Index j) {
  for (Index r = 0; r < a.rows(); ++r) {
    if (a(r, i) != a(r, j)) return false;
  }
  return true;
}

bool column_less(const Mat& a, Index i, Index j) {
  for (Index r = 0; r < a.rows(); ++r) {
    if (a(r, i) != a(r, j)) return a(r, i) < a(r, j);
  }
  return false;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Mat atoms, Vec weights) {
  require(atoms.cols() > 0, "measure needs at least one atom");
  require(atoms.cols() == weights.size(),
          "atom/weight length mismatch: " + std::to_string(atoms.cols()) + " atoms vs " +
              std::to_string(weights.size()) + " weights");
  require(atoms.allFinite(), "non-finite atom coordinate");
  for (Index i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] >= 0.0,
            "negative or non-finite weight at index " + std::to_string(i));
  }
  const Index n = atoms.cols();

  // Group exact duplicates: sort indices lexicographically, then map every
  // index to the first occurrence (in input order) of its group.
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index i, Index j) { return column_less(atoms, i, j); });

  std::vector<Index> group_rep(static_cast<size_t>(n));
  for (size_t k = 0; k < order.size();) {
    size_t e = k + 1;
    Index rep = order[k];
    while (e < order.size() && columns_equal(atoms, order[k], order[e])) {
      rep = std::min(rep, order[e]);
      ++e;
    }
    rep = std::min(rep, order[k]);
    for (size_t q = k; q < e; ++q) group_rep[static_cast<size_t>(order[q])] = rep;
    k = e;
  }

  std::vector<Index> kept;
  std::vector<Index> slot(static_cast<size_t>(n), Index{-1});
  for (Index i = 0; i < n; ++i) {
    if (group_rep[static_cast<size_t>(i)] == i) {
      slot[static_cast<size_t>(i)] = static_cast<Index>(kept.size());
      kept.push_back(i);
    }
  }

  atoms_.resize(atoms.rows(), static_cast<Index>(kept.size()));
  weights_ = Vec::Zero(static_cast<Index>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) atoms_.col(static_cast<Index>(k)) = atoms.col(kept[k]);
  for (Index i = 0; i < n; ++i)
    weights_[slot[static_cast<size_t>(group_rep[static_cast<size_t>(i)])]] += weights[i];

  const double total = weights_.sum();
  require(total > 0.0, "weights sum to zero");
  weights_ /= total;
}

double EmpiricalMeasure::second_moment() const {
  double s = 0.0;
  for (Index i = 0; i < size(); ++i) s += weights_[i] * atoms_.col(i).squaredNorm();
  return s;
}

double EmpiricalMeasure::integrate(const std::function<double(const Vec&)>& f) const {
  double s = 0.0;
  for (Index i = 0; i < size(); ++i) {
    const double v = f(atoms_.col(i));
    require(std::isfinite(v), "non-finite integrand value at atom " + std::to_string(i));
    s += weights_[i] * v;
  }
  return s;
}

EmpiricalMeasure make_measure(const std::vector<std::vector<double>>& atoms,
                              const std::vector<double>& weights) {
  require(!atoms.empty(), "measure needs at least one atom");
  const Index d = static_cast<Index>(atoms.front().size());
  Mat a(d, static_cast<Index>(atoms.size()));
  for (size_t i = 0; i < atoms.size(); ++i) {
    require(static_cast<Index>(atoms[i].size()) == d,
            "dimension mismatch at atom " + std::to_string(i));
    for (Index r = 0; r < d; ++r) a(r, static_cast<Index>(i)) = atoms[i][static_cast<size_t>(r)];
  }
  Vec w = Eigen::Map<const Vec>(weights.data(), static_cast<Index>(weights.size()));
  return EmpiricalMeasure(a, w);
}

EmpiricalMeasure dirac(const Vec& x) {
  Mat a(x.size(), 1);
  a.col(0) = x;
  return EmpiricalMeasure(a, Vec::Ones(1));
}

EmpiricalMeasure dirac1d(double x) {
  Vec v(1);
  v[0] = x;
  return dirac(v);
}

double second_moment(const EmpiricalMeasure& mu) { return mu.second_moment(); }

EmpiricalMeasure pushforward(const EmpiricalMeasure& mu,
                             const std::function<Vec(const Vec&)>& map) {
  Mat out(mu.dim(), mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    Vec y = map(mu.atom(i));
    require(y.size() == mu.dim(), "pushforward map changed dimension");
    require(y.allFinite(), "pushforward map produced non-finite coordinates at atom " +
                               std::to_string(i));
    out.col(i) = y;
  }
  return EmpiricalMeasure(out, mu.weights());
}

EmpiricalMeasure translate_by_field(const EmpiricalMeasure& mu, const VectorField& u, double t) {
  require(u.rows() == mu.dim() && u.cols() == mu.size(), "field/atom mismatch");
  return EmpiricalMeasure(mu.atoms() + t * u, mu.weights());
}

EmpiricalMeasure translate(const EmpiricalMeasure& mu, const Vec& c) {
  return EmpiricalMeasure(mu.atoms().colwise() + c, mu.weights());
}

MetaMeasure::MetaMeasure(std::vector<Component> components)
    : components_(std::move(components)) {
  require(!components_.empty(), "meta measure needs at least one component");
  total_mass_ = 0.0;
  for (size_t i = 0; i < components_.size(); ++i) {
    require(std::isfinite(components_[i].mass) && components_[i].mass > 0.0,
            "component mass must be positive at index " + std::to_string(i));
    total_mass_ += components_[i].mass;
  }
  require(std::isfinite(total_mass_), "total mass not finite");
}

MetaMeasure MetaMeasure::normalized() const {
  std::vector<Component> scaled = components_;
  for (auto& c : scaled) c.mass /= total_mass_;
  return MetaMeasure(std::move(scaled));
}

double lift_integral(const MetaMeasure& m,
                     const std::function<double(const EmpiricalMeasure&, const Vec&)>& H) {
  double total = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    const auto& comp = m.component(i);
    double inner = 0.0;
    for (Index j = 0; j < comp.measure.size(); ++j) {
      const double h = H(comp.measure, comp.measure.atom(j));
      require(std::isfinite(h), "non-finite integrand at component " + std::to_string(i) +
                                    ", atom " + std::to_string(j));
      inner += comp.measure.weight(j) * h;
    }
    total += comp.mass * inner;
  }
  return total;
}

}  // namespace wcalc
