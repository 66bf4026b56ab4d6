#include "wcalc/selftest.hpp"

#include "wcalc/energy.hpp"
#include "wcalc/families.hpp"
#include "wcalc/hopflax.hpp"
#include "wcalc/io.hpp"
#include "wcalc/mollifier.hpp"
#include "wcalc/rng.hpp"
#include "wcalc/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace wcalc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EmpiricalMeasure random_measure(Rng& rng, Index dim, int min_atoms, int max_atoms,
                                double box = 2.0) {
  const int n = rng.uniform_int(min_atoms, max_atoms);
  Mat atoms(dim, n);
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    atoms.col(i) = rng.uniform_vec(dim, -box, box);
    w[i] = rng.uniform(0.2, 1.0);
  }
  return EmpiricalMeasure(atoms, w);
}

CylinderFunction random_cylinder(Rng& rng, Index dim) {
  const int nfeat = rng.uniform_int(1, 3);
  std::vector<SmoothFeature> feats;
  for (int k = 0; k < nfeat; ++k) {
    const int kind = rng.uniform_int(0, 2);
    const Vec center = rng.uniform_vec(dim, -1.5, 1.5);
    const double width = rng.uniform(0.8, 1.8);
    if (kind == 0) {
      feats.push_back(features::gaussian_bump(center, width));
    } else if (kind == 1) {
      feats.push_back(features::coord_bump(rng.uniform_int(0, static_cast<int>(dim) - 1),
                                           center, width));
    } else {
      std::vector<int> ex(static_cast<size_t>(dim), 0);
      ex[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(dim) - 1))] =
          rng.uniform_int(1, 2);
      feats.push_back(features::monomial(ex));
    }
  }
  const int outer_kind = rng.uniform_int(0, 2);
  if (outer_kind == 0 || nfeat > 1) {
    Vec coeffs(nfeat);
    for (int k = 0; k < nfeat; ++k) coeffs[k] = rng.uniform(-1.5, 1.5);
    return CylinderFunction(outers::linear(coeffs, rng.uniform(-0.5, 0.5)), feats);
  }
  if (outer_kind == 1) return CylinderFunction(outers::square(), feats);
  return CylinderFunction(outers::tanh_outer(), feats);
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void note(const std::string& key, double value) {
    detail << " " << key << "=" << format_double(value);
  }
  void bound(const std::string& key, double value, double limit) {
    ok = ok && (value <= limit);
    detail << " " << key << "=" << format_double(value);
  }
};

CriterionResult gaussian_closed_form(const AcceptanceOptions& opts) {
  Check c;
  const auto t0 = Clock::now();
  Vec m1(1), m2v(1);
  m1 << 0.0;
  m2v << 2.0;
  const GaussianMeasure g1(m1, Mat::Identity(1, 1)), g2(m2v, Mat::Identity(1, 1));
  const double closed = gaussian_w2(g1, g2);
  c.bound("closed_form_abs_err", std::abs(closed - 2.0), 1e-12);

  const auto rows = gaussian_family_check({{g1, g2}}, 1000, opts.seed);
  c.bound("empirical_rel_err", rows[0].relative_error, 0.05);
  c.note("empirical", rows[0].empirical);
  const bool in_time = seconds_since(t0) <= 5.0;
  c.ok = c.ok && in_time;
  c.detail << " within_budget=" << (in_time ? "yes" : "no");
  return {1, "gaussian-closed-form", c.ok, c.detail.str()};
}

CriterionResult ot_exactness(const AcceptanceOptions& opts) {
  Check c;
  const auto t0 = Clock::now();
  double worst_diff = 0.0, worst_gap_ratio = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    Rng rng(opts.seed, 2000 + static_cast<std::uint64_t>(inst));
    const EmpiricalMeasure mu = random_measure(rng, 1, 2, 50);
    const EmpiricalMeasure nu = random_measure(rng, 1, 2, 50);
    const double exact = w2(mu, nu);
    worst_diff = std::max(worst_diff, std::abs(exact - w2_1d(mu, nu)));

    const double radius = nu.atoms().cwiseAbs().maxCoeff() + 0.5;
    const PotentialPair pair = kantorovich_potentials(nu, mu, radius);
    worst_gap_ratio = std::max(worst_gap_ratio,
                               pair.duality_gap() / (1.0 + exact * exact));
  }
  c.bound("max_abs_diff_vs_1d", worst_diff, 1e-9);
  c.bound("max_gap_ratio", worst_gap_ratio, 1e-7);
  const bool in_time = seconds_since(t0) <= 30.0;
  c.ok = c.ok && in_time;
  c.detail << " within_budget=" << (in_time ? "yes" : "no");
  return {2, "ot-exactness", c.ok, c.detail.str()};
}

MetaMeasure random_meta(Rng& rng, Index dim, int components) {
  std::vector<MetaMeasure::Component> comps;
  for (int i = 0; i < components; ++i)
    comps.push_back({rng.uniform(0.2, 1.5), random_measure(rng, dim, 2, 6)});
  return MetaMeasure(std::move(comps));
}

CriterionResult hilbertianity(const AcceptanceOptions& opts) {
  Check c;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng(opts.seed, 3000 + static_cast<std::uint64_t>(rep));
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const MetaMeasure m = random_meta(rng, dim, 10);
    const CylinderFunction F = random_cylinder(rng, dim);
    const CylinderFunction G = random_cylinder(rng, dim);
    const double ef = pre_cheeger(F, m, 2.0), eg = pre_cheeger(G, m, 2.0);
    const double defect = parallelogram_check(F, G, m) / (1.0 + ef + eg);
    worst = std::max(worst, defect);
  }
  c.bound("max_scaled_defect", worst, 1e-10);
  const bool in_time = seconds_since(t0) <= 10.0;
  c.ok = c.ok && in_time;
  c.detail << " within_budget=" << (in_time ? "yes" : "no");
  return {3, "hilbertianity-witness", c.ok, c.detail.str()};
}

CriterionResult differential_correctness(const AcceptanceOptions& opts) {
  Check c;
  const auto t0 = Clock::now();
  const double t_step = 1e-4;
  double worst_excess = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(opts.seed, 4000 + static_cast<std::uint64_t>(rep));
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const EmpiricalMeasure mu = random_measure(rng, dim, 3, 8);
    const CylinderFunction F = random_cylinder(rng, dim);
    VectorField u(dim, mu.size());
    for (Index i = 0; i < mu.size(); ++i) u.col(i) = rng.uniform_vec(dim, -1.0, 1.0);

    const double dd = directional_derivative(F, mu, u);
    const double fp = F.eval(translate_by_field(mu, u, t_step));
    const double fm = F.eval(translate_by_field(mu, u, -t_step));
    const double central = (fp - fm) / (2.0 * t_step);
    const double err = std::abs(central - dd) - (1e-6 + 1e-4 * std::abs(dd));
    worst_excess = std::max(worst_excess, err);
  }
  c.bound("max_tolerance_excess", worst_excess, 0.0);
  const bool in_time = seconds_since(t0) <= 10.0;
  c.ok = c.ok && in_time;
  c.detail << " within_budget=" << (in_time ? "yes" : "no");
  return {4, "differential-vs-finite-differences", c.ok, c.detail.str()};
}

CriterionResult lip_witness(const AcceptanceOptions& opts) {
  Check c;
  double worst_rel = 0.0, worst_segment = 0.0;
  int found = 0;
  std::uint64_t stream = 5000;
  while (found < 50) {
    Rng rng(opts.seed, stream++);
    const Index dim = (stream % 2 == 0) ? 1 : 2;
    const EmpiricalMeasure mu = random_measure(rng, dim, 3, 8);
    const CylinderFunction F = random_cylinder(rng, dim);
    const double gn = F.grad_norm(mu);
    if (gn < 0.1) continue;
    ++found;

    const double est = lip_lower_estimate(F, mu, 1e-3);
    worst_rel = std::max(worst_rel, std::abs(est - gn) / gn);

    // segment upper bound along displacement interpolation
    const VectorField T = F.differential_field(mu);
    const EmpiricalMeasure pushed = translate_by_field(mu, T, 1e-3);
    const W2Result ot = w2_exact(mu, pushed);
    double seg = 0.0;
    for (int g = 0; g < 10; ++g)
      seg = std::max(seg, F.grad_norm(ot.plan.interpolate(static_cast<double>(g) / 9.0)));
    const double lhs = std::abs(F.eval(pushed) - F.eval(mu));
    const double rhs = seg * ot.cost * (1.0 + 1e-2);
    worst_segment = std::max(worst_segment, (lhs - rhs) / std::max(1e-12, rhs));
  }
  c.bound("max_rel_err_vs_grad_norm", worst_rel, 0.01);
  c.bound("max_segment_violation", worst_segment, 0.0);
  return {5, "lip-equals-grad-norm", c.ok, c.detail.str()};
}

CriterionResult hopf_lax_identity(const AcceptanceOptions& opts) {
  Check c;
  // analytic two-point instance: q = 2, t = 1, d = 1, f = (0, 1)
  {
    Mat d(2, 2);
    d << 0, 1, 1, 0;
    const FiniteMetricSpace two(d);
    Vec f(2);
    f << 0.0, 1.0;
    const HopfLaxResult hl = hopf_lax(two, f, 1.0, 2.0);
    Vec expect(2);
    expect << 0.0, 0.5;
    c.bound("two_point_q_err", (hl.q_values - expect).cwiseAbs().maxCoeff(), 1e-12);
    c.bound("two_point_residual", verify_identity_25(two, f, 1.0, 512), 1e-12);
    c.bound("two_point_dplus_err", std::abs(hl.d_plus[1] - 1.0), 1e-12);
  }

  double worst_residual = 0.0, worst_margin = -1.0;
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(opts.seed, 6000 + static_cast<std::uint64_t>(rep));
    const int n = 20;
    Mat pts(1, n);
    for (int i = 0; i < n; ++i) pts(0, i) = rng.uniform(-3.0, 3.0);
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::abs(pts(0, i) - pts(0, j));
    const FiniteMetricSpace space(d);
    Vec f(n);
    for (int i = 0; i < n; ++i) f[i] = rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(0.5, 2.0);
    worst_residual = std::max(worst_residual, verify_identity_25(space, f, t, 512));
    worst_margin = std::max(worst_margin, check_slope_bound(space, f, t, 2.0));
  }
  c.bound("max_residual", worst_residual, 1e-3);
  c.bound("max_slope_margin", worst_margin, 0.0);
  return {6, "hopf-lax-identity", c.ok, c.detail.str()};
}

CriterionResult density_construction(const AcceptanceOptions& opts) {
  Check c;
  const auto t0 = Clock::now();
  double worst_monotone = 0.0;     // negative jumps of k -> G_k
  double worst_upper = 0.0;        // G_k - F
  double worst_match = 0.0;        // |G_K - F| for in-dictionary probes
  double worst_lip = 0.0;          // lhs - rhs of the Lipschitz bound
  double worst_grad = 0.0;         // lhs - rhs of the gradient bound

  int dict_counter = 0;
  for (Index dim = 1; dim <= 2; ++dim) {
    for (int rep = 0; rep < 5; ++rep, ++dict_counter) {
      Rng rng(opts.seed, 7000 + static_cast<std::uint64_t>(dict_counter));
      const EmpiricalMeasure nu = random_measure(rng, dim, 2, 3, 1.5);
      std::vector<EmpiricalMeasure> dict_measures;
      for (int h = 0; h < 4; ++h)
        dict_measures.push_back(random_measure(rng, dim, 2, 3, 1.5));

      std::vector<EmpiricalMeasure> probes;
      for (int pr = 0; pr < 8; ++pr) probes.push_back(random_measure(rng, dim, 2, 3, 1.5));
      probes.push_back(dict_measures[0]);  // in-dictionary probes
      probes.push_back(dict_measures[2]);

      for (const double eps : {0.5, 0.25}) {
        const MollifierFamily fam = MollifierFamily::make(dim, eps);
        const PotentialDictionary dict = build_dictionary(nu, fam, dict_measures);
        const Index K = dict.size();

        for (size_t p = 0; p < probes.size(); ++p) {
          const double F = f_nu_eps(probes[p], nu, fam);
          double prev = -std::numeric_limits<double>::infinity();
          double gK = 0.0;
          for (Index k = 1; k <= K; ++k) {
            const double g = g_eps_k(dict, probes[p], k);
            worst_monotone = std::max(worst_monotone, prev - g);
            worst_upper = std::max(worst_upper, g - F);
            prev = g;
            gK = g;
          }
          if (p >= 8) worst_match = std::max(worst_match, std::abs(gK - F));
        }

        for (size_t p = 0; p + 1 < probes.size(); p += 2) {
          const auto [lhs, rhs] = g_lipschitz_check(dict, probes[p], probes[p + 1], K);
          worst_lip = std::max(worst_lip, lhs - rhs);
        }

        for (Index h : {Index{0}, Index{2}}) {
          const auto [lhs, rhs] = gradient_bound_check(dict, dict_measures[static_cast<size_t>(h)], h);
          worst_grad = std::max(worst_grad, lhs - rhs);
        }
      }
    }
  }
  c.bound("max_monotonicity_defect", worst_monotone, 1e-12);
  c.bound("max_excess_over_F", worst_upper, 1e-6);
  c.bound("max_in_dictionary_gap", worst_match, 1e-6);
  c.bound("max_lipschitz_violation", worst_lip, 1e-6);
  c.bound("max_gradient_bound_violation", worst_grad, 1e-3);
  const bool in_time = seconds_since(t0) <= 300.0;
  c.ok = c.ok && in_time;
  c.detail << " within_budget=" << (in_time ? "yes" : "no");
  return {7, "density-construction-inequalities", c.ok, c.detail.str()};
}

CriterionResult projection_structure(const AcceptanceOptions&) {
  Check c;
  // lambda = (delta_{-1} + delta_1)/2, F = <x^2>, four translation values
  Mat atoms(1, 2);
  atoms << -1.0, 1.0;
  const EmpiricalMeasure lambda(atoms, Vec::Constant(2, 0.5));
  std::vector<std::pair<Vec, double>> omegas;
  for (double w : {-1.5, -0.7, 0.3, 1.1}) {
    Vec v(1);
    v << w;
    omegas.push_back({v, 0.25});
  }
  const TranslationFamily tf(lambda, omegas);
  const CylinderFunction F(outers::linear(Vec::Ones(1)), {features::monomial({2})});

  const auto rows = translation_family_report(tf, F);
  double worst_closed = 0.0, worst_orth = 0.0, worst_pyth = 0.0;
  for (const auto& row : rows) {
    worst_closed = std::max(worst_closed,
                            std::abs(row.dm_projected[0] - 2.0 * row.omega[0]));
    worst_orth = std::max(worst_orth, row.orthogonality);
    worst_pyth = std::max(worst_pyth, row.pythagoras_gap);
  }
  c.bound("max_closed_form_err", worst_closed, 1e-10);
  c.bound("max_orthogonality", worst_orth, 1e-12);
  c.bound("max_pythagoras_gap", worst_pyth, 1e-9);
  return {8, "projection-structure", c.ok, c.detail.str()};
}

CriterionResult dirac_isometry(const AcceptanceOptions& opts) {
  Check c;
  double worst = 0.0;
  Rng rng(opts.seed, 9000);
  Mat grid(1, 100);
  Vec masses(100);
  for (int i = 0; i < 100; ++i) {
    grid(0, i) = -2.0 + 4.0 * static_cast<double>(i) / 99.0;
    masses[i] = rng.uniform(0.5, 1.5);
  }
  Vec zero1 = Vec::Zero(1);
  const std::vector<std::pair<OuterFunction, SmoothFeature>> battery = {
      {outers::linear(Vec::Ones(1)), features::gaussian_bump(zero1, 1.0)},
      {outers::square(), features::gaussian_bump(zero1, 1.3)},
      {outers::tanh_outer(), features::coord_bump(0, zero1, 1.1)},
      {outers::linear(Vec::Ones(1)), features::monomial({2})},
  };
  for (const auto& [psi, phi] : battery) {
    const auto r = dirac_embedding_energy(psi, phi, grid, masses);
    worst = std::max(worst, std::abs(r.wasserstein_energy - r.euclidean_energy));
  }
  c.bound("max_energy_gap", worst, 1e-10);
  return {9, "dirac-embedding-isometry", c.ok, c.detail.str()};
}

}  // namespace

std::vector<CriterionResult> run_criteria(const AcceptanceOptions& opts,
                                          std::ostream* progress) {
  std::vector<CriterionResult> out;
  auto push = [&](CriterionResult r) {
    if (progress)
      (*progress) << "criterion " << r.id << " " << r.name << ": "
                  << (r.pass ? "PASS" : "FAIL") << "\n";
    out.push_back(std::move(r));
  };
  push(gaussian_closed_form(opts));
  push(ot_exactness(opts));
  push(hilbertianity(opts));
  push(differential_correctness(opts));
  push(lip_witness(opts));
  push(hopf_lax_identity(opts));
  push(density_construction(opts));
  push(projection_structure(opts));
  push(dirac_isometry(opts));
  return out;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* progress) {
  std::vector<CriterionResult> first = run_criteria(opts, progress);
  const std::string report1 = acceptance_report(first);
  if (progress) (*progress) << "re-running the battery for the determinism check\n";
  const std::string report2 = acceptance_report(run_criteria(opts, nullptr));

  CriterionResult det{10, "determinism", report1 == report2,
                      report1 == report2 ? " reports_identical=yes" : " reports_identical=no"};
  if (progress)
    (*progress) << "criterion 10 determinism: " << (det.pass ? "PASS" : "FAIL") << "\n";
  first.push_back(std::move(det));
  return first;
}

std::string acceptance_report(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << ":"
       << r.detail << "\n";
  }
  return os.str();
}

}  // namespace wcalc
