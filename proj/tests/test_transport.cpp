#include "wcalc/transport.hpp"

#include "oracles.hpp"
#include "wcalc/quadrature.hpp"
#include "wcalc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace wcalc;

namespace {

EmpiricalMeasure random_measure(Rng& rng, Index dim, int min_atoms, int max_atoms,
                                double box = 2.0) {
  const int n = rng.uniform_int(min_atoms, max_atoms);
  Mat atoms(dim, n);
  Vec w(n);
  for (int i = 0; i < n; ++i) {
    atoms.col(i) = rng.uniform_vec(dim, -box, box);
    w[i] = rng.uniform(0.1, 1.0);
  }
  return EmpiricalMeasure(atoms, w);
}

}  // namespace

TEST_CASE("w2 between Diracs is the distance") {
  Vec x(2), y(2);
  x << 0.0, 0.0;
  y << 3.0, 4.0;
  CHECK(w2(dirac(x), dirac(y)) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("two-atom instance matches the vertex-enumeration oracle") {
  const auto mu = make_measure({{0.0}, {1.0}}, {0.5, 0.5});
  const auto nu = make_measure({{0.0}, {2.0}}, {0.5, 0.5});
  const W2Result res = w2_exact(mu, nu);
  CHECK(res.cost * res.cost == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(oracle::w2_by_vertex_enumeration(mu, nu) == doctest::Approx(res.cost).epsilon(1e-12));
}

TEST_CASE("identical measures have zero cost and a diagonal plan") {
  Rng rng(11);
  const auto mu = random_measure(rng, 2, 3, 6);
  const W2Result res = w2_exact(mu, mu);
  CHECK(res.cost <= 1e-12);
  for (const auto& e : res.plan.entries())
    if (e.i != e.j) CHECK(e.mass <= 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
  Vec x(1), y(2);
  x << 0.0;
  y << 0.0, 0.0;
  CHECK_THROWS_AS(w2_exact(dirac(x), dirac(y)), InputError);
}

TEST_CASE("random small instances agree with the oracle in 1d and 2d") {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const auto mu = random_measure(rng, dim, 2, 3);
    const auto nu = random_measure(rng, dim, 2, 4);
    const double solver = w2(mu, nu);
    const double brute = oracle::w2_by_vertex_enumeration(mu, nu);
    CHECK(solver == doctest::Approx(brute).epsilon(1e-10));
  }
}

TEST_CASE("uniform instances agree with the permutation oracle") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = rng.uniform_int(2, 6);
    Mat x(2, n), y(2, n);
    for (int i = 0; i < n; ++i) {
      x.col(i) = rng.uniform_vec(2, -2, 2);
      y.col(i) = rng.uniform_vec(2, -2, 2);
    }
    const EmpiricalMeasure mu(x, Vec::Constant(n, 1.0 / n)), nu(y, Vec::Constant(n, 1.0 / n));
    CHECK(w2(mu, nu) == doctest::Approx(oracle::w2_by_permutations(x, y)).epsilon(1e-10));
  }
}

TEST_CASE("w2_1d examples") {
  CHECK(w2_1d(make_measure({{0.0}, {1.0}}, {0.5, 0.5}),
              make_measure({{2.0}, {3.0}}, {0.5, 0.5})) == doctest::Approx(2.0));
  const auto mu = make_measure({{0.3}, {-1.2}}, {0.4, 0.6});
  CHECK(w2_1d(mu, mu) == doctest::Approx(0.0));
  CHECK(w2_1d(dirac1d(0.0), make_measure({{-1.0}, {1.0}}, {0.5, 0.5})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(w2_1d(dirac(Vec::Zero(2)), dirac(Vec::Zero(2))), InputError);
}

TEST_CASE("1d solver equals the quantile closed form on random instances") {
  Rng rng(14);
  for (int rep = 0; rep < 25; ++rep) {
    const auto mu = random_measure(rng, 1, 2, 50);
    const auto nu = random_measure(rng, 1, 2, 50);
    CHECK(w2(mu, nu) == doctest::Approx(w2_1d(mu, nu)).epsilon(1e-11));
  }
}

TEST_CASE("symmetry and triangle inequality") {
  Rng rng(15);
  for (int rep = 0; rep < 12; ++rep) {
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const auto a = random_measure(rng, dim, 2, 20);
    const auto b = random_measure(rng, dim, 2, 20);
    const auto c = random_measure(rng, dim, 2, 20);
    const double ab = w2(a, b), ba = w2(b, a), ac = w2(a, c), cb = w2(c, b);
    CHECK(std::abs(ab - ba) <= 1e-10);
    CHECK(ab <= ac + cb + 1e-9);
  }
}

TEST_CASE("plan marginals are validated") {
  const auto mu = make_measure({{0.0}, {1.0}}, {0.5, 0.5});
  CHECK_THROWS_AS(TransportPlan(mu, mu, {{0, 0, 0.5}, {1, 1, 0.2}}), InputError);
}

TEST_CASE("duality gap examples") {
  const auto mu = make_measure({{0.0}, {1.0}}, {0.5, 0.5});
  const auto nu = make_measure({{0.0}, {2.0}}, {0.5, 0.5});

  // zero potentials are admissible and leave the whole cost as gap
  const double gap0 = duality_gap(mu, nu, Vec::Zero(2), Vec::Zero(2));
  CHECK(gap0 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(duality_gap(mu, mu, Vec::Zero(2), Vec::Zero(2)) == doctest::Approx(0.0));

  // optimal duals close the gap
  const W2Result res = w2_exact(mu, nu);
  const double gap = duality_gap(mu, nu, res.dual_source, res.dual_target);
  CHECK(gap >= -1e-9);
  CHECK(gap <= 1e-7);

  // inadmissible pair reports the worst offending atoms
  CHECK_THROWS_AS(duality_gap(mu, nu, Vec::Constant(2, 10.0), Vec::Zero(2)), InputError);
}

TEST_CASE("kantorovich potentials: identity transport normalizes to |x|^2/2") {
  Mat atoms(1, 5);
  for (int i = 0; i < 5; ++i) atoms(0, i) = -1.0 + 0.5 * i;
  const EmpiricalMeasure grid(atoms, Vec::Constant(5, 0.2));
  const PotentialPair pair = kantorovich_potentials(grid, grid, 1.5);

  for (Index g = 0; g < 5; ++g) {
    const double expect = 0.5 * grid.atom(g).squaredNorm();
    CHECK(pair.phi_values()[g] == doctest::Approx(expect).epsilon(1e-9));
  }
  // phi*(y) = |y|^2/2 on the support radius, argmax at the nearest atom
  Vec y(1);
  y << 1.0;
  CHECK(pair.phi_star(y) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pair.phi_star(Vec::Zero(1)) == doctest::Approx(0.0));
  CHECK(pair.phi_star_gradient(y)[0] == doctest::Approx(1.0));
}

TEST_CASE("potential pair satisfies the transport identity and conjugacy") {
  Rng rng(16);
  for (int rep = 0; rep < 15; ++rep) {
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const auto nu = random_measure(rng, dim, 2, 10, 1.5);
    const auto mu = random_measure(rng, dim, 2, 10, 3.0);
    const double R = 1.5 * std::sqrt(static_cast<double>(dim)) + 0.1;
    const PotentialPair pair = kantorovich_potentials(nu, mu, R);

    // primal-dual gap
    const double c = w2(nu, mu);
    CHECK(pair.duality_gap() <= 1e-7 * (1.0 + c * c));

    // Theorem identity: int phi dnu + int phi* dmu = (m2(nu)+m2(mu)-W2^2)/2
    double int_phi = 0.0;
    for (Index g = 0; g < nu.size(); ++g) int_phi += nu.weight(g) * pair.phi_values()[g];
    double int_star = 0.0;
    for (Index i = 0; i < mu.size(); ++i) int_star += mu.weight(i) * pair.phi_star(mu.atom(i));
    const double expect =
        0.5 * nu.second_moment() + 0.5 * mu.second_moment() - 0.5 * c * c;
    CHECK(int_phi + int_star == doctest::Approx(expect).epsilon(1e-6));

    // normalization and conjugacy on the recorded grid
    CHECK(pair.phi_star(Vec::Zero(dim)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pair.phi_values().minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
    for (Index g = 0; g < nu.size(); ++g) {
      CHECK(pair.phi_from_conjugate(nu.atom(g)) ==
            doctest::Approx(pair.phi_values()[g]).epsilon(1e-7));
    }

    // phi* is R-Lipschitz: its slopes are the grid atoms
    for (Index g = 0; g < nu.size(); ++g) CHECK(pair.grid().col(g).norm() <= R * (1 + 1e-12));
  }
}

TEST_CASE("potentials of a translated cluster have affine conjugate") {
  // nu concentrated near 0, mu = nu + c: optimal map is the translation, so
  // the argmax selection of phi* recovers cluster points
  Rng rng(17);
  Mat atoms(1, 3);
  atoms << -0.05, 0.0, 0.05;
  const EmpiricalMeasure nu(atoms, Vec::Constant(3, 1.0 / 3));
  Vec c(1);
  c << 2.0;
  const EmpiricalMeasure mu = translate(nu, c);
  const PotentialPair pair = kantorovich_potentials(nu, mu, 0.5);
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec g = pair.phi_star_gradient(mu.atom(i));
    CHECK(std::abs(g[0] - (mu.atom(i)[0] - 2.0)) <= 1e-9);
  }
}

TEST_CASE("support violation is rejected") {
  const auto nu = make_measure({{3.0}}, {1.0});
  CHECK_THROWS_AS(kantorovich_potentials(nu, dirac1d(0.0), 1.0), InputError);
}

TEST_CASE("gaussian closed form") {
  Vec m0(1), m2v(1);
  m0 << 0.0;
  m2v << 2.0;
  const GaussianMeasure g1(m0, Mat::Identity(1, 1)), g2(m2v, Mat::Identity(1, 1));
  CHECK(gaussian_w2(g1, g2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gaussian_w2(g1, g1) == doctest::Approx(0.0));

  const GaussianMeasure h1(Vec::Zero(2), Mat::Identity(2, 2));
  const GaussianMeasure h2(Vec::Zero(2), 4.0 * Mat::Identity(2, 2));
  CHECK(gaussian_w2(h1, h2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

  Mat bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(GaussianMeasure(Vec::Zero(2), bad), InputError);
}

TEST_CASE("gaussian closed form is symmetric and satisfies the triangle inequality") {
  Rng rng(18);
  for (int rep = 0; rep < 10; ++rep) {
    auto random_gaussian = [&]() {
      Mat a(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int cidx = 0; cidx < 2; ++cidx) a(r, cidx) = rng.uniform(-1, 1);
      return GaussianMeasure(rng.uniform_vec(2, -2, 2), Mat(a * a.transpose()));
    };
    const auto a = random_gaussian(), b = random_gaussian(), c = random_gaussian();
    CHECK(gaussian_w2(a, b) == doctest::Approx(gaussian_w2(b, a)).epsilon(1e-12));
    CHECK(gaussian_w2(a, b) <= gaussian_w2(a, c) + gaussian_w2(c, b) + 1e-9);
  }
}

TEST_CASE("lipschitz pairing bound") {
  const auto mu = make_measure({{0.0}, {1.0}}, {0.5, 0.5});
  const auto nu = make_measure({{0.0}, {2.0}}, {0.5, 0.5});

  auto [l0, r0] = lipschitz_pairing_bound_check([](const Vec&) { return 3.0; }, 1.0, mu, nu);
  CHECK(l0 == doctest::Approx(0.0));
  CHECK(r0 >= 0.0);

  auto [l1, r1] =
      lipschitz_pairing_bound_check([](const Vec& x) { return x[0]; }, 1.0, dirac1d(0.0),
                                    dirac1d(1.0));
  CHECK(l1 == doctest::Approx(-1.0));
  CHECK(r1 == doctest::Approx(1.0));

  // mean difference vs L W_2 on the two-atom example
  auto [l2, r2] = lipschitz_pairing_bound_check([](const Vec& x) { return x[0]; }, 1.0, mu, nu);
  CHECK(l2 == doctest::Approx(-0.5));
  CHECK(r2 == doctest::Approx(std::sqrt(0.5)));

  // violated precondition reports the pair
  CHECK_THROWS_AS(lipschitz_pairing_bound_check([](const Vec& x) { return 10.0 * x[0]; }, 1.0,
                                                mu, nu),
                  InputError);
}

TEST_CASE("convex estimate of the potential extension on the ball") {
  // sup_{|x|<=r} phi <= I / (omega_d (R-r)^d) whenever int_B phi <= I,
  // with phi >= 0 the normalized convex potential
  Rng rng(19);
  for (int rep = 0; rep < 6; ++rep) {
    const Index dim = (rep % 2 == 0) ? 1 : 2;
    const double R = 2.0;
    const auto nu = random_measure(rng, dim, 3, 8, 1.0);
    const auto mu = random_measure(rng, dim, 3, 8, 2.5);
    const PotentialPair pair = kantorovich_potentials(nu, mu, R);

    // quadrature of the max-affine extension over B(0,R)
    double I = 0.0;
    const auto [gx, gw] = gauss_legendre(48);
    if (dim == 1) {
      for (int k = 0; k < 48; ++k) {
        Vec x(1);
        x << R * gx[k];
        I += R * gw[k] * pair.phi_from_conjugate(x);
      }
    } else {
      // polar: int = int_0^R int_0^{2pi} phi r dr dtheta
      const int ntheta = 64;
      for (int k = 0; k < 48; ++k) {
        const double r = 0.5 * R * (gx[k] + 1.0);
        double ring = 0.0;
        for (int a = 0; a < ntheta; ++a) {
          const double th = 2.0 * 3.14159265358979323846 * a / ntheta;
          Vec x(2);
          x << r * std::cos(th), r * std::sin(th);
          ring += pair.phi_from_conjugate(x);
        }
        ring *= 2.0 * 3.14159265358979323846 / ntheta;
        I += 0.5 * R * gw[k] * ring * r;
      }
    }
    I *= 1.001;  // quadrature headroom
    const double omega_d = unit_ball_volume(dim);

    for (double r : {0.5, 1.0, 1.5}) {
      // sup over a probe set of B(0,r): max-affine attains its max at the boundary
      double sup = 0.0;
      const int nprobe = 256;
      for (int a = 0; a < nprobe; ++a) {
        Vec x(dim);
        if (dim == 1)
          x << (a < 2 ? (a == 0 ? -r : r) : -r + 2.0 * r * a / (nprobe - 1));
        else {
          const double th = 2.0 * 3.14159265358979323846 * a / nprobe;
          x << r * std::cos(th), r * std::sin(th);
        }
        sup = std::max(sup, pair.phi_from_conjugate(x));
      }
      const double bound = I / (omega_d * std::pow(R - r, static_cast<double>(dim)));
      CHECK(sup <= bound + 1e-9);
    }
  }
}
