#include "wcalc/measure.hpp"

#include "wcalc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace wcalc;

TEST_CASE("construction normalizes weights") {
  const auto mu = make_measure({{0.0}, {1.0}}, {1.0, 1.0});
  CHECK(mu.size() == 2);
  CHECK(mu.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mu.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("exact duplicates merge with summed weights") {
  const auto mu = make_measure({{0.0}, {0.0}}, {0.3, 0.7});
  CHECK(mu.size() == 1);
  CHECK(mu.atom(0)[0] == 0.0);
  CHECK(mu.weight(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("near-duplicates stay distinct") {
  const auto mu = make_measure({{0.0}, {1e-13}}, {0.5, 0.5});
  CHECK(mu.size() == 2);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_measure({{1.0, 2.0}}, {2.0, 1.0}), InputError);  // length mismatch
  CHECK_THROWS_AS(make_measure({{1.0}, {2.0}}, {0.5, -0.1}), InputError);
  CHECK_THROWS_AS(make_measure(std::vector<std::vector<double>>{}, {}), InputError);
  CHECK_THROWS_AS(make_measure({{1.0}, {2.0, 3.0}}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(make_measure({{1.0}}, {0.0}), InputError);  // all-zero weights
}

TEST_CASE("second moment") {
  CHECK(second_moment(dirac1d(0.0)) == 0.0);
  CHECK(second_moment(make_measure({{-1.0}, {1.0}}, {0.5, 0.5})) == doctest::Approx(1.0));
  // direct sum: 0.5 * 0 + 0.5 * 4
  CHECK(second_moment(make_measure({{0.0}, {2.0}}, {0.5, 0.5})) == doctest::Approx(2.0));
}

TEST_CASE("pushforward") {
  const auto mu = make_measure({{0.0}, {1.0}}, {0.25, 0.75});
  const auto same = pushforward(mu, [](const Vec& x) { return x; });
  CHECK(same.size() == 2);
  CHECK(same.atoms() == mu.atoms());

  // translation of a Dirac
  Vec v(1);
  v << 3.0;
  const auto moved = pushforward(dirac1d(0.0), [&](const Vec& x) { return Vec(x + 0.5 * v); });
  CHECK(moved.size() == 1);
  CHECK(moved.atom(0)[0] == doctest::Approx(1.5));

  // collapse merges all atoms
  const auto collapsed = pushforward(mu, [](const Vec& x) { return Vec(0.0 * x); });
  CHECK(collapsed.size() == 1);
  CHECK(collapsed.weight(0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(
      pushforward(mu, [](const Vec& x) { return Vec(x / 0.0); }), InputError);
}

TEST_CASE("translation shifts the second moment by 2<c,mean> + |c|^2") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = rng.uniform_int(1, 6);
    Mat atoms(2, n);
    Vec w(n);
    for (int i = 0; i < n; ++i) {
      atoms.col(i) = rng.uniform_vec(2, -2, 2);
      w[i] = rng.uniform(0.1, 1.0);
    }
    const EmpiricalMeasure mu(atoms, w);
    const Vec c = rng.uniform_vec(2, -1, 1);
    const auto shifted = translate(mu, c);
    const double expected = mu.second_moment() + 2.0 * c.dot(mu.mean()) + c.squaredNorm();
    CHECK(shifted.second_moment() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("rebuilding an already-valid measure is the identity") {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = rng.uniform_int(1, 8);
    Mat atoms(1, n);
    Vec w(n);
    for (int i = 0; i < n; ++i) {
      atoms(0, i) = rng.uniform(-5, 5) + i;  // distinct
      w[i] = rng.uniform(0.1, 1.0);
    }
    const EmpiricalMeasure mu(atoms, w);
    const EmpiricalMeasure again(mu.atoms(), mu.weights());
    CHECK(again.atoms() == mu.atoms());
    CHECK((again.weights() - mu.weights()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("meta measure and lifted integral") {
  const MetaMeasure m(std::vector<MetaMeasure::Component>{{0.5, dirac1d(0.0)},
                                                          {0.5, dirac1d(2.0)}});
  CHECK(m.total_mass() == doctest::Approx(1.0));

  // H == 1 integrates to the total mass
  CHECK(lift_integral(m, [](const EmpiricalMeasure&, const Vec&) { return 1.0; }) ==
        doctest::Approx(1.0));

  // H(mu, x) = |x|^2 against a point mass reproduces the second moment
  const MetaMeasure point(std::vector<MetaMeasure::Component>{
      {1.0, make_measure({{-1.0}, {1.0}}, {0.5, 0.5})}});
  CHECK(lift_integral(point, [](const EmpiricalMeasure&, const Vec& x) {
          return x.squaredNorm();
        }) == doctest::Approx(1.0));

  // H(mu, x) = m2(mu): 0.5 * 0 + 0.5 * 4
  CHECK(lift_integral(m, [](const EmpiricalMeasure& mu, const Vec&) {
          return mu.second_moment();
        }) == doctest::Approx(2.0));

  CHECK_THROWS_AS(
      lift_integral(m, [](const EmpiricalMeasure&, const Vec&) {
        return std::numeric_limits<double>::infinity();
      }),
      InputError);
}

TEST_CASE("lift integral is linear in H and in the masses") {
  Rng rng(9);
  std::vector<MetaMeasure::Component> comps;
  for (int i = 0; i < 4; ++i) {
    Mat atoms(1, 3);
    Vec w(3);
    for (int k = 0; k < 3; ++k) {
      atoms(0, k) = rng.uniform(-2, 2) + 10 * k;
      w[k] = rng.uniform(0.1, 1.0);
    }
    comps.push_back({rng.uniform(0.1, 2.0), EmpiricalMeasure(atoms, w)});
  }
  const MetaMeasure m(comps);
  auto H1 = [](const EmpiricalMeasure&, const Vec& x) { return x[0]; };
  auto H2 = [](const EmpiricalMeasure&, const Vec& x) { return std::sin(x[0]); };
  const double a = 0.7, b = -1.3;
  auto combo = [&](const EmpiricalMeasure& mu, const Vec& x) {
    return a * H1(mu, x) + b * H2(mu, x);
  };
  CHECK(lift_integral(m, combo) ==
        doctest::Approx(a * lift_integral(m, H1) + b * lift_integral(m, H2)).epsilon(1e-12));

  // doubling all masses doubles the integral
  std::vector<MetaMeasure::Component> doubled = comps;
  for (auto& c : doubled) c.mass *= 2.0;
  CHECK(lift_integral(MetaMeasure(doubled), H1) ==
        doctest::Approx(2.0 * lift_integral(m, H1)).epsilon(1e-12));

  CHECK_THROWS_AS(MetaMeasure(std::vector<MetaMeasure::Component>{{-1.0, dirac1d(0.0)}}),
                  InputError);
}
