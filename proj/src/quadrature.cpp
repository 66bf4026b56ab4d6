#include "wcalc/quadrature.hpp"

#include <cmath>

namespace wcalc {

std::pair<Vec, Vec> gauss_legendre(int n) {
  require(n >= 1, "need at least one node");
  Vec x(n), w(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

double unit_ball_volume(Index d) {
  return std::pow(3.14159265358979323846, 0.5 * static_cast<double>(d)) /
         std::tgamma(0.5 * static_cast<double>(d) + 1.0);
}

}  // namespace wcalc
