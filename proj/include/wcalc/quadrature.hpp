#pragma once

#include "wcalc/types.hpp"

#include <utility>

namespace wcalc {

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
std::pair<Vec, Vec> gauss_legendre(int n);

// volume of the unit ball in R^d
double unit_ball_volume(Index d);

}  // namespace wcalc
