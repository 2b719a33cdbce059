#pragma once

#include <span>
#include <vector>

#include "eisp/types.hpp"

namespace eisp::special {

// Cylinder functions of the first and second kind for real arguments.
// Power series (extended precision) below x = 20, Hankel asymptotic expansion above;
// absolute accuracy is better than 1e-12 on (0, 1e3].

double bessel_j0(double x);
double bessel_j1(double x);
/// Y0, Y1 require x > 0.
double bessel_y0(double x);
double bessel_y1(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), x > 0.
cplx hankel1_0(double x);
/// H1^(1)(x) = J1(x) + i Y1(x), x > 0.
cplx hankel1_1(double x);

/// J_0..J_nmax at x >= 0 by normalized backward (Miller) recurrence.
std::vector<double> bessel_jn_sequence(int nmax, double x);
/// Y_0..Y_nmax at x > 0 by upward recurrence from Y0, Y1.
std::vector<double> bessel_yn_sequence(int nmax, double x);

}  // namespace eisp::special
