#pragma once

#include <numbers>

namespace ergodic {

inline constexpr double kPi = std::numbers::pi;

/// D_K(theta) / K with D_K(theta) = sin(K theta / 2) / sin(theta / 2).
///
/// K is a positive integer carried in a double so that dyadic horizons far
/// beyond 2^64 stay exact; K * theta / 2 is then exact as well and the sine
/// reduction in libm is correct for any finite argument.  Near K theta = 0 the
/// quotient is replaced by 1 - (K^2 - 1) theta^2 / 24, which is exact to
/// O((K theta)^4).
double dirichlet_ratio(double theta, double K);

/// |D_K(theta)|^2 / K^2, the Cesaro symbol integrated against spectral measures.
inline double fejer_kernel(double theta, double K) {
    const double r = dirichlet_ratio(theta, K);
    return r * r;
}

/// Throws DomainError unless K >= 1 and K is an integer.
void require_horizon(double K);

}  // namespace ergodic
