#include "ergodic/kernel.hpp"

#include <cmath>
#include <string>

#include "ergodic/errors.hpp"

namespace ergodic {

double dirichlet_ratio(double theta, double K) {
    const double x = 0.5 * theta;
    if (x == 0.0) return 1.0;
    const double kx = K * x;
    if (std::abs(kx) < 1e-4) {
        // (K^2 - 1) theta^2 / 24 written without forming K^2, which overflows for huge K.
        return 1.0 - (kx * kx - x * x) / 6.0;
    }
    return std::sin(kx) / (K * std::sin(x));
}

void require_horizon(double K) {
    if (!(K >= 1.0) || !std::isfinite(K) || std::floor(K) != K) {
        throw DomainError("horizon K must be a positive integer, got " + std::to_string(K));
    }
}

}  // namespace ergodic
