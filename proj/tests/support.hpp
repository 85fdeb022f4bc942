#pragma once

#include <random>
#include <vector>

#include "ergodic/circle_measure.hpp"
#include "ergodic/kernel.hpp"

namespace ergodic::test {

// Random angle in (-pi, pi].
inline double random_angle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    double t = u(rng);
    return t == -kPi ? kPi : t;
}

// n atoms with uniform angles, exponential weights, and one in eight pinned
// near 1 so small arcs are populated.
inline CircleMeasure random_atomic(unsigned seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> w(1.0);
    std::uniform_real_distribution<double> small(-0.01, 0.01);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = (i % 8 == 7) ? small(rng) : random_angle(rng);
        atoms.push_back({theta, w(rng)});
    }
    return CircleMeasure::atomic(std::move(atoms));
}

}  // namespace ergodic::test
