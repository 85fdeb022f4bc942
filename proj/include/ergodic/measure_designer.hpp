#pragma once

#include <vector>

#include "ergodic/circle_measure.hpp"

namespace ergodic {

/// Density c|theta|^(alpha-1) on (-pi, pi]; arc_mass(eps) = (2c/alpha) eps^alpha.
CircleMeasure power_law_measure(double alpha, double c);

/// Power law normalized to unit total mass, c = alpha / (2 pi^alpha).
CircleMeasure unit_power_law(double alpha);

/// Parameters of an atomic measure whose log-ratio ln mu(A_eps) / ln eps
/// swings between low_exponent and high_exponent.
///
/// Dips sit on the ladder theta_n = 2^(-first_scale_bits * ramp^n), n < depth, each
/// carrying enough mass that mu(A_theta_n) = theta_n^low.  Below the deepest
/// dip a comb of atoms at 2^(-j / comb_per_octave) follows
/// background * eps^high down to 2^(-floor_bits).
struct LacunarySpec {
    double first_scale_bits = 0.25;
    double ramp = 2.0;
    double low_exponent = 0.2;
    double high_exponent = 1.8;
    int depth = 8;
    double comb_per_octave = 2.0;
    /// 0 selects min(1000 / max(1, high), max(64, 16 * deepest ladder exponent in bits)).
    double floor_bits = 0.0;
    double background = 0.5;
};

/// Throws ConstructionError with a diagnostic when the spec is infeasible.
CircleMeasure lacunary_measure(const LacunarySpec& spec);

/// Ladder angles theta_n of the spec, largest first.
std::vector<double> lacunary_ladder(const LacunarySpec& spec);

/// Resolved comb floor in bits (applies the floor_bits = 0 default).
double lacunary_floor_bits(const LacunarySpec& spec);

/// Atomic measure avoiding {e^{i theta} : -gamma < theta <= gamma, theta != 0},
/// normalized to unit mass.  Atoms inside the gap raise DomainError.
CircleMeasure gap_measure(double gamma, std::vector<Atom> atoms);

}  // namespace ergodic
