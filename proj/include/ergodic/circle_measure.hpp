#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ergodic {

/// Point mass on the circle, angle in (-pi, pi].
struct Atom {
    double angle;
    double weight;
};

/// Density c * |theta|^(alpha - 1) on the angle interval (from, to].
/// alpha == 1 gives a constant piece.
struct PowerSegment {
    double c;
    double alpha;
    double from;
    double to;
};

enum class MeasureKind { atomic, density, mixture };

/// Finite positive Borel measure on the unit circle in angle coordinates.
///
/// Immutable after construction.  Arcs about z = 1 follow the half-open
/// convention A_eps = {e^{i theta} : -eps < theta <= eps}.
class CircleMeasure {
public:
    /// The zero measure (atomic, no atoms).
    CircleMeasure() = default;

    static CircleMeasure atomic(std::vector<Atom> atoms);
    static CircleMeasure density(std::vector<PowerSegment> segments);
    static CircleMeasure mixture(std::vector<CircleMeasure> parts);

    MeasureKind kind() const { return kind_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<PowerSegment>& segments() const { return segments_; }
    const std::vector<CircleMeasure>& parts() const { return parts_; }

    double total_mass() const;

    /// True if the measure (or some part) carries an absolutely continuous piece.
    bool has_density() const;
    /// True if some atom with positive weight sits away from angle 0.
    bool has_atoms_off_one() const;

    /// The same measure with every weight/density multiplied by factor >= 0.
    CircleMeasure scaled(double factor) const;

private:
    MeasureKind kind_ = MeasureKind::atomic;
    std::vector<Atom> atoms_;
    std::vector<PowerSegment> segments_;
    std::vector<CircleMeasure> parts_;
};

/// Maps any finite angle into (-pi, pi].
double wrap_angle(double theta);

/// mu(A_eps) for 0 < eps <= pi.  Closed form for atoms and power-law pieces.
double arc_mass(const CircleMeasure& mu, double eps);

/// mu(S_K) = mu(A_{pi/K}).
double sector_mass(const CircleMeasure& mu, double K);

/// mu({1}).
double atom_at_one(const CircleMeasure& mu);

/// (1/K^2) * integral of |D_K(theta)|^2 d mu(theta).
///
/// Exact sum over atoms; density pieces use graded panel quadrature whose
/// panel count grows linearly with K, so densities are limited to
/// K <= kMaxDensityHorizon.
double fejer_functional(const CircleMeasure& mu, double K);

inline constexpr double kMaxDensityHorizon = 16777216.0;  // 2^24

/// mu(S_1)/K^2 + (1/K^2) * sum_{j=1}^{K-1} (2j + 1) mu(S_j).
double kachurovskii_majorant(const CircleMeasure& mu, double K);

/// integral of e^{i j theta} d mu(theta) for every j in js (any order).
std::vector<std::complex<double>> fourier_coefficients(const CircleMeasure& mu,
                                                       std::span<const long long> js);

struct ScaleSample {
    double eps;
    double mass;
    double log_ratio;  // ln mu(A_eps) / ln eps; +inf when the mass vanishes
};

struct ExponentEstimate {
    static constexpr double kInfinite = std::numeric_limits<double>::infinity();

    double d_minus = kInfinite;
    double d_plus = kInfinite;
    std::vector<ScaleSample> scales;
};

/// Lower/upper pointwise exponents at z = 1 estimated as min/max of the log
/// ratios over the trailing tail_fraction of a strictly decreasing eps grid.
/// Any vanishing arc mass in the tail yields the +inf sentinel for both.
ExponentEstimate pointwise_exponents(const CircleMeasure& mu, std::span<const double> eps_grid,
                                     double tail_fraction = 0.5);

/// Number of trailing samples of a grid of size n covered by tail_fraction.
std::size_t tail_count(std::size_t n, double tail_fraction);

}  // namespace ergodic
