#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergodic/circle_measure.hpp"
#include "ergodic/unitary_model.hpp"

namespace ergodic {

inline constexpr double kIdentityTolerance = 1e-10;  // relative
inline constexpr double kMarginTolerance = 1e-12;    // absolute
inline constexpr double kExponentTolerance = 0.1;

// ---------------------------------------------------------------- grids

enum class Spacing { linear, geometric };

/// Exponents e spanning [min_exp, max_exp].  count == 0 steps e by 1 from
/// min_exp; otherwise count points are spaced linearly or geometrically.
struct GridSpec {
    double min_exp = 4;
    double max_exp = 20;
    double base = 2;
    int count = 0;
    Spacing spacing = Spacing::linear;
};

std::vector<double> grid_exponents(const GridSpec& spec);

/// K = round(base^e), strictly increasing, duplicates removed.
std::vector<double> horizon_grid(const GridSpec& spec);

/// eps = base^-e restricted to (0, pi], strictly decreasing.
std::vector<double> radius_grid(const GridSpec& spec);

// ---------------------------------------------------------------- models

/// A vector known only through its spectral measure mu_{psi - psi*}.
struct SpectralModel {
    CircleMeasure mu;
};

struct DiagonalModel {
    DiagonalUnitary U;
    StateVector psi;
};

struct KoopmanModel {
    KoopmanInstance instance;
};

using Model = std::variant<SpectralModel, DiagonalModel, KoopmanModel>;

/// b(K) by the model's exact route.
double model_deviation(const Model& model, double K);

/// mu_{psi - psi*} when representable.
std::optional<CircleMeasure> model_spectral_measure(const Model& model);

/// Diagonal model with one eigenphase per atom and amplitude sqrt(weight).
DiagonalModel diagonal_realization(const CircleMeasure& atomic);

// ---------------------------------------------------------------- series

struct RatePoint {
    double K;
    double b;
};

struct RateSeries {
    std::vector<RatePoint> entries;
};

/// ln b / -ln K, +inf for b == 0, NaN at K == 1.
double decay_log_ratio(const RatePoint& p);

/// Throws UsageError unless K_grid is nonempty, strictly increasing, integral.
RateSeries decay_series(const Model& model, std::span<const double> K_grid);

struct DecayExponents {
    double liminf_exp = ExponentEstimate::kInfinite;
    double limsup_exp = ExponentEstimate::kInfinite;
    std::vector<std::pair<double, double>> per_K;
    std::optional<std::string> advisory;
};

DecayExponents estimate_decay_exponents(const RateSeries& series, double tail_fraction = 0.5);

// ---------------------------------------------------------------- reports

struct VerificationReport {
    std::string claim;
    bool holds = true;
    double worst_margin = ExponentEstimate::kInfinite;
    /// Grid point (K, eps, n or m) at the worst margin; NaN when nothing was compared.
    double witness = std::numeric_limits<double>::quiet_NaN();
    std::string witness_kind;
    std::vector<std::pair<std::string, double>> constants;
    std::optional<std::string> advisory;

    /// Folds one comparison in; ties keep the smaller witness.
    void record(double margin, double at);
    /// Sets holds from worst_margin and the tolerance.
    void settle(double tolerance = kMarginTolerance);
    void add_constant(std::string name, double value) { constants.emplace_back(std::move(name), value); }
};

/// Limit of K^alpha * fejer_functional for the density c|theta|^(alpha - 1).
double power_law_decay_constant(double c, double alpha);

/// Cesaro averages of a unitary whose spectrum off 1 avoids (-gamma, gamma]:
/// max |D_K(theta)|/K <= 1/(K sin(gamma/2)) <= 4/(gamma K) for every K.
VerificationReport verify_spectral_gap_bound(std::span<const double> phases, double gamma,
                                             std::span<const double> K_grid);
VerificationReport verify_spectral_gap_bound(const DiagonalUnitary& U, double gamma,
                                             std::span<const double> K_grid);

/// Largest value of f over the trailing quarter compared with the rest of the grid.
struct StabilityProbe {
    double head_max;
    double tail_max;
    std::size_t argmax;  // index of the overall maximum
    bool stable;         // tail_max <= 2 * head_max
};
StabilityProbe probe_stability(std::span<const double> values);

/// Arc bound mu(A_eps) <= C eps^alpha on eps_grid implies b(K) <= C~ / K^alpha.
VerificationReport verify_kachurovskii_forward(const CircleMeasure& mu, double alpha,
                                               std::span<const double> K_grid,
                                               std::span<const double> eps_grid);

/// Decay bound b(K) <= C / K^alpha on the series implies mu(A_eps) <= C~ eps^alpha.
VerificationReport verify_kachurovskii_reverse(const RateSeries& series, const CircleMeasure& mu,
                                               double alpha, std::span<const double> eps_grid);

/// psi_n: coefficients with -1/n < theta <= 1/n, theta != 0, removed.
StateVector truncate_near_one(const DiagonalUnitary& U, const StateVector& psi, double n);

/// b_{psi_n}(K) <= 16 n^2 ||psi_n||^2 / K^2 on the grid.
VerificationReport truncation_construction(const DiagonalUnitary& U, const StateVector& psi, double n,
                                           std::span<const double> K_grid);

/// truncation_construction for every n plus ||psi - psi_n|| nonincreasing in n.
VerificationReport verify_truncation(const DiagonalUnitary& U, const StateVector& psi,
                                     std::span<const double> ns, std::span<const double> K_grid);

/// psi_m = psi + eta/m with eta orthogonal to psi, so mu_{psi_m} = mu_psi + mu_eta / m^2.
///
/// For each m checks the chain sqrt(b_m) >= sqrt(b_eta)/m - sqrt(b_psi) at every K
/// and that K^eps b_m(K) grows by growth_factor from its minimum to the last K.
VerificationReport perturbation_construction(const CircleMeasure& mu_psi, const CircleMeasure& mu_eta,
                                             double eps, std::span<const double> m_grid,
                                             std::span<const double> K_grid,
                                             double growth_factor = 2.0);

struct CorollaryOptions {
    double property_eps = 0.25;  // properties read as liminf exp <= eps, limsup exp >= 2 - eps
    double tolerance = 0.1;
    double tail_fraction = 0.5;
};

/// When the series shows slow-along-a-subsequence and fast-along-a-subsequence
/// decay, the measure must have d- <= tol and d+ >= 2 - tol.
VerificationReport corollary_check(const CircleMeasure& mu, const RateSeries& series,
                                   std::span<const double> eps_grid, const CorollaryOptions& opts = {});

/// Decay exponents of the series against pointwise exponents of mu.
VerificationReport verify_exponent_match(const CircleMeasure& mu, const RateSeries& series,
                                         std::span<const double> eps_grid,
                                         double tolerance = kExponentTolerance,
                                         double tail_fraction = 0.5);

/// Direct b(K) against an independent route: the Fejer functional of the
/// spectral measure for finite models, the correlation double sum otherwise.
/// Density measures compare against Fourier coefficients for K <= 4096 only.
VerificationReport verify_identity(const Model& model, std::span<const double> K_grid);

/// b(K) decreases toward 0: the last-quarter maximum stays below the
/// first-quarter maximum; finite models also check the kernel bound
/// b(K) <= max_{theta != 0} |D_K(theta)|^2/K^2 * ||psi - psi*||^2.
VerificationReport verify_vnet(const Model& model, std::span<const double> K_grid);

/// fejer_functional(mu, K) <= kachurovskii_majorant(mu, K).
VerificationReport verify_majorant(const CircleMeasure& mu, std::span<const double> K_grid);

/// b(K) >= mu(A_{1/(2K)}) / 4 for every entry of the series.
VerificationReport verify_lower_bound(const CircleMeasure& mu, const RateSeries& series);

/// max |corr(j)| over j in [2^12, 2^13] below the maximum over [2^4, 2^5].
/// Spectra with atoms away from 1 get an advisory instead of a verdict.
VerificationReport verify_weak_decay(const Model& model);

}  // namespace ergodic
