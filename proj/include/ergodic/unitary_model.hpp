#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergodic/circle_measure.hpp"

namespace ergodic {

using Complex = std::complex<double>;

/// Unitary operator diagonal in a fixed orthonormal basis.
class DiagonalUnitary {
public:
    explicit DiagonalUnitary(std::vector<double> eigenphases);

    const std::vector<double>& phases() const { return phases_; }
    std::size_t dimension() const { return phases_.size(); }

private:
    std::vector<double> phases_;
};

/// Coefficients in the eigenbasis of a DiagonalUnitary.
class StateVector {
public:
    explicit StateVector(std::vector<Complex> coefficients);

    const std::vector<Complex>& coefficients() const { return coeffs_; }
    std::size_t dimension() const { return coeffs_.size(); }
    double norm_sq() const;

private:
    std::vector<Complex> coeffs_;
};

/// Atomic measure sum_k |c_k|^2 delta_{theta_k}, repeated phases coalesced.
CircleMeasure spectral_measure(const DiagonalUnitary& U, const StateVector& psi);

/// Projection onto the eigenvalue-1 eigenspace.
StateVector fixed_part(const DiagonalUnitary& U, const StateVector& psi);

/// psi - fixed_part(U, psi).
StateVector nonfixed_part(const DiagonalUnitary& U, const StateVector& psi);

/// (1/K) sum_{j<K} U^j psi, evaluated per eigenphase by the geometric series.
StateVector cesaro_average(const DiagonalUnitary& U, const StateVector& psi, double K);

/// || (1/K) sum_{j<K} U^j psi - psi* ||^2.
double cesaro_deviation_norm_sq(const DiagonalUnitary& U, const StateVector& psi, double K);

/// <L^j psi, psi> = sum over theta_k != 0 of |c_k|^2 e^{i j theta_k}.
Complex correlation(const DiagonalUnitary& U, const StateVector& psi, long long j);

/// (1/K^2) sum_{j,l<K} c(j - l) for a correlation sequence with c(-d) = conj(c(d)).
double deviation_from_correlations(const std::function<Complex(long long)>& c, long long K);

enum class MapKind { rotation, doubling, bernoulli };

struct FourierMode {
    long long frequency;
    Complex amplitude;
};

/// Koopman operator of a circle map acting on a finite Fourier sum.
///
/// The one-sided (1/2, 1/2) Bernoulli shift is realized through its
/// isomorphism with the doubling map, so both act by n -> 2n on frequencies.
class KoopmanInstance {
public:
    static KoopmanInstance rotation(double alpha, std::vector<FourierMode> observable);
    static KoopmanInstance doubling(std::vector<FourierMode> observable);
    static KoopmanInstance bernoulli(std::vector<FourierMode> observable);

    MapKind map() const { return map_; }
    double alpha() const { return alpha_; }
    /// Modes with distinct frequencies, zero amplitudes dropped.
    const std::vector<FourierMode>& observable() const { return modes_; }

private:
    KoopmanInstance(MapKind map, double alpha, std::vector<FourierMode> modes);

    MapKind map_;
    double alpha_;
    std::vector<FourierMode> modes_;
};

/// <U^j f - f*, f - f*> with the zero-frequency mode as f*; negative j conjugates.
Complex koopman_correlation(const KoopmanInstance& inst, long long j);

/// Cesaro deviation of the Koopman orbit of the observable.
double koopman_deviation_norm_sq(const KoopmanInstance& inst, double K);

/// Spectral measure of f - f* when it is expressible as a CircleMeasure:
/// atomic for rotations, a multiple of Lebesgue measure for doubling orbits
/// whose nonzero correlations all vanish.  Empty otherwise.
std::optional<CircleMeasure> koopman_spectral_measure(const KoopmanInstance& inst);

struct ProbeResult {
    std::vector<double> magnitudes;
    std::optional<std::string> advisory;
};

/// |mu_hat(j)| for each j, ignoring any atom at angle 0.  Atoms elsewhere carry
/// no Riemann-Lebesgue decay and are reported through the advisory.
ProbeResult weak_convergence_probe(const CircleMeasure& mu, std::span<const long long> js);

}  // namespace ergodic
