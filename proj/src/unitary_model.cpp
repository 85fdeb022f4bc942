#include "ergodic/unitary_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "ergodic/errors.hpp"
#include "ergodic/kernel.hpp"

namespace ergodic {

namespace {

constexpr long long kMaxFrequency = 1LL << 62;

void require_same_dimension(const DiagonalUnitary& U, const StateVector& psi) {
    if (U.dimension() != psi.dimension()) {
        std::ostringstream m;
        m << "dimension mismatch: operator has " << U.dimension() << " phases, vector has "
          << psi.dimension() << " coefficients";
        throw UsageError(m.str());
    }
}

// e^{ix} - 1 without cancellation for small x.
Complex expm1_i(double x) {
    const double s = std::sin(0.5 * x);
    return {-2.0 * s * s, std::sin(x)};
}

// (1/K) (e^{iK theta} - 1) / (e^{i theta} - 1), the eigenvalue of the Cesaro average.
Complex cesaro_symbol(double theta, double K) {
    if (theta == 0.0) return 1.0;
    return expm1_i(K * theta) / (K * expm1_i(theta));
}

// frac(x) in [0, 1).
double frac(double x) { return x - std::floor(x); }

Complex unit_turns(double turns) {
    const double t = 2.0 * kPi * frac(turns);
    return std::polar(1.0, t);
}

bool is_power_of_two_ratio(long long n, long long m, long long j) {
    if (j < 0 || j >= 62 || m % n != 0) return false;
    return m / n == (1LL << j);
}

CircleMeasure drop_atom_at_one(const CircleMeasure& mu) {
    switch (mu.kind()) {
        case MeasureKind::atomic: {
            std::vector<Atom> kept;
            for (const Atom& a : mu.atoms()) {
                if (a.angle != 0.0) kept.push_back(a);
            }
            return CircleMeasure::atomic(std::move(kept));
        }
        case MeasureKind::density:
            return mu;
        case MeasureKind::mixture: {
            std::vector<CircleMeasure> parts;
            for (const CircleMeasure& p : mu.parts()) parts.push_back(drop_atom_at_one(p));
            return CircleMeasure::mixture(std::move(parts));
        }
    }
    return mu;
}

// Nonzero correlations of a doubling orbit at lags d >= 1.
std::map<long long, Complex> doubling_lags(const KoopmanInstance& inst) {
    std::map<long long, Complex> lags;
    for (const FourierMode& a : inst.observable()) {
        if (a.frequency == 0) continue;
        for (const FourierMode& b : inst.observable()) {
            if (b.frequency == 0 || b.frequency % a.frequency != 0) continue;
            const long long q = b.frequency / a.frequency;
            if (q < 2 || (q & (q - 1)) != 0) continue;
            lags[std::countr_zero(static_cast<unsigned long long>(q))] += a.amplitude * std::conj(b.amplitude);
        }
    }
    return lags;
}

double nonconstant_energy(const KoopmanInstance& inst) {
    double e = 0.0;
    for (const FourierMode& a : inst.observable()) {
        if (a.frequency != 0) e += std::norm(a.amplitude);
    }
    return e;
}

}  // namespace

DiagonalUnitary::DiagonalUnitary(std::vector<double> eigenphases) : phases_(std::move(eigenphases)) {
    if (phases_.empty()) throw UsageError("unitary needs at least one eigenphase");
    for (double t : phases_) {
        if (!std::isfinite(t) || !(t > -kPi) || t > kPi) {
            throw DomainError("eigenphase " + std::to_string(t) + " outside (-pi, pi]");
        }
    }
}

StateVector::StateVector(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
    for (const Complex& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw DomainError("state vector coefficients must be finite");
        }
    }
}

double StateVector::norm_sq() const {
    double s = 0.0;
    for (const Complex& c : coeffs_) s += std::norm(c);
    return s;
}

CircleMeasure spectral_measure(const DiagonalUnitary& U, const StateVector& psi) {
    require_same_dimension(U, psi);
    std::map<double, double> merged;
    for (std::size_t k = 0; k < U.dimension(); ++k) {
        const double w = std::norm(psi.coefficients()[k]);
        if (w > 0.0) merged[U.phases()[k]] += w;
    }
    std::vector<Atom> atoms;
    for (const auto& [angle, weight] : merged) atoms.push_back({angle, weight});
    return CircleMeasure::atomic(std::move(atoms));
}

StateVector fixed_part(const DiagonalUnitary& U, const StateVector& psi) {
    require_same_dimension(U, psi);
    std::vector<Complex> c(psi.dimension(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (U.phases()[k] == 0.0) c[k] = psi.coefficients()[k];
    }
    return StateVector(std::move(c));
}

StateVector nonfixed_part(const DiagonalUnitary& U, const StateVector& psi) {
    require_same_dimension(U, psi);
    std::vector<Complex> c = psi.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (U.phases()[k] == 0.0) c[k] = 0.0;
    }
    return StateVector(std::move(c));
}

StateVector cesaro_average(const DiagonalUnitary& U, const StateVector& psi, double K) {
    require_same_dimension(U, psi);
    require_horizon(K);
    std::vector<Complex> c = psi.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= cesaro_symbol(U.phases()[k], K);
    return StateVector(std::move(c));
}

double cesaro_deviation_norm_sq(const DiagonalUnitary& U, const StateVector& psi, double K) {
    const StateVector avg = cesaro_average(U, psi, K);
    const StateVector star = fixed_part(U, psi);
    double s = 0.0;
    for (std::size_t k = 0; k < avg.dimension(); ++k) {
        s += std::norm(avg.coefficients()[k] - star.coefficients()[k]);
    }
    return s;
}

Complex correlation(const DiagonalUnitary& U, const StateVector& psi, long long j) {
    require_same_dimension(U, psi);
    Complex s = 0.0;
    for (std::size_t k = 0; k < U.dimension(); ++k) {
        const double t = U.phases()[k];
        if (t == 0.0) continue;
        const double x = std::remainder(static_cast<double>(j) * t, 2.0 * kPi);
        s += std::norm(psi.coefficients()[k]) * std::polar(1.0, x);
    }
    return s;
}

double deviation_from_correlations(const std::function<Complex(long long)>& c, long long K) {
    if (K < 1) throw DomainError("horizon K must be a positive integer");
    const double k = static_cast<double>(K);
    double s = c(0).real() * k;
    for (long long d = 1; d < K; ++d) s += 2.0 * static_cast<double>(K - d) * c(d).real();
    return std::max(0.0, s / (k * k));
}

KoopmanInstance::KoopmanInstance(MapKind map, double alpha, std::vector<FourierMode> modes)
    : map_(map), alpha_(alpha) {
    std::map<long long, Complex> merged;
    for (const FourierMode& m : modes) {
        if (m.frequency > kMaxFrequency || m.frequency < -kMaxFrequency) {
            throw DomainError("observable frequency " + std::to_string(m.frequency) + " out of range");
        }
        if (!std::isfinite(m.amplitude.real()) || !std::isfinite(m.amplitude.imag())) {
            throw DomainError("observable amplitudes must be finite");
        }
        merged[m.frequency] += m.amplitude;
    }
    for (const auto& [freq, amp] : merged) {
        if (amp != Complex(0.0)) modes_.push_back({freq, amp});
    }
}

KoopmanInstance KoopmanInstance::rotation(double alpha, std::vector<FourierMode> observable) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("rotation number must lie in (0, 1)");
    return KoopmanInstance(MapKind::rotation, alpha, std::move(observable));
}

KoopmanInstance KoopmanInstance::doubling(std::vector<FourierMode> observable) {
    return KoopmanInstance(MapKind::doubling, 0.0, std::move(observable));
}

KoopmanInstance KoopmanInstance::bernoulli(std::vector<FourierMode> observable) {
    return KoopmanInstance(MapKind::bernoulli, 0.0, std::move(observable));
}

Complex koopman_correlation(const KoopmanInstance& inst, long long j) {
    if (j < 0) return std::conj(koopman_correlation(inst, -j));
    Complex s = 0.0;
    if (inst.map() == MapKind::rotation) {
        for (const FourierMode& a : inst.observable()) {
            if (a.frequency == 0) continue;
            // e^{2 pi i j n alpha}, reducing n alpha before scaling by j.
            const double turns = frac(static_cast<double>(a.frequency) * inst.alpha());
            s += std::norm(a.amplitude) * unit_turns(static_cast<double>(j) * turns);
        }
        return s;
    }
    for (const FourierMode& a : inst.observable()) {
        if (a.frequency == 0) continue;
        for (const FourierMode& b : inst.observable()) {
            if (b.frequency == 0) continue;
            if (j == 0 ? a.frequency == b.frequency : is_power_of_two_ratio(a.frequency, b.frequency, j)) {
                s += a.amplitude * std::conj(b.amplitude);
            }
        }
    }
    return s;
}

double koopman_deviation_norm_sq(const KoopmanInstance& inst, double K) {
    require_horizon(K);
    if (inst.map() == MapKind::rotation) {
        double s = 0.0;
        for (const FourierMode& a : inst.observable()) {
            if (a.frequency == 0) continue;
            const double theta = wrap_angle(2.0 * kPi * frac(static_cast<double>(a.frequency) * inst.alpha()));
            s += std::norm(a.amplitude) * fejer_kernel(theta, K);
        }
        return s;
    }
    double s = nonconstant_energy(inst) / K;
    for (const auto& [d, c] : doubling_lags(inst)) {
        const double lag = static_cast<double>(d);
        if (lag < K) s += 2.0 * ((K - lag) / K) * (c.real() / K);
    }
    return std::max(0.0, s);
}

std::optional<CircleMeasure> koopman_spectral_measure(const KoopmanInstance& inst) {
    if (inst.map() == MapKind::rotation) {
        std::vector<Atom> atoms;
        for (const FourierMode& a : inst.observable()) {
            if (a.frequency == 0) continue;
            atoms.push_back({wrap_angle(2.0 * kPi * frac(static_cast<double>(a.frequency) * inst.alpha())),
                             std::norm(a.amplitude)});
        }
        return CircleMeasure::atomic(std::move(atoms));
    }
    for (const auto& [d, c] : doubling_lags(inst)) {
        if (c != Complex(0.0)) return std::nullopt;
    }
    const double e = nonconstant_energy(inst);
    if (e == 0.0) return CircleMeasure{};
    return CircleMeasure::density({{e / (2.0 * kPi), 1.0, -kPi, kPi}});
}

ProbeResult weak_convergence_probe(const CircleMeasure& mu, std::span<const long long> js) {
    ProbeResult out;
    const CircleMeasure probed = drop_atom_at_one(mu);
    for (const Complex& c : fourier_coefficients(probed, js)) out.magnitudes.push_back(std::abs(c));
    if (probed.has_atoms_off_one()) {
        out.advisory = "no decay expected: atoms away from z = 1 keep the correlations almost periodic";
    }
    return out;
}

}  // namespace ergodic
