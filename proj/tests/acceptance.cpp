// Acceptance run: one PASS/FAIL line per criterion.  Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ergodic/circle_measure.hpp"
#include "ergodic/kernel.hpp"
#include "ergodic/measure_designer.hpp"
#include "ergodic/rate_analysis.hpp"
#include "ergodic/unitary_model.hpp"
#include "support.hpp"

using namespace ergodic;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> all_horizons(double last) {
    std::vector<double> K;
    for (double k = 1; k <= last; k += 1) K.push_back(k);
    return K;
}

std::vector<double> dyadic(int from, int to) {
    std::vector<double> K;
    for (int e = from; e <= to; ++e) K.push_back(std::ldexp(1.0, e));
    return K;
}

// Random unit vector with a random mix of fixed, near-one and generic phases.
DiagonalModel random_model(std::mt19937_64& rng, std::size_t dim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    std::vector<double> phases;
    std::vector<Complex> c;
    double norm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double pick = u(rng);
        double t = test::random_angle(rng);
        if (pick < 0.1) {
            t = 0.0;
        } else if (pick < 0.3) {
            t = (u(rng) - 0.5) * 0.02;
        }
        if (k == 0 && t == 0.0) t = 0.5;  // keep a nonfixed component
        phases.push_back(t);
        c.emplace_back(g(rng), g(rng));
        norm += std::norm(c.back());
    }
    for (Complex& z : c) z /= std::sqrt(norm);
    return {DiagonalUnitary(phases), StateVector(c)};
}

struct Tally {
    int failed = 0;
    void line(int n, bool ok, const std::string& detail) {
        std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
        std::fflush(stdout);
        failed += !ok;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Every atomic spectral measure used below also feeds the lower-bound criterion.
std::vector<CircleMeasure> g_lower_bound_atomic;
std::vector<CircleMeasure> g_lower_bound_density;

void criterion_identity(Tally& t) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> dims(1, 512);
    const std::vector<double> K = dyadic(0, 12);
    double worst = 0.0;
    bool ok = true;
    for (int m = 0; m < 200; ++m) {
        const DiagonalModel model = random_model(rng, dims(rng));
        const CircleMeasure mu = spectral_measure(model.U, nonfixed_part(model.U, model.psi));
        for (double k : K) {
            const double direct = cesaro_deviation_norm_sq(model.U, model.psi, k);
            const double spectral = fejer_functional(mu, k);
            const double rel = std::abs(direct - spectral) / std::max(std::abs(direct), std::abs(spectral));
            worst = std::max(worst, rel);
        }
        ok = ok && verify_identity(model, K).holds;
        if (m % 20 == 0) g_lower_bound_atomic.push_back(mu);
    }
    const double secs = seconds_since(t0);
    t.line(1, ok && worst <= 1e-10 && secs < 30.0,
           fmt("identity on 200 diagonal models, K = 2^0..2^12: worst relative gap %.2e (limit 1e-10), %.1f s", worst,
               secs));
}

void criterion_gap(Tally& t) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> dims(1, 64);
    const std::vector<double> K = all_horizons(1e4);
    double worst = ExponentEstimate::kInfinite;
    bool ok = true;
    for (double gamma : {0.1, 0.5, kPi / 2, 3.0}) {
        for (int m = 0; m < 50; ++m) {
            std::vector<double> phases;
            const int dim = dims(rng);
            for (int k = 0; k < dim; ++k) {
                // |theta| in [gamma, pi], excluding +gamma itself; half the models hit -gamma exactly
                double th = gamma + (kPi - gamma) * u(rng);
                if (th == gamma) th = kPi;
                phases.push_back(u(rng) < 0.5 && th != kPi ? -th : th);
            }
            if (m % 2 == 0) phases.push_back(-gamma);
            if (m % 3 == 0) phases.push_back(0.0);
            const VerificationReport r = verify_spectral_gap_bound(DiagonalUnitary(phases), gamma, K);
            // independent recomputation of the chain at every K
            for (double k : K) {
                double q = 0.0;
                for (double th : phases) {
                    if (th != 0.0) q = std::max(q, std::abs(std::sin(k * th / 2) / std::sin(th / 2)) / k);
                }
                const double sharp = 1.0 / (k * std::sin(gamma / 2));
                const double crude = 4.0 / (gamma * k);
                worst = std::min({worst, sharp - q, crude - sharp});
            }
            ok = ok && r.holds && r.worst_margin >= -1e-12;
        }
    }
    t.line(2, ok && worst >= -1e-12,
           fmt("gap bound, 200 models over gamma in {0.1, 0.5, pi/2, 3}, every K <= 10^4: worst margin %.2e", worst));
}

void criterion_majorant(Tally& t) {
    std::uniform_int_distribution<std::size_t> sizes(1, 64);
    std::mt19937_64 rng(303);
    const std::vector<double> K = all_horizons(4096);
    double worst = ExponentEstimate::kInfinite;
    for (unsigned s = 0; s < 100; ++s) {
        const CircleMeasure mu = test::random_atomic(1000 + s, sizes(rng));
        const VerificationReport r = verify_majorant(mu, K);
        worst = std::min(worst, r.worst_margin);
        if (s % 10 == 0) g_lower_bound_atomic.push_back(mu);
    }
    t.line(3, worst >= -1e-12, fmt("majorant on 100 atomic measures, every K <= 2^12: worst margin %.2e", worst));
}

void criterion_power_law(Tally& t) {
    const auto t0 = Clock::now();
    const std::vector<double> K = horizon_grid({4, 20, 2});
    bool ok = true;
    std::string detail;
    for (double alpha : {0.25, 0.5, 1.0, 1.5}) {
        const CircleMeasure mu = unit_power_law(alpha);
        const RateSeries series = decay_series(SpectralModel{mu}, K);
        const DecayExponents d = estimate_decay_exponents(series);
        ok = ok && std::abs(d.liminf_exp - alpha) <= 0.1 && std::abs(d.limsup_exp - alpha) <= 0.1;
        detail += fmt(" alpha %.2f: decay [%.3f, %.3f];", alpha, d.liminf_exp, d.limsup_exp);
        g_lower_bound_density.push_back(mu);
    }
    const double secs = seconds_since(t0);
    t.line(4, ok && secs < 120.0, fmt("power-law exponents within 0.1, K to 2^20, eps to 2^-40:%s %.1f s",
                                      detail.c_str(), secs));
}

void criterion_doubling(Tally& t) {
    const KoopmanInstance inst = KoopmanInstance::doubling({{1, Complex(1.0, 0.0)}});
    double worst = 0.0;
    for (double k = 1; k <= std::ldexp(1.0, 20); k += 1) {
        worst = std::max(worst, std::abs(koopman_deviation_norm_sq(inst, k) - 1.0 / k));
    }
    const RateSeries series = decay_series(KoopmanModel{inst}, horizon_grid({4, 20, 2}));
    const DecayExponents d = estimate_decay_exponents(series);
    const auto mu = koopman_spectral_measure(inst);
    // measure side: log-log slope of the arc masses, free of the constant's 1/|ln eps| bias
    const std::vector<double> eps = radius_grid({4, 40, 2});
    double slope_lo = ExponentEstimate::kInfinite, slope_hi = 0.0;
    for (std::size_t i = eps.size() / 2; i + 1 < eps.size(); ++i) {
        const double s = std::log(arc_mass(*mu, eps[i]) / arc_mass(*mu, eps[i + 1])) / std::log(eps[i] / eps[i + 1]);
        slope_lo = std::min(slope_lo, s);
        slope_hi = std::max(slope_hi, s);
    }
    const bool ok = worst <= 1e-12 && std::abs(d.liminf_exp - 1) <= 0.02 && std::abs(d.limsup_exp - 1) <= 0.02 &&
                    std::abs(slope_lo - 1) <= 0.02 && std::abs(slope_hi - 1) <= 0.02;
    t.line(5, ok,
           fmt("doubling map, f = e_1: max |b(K) - 1/K| = %.2e over every K <= 2^20; decay [%.4f, %.4f], "
               "measure slope [%.4f, %.4f]",
               worst, d.liminf_exp, d.limsup_exp, slope_lo, slope_hi));
    g_lower_bound_density.push_back(*mu);
}

double constant_named(const VerificationReport& r, const std::string& name) {
    for (const auto& [k, v] : r.constants) {
        if (k == name) return v;
    }
    return std::nan("");
}

void criterion_constants(Tally& t) {
    const double alpha = 0.5;
    const double c = alpha / (2.0 * std::pow(kPi, alpha));
    const CircleMeasure mu = power_law_measure(alpha, c);
    const std::vector<double> K = horizon_grid({4, 20, 2});
    const std::vector<double> eps = radius_grid({4, 40, 2});
    // lim K^alpha b(K) = c * 4 Gamma(alpha - 2) cos(pi alpha / 2); arc side 2c/alpha
    const double forward_closed = c * 4.0 * std::tgamma(alpha - 2.0) * std::cos(kPi * alpha / 2.0);
    const double reverse_closed = 2.0 * c / alpha;
    const VerificationReport fwd = verify_kachurovskii_forward(mu, alpha, K, eps);
    const VerificationReport rev = verify_kachurovskii_reverse(decay_series(SpectralModel{mu}, K), mu, alpha, eps);
    const double fwd_fit = constant_named(fwd, "tail_decay_constant");
    const double rev_fit = constant_named(rev, "tail_arc_constant");
    const double e1 = std::abs(fwd_fit / forward_closed - 1.0);
    const double e2 = std::abs(rev_fit / reverse_closed - 1.0);
    t.line(6, fwd.holds && rev.holds && e1 <= 0.05 && e2 <= 0.05,
           fmt("alpha 0.5 constants: forward %.6f vs %.6f (%.2f%%), reverse %.6f vs %.6f (%.2f%%)", fwd_fit,
               forward_closed, 100 * e1, rev_fit, reverse_closed, 100 * e2));
}

void criterion_lacunary(Tally& t) {
    LacunarySpec spec;
    spec.low_exponent = 0.2;
    spec.high_exponent = 1.8;
    spec.depth = 8;
    const CircleMeasure mu = lacunary_measure(spec);
    const std::vector<double> exps = grid_exponents({1, lacunary_floor_bits(spec), 2, 96, Spacing::geometric});
    std::vector<double> K, eps;
    for (double e : exps) {
        K.push_back(std::round(std::exp2(e)));
        eps.push_back(std::exp2(-e));
    }
    K.erase(std::unique(K.begin(), K.end()), K.end());
    const ExponentEstimate arc = pointwise_exponents(mu, eps);
    const DecayExponents d = estimate_decay_exponents(decay_series(SpectralModel{mu}, K));

    // brute-force arc masses: half-open membership summed smallest weight first
    std::vector<Atom> atoms = mu.atoms();
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.weight < b.weight; });
    double worst = 0.0;
    for (double e : eps) {
        long double brute = 0.0L;
        for (const Atom& a : atoms) {
            if (a.angle > -e && a.angle <= e) brute += a.weight;
        }
        const double closed = arc_mass(mu, e);
        worst = std::max(worst, std::abs(closed - static_cast<double>(brute)) / static_cast<double>(brute));
    }
    const double spread = arc.d_plus - arc.d_minus;
    const bool ok = spread >= 1.2 && std::abs(d.liminf_exp - arc.d_minus) <= 0.15 &&
                    std::abs(d.limsup_exp - arc.d_plus) <= 0.15 && worst <= 1e-12;
    t.line(7, ok,
           fmt("lacunary a 0.2, b 1.8, depth 8: measure [%.3f, %.3f] spread %.3f, decay [%.3f, %.3f], "
               "arc oracle gap %.1e",
               arc.d_minus, arc.d_plus, spread, d.liminf_exp, d.limsup_exp, worst));
    g_lower_bound_atomic.push_back(mu);
}

void criterion_truncation(Tally& t) {
    std::mt19937_64 rng(808);
    const std::vector<double> ns = {1, 2, 8, 32};
    const std::vector<double> K = all_horizons(16384);
    bool ok = true;
    double worst = ExponentEstimate::kInfinite;
    for (int m = 0; m < 10; ++m) {
        const DiagonalModel model = random_model(rng, 256);
        const VerificationReport r = verify_truncation(model.U, model.psi, ns, K);
        ok = ok && r.holds;
        worst = std::min(worst, r.worst_margin);
        // independent recheck of the distance ordering
        double prev = -1.0;
        for (double n : ns) {
            double dist = 0.0;
            for (std::size_t k = 0; k < 256; ++k) {
                const double th = model.U.phases()[k];
                if (th != 0.0 && th > -1.0 / n && th <= 1.0 / n) dist += std::norm(model.psi.coefficients()[k]);
            }
            ok = ok && (prev < 0.0 || dist <= prev);
            prev = dist;
        }
    }
    t.line(8, ok, fmt("truncation on 10 dim-256 models, n in {1, 2, 8, 32}, every K <= 2^14: worst margin %.2e",
                      worst));
}

void criterion_weak_decay(Tally& t) {
    bool ok = true;
    std::string detail;
    for (double alpha : {0.25, 0.5, 1.0, 1.5}) {
        const VerificationReport r = verify_weak_decay(SpectralModel{unit_power_law(alpha)});
        ok = ok && r.holds && !r.advisory;
        detail += fmt(" alpha %.2f: %.2e < %.2e;", alpha, constant_named(r, "max_high_band"),
                      constant_named(r, "max_low_band"));
    }
    const CircleMeasure point = CircleMeasure::atomic({{0.0, 0.5}, {1.3, 0.5}});
    const VerificationReport r = verify_weak_decay(SpectralModel{point});
    std::vector<long long> js;
    for (long long j = 4096; j <= 8192; ++j) js.push_back(j);
    const ProbeResult probe = weak_convergence_probe(point, js);
    ok = ok && r.advisory.has_value() && probe.advisory.has_value();
    t.line(9, ok, fmt("weak decay:%s point spectrum advisory %s", detail.c_str(), probe.advisory ? "emitted" : "missing"));
}

void criterion_lower_bound(Tally& t) {
    double worst = ExponentEstimate::kInfinite;
    const std::vector<double> every = all_horizons(4096);
    for (const CircleMeasure& mu : g_lower_bound_atomic) {
        const RateSeries s = decay_series(SpectralModel{mu}, every);
        worst = std::min(worst, verify_lower_bound(mu, s).worst_margin);
    }
    // densities use a geometric grid of 97 horizons instead of all 4096
    const std::vector<double> K = horizon_grid({0, 12, 2, 97, Spacing::linear});
    for (const CircleMeasure& mu : g_lower_bound_density) {
        worst = std::min(worst, verify_lower_bound(mu, decay_series(SpectralModel{mu}, K)).worst_margin);
    }
    t.line(10, worst >= -1e-12,
           fmt("lower bound over %zu atomic and %zu density models, K <= 2^12: worst margin %.2e",
               g_lower_bound_atomic.size(), g_lower_bound_density.size(), worst));
}

}  // namespace

int main() {
    Tally t;
    const std::vector<std::function<void(Tally&)>> criteria = {
        criterion_identity, criterion_gap,       criterion_majorant,   criterion_power_law,   criterion_doubling,
        criterion_constants, criterion_lacunary, criterion_truncation, criterion_weak_decay, criterion_lower_bound,
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i](t);
        } catch (const std::exception& e) {
            t.line(static_cast<int>(i + 1), false, std::string("raised ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", t.failed, criteria.size());
    return t.failed;
}
