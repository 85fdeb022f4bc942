#include "ergodic/rate_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergodic/errors.hpp"
#include "ergodic/kernel.hpp"

namespace ergodic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double max_of(std::span<const double> v) {
    double m = -ExponentEstimate::kInfinite;
    for (double x : v) m = std::max(m, x);
    return m;
}

VerificationReport new_report(std::string claim, std::string witness_kind) {
    VerificationReport r;
    r.claim = std::move(claim);
    r.witness_kind = std::move(witness_kind);
    return r;
}

std::string number(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

}  // namespace

// ---------------------------------------------------------------- grids

std::vector<double> grid_exponents(const GridSpec& spec) {
    if (!std::isfinite(spec.min_exp) || !std::isfinite(spec.max_exp) || spec.max_exp < spec.min_exp) {
        throw UsageError("grid needs finite min_exp <= max_exp");
    }
    if (!(spec.base > 1.0) || !std::isfinite(spec.base)) throw UsageError("grid base must exceed 1");
    std::vector<double> e;
    if (spec.count == 0) {
        for (double x = spec.min_exp; x <= spec.max_exp + 1e-9; x += 1.0) e.push_back(x);
        return e;
    }
    if (spec.count < 1) throw UsageError("grid count must be positive");
    if (spec.count == 1) return {spec.min_exp};
    const double n = spec.count - 1;
    if (spec.spacing == Spacing::geometric) {
        if (!(spec.min_exp > 0.0)) throw UsageError("geometric exponent spacing needs min_exp > 0");
        const double r = std::log(spec.max_exp / spec.min_exp);
        for (int i = 0; i < spec.count; ++i) e.push_back(spec.min_exp * std::exp(r * i / n));
    } else {
        for (int i = 0; i < spec.count; ++i) {
            e.push_back(spec.min_exp + (spec.max_exp - spec.min_exp) * i / n);
        }
    }
    e.back() = spec.max_exp;
    return e;
}

std::vector<double> horizon_grid(const GridSpec& spec) {
    std::vector<double> K;
    for (double e : grid_exponents(spec)) {
        const double k = std::round(std::pow(spec.base, e));
        if (!(k >= 1.0) || !std::isfinite(k)) {
            throw UsageError("horizon " + number(spec.base) + "^" + number(e) + " is not a usable integer");
        }
        if (K.empty() || k > K.back()) K.push_back(k);
    }
    return K;
}

std::vector<double> radius_grid(const GridSpec& spec) {
    std::vector<double> eps;
    for (double e : grid_exponents(spec)) {
        const double r = std::pow(spec.base, -e);
        if (!(r > 0.0)) throw UsageError("radius " + number(spec.base) + "^-" + number(e) + " underflows");
        if (r > kPi) continue;
        if (eps.empty() || r < eps.back()) eps.push_back(r);
    }
    if (eps.empty()) throw UsageError("radius grid has no value in (0, pi]");
    return eps;
}

// ---------------------------------------------------------------- models

double model_deviation(const Model& model, double K) {
    return std::visit(overloaded{
                          [&](const SpectralModel& m) { return fejer_functional(m.mu, K); },
                          [&](const DiagonalModel& m) { return cesaro_deviation_norm_sq(m.U, m.psi, K); },
                          [&](const KoopmanModel& m) { return koopman_deviation_norm_sq(m.instance, K); },
                      },
                      model);
}

std::optional<CircleMeasure> model_spectral_measure(const Model& model) {
    return std::visit(overloaded{
                          [](const SpectralModel& m) -> std::optional<CircleMeasure> { return m.mu; },
                          [](const DiagonalModel& m) -> std::optional<CircleMeasure> {
                              return spectral_measure(m.U, nonfixed_part(m.U, m.psi));
                          },
                          [](const KoopmanModel& m) { return koopman_spectral_measure(m.instance); },
                      },
                      model);
}

DiagonalModel diagonal_realization(const CircleMeasure& atomic) {
    if (atomic.kind() != MeasureKind::atomic) {
        throw UsageError("only atomic measures have a finite diagonal realization");
    }
    std::vector<double> phases;
    std::vector<Complex> coeffs;
    for (const Atom& a : atomic.atoms()) {
        phases.push_back(a.angle);
        coeffs.emplace_back(std::sqrt(a.weight), 0.0);
    }
    if (phases.empty()) {
        phases.push_back(0.0);
        coeffs.emplace_back(0.0, 0.0);
    }
    return {DiagonalUnitary(std::move(phases)), StateVector(std::move(coeffs))};
}

// ---------------------------------------------------------------- series

double decay_log_ratio(const RatePoint& p) {
    if (p.K == 1.0) return std::nan("");
    if (p.b <= 0.0) return ExponentEstimate::kInfinite;
    return std::log(p.b) / -std::log(p.K);
}

RateSeries decay_series(const Model& model, std::span<const double> K_grid) {
    if (K_grid.empty()) throw UsageError("K grid is empty");
    RateSeries s;
    for (std::size_t i = 0; i < K_grid.size(); ++i) {
        require_horizon(K_grid[i]);
        if (i > 0 && !(K_grid[i] > K_grid[i - 1])) throw UsageError("K grid must be strictly increasing");
        s.entries.push_back({K_grid[i], model_deviation(model, K_grid[i])});
    }
    return s;
}

DecayExponents estimate_decay_exponents(const RateSeries& series, double tail_fraction) {
    if (series.entries.empty()) throw UsageError("decay series is empty");
    DecayExponents out;
    for (const RatePoint& p : series.entries) out.per_K.emplace_back(p.K, decay_log_ratio(p));
    const std::size_t n = out.per_K.size();
    const std::size_t tail = tail_count(n, tail_fraction);
    double lo = ExponentEstimate::kInfinite;
    double hi = -ExponentEstimate::kInfinite;
    bool all_zero = true;
    for (std::size_t i = n - tail; i < n; ++i) {
        const double r = out.per_K[i].second;
        if (series.entries[i].b > 0.0) all_zero = false;
        if (std::isnan(r)) continue;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (all_zero) {
        out.advisory = "series vanishes on the tail; both exponents are +inf";
        return out;
    }
    if (hi < lo) {
        out.advisory = "no usable tail entry (K = 1 only)";
        return out;
    }
    out.liminf_exp = lo;
    out.limsup_exp = hi;
    return out;
}

// ---------------------------------------------------------------- reports

void VerificationReport::record(double margin, double at) {
    if (std::isnan(margin)) return;
    if (margin < worst_margin || (margin == worst_margin && (std::isnan(witness) || at < witness))) {
        worst_margin = margin;
        witness = at;
    }
}

void VerificationReport::settle(double tolerance) { holds = !(worst_margin < -tolerance); }

double power_law_decay_constant(double c, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) throw DomainError("decay constant needs 0 < alpha < 2");
    if (alpha == 1.0) return 2.0 * kPi * c;
    return c * 4.0 * std::tgamma(alpha - 2.0) * std::cos(0.5 * kPi * alpha);
}

VerificationReport verify_spectral_gap_bound(std::span<const double> phases, double gamma,
                                             std::span<const double> K_grid) {
    if (!(gamma > 0.0) || !(gamma < kPi)) throw DomainError("gap gamma must lie in (0, pi)");
    for (double t : phases) {
        if (t != 0.0 && t > -gamma && t <= gamma) {
            throw UsageError("spectrum has phase " + number(t) + " inside the gap (-" + number(gamma) + ", " +
                             number(gamma) + "]");
        }
    }
    VerificationReport r = new_report("thm12_gap_bound", "K");
    const double s = std::sin(0.5 * gamma);
    double sup_scaled = 0.0;
    for (double K : K_grid) {
        require_horizon(K);
        double q = 0.0;
        for (double t : phases) {
            if (t != 0.0) q = std::max(q, std::abs(dirichlet_ratio(t, K)));
        }
        const double sharp = 1.0 / (K * s);
        const double crude = 4.0 / (gamma * K);
        r.record(sharp - q, K);
        r.record(crude - sharp, K);
        sup_scaled = std::max(sup_scaled, K * q);
    }
    r.add_constant("gamma", gamma);
    r.add_constant("max_K_times_quantity", sup_scaled);
    r.add_constant("sharp_constant", 1.0 / s);
    r.add_constant("crude_constant", 4.0 / gamma);
    r.settle();
    return r;
}

VerificationReport verify_spectral_gap_bound(const DiagonalUnitary& U, double gamma,
                                             std::span<const double> K_grid) {
    return verify_spectral_gap_bound(std::span<const double>(U.phases()), gamma, K_grid);
}

StabilityProbe probe_stability(std::span<const double> values) {
    if (values.empty()) throw UsageError("stability probe needs values");
    const std::size_t n = values.size();
    const std::size_t tail = n >= 2 ? std::min(n - 1, tail_count(n, 0.25)) : 0;
    StabilityProbe p{};
    p.tail_max = max_of(values.subspan(n - tail));
    p.head_max = max_of(values.first(n - tail));
    if (tail == 0) p.tail_max = p.head_max;
    p.argmax = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    p.stable = std::isfinite(p.tail_max) && std::isfinite(p.head_max) && p.tail_max <= 2.0 * p.head_max;
    return p;
}

namespace {

double stability_margin(const StabilityProbe& p) {
    if (!std::isfinite(p.tail_max) || !std::isfinite(p.head_max)) return -ExponentEstimate::kInfinite;
    if (p.tail_max <= 0.0) return 1.0;
    if (p.head_max <= 0.0) return -1.0;
    return 1.0 - p.tail_max / (2.0 * p.head_max);
}

}  // namespace

VerificationReport verify_kachurovskii_forward(const CircleMeasure& mu, double alpha,
                                               std::span<const double> K_grid,
                                               std::span<const double> eps_grid) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) throw DomainError("forward check needs 0 < alpha < 2");
    if (eps_grid.empty() || K_grid.empty()) throw UsageError("forward check needs K and eps grids");
    VerificationReport r = new_report("thm15_forward", "");

    std::vector<double> arc;
    for (double eps : eps_grid) arc.push_back(arc_mass(mu, eps) / std::pow(eps, alpha));
    const StabilityProbe arc_probe = probe_stability(arc);
    r.add_constant("arc_constant", max_of(arc));
    if (!arc_probe.stable) {
        r.witness_kind = "eps";
        r.record(stability_margin(arc_probe), eps_grid[arc_probe.argmax]);
        r.holds = false;
        r.advisory = "arc-bound precondition fails: eps^-alpha mu(A_eps) keeps growing, peak at eps = " +
                     number(eps_grid[arc_probe.argmax]);
        return r;
    }

    std::vector<double> scaled;
    for (double K : K_grid) {
        require_horizon(K);
        scaled.push_back(std::pow(K, alpha) * fejer_functional(mu, K));
    }
    const StabilityProbe p = probe_stability(scaled);
    r.witness_kind = "K";
    r.record(stability_margin(p), K_grid[p.argmax]);
    r.add_constant("decay_constant", max_of(scaled));
    r.add_constant("tail_decay_constant", p.tail_max);
    r.settle(0.0);
    return r;
}

VerificationReport verify_kachurovskii_reverse(const RateSeries& series, const CircleMeasure& mu, double alpha,
                                               std::span<const double> eps_grid) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) throw DomainError("reverse check needs 0 < alpha < 2");
    if (series.entries.empty() || eps_grid.empty()) throw UsageError("reverse check needs a series and eps grid");
    VerificationReport r = new_report("thm15_reverse", "");

    std::vector<double> scaled;
    for (const RatePoint& p : series.entries) scaled.push_back(std::pow(p.K, alpha) * p.b);
    const StabilityProbe decay_probe = probe_stability(scaled);
    r.add_constant("decay_constant", max_of(scaled));
    if (!decay_probe.stable) {
        r.witness_kind = "K";
        r.record(stability_margin(decay_probe), series.entries[decay_probe.argmax].K);
        r.holds = false;
        r.advisory = "decay-bound precondition fails: K^alpha b(K) keeps growing, peak at K = " +
                     number(series.entries[decay_probe.argmax].K);
        return r;
    }

    std::vector<double> arc;
    for (double eps : eps_grid) arc.push_back(arc_mass(mu, eps) / std::pow(eps, alpha));
    const StabilityProbe p = probe_stability(arc);
    r.witness_kind = "eps";
    r.record(stability_margin(p), eps_grid[p.argmax]);
    r.add_constant("arc_constant", max_of(arc));
    r.add_constant("tail_arc_constant", p.tail_max);
    r.settle(0.0);
    return r;
}

StateVector truncate_near_one(const DiagonalUnitary& U, const StateVector& psi, double n) {
    if (!(n >= 1.0)) throw DomainError("truncation index n must be at least 1");
    if (U.dimension() != psi.dimension()) throw UsageError("dimension mismatch in truncation");
    std::vector<Complex> c = psi.coefficients();
    const double r = 1.0 / n;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double t = U.phases()[k];
        if (t != 0.0 && t > -r && t <= r) c[k] = 0.0;
    }
    return StateVector(std::move(c));
}

VerificationReport truncation_construction(const DiagonalUnitary& U, const StateVector& psi, double n,
                                           std::span<const double> K_grid) {
    VerificationReport r = new_report("thm17_truncation", "K");
    const StateVector psi_n = truncate_near_one(U, psi, n);
    const double norm_sq = psi_n.norm_sq();
    for (double K : K_grid) {
        const double b = cesaro_deviation_norm_sq(U, psi_n, K);
        r.record(16.0 * n * n * norm_sq / (K * K) - b, K);
    }
    double dist = 0.0;
    for (std::size_t k = 0; k < psi.dimension(); ++k) {
        dist += std::norm(psi.coefficients()[k] - psi_n.coefficients()[k]);
    }
    r.add_constant("n", n);
    r.add_constant("truncated_norm_sq", norm_sq);
    r.add_constant("distance", std::sqrt(dist));
    r.settle();
    return r;
}

VerificationReport verify_truncation(const DiagonalUnitary& U, const StateVector& psi, std::span<const double> ns,
                                     std::span<const double> K_grid) {
    VerificationReport r = new_report("thm17_truncation", "n");
    double prev = ExponentEstimate::kInfinite;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i > 0 && !(ns[i] > ns[i - 1])) throw UsageError("truncation indices must increase");
        const VerificationReport one = truncation_construction(U, psi, ns[i], K_grid);
        r.record(one.worst_margin, ns[i]);
        const double dist = one.constants.back().second;
        if (std::isfinite(prev)) r.record(prev - dist, ns[i]);
        prev = dist;
        r.add_constant("distance_n" + number(ns[i]), dist);
    }
    r.settle();
    return r;
}

VerificationReport perturbation_construction(const CircleMeasure& mu_psi, const CircleMeasure& mu_eta, double eps,
                                             std::span<const double> m_grid, std::span<const double> K_grid,
                                             double growth_factor) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("perturbation eps must lie in (0, 1)");
    const double eta_mass = mu_eta.total_mass();
    if (eta_mass == 0.0) throw UsageError("perturbation vector eta must be nonzero");
    if (std::abs(eta_mass - 1.0) > 1e-9) throw UsageError("perturbation vector eta must have unit norm");
    if (K_grid.size() < 2) throw UsageError("perturbation check needs at least two horizons");
    VerificationReport r = new_report("thm17_perturbation", "K");

    std::vector<double> b_psi, b_eta;
    for (double K : K_grid) {
        b_psi.push_back(fejer_functional(mu_psi, K));
        b_eta.push_back(fejer_functional(mu_eta, K));
    }
    for (double m : m_grid) {
        if (!(m >= 1.0)) throw DomainError("perturbation scale m must be at least 1");
        std::vector<double> g;
        for (std::size_t i = 0; i < K_grid.size(); ++i) {
            const double K = K_grid[i];
            // fejer_functional is linear in the measure
            const double b = b_psi[i] + b_eta[i] / (m * m);
            r.record(std::sqrt(b) - (std::sqrt(b_eta[i]) / m - std::sqrt(b_psi[i])), K);
            g.push_back(std::pow(K, eps) * b);
        }
        const auto lowest = std::min_element(g.begin(), g.end());
        const double growth = g.back() / *lowest;
        r.record(growth / growth_factor - 1.0, K_grid.back());
        r.add_constant("growth_m" + number(m), growth);
        r.add_constant("onset_K_m" + number(m), K_grid[static_cast<std::size_t>(lowest - g.begin())]);
    }
    r.settle();
    return r;
}

VerificationReport corollary_check(const CircleMeasure& mu, const RateSeries& series,
                                   std::span<const double> eps_grid, const CorollaryOptions& opts) {
    VerificationReport r = new_report("cor18", "eps");
    if (mu.total_mass() == 0.0) {
        r.advisory = "zero measure: the corollary holds vacuously";
        return r;
    }
    const DecayExponents dec = estimate_decay_exponents(series, opts.tail_fraction);
    r.add_constant("decay_liminf", dec.liminf_exp);
    r.add_constant("decay_limsup", dec.limsup_exp);
    const bool slow = dec.liminf_exp <= opts.property_eps;
    const bool fast = std::isfinite(dec.limsup_exp) ? dec.limsup_exp >= 2.0 - opts.property_eps
                                                    : dec.limsup_exp > 0.0;
    if (!(slow && fast)) {
        r.advisory = "hypotheses not met: the series does not show both slow and fast decay on the grid";
        return r;
    }
    const ExponentEstimate est = pointwise_exponents(mu, eps_grid, opts.tail_fraction);
    r.add_constant("d_minus", est.d_minus);
    r.add_constant("d_plus", est.d_plus);
    const auto at = [&](double target) {
        for (const ScaleSample& s : est.scales) {
            if (s.log_ratio == target) return s.eps;
        }
        return std::nan("");
    };
    r.record(opts.tolerance - est.d_minus, at(est.d_minus));
    r.record(est.d_plus - (2.0 - opts.tolerance), at(est.d_plus));
    r.settle(0.0);
    return r;
}

VerificationReport verify_exponent_match(const CircleMeasure& mu, const RateSeries& series,
                                         std::span<const double> eps_grid, double tolerance, double tail_fraction) {
    VerificationReport r = new_report("thm16_exponents", "side");
    const DecayExponents dec = estimate_decay_exponents(series, tail_fraction);
    const ExponentEstimate est = pointwise_exponents(mu, eps_grid, tail_fraction);
    r.add_constant("decay_liminf", dec.liminf_exp);
    r.add_constant("decay_limsup", dec.limsup_exp);
    r.add_constant("d_minus", est.d_minus);
    r.add_constant("d_plus", est.d_plus);
    if (est.d_plus > 2.0) {
        r.advisory = "d+ exceeds 2; the decay exponents are reported without the matching assertion";
        r.worst_margin = 0.0;
        return r;
    }
    r.record(tolerance - std::abs(dec.liminf_exp - est.d_minus), 0.0);
    r.record(tolerance - std::abs(dec.limsup_exp - est.d_plus), 1.0);
    r.settle(0.0);
    return r;
}

}  // namespace ergodic

namespace ergodic {

namespace {

constexpr double kDensityIdentityMaxK = 4096.0;
constexpr double kKoopmanLagMaxK = 65536.0;
constexpr double kPointLagMaxK = 256.0;

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Double sum of Fourier coefficients: (1/K^2) sum_{j,l} mu_hat(l - j).
std::vector<double> density_double_sums(const CircleMeasure& mu, std::span<const double> Ks) {
    double top = 0.0;
    for (double K : Ks) top = std::max(top, K);
    std::vector<long long> js;
    for (long long j = 0; j < static_cast<long long>(top); ++j) js.push_back(j);
    const std::vector<Complex> c = fourier_coefficients(mu, js);
    std::vector<double> out;
    for (double K : Ks) {
        out.push_back(deviation_from_correlations([&](long long d) { return std::conj(c[d]); },
                                                  static_cast<long long>(K)));
    }
    return out;
}

std::vector<double> range(long long lo, long long hi) {
    std::vector<double> v;
    for (long long j = lo; j <= hi; ++j) v.push_back(static_cast<double>(j));
    return v;
}

}  // namespace

VerificationReport verify_identity(const Model& model, std::span<const double> K_grid) {
    VerificationReport r = new_report("lemma13_identity", "K");
    auto compare = [&](double direct, double other, double K) { r.record(kIdentityTolerance - relative_gap(direct, other), K); };

    if (const auto* d = std::get_if<DiagonalModel>(&model)) {
        const CircleMeasure mu = spectral_measure(d->U, nonfixed_part(d->U, d->psi));
        for (double K : K_grid) compare(cesaro_deviation_norm_sq(d->U, d->psi, K), fejer_functional(mu, K), K);
    } else if (const auto* k = std::get_if<KoopmanModel>(&model)) {
        const auto mu = koopman_spectral_measure(k->instance);
        for (double K : K_grid) {
            const double direct = koopman_deviation_norm_sq(k->instance, K);
            if (mu) compare(direct, fejer_functional(*mu, K), K);
            // for pure point spectra b ~ 1/K^2 while the lag terms are O(1), so the
            // double sum loses about K^2 ulps and is only compared at small K
            const double lag_limit = k->instance.map() == MapKind::rotation ? kPointLagMaxK : kKoopmanLagMaxK;
            if (K <= lag_limit) {
                compare(direct,
                        deviation_from_correlations(
                            [&](long long j) { return koopman_correlation(k->instance, j); },
                            static_cast<long long>(K)),
                        K);
            }
        }
    } else {
        const CircleMeasure& mu = std::get<SpectralModel>(model).mu;
        if (mu.kind() == MeasureKind::atomic) {
            const DiagonalModel realized = diagonal_realization(mu);
            for (double K : K_grid) {
                compare(cesaro_deviation_norm_sq(realized.U, realized.psi, K), fejer_functional(mu, K), K);
            }
        } else {
            std::vector<double> small;
            for (double K : K_grid) {
                if (K <= kDensityIdentityMaxK) small.push_back(K);
            }
            const std::vector<double> sums = density_double_sums(mu, small);
            for (std::size_t i = 0; i < small.size(); ++i) compare(fejer_functional(mu, small[i]), sums[i], small[i]);
            if (small.size() < K_grid.size()) {
                r.advisory = "density measure: horizons above 4096 are not cross-checked";
            }
        }
    }
    r.settle(0.0);
    return r;
}

VerificationReport verify_vnet(const Model& model, std::span<const double> K_grid) {
    VerificationReport r = new_report("thm11_vnet", "K");
    const RateSeries series = decay_series(model, K_grid);
    std::vector<double> b;
    for (const RatePoint& p : series.entries) b.push_back(p.b);

    if (const auto* d = std::get_if<DiagonalModel>(&model)) {
        const double rest = nonfixed_part(d->U, d->psi).norm_sq();
        for (const RatePoint& p : series.entries) {
            double kernel = 0.0;
            for (double t : d->U.phases()) {
                if (t != 0.0) kernel = std::max(kernel, fejer_kernel(t, p.K));
            }
            r.record(kernel * rest * (1.0 + kIdentityTolerance) - p.b, p.K);
        }
    }
    const std::size_t quarter = std::max<std::size_t>(1, b.size() / 4);
    const double head = max_of(std::span<const double>(b).first(quarter));
    const double tail = max_of(std::span<const double>(b).last(quarter));
    r.add_constant("first_quarter_max", head);
    r.add_constant("last_quarter_max", tail);
    if (head > 0.0 && b.size() >= 2) r.record(1.0 - tail / head, series.entries.back().K);
    r.settle();
    return r;
}

VerificationReport verify_majorant(const CircleMeasure& mu, std::span<const double> K_grid) {
    VerificationReport r = new_report("lemma31_majorant", "K");
    for (double K : K_grid) r.record(kachurovskii_majorant(mu, K) - fejer_functional(mu, K), K);
    r.settle();
    return r;
}

VerificationReport verify_lower_bound(const CircleMeasure& mu, const RateSeries& series) {
    VerificationReport r = new_report("sec31_lower_bound", "K");
    for (const RatePoint& p : series.entries) r.record(p.b - 0.25 * arc_mass(mu, 0.5 / p.K), p.K);
    r.settle();
    return r;
}

VerificationReport verify_weak_decay(const Model& model) {
    VerificationReport r = new_report("prop23_weak_decay", "j");
    const std::vector<double> low = range(16, 32);
    const std::vector<double> high = range(4096, 8192);
    std::vector<double> mags_low, mags_high;
    double scale = 0.0;

    auto from_measure = [&](const CircleMeasure& mu) {
        std::vector<long long> js;
        for (double j : low) js.push_back(static_cast<long long>(j));
        for (double j : high) js.push_back(static_cast<long long>(j));
        const ProbeResult probe = weak_convergence_probe(mu, js);
        mags_low.assign(probe.magnitudes.begin(), probe.magnitudes.begin() + low.size());
        mags_high.assign(probe.magnitudes.begin() + low.size(), probe.magnitudes.end());
        r.advisory = probe.advisory;
        scale = mu.total_mass() - atom_at_one(mu);
    };

    if (const auto* k = std::get_if<KoopmanModel>(&model)) {
        if (k->instance.map() == MapKind::rotation) {
            r.advisory = "no decay expected: rotation spectra are pure point";
        } else {
            for (double j : low) mags_low.push_back(std::abs(koopman_correlation(k->instance, static_cast<long long>(j))));
            for (double j : high) mags_high.push_back(std::abs(koopman_correlation(k->instance, static_cast<long long>(j))));
            scale = std::abs(koopman_correlation(k->instance, 0));
        }
    } else {
        from_measure(*model_spectral_measure(model));
    }
    if (r.advisory) {
        r.worst_margin = 0.0;
        return r;
    }
    const double lo = max_of(mags_low);
    const double hi = max_of(mags_high);
    r.add_constant("max_low_band", lo);
    r.add_constant("max_high_band", hi);
    const std::size_t at = static_cast<std::size_t>(std::max_element(mags_high.begin(), mags_high.end()) - mags_high.begin());
    // strict decrease, or both bands at rounding level
    r.record(std::max(lo - hi, 1e-12 * scale - hi), high[at]);
    r.holds = r.worst_margin > 0.0 || hi <= 1e-12 * scale;
    return r;
}

}  // namespace ergodic
