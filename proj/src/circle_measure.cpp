#include "ergodic/circle_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ergodic/errors.hpp"
#include "ergodic/kernel.hpp"
#include "ergodic/quadrature.hpp"

namespace ergodic {

namespace {

void check_angle(double theta) {
    if (!std::isfinite(theta) || !(theta > -kPi) || theta > kPi) {
        throw DomainError("atom angle " + std::to_string(theta) + " outside (-pi, pi]");
    }
}

// Antiderivative of |t|^(alpha-1): sign(t) |t|^alpha / alpha.
double power_primitive(double t, double alpha) {
    const double v = std::pow(std::abs(t), alpha) / alpha;
    return t < 0.0 ? -v : v;
}

double segment_mass_between(const PowerSegment& s, double lo, double hi) {
    const double a = std::max(s.from, lo);
    const double b = std::min(s.to, hi);
    if (!(b > a) || s.c == 0.0) return 0.0;
    return s.c * (power_primitive(b, s.alpha) - power_primitive(a, s.alpha));
}

// The part of a segment on each side of 0, folded onto [0, pi] via |theta|.
struct FoldedPieces {
    double pos_lo = 0.0, pos_hi = 0.0;  // empty when pos_hi <= pos_lo
    double neg_lo = 0.0, neg_hi = 0.0;
};

FoldedPieces fold(const PowerSegment& s) {
    FoldedPieces f;
    if (s.to > 0.0) {
        f.pos_lo = std::max(0.0, s.from);
        f.pos_hi = s.to;
    }
    if (s.from < 0.0) {
        f.neg_lo = std::max(0.0, -s.to);
        f.neg_hi = -s.from;
    }
    return f;
}

template <typename Kernel>
double integrate_segment(const PowerSegment& s, double omega, Kernel&& kernel) {
    if (s.c == 0.0) return 0.0;
    const FoldedPieces f = fold(s);
    auto piece = [&](double lo, double hi) {
        double acc = 0.0;
        visit_power_weight_rule(lo, hi, s.alpha, omega,
                                [&](double x, double w) { acc += w * kernel(x); });
        return acc;
    };
    const bool has_pos = f.pos_hi > f.pos_lo;
    const bool has_neg = f.neg_hi > f.neg_lo;
    double total = 0.0;
    if (has_pos && has_neg && f.pos_lo == f.neg_lo && f.pos_hi == f.neg_hi) {
        total = 2.0 * piece(f.pos_lo, f.pos_hi);
    } else {
        if (has_pos) total += piece(f.pos_lo, f.pos_hi);
        if (has_neg) total += piece(f.neg_lo, f.neg_hi);
    }
    return s.c * total;
}

bool in_arc(double theta, double eps) { return theta > -eps && theta <= eps; }

// Largest j >= 1 with theta in S_j; S_1 is the whole circle.
double last_sector(double theta, double cap) {
    if (theta == 0.0) return cap;
    double j = std::floor(kPi / std::abs(theta));
    j = std::min(std::max(j, 1.0), cap);
    // past 2^52 neighbouring sectors are no longer distinguishable in doubles
    if (j >= 0x1p52) return j;
    while (j > 1.0 && !in_arc(theta, kPi / j)) j -= 1.0;
    while (j < cap && in_arc(theta, kPi / (j + 1.0))) j += 1.0;
    return j;
}

}  // namespace

double wrap_angle(double theta) {
    if (!std::isfinite(theta)) throw DomainError("non-finite angle");
    double r = std::remainder(theta, 2.0 * kPi);  // in [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

CircleMeasure CircleMeasure::atomic(std::vector<Atom> atoms) {
    for (const Atom& a : atoms) {
        check_angle(a.angle);
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
            throw DomainError("atom weight must be finite and nonnegative");
        }
    }
    CircleMeasure m;
    m.kind_ = MeasureKind::atomic;
    m.atoms_ = std::move(atoms);
    return m;
}

CircleMeasure CircleMeasure::density(std::vector<PowerSegment> segments) {
    for (const PowerSegment& s : segments) {
        if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) {
            throw DomainError("density exponent alpha must be positive");
        }
        if (!(s.c >= 0.0) || !std::isfinite(s.c)) {
            throw DomainError("density coefficient c must be nonnegative");
        }
        if (!(s.from >= -kPi) || !(s.to <= kPi) || !(s.from < s.to)) {
            throw DomainError("density segment must satisfy -pi <= from < to <= pi");
        }
    }
    CircleMeasure m;
    m.kind_ = MeasureKind::density;
    m.segments_ = std::move(segments);
    return m;
}

CircleMeasure CircleMeasure::mixture(std::vector<CircleMeasure> parts) {
    CircleMeasure m;
    m.kind_ = MeasureKind::mixture;
    m.parts_ = std::move(parts);
    return m;
}

double CircleMeasure::total_mass() const { return arc_mass(*this, kPi); }

bool CircleMeasure::has_density() const {
    switch (kind_) {
        case MeasureKind::atomic:
            return false;
        case MeasureKind::density:
            return std::any_of(segments_.begin(), segments_.end(),
                               [](const PowerSegment& s) { return s.c > 0.0; });
        case MeasureKind::mixture:
            return std::any_of(parts_.begin(), parts_.end(),
                               [](const CircleMeasure& p) { return p.has_density(); });
    }
    return false;
}

bool CircleMeasure::has_atoms_off_one() const {
    if (kind_ == MeasureKind::mixture) {
        return std::any_of(parts_.begin(), parts_.end(),
                           [](const CircleMeasure& p) { return p.has_atoms_off_one(); });
    }
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [](const Atom& a) { return a.weight > 0.0 && a.angle != 0.0; });
}

CircleMeasure CircleMeasure::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be >= 0");
    CircleMeasure m = *this;
    for (Atom& a : m.atoms_) a.weight *= factor;
    for (PowerSegment& s : m.segments_) s.c *= factor;
    for (CircleMeasure& p : m.parts_) p = p.scaled(factor);
    return m;
}

double arc_mass(const CircleMeasure& mu, double eps) {
    if (!(eps > 0.0) || eps > kPi) {
        throw DomainError("arc radius must lie in (0, pi], got " + std::to_string(eps));
    }
    double total = 0.0;
    for (const Atom& a : mu.atoms()) {
        if (in_arc(a.angle, eps)) total += a.weight;
    }
    for (const PowerSegment& s : mu.segments()) total += segment_mass_between(s, -eps, eps);
    for (const CircleMeasure& p : mu.parts()) total += arc_mass(p, eps);
    return total;
}

double sector_mass(const CircleMeasure& mu, double K) {
    require_horizon(K);
    return arc_mass(mu, kPi / K);
}

double atom_at_one(const CircleMeasure& mu) {
    double total = 0.0;
    for (const Atom& a : mu.atoms()) {
        if (a.angle == 0.0) total += a.weight;
    }
    for (const CircleMeasure& p : mu.parts()) total += atom_at_one(p);
    return total;
}

double fejer_functional(const CircleMeasure& mu, double K) {
    require_horizon(K);
    double total = 0.0;
    for (const Atom& a : mu.atoms()) total += a.weight * fejer_kernel(a.angle, K);
    if (!mu.segments().empty()) {
        if (K > kMaxDensityHorizon) {
            throw DomainError("density quadrature is limited to K <= 2^24");
        }
        for (const PowerSegment& s : mu.segments()) {
            total += integrate_segment(s, K, [K](double x) { return fejer_kernel(x, K); });
        }
    }
    for (const CircleMeasure& p : mu.parts()) total += fejer_functional(p, K);
    return total;
}

double kachurovskii_majorant(const CircleMeasure& mu, double K) {
    require_horizon(K);
    const double cap = K - 1.0;
    double acc = 0.0;
    // S_1 term plus, per atom, sum_{j=1}^{J} (2j + 1) = J^2 + 2J.
    for (const Atom& a : mu.atoms()) {
        double weighted = 1.0;
        if (cap >= 1.0) {
            const double J = last_sector(a.angle, cap);
            weighted += J * J + 2.0 * J;
        }
        acc += a.weight * weighted;
    }
    if (!mu.segments().empty()) {
        if (K > kMaxDensityHorizon) {
            throw DomainError("density majorant is limited to K <= 2^24");
        }
        const CircleMeasure dens = CircleMeasure::density(mu.segments());
        acc += dens.total_mass();
        for (double j = 1.0; j <= cap; j += 1.0) acc += (2.0 * j + 1.0) * sector_mass(dens, j);
    }
    double total = acc / (K * K);
    for (const CircleMeasure& p : mu.parts()) total += kachurovskii_majorant(p, K);
    return total;
}

std::vector<std::complex<double>> fourier_coefficients(const CircleMeasure& mu,
                                                       std::span<const long long> js) {
    std::vector<std::complex<double>> out(js.size());
    for (const Atom& a : mu.atoms()) {
        for (std::size_t i = 0; i < js.size(); ++i) {
            out[i] += a.weight * std::polar(1.0, static_cast<double>(js[i]) * a.angle);
        }
    }

    if (!mu.segments().empty() && !js.empty()) {
        std::vector<std::size_t> order(js.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return js[l] < js[r]; });
        long long jmax = 1;
        for (long long j : js) jmax = std::max(jmax, j < 0 ? -j : j);

        // One rule resolves every requested frequency.  Node phases advance by
        // recurrence between consecutive frequencies and resync periodically.
        std::vector<double> xs, ws;
        for (const PowerSegment& s : mu.segments()) {
            if (s.c == 0.0) continue;
            const FoldedPieces f = fold(s);
            auto collect = [&](double lo, double hi, double sign) {
                visit_power_weight_rule(lo, hi, s.alpha, static_cast<double>(jmax), [&](double x, double w) {
                    xs.push_back(sign * x);
                    ws.push_back(s.c * w);
                });
            };
            if (f.pos_hi > f.pos_lo) collect(f.pos_lo, f.pos_hi, 1.0);
            if (f.neg_hi > f.neg_lo) collect(f.neg_lo, f.neg_hi, -1.0);
        }
        const std::size_t n = xs.size();
        std::vector<double> step_re(n), step_im(n), re(n), im(n);
        for (std::size_t i = 0; i < n; ++i) {
            step_re[i] = std::cos(xs[i]);
            step_im[i] = std::sin(xs[i]);
        }
        long long prev = 0;
        int since_sync = 0;
        std::complex<double> last;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const long long j = js[order[k]];
            if (k > 0 && j == prev) {
                out[order[k]] += last;
                continue;
            }
            if (k > 0 && j == prev + 1 && since_sync < 64) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double r = re[i] * step_re[i] - im[i] * step_im[i];
                    im[i] = re[i] * step_im[i] + im[i] * step_re[i];
                    re[i] = r;
                }
                ++since_sync;
            } else {
                const double jd = static_cast<double>(j);
                for (std::size_t i = 0; i < n; ++i) {
                    re[i] = std::cos(jd * xs[i]);
                    im[i] = std::sin(jd * xs[i]);
                }
                since_sync = 0;
            }
            double acc_re[4] = {0, 0, 0, 0};
            double acc_im[4] = {0, 0, 0, 0};
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4) {
                for (std::size_t l = 0; l < 4; ++l) {
                    acc_re[l] += ws[i + l] * re[i + l];
                    acc_im[l] += ws[i + l] * im[i + l];
                }
            }
            for (; i < n; ++i) {
                acc_re[0] += ws[i] * re[i];
                acc_im[0] += ws[i] * im[i];
            }
            last = {(acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
                    (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3])};
            out[order[k]] += last;
            prev = j;
        }
    }

    for (const CircleMeasure& p : mu.parts()) {
        const auto sub = fourier_coefficients(p, js);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += sub[i];
    }
    return out;
}

std::size_t tail_count(std::size_t n, double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
        throw UsageError("tail fraction must lie in (0, 1]");
    }
    const auto t = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(t, 1, n);
}

ExponentEstimate pointwise_exponents(const CircleMeasure& mu, std::span<const double> eps_grid,
                                     double tail_fraction) {
    if (eps_grid.size() < 8) {
        throw UsageError("pointwise exponents need at least 8 scales, got " +
                         std::to_string(eps_grid.size()));
    }
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0) || eps_grid[i] > kPi) {
            throw UsageError("eps grid values must lie in (0, pi]");
        }
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) {
            throw UsageError("eps grid must be strictly decreasing");
        }
    }
    const std::size_t tail = tail_count(eps_grid.size(), tail_fraction);

    ExponentEstimate est;
    est.scales.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        const double m = arc_mass(mu, eps);
        double ratio = ExponentEstimate::kInfinite;
        if (m > 0.0) ratio = (eps == 1.0) ? std::nan("") : std::log(m) / std::log(eps);
        est.scales.push_back({eps, m, ratio});
    }

    double lo = ExponentEstimate::kInfinite;
    double hi = -ExponentEstimate::kInfinite;
    bool vanished = false;
    for (std::size_t i = eps_grid.size() - tail; i < eps_grid.size(); ++i) {
        const ScaleSample& s = est.scales[i];
        if (s.mass <= 0.0) {
            vanished = true;
            break;
        }
        if (std::isnan(s.log_ratio)) continue;
        lo = std::min(lo, s.log_ratio);
        hi = std::max(hi, s.log_ratio);
    }
    if (vanished || hi < lo) return est;  // sentinel +inf already set
    est.d_minus = lo;
    est.d_plus = hi;
    return est;
}

}  // namespace ergodic
