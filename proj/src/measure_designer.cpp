#include "ergodic/measure_designer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergodic/errors.hpp"
#include "ergodic/kernel.hpp"

namespace ergodic {

namespace {

constexpr double kMinLadderBits = 1000.0;  // keeps every angle a normal double

CircleMeasure normalized(std::vector<Atom> atoms) {
    double total = 0.0;
    for (const Atom& a : atoms) total += a.weight;
    if (total > 0.0) {
        for (Atom& a : atoms) a.weight /= total;
    }
    return CircleMeasure::atomic(std::move(atoms));
}

std::vector<double> ladder_bits(const LacunarySpec& spec) {
    std::vector<double> bits;
    for (int n = 0; n < spec.depth; ++n) bits.push_back(spec.first_scale_bits * std::pow(spec.ramp, n));
    return bits;
}

void validate(const LacunarySpec& spec) {
    std::ostringstream why;
    if (!(spec.low_exponent >= 0.0) || !(spec.low_exponent < 2.0)) {
        why << "low exponent " << spec.low_exponent << " outside [0, 2)";
    } else if (!(spec.high_exponent > spec.low_exponent)) {
        why << "high exponent " << spec.high_exponent << " must exceed low exponent "
            << spec.low_exponent;
    } else if (spec.depth < 4) {
        why << "depth " << spec.depth << " below the minimum of 4";
    } else if (!(spec.first_scale_bits > 0.0)) {
        why << "first ladder scale must lie below 1";
    } else if (!(spec.ramp >= 2.0)) {
        why << "ramp must be at least 2";
    } else if (!(spec.comb_per_octave > 0.0)) {
        why << "comb density must be positive";
    } else if (!(spec.background > 0.0) || !(spec.background <= 1.0)) {
        why << "background factor must lie in (0, 1]";
    }
    const std::string msg = why.str();
    if (!msg.empty()) throw ConstructionError("lacunary spec: " + msg);

    const double deepest = ladder_bits(spec).back();
    if (!(deepest * std::max(1.0, spec.high_exponent) <= kMinLadderBits)) {
        std::ostringstream m;
        m << "lacunary spec: deepest ladder angle 2^-" << deepest
          << " underflows; reduce depth, ramp or first scale";
        throw ConstructionError(m.str());
    }
}

}  // namespace

CircleMeasure power_law_measure(double alpha, double c) {
    if (!(alpha > 0.0)) throw DomainError("power law exponent must be positive");
    if (!(c > 0.0)) throw DomainError("power law coefficient must be positive");
    return CircleMeasure::density({{c, alpha, -kPi, kPi}});
}

CircleMeasure unit_power_law(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("power law exponent must be positive");
    return power_law_measure(alpha, alpha / (2.0 * std::pow(kPi, alpha)));
}

std::vector<double> lacunary_ladder(const LacunarySpec& spec) {
    validate(spec);
    std::vector<double> out;
    for (double b : ladder_bits(spec)) out.push_back(std::exp2(-b));
    return out;
}

double lacunary_floor_bits(const LacunarySpec& spec) {
    // the last comb atom sits exactly at the floor
    const auto on_comb = [&](double bits) {
        return std::floor(bits * spec.comb_per_octave + 1e-9) / spec.comb_per_octave;
    };
    const double deepest = ladder_bits(spec).back();
    // comb weights scale like 2^(-bits * high); keep them normal doubles
    const double representable = kMinLadderBits / std::max(1.0, spec.high_exponent);
    if (spec.floor_bits > 0.0) {
        if (spec.floor_bits > representable) {
            std::ostringstream m;
            m << "lacunary spec: comb floor 2^-" << spec.floor_bits << " with exponent " << spec.high_exponent
              << " underflows; the floor may be at most " << representable << " bits";
            throw ConstructionError(m.str());
        }
        return on_comb(std::max(spec.floor_bits, deepest));
    }
    return on_comb(std::min(representable, std::max(64.0, 16.0 * deepest)));
}

CircleMeasure lacunary_measure(const LacunarySpec& spec) {
    validate(spec);
    const std::vector<double> ladder = lacunary_ladder(spec);
    const double floor_bits = lacunary_floor_bits(spec);
    if (floor_bits < ladder_bits(spec).back()) throw ConstructionError("lacunary spec: comb floor above the deepest dip");
    const double a = spec.low_exponent;
    const double b = spec.high_exponent;

    // Comb points at or below the first ladder angle.
    std::vector<double> comb;
    const double q = spec.comb_per_octave;
    const long long first = static_cast<long long>(std::ceil(ladder_bits(spec).front() * q - 1e-9));
    const long long last = static_cast<long long>(std::floor(floor_bits * q + 1e-9));
    for (long long j = first; j <= last; ++j) comb.push_back(std::exp2(-double(j) / q));

    // comb_tail[j]: comb mass on (0, comb[j]], following background * t^b.
    std::vector<double> comb_tail(comb.size() + 1, 0.0);
    for (std::size_t j = 0; j < comb.size(); ++j) comb_tail[j] = spec.background * std::pow(comb[j], b);
    auto first_at_or_below = [&](double theta) {
        return static_cast<std::size_t>(
            std::lower_bound(comb.begin(), comb.end(), theta, std::greater<>()) - comb.begin());
    };

    // Near theta = 1 the comb can outgrow theta^a between two ladder scales; the
    // comb is then cut off at the lower scale so that every dip stays positive.
    std::size_t comb_start = 0;
    std::vector<double> dips(ladder.size(), 0.0);
    double deeper_dips = 0.0;
    for (std::size_t n = ladder.size(); n-- > 0;) {
        const double target = std::pow(ladder[n], a);
        double below = comb_tail[std::max(comb_start, first_at_or_below(ladder[n]))];
        if (!(target - below - deeper_dips > 0.0) && n + 1 < ladder.size()) {
            comb_start = first_at_or_below(ladder[n + 1]);
            below = comb_tail[comb_start];
        }
        dips[n] = target - below - deeper_dips;
        if (!(dips[n] > 0.0)) {
            std::ostringstream m;
            m << "lacunary spec infeasible: dip weight at ladder scale " << n << " (theta = " << ladder[n]
              << ") would be " << dips[n] << "; lower the background factor";
            throw ConstructionError(m.str());
        }
        deeper_dips += dips[n];
    }

    std::vector<Atom> atoms;
    for (std::size_t n = 0; n < ladder.size(); ++n) atoms.push_back({ladder[n], dips[n]});
    for (std::size_t j = comb_start; j < comb.size(); ++j) {
        atoms.push_back({comb[j], comb_tail[j] - comb_tail[j + 1]});
    }
    return normalized(std::move(atoms));
}

CircleMeasure gap_measure(double gamma, std::vector<Atom> atoms) {
    if (!(gamma > 0.0) || !(gamma < kPi)) throw DomainError("gap gamma must lie in (0, pi)");
    for (const Atom& a : atoms) {
        if (a.angle != 0.0 && a.angle > -gamma && a.angle <= gamma) {
            std::ostringstream m;
            m << "atom at " << a.angle << " lies inside the gap (-" << gamma << ", " << gamma << "]";
            throw DomainError(m.str());
        }
    }
    CircleMeasure::atomic(atoms);  // angle/weight validation
    return normalized(std::move(atoms));
}

}  // namespace ergodic
