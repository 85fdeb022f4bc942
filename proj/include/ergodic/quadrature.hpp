#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ergodic/kernel.hpp"

namespace ergodic {

struct QuadratureNode {
    double x;
    double weight;  // includes the x^(alpha-1) factor
};

namespace detail {

// Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 8> kGl8Nodes = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975362};
inline constexpr std::array<double, 8> kGl8Weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
inline constexpr std::array<double, 6> kGl6Nodes = {
    -0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
    0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
inline constexpr std::array<double, 6> kGl6Weights = {
    0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
    0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

inline constexpr int kPanelsPerPeriod = 8;

template <std::size_t N, typename Visit>
void gauss_panel(double a, double b, double alpha, const std::array<double, N>& nodes,
                 const std::array<double, N>& weights, Visit& visit) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = mid + half * nodes[i];
        const double w = half * weights[i];
        visit(x, alpha == 1.0 ? w : w * std::pow(x, alpha - 1.0));
    }
}

}  // namespace detail

/// Visits a rule for integral over [lo, hi] of f(x) x^(alpha-1) dx, 0 <= lo < hi.
///
/// Below 1/omega the interval is graded geometrically towards lo so the
/// endpoint singularity of x^(alpha-1) is resolved; above it uniform panels
/// of width at most (2 pi / omega) / 8 follow anything oscillating at
/// frequency omega.  When lo == 0 the mass left under the last graded panel
/// is reported as a single node at x = 0 carrying its closed-form weight.
template <typename Visit>
void visit_power_weight_rule(double lo, double hi, double alpha, double omega, Visit&& visit) {
    if (!(hi > lo)) return;
    const double split = std::clamp(1.0 / std::max(omega, 1e-300), lo, hi);

    if (split > lo) {
        const double scale = std::pow(split, alpha) / alpha;
        double b = split;
        for (;;) {
            double a = 0.5 * b;
            if (lo > 0.0 && a <= lo) {
                detail::gauss_panel(lo, b, alpha, detail::kGl8Nodes, detail::kGl8Weights, visit);
                break;
            }
            detail::gauss_panel(a, b, alpha, detail::kGl8Nodes, detail::kGl8Weights, visit);
            b = a;
            if (lo == 0.0) {
                const double rest = std::pow(b, alpha) / alpha;
                if (rest <= 1e-18 * scale || b < 1e-300) {
                    visit(0.0, rest);
                    break;
                }
            }
        }
    }

    if (hi > split) {
        const double width = 2.0 * kPi / std::max(omega, 1.0) / detail::kPanelsPerPeriod;
        const auto panels = static_cast<long long>(std::ceil((hi - split) / width));
        const double h = (hi - split) / static_cast<double>(panels);
        for (long long p = 0; p < panels; ++p) {
            const double a = split + h * static_cast<double>(p);
            const double b = (p + 1 == panels) ? hi : a + h;
            detail::gauss_panel(a, b, alpha, detail::kGl6Nodes, detail::kGl6Weights, visit);
        }
    }
}

std::vector<QuadratureNode> power_weight_rule(double lo, double hi, double alpha, double omega);

}  // namespace ergodic
