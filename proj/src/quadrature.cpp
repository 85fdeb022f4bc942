#include "ergodic/quadrature.hpp"

namespace ergodic {

std::vector<QuadratureNode> power_weight_rule(double lo, double hi, double alpha, double omega) {
    std::vector<QuadratureNode> nodes;
    visit_power_weight_rule(lo, hi, alpha, omega,
                            [&](double x, double w) { nodes.push_back({x, w}); });
    return nodes;
}

}  // namespace ergodic
