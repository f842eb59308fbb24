#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

namespace rwta {

// Ribar-Sepulchre rebound neuron in dimensionless model units. V1 and V2
// are first-order filters of V with time constants 30 and 60.
struct RSState {
    double V  = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;

    static constexpr std::size_t size = 3;

    friend bool operator==(const RSState&, const RSState&) = default;
};

inline constexpr double kRSFastTau = 30.0;
inline constexpr double kRSSlowTau = 60.0;

inline RSState rs_derivatives(const RSState& s, double u) {
    RSState d;
    d.V = -0.5 * s.V + 2.0 * std::tanh(s.V - 1.0) - 2.0 * std::tanh(s.V1 - 1.0)
          - std::tanh(s.V1 + 2.0) + u;
    d.V1 = (s.V - s.V1) / kRSFastTau;
    d.V2 = (s.V - s.V2) / kRSSlowTau;
    return d;
}

// Equilibrium under constant input u. With V = V1 = V2 the two tanh(. - 1)
// terms cancel and the fixed point solves -0.5 v - tanh(v + 2) + u = 0,
// which is strictly decreasing in v.
inline RSState rs_resting_state(double u = 0.0) {
    auto residual = [u](double v) { return -0.5 * v - std::tanh(v + 2.0) + u; };
    const double lo = 2.0 * (u - 2.0);
    const double hi = 2.0 * (u + 2.0);
    if (!(residual(lo) >= 0.0) || !(residual(hi) <= 0.0)) {
        throw std::domain_error("rs_resting_state: equilibrium not bracketed");
    }
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, lo, hi, boost::math::tools::eps_tolerance<double>(), iters);
    const double v = std::abs(residual(a)) <= std::abs(residual(b)) ? a : b;
    return {v, v, v};
}

}  // namespace rwta
