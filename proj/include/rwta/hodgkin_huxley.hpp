#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

namespace rwta {

// Hodgkin-Huxley squid-axon constants. Units: C [uF/cm^2], conductances
// [mS/cm^2], reversal potentials [mV]; time in ms, currents in uA/cm^2.
struct HHParams {
    double C    = 1.0;
    double g_Na = 120.0;
    double g_K  = 36.0;
    double g_L  = 0.3;
    double E_Na = 50.0;
    double E_K  = -77.0;
    double E_L  = -54.387;

    void validate() const {
        if (!(C > 0.0) || !(g_Na > 0.0) || !(g_K > 0.0) || !(g_L > 0.0)) {
            throw std::invalid_argument("HHParams: capacitance and conductances must be positive");
        }
    }

    friend bool operator==(const HHParams&, const HHParams&) = default;
};

struct HHState {
    double V = -65.0;  // membrane potential [mV]
    double m = 0.0;
    double h = 0.0;
    double n = 0.0;

    static constexpr std::size_t size = 4;

    friend bool operator==(const HHState&, const HHState&) = default;
};

struct HHRates {
    double alpha_m, beta_m;
    double alpha_h, beta_h;
    double alpha_n, beta_n;
};

// Steady state and time constant of one gate.
struct GateKinetics {
    double x_inf;
    double tau;  // [ms]
};

struct HHSteadyState {
    GateKinetics m, h, n;
};

namespace detail {

// |x| below this uses the analytic limit of x / (1 - exp(-x/10)).
inline constexpr double kSingularityWidth = 1e-7;

// scale * x / (1 - exp(-x / 10)), with the removable singularity at x = 0
// replaced by its limit 10 * scale.
inline double linoid(double x, double scale) {
    if (std::abs(x) < kSingularityWidth) {
        return 10.0 * scale;
    }
    return scale * x / (-std::expm1(-x / 10.0));
}

}  // namespace detail

inline HHRates hh_rate_constants(double V) {
    HHRates r{};
    r.alpha_m = detail::linoid(V + 40.0, 0.1);
    r.beta_m  = 4.0 * std::exp(-(V + 65.0) / 18.0);
    r.alpha_h = 0.07 * std::exp(-(V + 65.0) / 20.0);
    r.beta_h  = 1.0 / (1.0 + std::exp(-(V + 35.0) / 10.0));
    r.alpha_n = detail::linoid(V + 55.0, 0.01);
    r.beta_n  = 0.125 * std::exp(-(V + 65.0) / 80.0);
    return r;
}

inline HHSteadyState hh_steady_state(double V) {
    const HHRates r = hh_rate_constants(V);
    auto gate = [](double a, double b) {
        const double s = a + b;
        return GateKinetics{a / s, 1.0 / s};
    };
    return {gate(r.alpha_m, r.beta_m), gate(r.alpha_h, r.beta_h), gate(r.alpha_n, r.beta_n)};
}

// Standard HH membrane equation:
//   C dV/dt = -g_Na m^3 h (V - E_Na) - g_K n^4 (V - E_K) - g_L (V - E_L) + I
inline HHState hh_derivatives(const HHState& s, const HHParams& p, double I_total) {
    const HHRates r = hh_rate_constants(s.V);
    const double m3h = s.m * s.m * s.m * s.h;
    const double n2 = s.n * s.n;
    const double I_ion = p.g_Na * m3h * (s.V - p.E_Na) + p.g_K * n2 * n2 * (s.V - p.E_K)
                         + p.g_L * (s.V - p.E_L);
    HHState d;
    d.V = (I_total - I_ion) / p.C;
    d.m = r.alpha_m * (1.0 - s.m) - r.beta_m * s.m;
    d.h = r.alpha_h * (1.0 - s.h) - r.beta_h * s.h;
    d.n = r.alpha_n * (1.0 - s.n) - r.beta_n * s.n;
    return d;
}

// Gates pinned to their steady states at V.
inline HHState hh_gates_at_steady_state(double V) {
    const HHSteadyState ss = hh_steady_state(V);
    return {V, ss.m.x_inf, ss.h.x_inf, ss.n.x_inf};
}

// Equilibrium of an isolated neuron under a constant current. The
// steady-state I-V relation of the squid-axon model is monotone, so the
// equilibrium is unique and bracketed by a wide voltage window.
inline HHState hh_resting_state(const HHParams& p, double I_hold = 0.0) {
    auto residual = [&](double V) {
        return hh_derivatives(hh_gates_at_steady_state(V), p, I_hold).V;
    };
    double lo = -100.0;
    double hi = 0.0;
    while (residual(lo) < 0.0 && lo > -1e4) lo *= 2.0;
    while (residual(hi) > 0.0 && hi < 1e4) hi = hi * 2.0 + 50.0;
    if (!(residual(lo) >= 0.0) || !(residual(hi) <= 0.0)) {
        throw std::domain_error("hh_resting_state: no equilibrium bracketed for this holding current");
    }
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, lo, hi, boost::math::tools::eps_tolerance<double>(), iters);
    const double Va = std::abs(residual(a));
    const double Vb = std::abs(residual(b));
    return hh_gates_at_steady_state(Va <= Vb ? a : b);
}

}  // namespace rwta
