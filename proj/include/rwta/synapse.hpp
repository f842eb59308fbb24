#pragma once

#include <cmath>
#include <stdexcept>

namespace rwta {

// First-order filtered sigmoid synapse. g_syn is signed: negative values
// are inhibitory, positive values excitatory. Units follow the target
// neuron model (uA/cm^2 and mV for HH, model units for RS).
struct SynapseParams {
    double g_syn = 0.0;
    double tau   = 1.0;
    double V_th  = 0.0;
    double alpha = 1.0;

    bool inhibitory() const { return g_syn < 0.0; }
    bool excitatory() const { return g_syn > 0.0; }

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("SynapseParams: tau must be positive");
        if (!(alpha > 0.0)) throw std::invalid_argument("SynapseParams: alpha must be positive");
        if (!std::isfinite(g_syn) || !std::isfinite(V_th)) {
            throw std::invalid_argument("SynapseParams: g_syn and V_th must be finite");
        }
    }

    friend bool operator==(const SynapseParams&, const SynapseParams&) = default;
};

struct SynapseState {
    double V_f = 0.0;  // filtered presynaptic voltage
};

// g / (1 + exp(-alpha x)), evaluated without overflow for large |x|.
inline double sigmoid_gain(double g, double alpha, double x) {
    const double z = alpha * x;
    if (z >= 0.0) return g / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return g * e / (1.0 + e);
}

inline double synapse_filter_derivative(double V_pre, SynapseState s, const SynapseParams& p) {
    return (V_pre - s.V_f) / p.tau;
}

inline double synapse_current(SynapseState s, const SynapseParams& p) {
    return sigmoid_gain(p.g_syn, p.alpha, s.V_f - p.V_th);
}

}  // namespace rwta
