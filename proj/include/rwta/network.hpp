#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hodgkin_huxley.hpp"
#include "input_signal.hpp"
#include "ribar_sepulchre.hpp"
#include "synapse.hpp"

namespace rwta {

// The Ribar-Sepulchre model has no free parameters.
struct RSParams {
    friend bool operator==(const RSParams&, const RSParams&) = default;
};

using NeuronModel = std::variant<HHParams, RSParams>;

inline std::size_t model_state_size(const NeuronModel& m) {
    return std::holds_alternative<HHParams>(m) ? HHState::size : RSState::size;
}

inline bool is_hh(const NeuronModel& m) { return std::holds_alternative<HHParams>(m); }

struct NeuronSpec {
    NeuronModel model;
    std::vector<double> initial_state;  // model_state_size(model) entries, voltage first

    friend bool operator==(const NeuronSpec&, const NeuronSpec&) = default;
};

struct Connection {
    std::size_t pre  = 0;
    std::size_t post = 0;
    SynapseParams params;

    friend bool operator==(const Connection&, const Connection&) = default;
};

// Full description of one simulated network. `inputs[i]` lists the external
// signals summed into neuron i.
struct NetworkSpec {
    std::vector<NeuronSpec> neurons;
    std::vector<Connection> synapses;
    std::vector<std::vector<InputSignal>> inputs;

    std::size_t size() const { return neurons.size(); }

    void validate() const {
        if (neurons.empty()) throw std::invalid_argument("NetworkSpec: no neurons");
        if (inputs.size() != neurons.size()) {
            throw std::invalid_argument("NetworkSpec: inputs must list one entry per neuron");
        }
        for (std::size_t i = 0; i < neurons.size(); ++i) {
            const auto& n = neurons[i];
            if (const auto* hh = std::get_if<HHParams>(&n.model)) hh->validate();
            if (n.initial_state.size() != model_state_size(n.model)) {
                throw std::invalid_argument("NetworkSpec: neuron " + std::to_string(i)
                                            + " initial_state has wrong length");
            }
            for (double x : n.initial_state) {
                if (!std::isfinite(x)) {
                    throw std::invalid_argument("NetworkSpec: neuron " + std::to_string(i)
                                                + " initial_state is not finite");
                }
            }
            for (const auto& s : inputs[i]) rwta::validate(s);
        }
        for (std::size_t j = 0; j < synapses.size(); ++j) {
            const auto& c = synapses[j];
            if (c.pre >= neurons.size() || c.post >= neurons.size()) {
                throw std::invalid_argument("NetworkSpec: synapse " + std::to_string(j)
                                            + " index out of range");
            }
            if (c.pre == c.post) {
                throw std::invalid_argument("NetworkSpec: synapse " + std::to_string(j)
                                            + " is a self-connection");
            }
            c.params.validate();
        }
    }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Flat state vector layout: neuron states in order, then one filtered
// voltage per synapse in synapse-list order.
struct StateLayout {
    std::vector<std::size_t> neuron_offset;
    std::size_t synapse_offset = 0;
    std::size_t size = 0;

    explicit StateLayout(const NetworkSpec& spec) {
        neuron_offset.reserve(spec.neurons.size());
        std::size_t off = 0;
        for (const auto& n : spec.neurons) {
            neuron_offset.push_back(off);
            off += model_state_size(n.model);
        }
        synapse_offset = off;
        size = off + spec.synapses.size();
    }

    std::size_t voltage(std::size_t neuron) const { return neuron_offset[neuron]; }
    std::size_t filter(std::size_t synapse) const { return synapse_offset + synapse; }

    // Neuron owning a state component; synapse filters map to their
    // presynaptic neuron.
    std::size_t owner(const NetworkSpec& spec, std::size_t component) const {
        if (component >= synapse_offset) return spec.synapses[component - synapse_offset].pre;
        std::size_t i = 0;
        while (i + 1 < neuron_offset.size() && neuron_offset[i + 1] <= component) ++i;
        return i;
    }
};

// Initial state: each neuron's stored initial state, and each synapse
// filter at its presynaptic neuron's initial voltage.
inline std::vector<double> initial_state(const NetworkSpec& spec) {
    const StateLayout layout(spec);
    std::vector<double> y(layout.size);
    for (std::size_t i = 0; i < spec.neurons.size(); ++i) {
        const auto& s = spec.neurons[i].initial_state;
        std::copy(s.begin(), s.end(), y.begin() + static_cast<std::ptrdiff_t>(layout.neuron_offset[i]));
    }
    for (std::size_t j = 0; j < spec.synapses.size(); ++j) {
        y[layout.filter(j)] = spec.neurons[spec.synapses[j].pre].initial_state[0];
    }
    return y;
}

inline std::vector<double> model_resting_state(const NeuronModel& m, double I_hold) {
    if (const auto* hh = std::get_if<HHParams>(&m)) {
        const HHState s = hh_resting_state(*hh, I_hold);
        return {s.V, s.m, s.h, s.n};
    }
    const RSState s = rs_resting_state(I_hold);
    return {s.V, s.V1, s.V2};
}

inline double constant_bias(const std::vector<InputSignal>& signals) {
    double b = 0.0;
    for (const auto& s : signals) {
        if (const auto* c = std::get_if<ConstantBias>(&s)) b += c->amplitude;
    }
    return b;
}

// Places every neuron at its equilibrium under the constant part of its
// input: ConstantBias plus the tonic synaptic current it would receive if
// every neuron sat at its model's zero-input resting voltage. Voltages are
// then staggered by stagger * index. With inhibitory coupling this starts
// each neuron below rest while the synapse filters start at the
// (hyperpolarized) presynaptic voltages, so t = 0 is a release from
// inhibition and the first winner is decided by rebound.
inline void settle_initial_states(NetworkSpec& spec, double stagger = 0.1) {
    const std::size_t n = spec.neurons.size();
    std::vector<double> tonic(n, 0.0);
    std::vector<double> rest_v(n);
    for (std::size_t i = 0; i < n; ++i) {
        tonic[i] = i < spec.inputs.size() ? constant_bias(spec.inputs[i]) : 0.0;
        rest_v[i] = model_resting_state(spec.neurons[i].model, 0.0)[0];
    }
    for (const auto& c : spec.synapses) {
        tonic[c.post] += synapse_current(SynapseState{rest_v[c.pre]}, c.params);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto s = model_resting_state(spec.neurons[i].model, tonic[i]);
        s[0] += stagger * static_cast<double>(i);
        spec.neurons[i].initial_state = std::move(s);
    }
}

// Half-center oscillator: two neurons with reciprocal inhibition.
inline NetworkSpec build_hco(const NeuronModel& model, const SynapseParams& inhibitory,
                             double stagger = 0.1) {
    if (!inhibitory.inhibitory()) throw std::invalid_argument("build_hco: g_syn must be negative");
    inhibitory.validate();
    NetworkSpec spec;
    spec.neurons.assign(2, NeuronSpec{model, {}});
    spec.synapses = {{0, 1, inhibitory}, {1, 0, inhibitory}};
    spec.inputs.resize(2);
    settle_initial_states(spec, stagger);
    return spec;
}

// Ring oscillator: all-to-all inhibition (pre-major order, N(N-1) synapses)
// followed by the excitatory cycle i -> (i + 1) mod N. A zero excitatory
// gain is allowed and yields null edges.
inline NetworkSpec build_ring(std::size_t n, const NeuronModel& model, const SynapseParams& inhibitory,
                              const SynapseParams& excitatory, double stagger = 0.1) {
    if (n < 2) throw std::invalid_argument("build_ring: need at least two neurons");
    if (!inhibitory.inhibitory()) throw std::invalid_argument("build_ring: inhibitory g_syn must be negative");
    if (excitatory.g_syn < 0.0) throw std::invalid_argument("build_ring: excitatory g_syn must be non-negative");
    inhibitory.validate();
    excitatory.validate();
    NetworkSpec spec;
    spec.neurons.assign(n, NeuronSpec{model, {}});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) spec.synapses.push_back({i, j, inhibitory});
        }
    }
    for (std::size_t i = 0; i < n; ++i) spec.synapses.push_back({i, (i + 1) % n, excitatory});
    spec.inputs.resize(n);
    settle_initial_states(spec, stagger);
    return spec;
}

// Standard-normal draws for one step, one per GaussianNoise signal, in
// (neuron, signal) order.
using NoiseDraws = std::vector<std::vector<double>>;

// External current into each neuron at time t with the step's noise draws
// and controller output frozen.
inline void external_input(const NetworkSpec& spec, double t, const NoiseDraws& noise, double I_apply,
                           std::span<double> out) {
    for (std::size_t i = 0; i < spec.neurons.size(); ++i) {
        std::size_t k = 0;
        double sum = 0.0;
        for (const auto& sig : spec.inputs[i]) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, ConstantBias>) {
                        sum += v.amplitude;
                    } else if constexpr (std::is_same_v<T, PulseTrain> || std::is_same_v<T, RhythmicPulses>) {
                        sum += v.value(t);
                    } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                        const double z = (i < noise.size() && k < noise[i].size()) ? noise[i][k] : 0.0;
                        sum += std::sqrt(v.variance) * z;
                        ++k;
                    } else {
                        sum += I_apply;
                    }
                },
                sig);
        }
        out[i] = sum;
    }
}

inline std::vector<double> external_input(const NetworkSpec& spec, double t, const NoiseDraws& noise = {},
                                          double I_apply = 0.0) {
    std::vector<double> out(spec.neurons.size(), 0.0);
    external_input(spec, t, noise, I_apply, out);
    return out;
}

// Per-neuron total input: external current plus every incoming synaptic
// current at the given state.
inline std::vector<double> total_input(const NetworkSpec& spec, std::span<const double> y,
                                       std::span<const double> external) {
    const StateLayout layout(spec);
    std::vector<double> I(external.begin(), external.end());
    for (std::size_t j = 0; j < spec.synapses.size(); ++j) {
        const auto& c = spec.synapses[j];
        I[c.post] += synapse_current(SynapseState{y[layout.filter(j)]}, c.params);
    }
    return I;
}

// Right-hand side of the coupled network ODE with externally frozen inputs.
class NetworkSystem {
public:
    explicit NetworkSystem(const NetworkSpec& spec)
        : spec_(&spec), layout_(spec), current_(spec.neurons.size(), 0.0), external_(spec.neurons.size(), 0.0) {
        pre_v_.reserve(spec.synapses.size());
        for (const auto& c : spec.synapses) pre_v_.push_back(layout_.voltage(c.pre));
    }

    const StateLayout& layout() const { return layout_; }
    const NetworkSpec& spec() const { return *spec_; }

    void set_external(std::span<const double> external) {
        std::copy(external.begin(), external.end(), external_.begin());
    }

    void operator()(double /*t*/, std::span<const double> y, std::span<double> dydt) {
        const auto& spec = *spec_;
        std::copy(external_.begin(), external_.end(), current_.begin());
        for (std::size_t j = 0; j < spec.synapses.size(); ++j) {
            const auto& c = spec.synapses[j];
            const SynapseState s{y[layout_.filter(j)]};
            current_[c.post] += synapse_current(s, c.params);
            dydt[layout_.filter(j)] = synapse_filter_derivative(y[pre_v_[j]], s, c.params);
        }
        for (std::size_t i = 0; i < spec.neurons.size(); ++i) {
            const std::size_t o = layout_.neuron_offset[i];
            if (const auto* p = std::get_if<HHParams>(&spec.neurons[i].model)) {
                const HHState d = hh_derivatives({y[o], y[o + 1], y[o + 2], y[o + 3]}, *p, current_[i]);
                dydt[o] = d.V;
                dydt[o + 1] = d.m;
                dydt[o + 2] = d.h;
                dydt[o + 3] = d.n;
            } else {
                const RSState d = rs_derivatives({y[o], y[o + 1], y[o + 2]}, current_[i]);
                dydt[o] = d.V;
                dydt[o + 1] = d.V1;
                dydt[o + 2] = d.V2;
            }
        }
    }

private:
    const NetworkSpec* spec_;
    StateLayout layout_;
    std::vector<std::size_t> pre_v_;
    std::vector<double> current_;
    std::vector<double> external_;
};

}  // namespace rwta
