#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "controller.hpp"
#include "network.hpp"
#include "rk4.hpp"

namespace rwta {

struct SimConfig {
    double dt = 0.01;          // [ms] (model time units for RS)
    double duration = 1000.0;  // [ms]
    std::uint64_t seed = 1;
    std::size_t record_stride = 1;
    bool record_all = false;   // gating/filter/current channels as well as voltages

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
        if (!(duration >= dt) && std::llround(duration / dt) < 1) {
            throw std::invalid_argument("SimConfig: duration must be at least dt");
        }
        if (record_stride < 1) throw std::invalid_argument("SimConfig: record_stride must be >= 1");
    }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, std::size_t neuron)
        : std::runtime_error("integration diverged at t=" + std::to_string(time) + " (neuron "
                             + std::to_string(neuron + 1) + ")"),
          time_(time),
          neuron_(neuron) {}

    double time() const { return time_; }
    std::size_t neuron() const { return neuron_; }

private:
    double time_;
    std::size_t neuron_;
};

struct Trace {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> channels;

    // Set when any HH gate left [-1e-6, 1 + 1e-6]: dt is too large.
    bool gating_violation = false;
    double gating_violation_time = 0.0;

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return i;
        }
        throw std::out_of_range("Trace: no channel named '" + std::string(name) + "'");
    }

    bool has(std::string_view name) const {
        for (const auto& n : names) {
            if (n == name) return true;
        }
        return false;
    }

    const std::vector<double>& channel(std::string_view name) const { return channels[index_of(name)]; }

    std::size_t add_channel(std::string name) {
        names.push_back(std::move(name));
        channels.emplace_back();
        return channels.size() - 1;
    }
};

inline std::string neuron_channel(std::size_t neuron) { return "n" + std::to_string(neuron + 1); }

// One Gaussian stream per (neuron, noise signal). Each stream is seeded
// from (seed, neuron, stream id) alone and yields exactly one draw per
// integration step, so draws depend only on (seed, neuron, step).
class NoiseSource {
public:
    NoiseSource(const NetworkSpec& spec, std::uint64_t seed) : draws_(spec.neurons.size()) {
        for (std::size_t i = 0; i < spec.neurons.size(); ++i) {
            for (const auto& sig : spec.inputs[i]) {
                if (const auto* g = std::get_if<GaussianNoise>(&sig)) {
                    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(g->stream),
                                      static_cast<std::uint32_t>(g->stream >> 32)};
                    streams_.push_back({i, std::mt19937_64(seq), std::normal_distribution<double>(0.0, 1.0)});
                    draws_[i].push_back(0.0);
                }
            }
        }
    }

    const NoiseDraws& next() {
        std::vector<std::size_t> k(draws_.size(), 0);
        for (auto& s : streams_) draws_[s.neuron][k[s.neuron]++] = s.dist(s.engine);
        return draws_;
    }

private:
    struct Stream {
        std::size_t neuron;
        std::mt19937_64 engine;
        std::normal_distribution<double> dist;
    };
    std::vector<Stream> streams_;
    NoiseDraws draws_;
};

// One RK4 step of the network with the external currents frozen; throws
// DivergenceError on a non-finite result.
inline void step_rk4(NetworkSystem& system, std::span<double> y, double t, double dt,
                     std::span<const double> external, Rk4Workspace& ws) {
    system.set_external(external);
    rk4_step(system, y, t, dt, ws);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) throw DivergenceError(t + dt, system.layout().owner(system.spec(), i));
    }
}

// Fixed-step simulation. Inputs are sampled at the start of each step and
// held for it; an attached controller is advanced once per step after the
// state update, and its output feeds ControllerDriven inputs from the next
// step on. Samples are taken at t = 0, every record_stride steps, and at
// the final step.
inline Trace simulate(const NetworkSpec& spec, const SimConfig& config,
                      const std::optional<ControllerAttachment>& controller = std::nullopt) {
    spec.validate();
    config.validate();
    if (controller) {
        controller->params.validate();
        controller->reference.validate();
        if (controller->monitored_neuron >= spec.size()) {
            throw std::invalid_argument("simulate: controller monitors a neuron outside the network");
        }
    }

    NetworkSystem system(spec);
    const StateLayout& layout = system.layout();
    const std::size_t n = spec.size();
    const std::size_t steps = config.steps();
    const double dt = config.dt;

    std::vector<double> y = initial_state(spec);
    Rk4Workspace ws(y.size());
    NoiseSource noise(spec, config.seed);
    std::vector<double> external(n);

    Trace trace;
    std::vector<std::size_t> state_channels;  // (trace channel) -> state index
    std::vector<std::size_t> state_index;
    auto add_state = [&](std::string name, std::size_t idx) {
        state_channels.push_back(trace.add_channel(std::move(name)));
        state_index.push_back(idx);
    };
    for (std::size_t i = 0; i < n; ++i) add_state(neuron_channel(i) + ".V", layout.voltage(i));
    std::size_t current_base = 0;
    if (config.record_all) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t o = layout.neuron_offset[i];
            if (is_hh(spec.neurons[i].model)) {
                add_state(neuron_channel(i) + ".m", o + 1);
                add_state(neuron_channel(i) + ".h", o + 2);
                add_state(neuron_channel(i) + ".n", o + 3);
            } else {
                add_state(neuron_channel(i) + ".V1", o + 1);
                add_state(neuron_channel(i) + ".V2", o + 2);
            }
        }
        for (std::size_t j = 0; j < spec.synapses.size(); ++j) {
            add_state("syn" + std::to_string(j + 1) + ".Vf", layout.filter(j));
        }
        current_base = trace.names.size();
        for (std::size_t i = 0; i < n; ++i) trace.add_channel(neuron_channel(i) + ".I_ext");
    }
    std::size_t ctrl_base = 0;
    if (controller) {
        ctrl_base = trace.add_channel("ref.u");
        trace.add_channel("ctrl.e");
        trace.add_channel("ctrl.I_apply");
    }

    const std::size_t samples = steps / config.record_stride + 2;
    trace.times.reserve(samples);
    for (auto& c : trace.channels) c.reserve(samples);

    ControllerState ctrl;
    if (controller) {
        ctrl.prev_reference = controller->reference.value(0.0);
        ctrl.prev_voltage = y[layout.voltage(controller->monitored_neuron)];
    }

    auto record = [&](double t) {
        trace.times.push_back(t);
        for (std::size_t c = 0; c < state_channels.size(); ++c) {
            trace.channels[state_channels[c]].push_back(y[state_index[c]]);
        }
        if (config.record_all) {
            for (std::size_t i = 0; i < n; ++i) trace.channels[current_base + i].push_back(external[i]);
        }
        if (controller) {
            trace.channels[ctrl_base].push_back(controller->reference.value(t));
            trace.channels[ctrl_base + 1].push_back(ctrl.error);
            trace.channels[ctrl_base + 2].push_back(ctrl.I_apply);
        }
    };

    auto check_gates = [&](double t) {
        if (trace.gating_violation) return;
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_hh(spec.neurons[i].model)) continue;
            const std::size_t o = layout.neuron_offset[i];
            for (std::size_t g = 1; g <= 3; ++g) {
                if (y[o + g] < -1e-6 || y[o + g] > 1.0 + 1e-6) {
                    trace.gating_violation = true;
                    trace.gating_violation_time = t;
                    return;
                }
            }
        }
    };

    external_input(spec, 0.0, noise.next(), ctrl.I_apply, external);
    record(0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double t_next = static_cast<double>(k + 1) * dt;
        step_rk4(system, y, t, dt, external, ws);
        check_gates(t_next);
        if (controller) {
            ctrl = controller_step(ctrl, controller->params, controller->reference.value(t_next),
                                   y[layout.voltage(controller->monitored_neuron)], dt);
        }
        external_input(spec, t_next, noise.next(), ctrl.I_apply, external);
        if ((k + 1) % config.record_stride == 0 || k + 1 == steps) record(t_next);
    }
    return trace;
}

}  // namespace rwta
