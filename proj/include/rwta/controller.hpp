#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "synapse.hpp"

namespace rwta {

// Rectangular rhythmic reference u_r(t): `high` for `width` ms at the start
// of each pulse, `low` otherwise. Pulses start at onset + k * period, or at
// the explicit `pulse_times` when those are given.
struct ReferencePulses {
    double period = 30.0;
    double width  = 5.0;
    double onset  = 0.0;
    double low    = -65.0;
    double high   = 0.0;
    std::vector<double> pulse_times;  // sorted; overrides the periodic schedule

    void validate() const {
        if (!(width > 0.0)) throw std::invalid_argument("ReferencePulses: width must be positive");
        if (pulse_times.empty() && !(width < period)) {
            throw std::invalid_argument("ReferencePulses: width must be shorter than period");
        }
        if (!std::is_sorted(pulse_times.begin(), pulse_times.end())) {
            throw std::invalid_argument("ReferencePulses: pulse_times must be sorted");
        }
    }

    double value(double t) const {
        if (!pulse_times.empty()) {
            auto it = std::upper_bound(pulse_times.begin(), pulse_times.end(), t);
            if (it == pulse_times.begin()) return low;
            return (t - *std::prev(it) < width) ? high : low;
        }
        if (t < onset) return low;
        const double phase = std::fmod(t - onset, period);
        return phase < width ? high : low;
    }

    double frequency() const { return pulse_times.empty() ? 1.0 / period : 0.0; }

    friend bool operator==(const ReferencePulses&, const ReferencePulses&) = default;
};

// Static sigmoid that converts the reference waveform into a current.
struct EntrainmentCoupling {
    double g_syn = 2.0;
    double V_th  = -45.0;
    double alpha = 1.5;

    friend bool operator==(const EntrainmentCoupling&, const EntrainmentCoupling&) = default;
};

inline double entrainment_input(double u_r, const EntrainmentCoupling& c = {}) {
    return sigmoid_gain(c.g_syn, c.alpha, u_r - c.V_th);
}

struct ControllerParams {
    double tau       = 250.0;          // error filter time constant [ms]
    double gain      = 2.0 / 250.0;    // integrator gain [1/ms]
    double threshold = -40.0;          // event detector level [mV]

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("ControllerParams: tau must be positive");
        if (!(gain > 0.0)) throw std::invalid_argument("ControllerParams: gain must be positive");
    }

    friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

struct ControllerState {
    double error   = 0.0;  // filtered event-rate difference e [1/ms]
    double I_apply = 0.0;  // accumulated bias current
    double prev_reference = -INFINITY;
    double prev_voltage   = -INFINITY;
    int reference_events  = 0;
    int voltage_events    = 0;
};

// Adaptive frequency controller
//   u = F(u_r) - F(u_v),  de/dt = (u - e) / tau,  dI/dt = g_c e
// with F an upward threshold-crossing detector emitting unit impulses.
// The linear filter is discretized exactly: e decays by exp(-dt/tau) per
// step and each impulse adds +-1/tau at the step boundary.
inline ControllerState controller_step(ControllerState s, const ControllerParams& p,
                                       double u_r, double u_v, double dt) {
    const bool ref_event = s.prev_reference < p.threshold && p.threshold <= u_r;
    const bool volt_event = s.prev_voltage < p.threshold && p.threshold <= u_v;

    s.error *= std::exp(-dt / p.tau);
    if (ref_event) {
        s.error += 1.0 / p.tau;
        ++s.reference_events;
    }
    if (volt_event) {
        s.error -= 1.0 / p.tau;
        ++s.voltage_events;
    }
    s.I_apply += p.gain * s.error * dt;
    s.prev_reference = u_r;
    s.prev_voltage = u_v;
    return s;
}

// Wires a controller into a run: which neuron it listens to and what
// reference it tracks.
struct ControllerAttachment {
    ControllerParams params;
    std::size_t monitored_neuron = 0;
    ReferencePulses reference;

    friend bool operator==(const ControllerAttachment&, const ControllerAttachment&) = default;
};

}  // namespace rwta
