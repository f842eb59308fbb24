#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "controller.hpp"

namespace rwta {

struct ConstantBias {
    double amplitude = 0.0;
    friend bool operator==(const ConstantBias&, const ConstantBias&) = default;
};

// `amplitude` for `width` at onset + k * period; `count` pulses, or
// unlimited when count == 0.
struct PulseTrain {
    double onset     = 0.0;
    double width     = 1.0;
    double period    = 2.0;
    double amplitude = 0.0;
    int count        = 0;

    double value(double t) const {
        if (t < onset) return 0.0;
        const double since = t - onset;
        const double k = std::floor(since / period);
        if (count > 0 && k >= count) return 0.0;
        return (since - k * period) < width ? amplitude : 0.0;
    }

    friend bool operator==(const PulseTrain&, const PulseTrain&) = default;
};

// Zero-mean Gaussian current, drawn once per integration step and held for
// the step. `stream` separates several noise inputs on the same neuron.
struct GaussianNoise {
    double variance = 0.0;
    std::uint64_t stream = 0;
    friend bool operator==(const GaussianNoise&, const GaussianNoise&) = default;
};

// Reference waveform routed through a static sigmoid synapse.
struct RhythmicPulses {
    ReferencePulses reference;
    EntrainmentCoupling coupling;

    double value(double t) const { return entrainment_input(reference.value(t), coupling); }

    friend bool operator==(const RhythmicPulses&, const RhythmicPulses&) = default;
};

// Receives the adaptive controller's I_apply.
struct ControllerDriven {
    friend bool operator==(const ControllerDriven&, const ControllerDriven&) = default;
};

using InputSignal = std::variant<ConstantBias, PulseTrain, GaussianNoise, RhythmicPulses, ControllerDriven>;

inline void validate(const InputSignal& s) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                if (!(v.width > 0.0) || !(v.width < v.period)) {
                    throw std::invalid_argument("PulseTrain: require 0 < width < period");
                }
                if (v.count < 0) throw std::invalid_argument("PulseTrain: count must be >= 0");
            } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                if (!(v.variance >= 0.0)) throw std::invalid_argument("GaussianNoise: variance must be >= 0");
            } else if constexpr (std::is_same_v<T, RhythmicPulses>) {
                v.reference.validate();
            }
        },
        s);
}

}  // namespace rwta
