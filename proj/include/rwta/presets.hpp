#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace rwta {

// Builder-form config documents reproducing the figure scenarios. The
// parameters no source pins down (rebound pulse, durations, the Fig. 5 bias,
// reference waveform and monitored neuron) were chosen by simulation.
inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig1_rebound",     "fig2_hco",        "fig4_ring_hh",
                                                   "fig4_ring_rs",     "fig5a_endogenous", "fig5b_entrained",
                                                   "fig5c_adaptive"};
    return names;
}

namespace preset_detail {

inline Json synapse(double g, double tau, double v_th, double alpha) {
    return Json{{"g_syn", g}, {"tau", tau}, {"v_th", v_th}, {"alpha", alpha}};
}

inline Json sim(double duration, std::size_t stride) {
    return Json{{"dt", 0.01}, {"duration", duration}, {"seed", 1}, {"record_stride", stride}, {"record_all", false}};
}

inline Json analysis(double threshold) {
    return Json{{"event_threshold", threshold}, {"burst_window", 5.0}, {"discard_events", 5}, {"phase_neuron", 0}};
}

// Five HH neurons with fast inhibition and spike-gated excitation, held on
// a tonic bias of 3 uA/cm^2 (below about 2.5 the ring stops) with
// variance-0.1 noise on every neuron.
inline Json fig5_base(std::string name, double duration) {
    return Json{{"name", std::move(name)},
                {"network",
                 {{"builder",
                   {{"topology", "ring"},
                    {"size", 5},
                    {"model", "hh"},
                    {"inhibitory", synapse(-15.0, 0.1, -65.0, 1.5)},
                    {"excitatory", synapse(10.0, 0.1, 10.0, 1.5)},
                    {"bias", 3.0},
                    {"noise_variance", 0.1}}}}},
                {"sim", sim(duration, 20)},
                {"analysis", analysis(-40.0)}};
}

// 5 ms pulses from -65 to 0 every 30 ms, about 8% faster than the
// endogenous rhythm.
inline Json fig5_reference() {
    return Json{{"period", 30.0}, {"width", 5.0}, {"onset", 0.0}, {"low", -65.0}, {"high", 0.0}};
}

}  // namespace preset_detail

class UnknownPreset : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Json preset_document(std::string_view name) {
    using namespace preset_detail;
    if (name == "fig1_rebound") {
        // Single HH neuron at rest, -5 uA/cm^2 for 50 ms from t = 50 ms.
        return Json{{"name", "fig1_rebound"},
                    {"network",
                     {{"builder",
                       {{"topology", "single"},
                        {"model", "hh"},
                        {"pulse",
                         {{"onset", 50.0}, {"width", 50.0}, {"period", 1000.0}, {"amplitude", -5.0}, {"count", 1},
                          {"target", 0}}}}}}},
                    {"sim", sim(300.0, 1)},
                    {"analysis", analysis(-40.0)}};
    }
    if (name == "fig2_hco") {
        return Json{{"name", "fig2_hco"},
                    {"network",
                     {{"builder",
                       {{"topology", "hco"}, {"model", "hh"}, {"inhibitory", synapse(-10.0, 1.0, -65.0, 1.5)}}}}},
                    {"sim", sim(1000.0, 5)},
                    {"analysis", analysis(-40.0)}};
    }
    if (name == "fig4_ring_hh") {
        return Json{{"name", "fig4_ring_hh"},
                    {"network",
                     {{"builder",
                       {{"topology", "ring"},
                        {"size", 5},
                        {"model", "hh"},
                        {"inhibitory", synapse(-10.0, 1.0, -65.0, 1.5)},
                        {"excitatory", synapse(0.5, 5.0, -65.0, 1.5)}}}}},
                    {"sim", sim(2000.0, 5)},
                    {"analysis", analysis(-40.0)}};
    }
    if (name == "fig4_ring_rs") {
        return Json{{"name", "fig4_ring_rs"},
                    {"network",
                     {{"builder",
                       {{"topology", "ring"},
                        {"size", 5},
                        {"model", "rs"},
                        {"inhibitory", synapse(-5.0, 0.1, -4.0, 2.0)},
                        {"excitatory", synapse(0.3, 60.0, -4.0, 2.0)}}}}},
                    {"sim", sim(2000.0, 5)},
                    {"analysis", analysis(0.0)}};
    }
    if (name == "fig5a_endogenous") return fig5_base("fig5a_endogenous", 20000.0);
    if (name == "fig5b_entrained") {
        Json doc = fig5_base("fig5b_entrained", 40000.0);
        doc["reference"] = fig5_reference();
        doc["network"]["builder"]["entrainment"] = Json{{"target", 0}, {"g_syn", 2.0}, {"v_th", -45.0}, {"alpha", 1.5}};
        return doc;
    }
    if (name == "fig5c_adaptive") {
        Json doc = fig5_base("fig5c_adaptive", 40000.0);
        doc["reference"] = fig5_reference();
        doc["network"]["builder"]["entrainment"] = Json{{"target", 0}, {"g_syn", 2.0}, {"v_th", -45.0}, {"alpha", 1.5}};
        // Neuron 5 precedes the entrained neuron in the ring, so every phase
        // jump skips it and registers as a missed event.
        doc["controller"] = Json{{"tau", 250.0}, {"gain", 2.0 / 250.0}, {"threshold", -40.0}, {"monitored_neuron", 4}};
        return doc;
    }
    throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

inline bool is_preset(std::string_view name) {
    for (const auto& n : preset_names()) {
        if (n == name) return true;
    }
    return false;
}

}  // namespace rwta
