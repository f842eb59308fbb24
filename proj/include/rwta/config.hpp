#pragma once

// JSON config documents: (de)serialization of networks, simulation settings
// and controller attachments, plus dotted-path overrides.
//
// Neuron indices inside config documents (pre, post, target,
// monitored_neuron, phase_neuron) are 0-based. Output files name neurons
// n1..nN.

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "controller.hpp"
#include "input_signal.hpp"
#include "network.hpp"
#include "simulate.hpp"

namespace rwta {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace config_detail {

inline void require_object(const Json& j, std::string_view where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
}

inline void allow_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
    require_object(j, where);
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto key : keys) known = known || key == k;
        if (!known) throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
    }
}

inline double number(const Json& j, std::string_view key, std::string_view where) {
    if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + std::string(key) + "'");
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + std::string(key) + ": expected a number");
    return v.get<double>();
}

inline double number_or(const Json& j, std::string_view key, double fallback, std::string_view where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

inline std::uint64_t unsigned_or(const Json& j, std::string_view key, std::uint64_t fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(std::string(key));
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 && !v.is_number_unsigned())) {
        throw ConfigError(std::string(where) + "." + std::string(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::string string_or(const Json& j, std::string_view key, std::string fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) throw ConfigError(std::string(where) + "." + std::string(key) + ": expected a string");
    return v.get<std::string>();
}

inline bool bool_or(const Json& j, std::string_view key, bool fallback, std::string_view where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(std::string(key));
    if (!v.is_boolean()) throw ConfigError(std::string(where) + "." + std::string(key) + ": expected true/false");
    return v.get<bool>();
}

inline const Json& array(const Json& j, std::string_view key, std::string_view where) {
    if (!j.contains(key) || !j.at(std::string(key)).is_array()) {
        throw ConfigError(std::string(where) + ": '" + std::string(key) + "' must be an array");
    }
    return j.at(std::string(key));
}

}  // namespace config_detail

// ---- leaf types -----------------------------------------------------------

inline Json to_json(const HHParams& p) {
    return Json{{"C", p.C},       {"g_Na", p.g_Na}, {"g_K", p.g_K}, {"g_L", p.g_L},
                {"E_Na", p.E_Na}, {"E_K", p.E_K},   {"E_L", p.E_L}};
}

inline HHParams hh_params_from_json(const Json& j, std::string_view where = "hh_params") {
    using namespace config_detail;
    allow_keys(j, where, {"C", "g_Na", "g_K", "g_L", "E_Na", "E_K", "E_L"});
    HHParams p;
    p.C = number_or(j, "C", p.C, where);
    p.g_Na = number_or(j, "g_Na", p.g_Na, where);
    p.g_K = number_or(j, "g_K", p.g_K, where);
    p.g_L = number_or(j, "g_L", p.g_L, where);
    p.E_Na = number_or(j, "E_Na", p.E_Na, where);
    p.E_K = number_or(j, "E_K", p.E_K, where);
    p.E_L = number_or(j, "E_L", p.E_L, where);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    return p;
}

inline Json to_json(const SynapseParams& p) {
    return Json{{"g_syn", p.g_syn}, {"tau", p.tau}, {"v_th", p.V_th}, {"alpha", p.alpha}};
}

inline SynapseParams synapse_params_from_json(const Json& j, std::string_view where,
                                              std::initializer_list<std::string_view> extra_keys = {}) {
    using namespace config_detail;
    require_object(j, where);
    for (const auto& [k, v] : j.items()) {
        bool known = k == "g_syn" || k == "tau" || k == "v_th" || k == "alpha";
        for (auto e : extra_keys) known = known || e == k;
        if (!known) throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
    }
    SynapseParams p;
    p.g_syn = number(j, "g_syn", where);
    p.tau = number(j, "tau", where);
    p.V_th = number(j, "v_th", where);
    p.alpha = number(j, "alpha", where);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    return p;
}

inline Json to_json(const ReferencePulses& r) {
    Json j{{"period", r.period}, {"width", r.width}, {"onset", r.onset}, {"low", r.low}, {"high", r.high}};
    if (!r.pulse_times.empty()) j["pulse_times"] = r.pulse_times;
    return j;
}

inline ReferencePulses reference_from_json(const Json& j, std::string_view where = "reference") {
    using namespace config_detail;
    allow_keys(j, where, {"period", "width", "onset", "low", "high", "pulse_times"});
    ReferencePulses r;
    r.period = number_or(j, "period", r.period, where);
    r.width = number_or(j, "width", r.width, where);
    r.onset = number_or(j, "onset", r.onset, where);
    r.low = number_or(j, "low", r.low, where);
    r.high = number_or(j, "high", r.high, where);
    if (j.contains("pulse_times")) {
        for (const auto& t : array(j, "pulse_times", where)) {
            if (!t.is_number()) throw ConfigError(std::string(where) + ".pulse_times: expected numbers");
            r.pulse_times.push_back(t.get<double>());
        }
    }
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    return r;
}

inline Json to_json(const InputSignal& s) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantBias>) {
                return Json{{"type", "constant_bias"}, {"amplitude", v.amplitude}};
            } else if constexpr (std::is_same_v<T, PulseTrain>) {
                return Json{{"type", "pulse_train"}, {"onset", v.onset},         {"width", v.width},
                            {"period", v.period},    {"amplitude", v.amplitude}, {"count", v.count}};
            } else if constexpr (std::is_same_v<T, GaussianNoise>) {
                return Json{{"type", "gaussian_noise"}, {"variance", v.variance}, {"stream", v.stream}};
            } else if constexpr (std::is_same_v<T, RhythmicPulses>) {
                return Json{{"type", "rhythmic_pulses"},
                            {"reference", to_json(v.reference)},
                            {"g_syn", v.coupling.g_syn},
                            {"v_th", v.coupling.V_th},
                            {"alpha", v.coupling.alpha}};
            } else {
                return Json{{"type", "controller"}};
            }
        },
        s);
}

inline InputSignal input_signal_from_json(const Json& j, std::string_view where) {
    using namespace config_detail;
    require_object(j, where);
    const std::string type = string_or(j, "type", "", where);
    if (type == "constant_bias") {
        allow_keys(j, where, {"type", "amplitude"});
        return ConstantBias{number(j, "amplitude", where)};
    }
    if (type == "pulse_train") {
        allow_keys(j, where, {"type", "onset", "width", "period", "amplitude", "count"});
        PulseTrain p;
        p.onset = number(j, "onset", where);
        p.width = number(j, "width", where);
        p.period = number(j, "period", where);
        p.amplitude = number(j, "amplitude", where);
        p.count = static_cast<int>(unsigned_or(j, "count", 0, where));
        if (!(p.width > 0.0 && p.width < p.period)) throw ConfigError(std::string(where) + ": need 0 < width < period");
        return p;
    }
    if (type == "gaussian_noise") {
        allow_keys(j, where, {"type", "variance", "stream"});
        GaussianNoise g;
        g.variance = number(j, "variance", where);
        g.stream = unsigned_or(j, "stream", 0, where);
        if (!(g.variance >= 0.0)) throw ConfigError(std::string(where) + ": variance must be >= 0");
        return g;
    }
    if (type == "rhythmic_pulses") {
        allow_keys(j, where, {"type", "reference", "g_syn", "v_th", "alpha"});
        RhythmicPulses r;
        if (!j.contains("reference")) throw ConfigError(std::string(where) + ": missing 'reference'");
        r.reference = reference_from_json(j.at("reference"), std::string(where) + ".reference");
        r.coupling.g_syn = number_or(j, "g_syn", r.coupling.g_syn, where);
        r.coupling.V_th = number_or(j, "v_th", r.coupling.V_th, where);
        r.coupling.alpha = number_or(j, "alpha", r.coupling.alpha, where);
        return r;
    }
    if (type == "controller") {
        allow_keys(j, where, {"type"});
        return ControllerDriven{};
    }
    throw ConfigError(std::string(where) + ": unknown input type '" + type + "'");
}

// ---- network --------------------------------------------------------------

inline NeuronModel model_from_name(const std::string& name, const Json* hh_params, std::string_view where) {
    if (name == "hh") return hh_params ? hh_params_from_json(*hh_params, std::string(where) + ".params") : HHParams{};
    if (name == "rs") return RSParams{};
    throw ConfigError(std::string(where) + ": unknown model '" + name + "' (expected hh or rs)");
}

inline Json to_json(const NetworkSpec& spec) {
    Json neurons = Json::array();
    for (const auto& n : spec.neurons) {
        Json jn;
        if (const auto* hh = std::get_if<HHParams>(&n.model)) {
            jn["model"] = "hh";
            jn["params"] = to_json(*hh);
        } else {
            jn["model"] = "rs";
        }
        jn["initial_state"] = n.initial_state;
        neurons.push_back(std::move(jn));
    }
    Json synapses = Json::array();
    for (const auto& c : spec.synapses) {
        Json js{{"pre", c.pre}, {"post", c.post}};
        const Json params = to_json(c.params);
        for (const auto& [k, v] : params.items()) js[k] = v;
        synapses.push_back(std::move(js));
    }
    Json inputs = Json::array();
    for (const auto& list : spec.inputs) {
        Json jl = Json::array();
        for (const auto& s : list) jl.push_back(to_json(s));
        inputs.push_back(std::move(jl));
    }
    return Json{{"neurons", std::move(neurons)}, {"synapses", std::move(synapses)}, {"inputs", std::move(inputs)}};
}

inline NetworkSpec raw_network_from_json(const Json& j) {
    using namespace config_detail;
    allow_keys(j, "network", {"neurons", "synapses", "inputs"});
    NetworkSpec spec;
    const auto& neurons = array(j, "neurons", "network");
    for (std::size_t i = 0; i < neurons.size(); ++i) {
        const std::string where = "network.neurons." + std::to_string(i);
        const auto& jn = neurons[i];
        allow_keys(jn, where, {"model", "params", "initial_state"});
        const std::string model = string_or(jn, "model", "", where);
        if (model == "rs" && jn.contains("params")) throw ConfigError(where + ": rs model takes no params");
        NeuronSpec n{model_from_name(model, jn.contains("params") ? &jn.at("params") : nullptr, where), {}};
        for (const auto& x : array(jn, "initial_state", where)) {
            if (!x.is_number()) throw ConfigError(where + ".initial_state: expected numbers");
            n.initial_state.push_back(x.get<double>());
        }
        spec.neurons.push_back(std::move(n));
    }
    const auto& synapses = array(j, "synapses", "network");
    for (std::size_t k = 0; k < synapses.size(); ++k) {
        const std::string where = "network.synapses." + std::to_string(k);
        const auto& js = synapses[k];
        Connection c;
        c.params = synapse_params_from_json(js, where, {"pre", "post"});
        c.pre = unsigned_or(js, "pre", 0, where);
        c.post = unsigned_or(js, "post", 0, where);
        if (!js.contains("pre") || !js.contains("post")) throw ConfigError(where + ": missing pre/post");
        spec.synapses.push_back(c);
    }
    if (j.contains("inputs")) {
        const auto& inputs = array(j, "inputs", "network");
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const std::string where = "network.inputs." + std::to_string(i);
            if (!inputs[i].is_array()) throw ConfigError(where + ": expected an array");
            std::vector<InputSignal> list;
            for (std::size_t k = 0; k < inputs[i].size(); ++k) {
                list.push_back(input_signal_from_json(inputs[i][k], where + "." + std::to_string(k)));
            }
            spec.inputs.push_back(std::move(list));
        }
    } else {
        spec.inputs.resize(spec.neurons.size());
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

// Builder form: a named topology plus uniform inputs, expanded into a raw
// NetworkSpec. `reference` is the scenario-level rhythmic reference used by
// an entrainment block.
inline NetworkSpec built_network_from_json(const Json& b, const std::optional<ReferencePulses>& reference,
                                           bool controlled) {
    using namespace config_detail;
    const std::string where = "network.builder";
    allow_keys(b, where,
               {"topology", "size", "model", "hh_params", "inhibitory", "excitatory", "bias", "noise_variance",
                "pulse", "entrainment", "stagger"});
    const std::string topology = string_or(b, "topology", "", where);
    const NeuronModel model = model_from_name(string_or(b, "model", "hh", where),
                                              b.contains("hh_params") ? &b.at("hh_params") : nullptr, where);
    const double stagger = number_or(b, "stagger", 0.1, where);

    NetworkSpec spec;
    try {
        if (topology == "single") {
            allow_keys(b, where, {"topology", "model", "hh_params", "bias", "noise_variance", "pulse", "entrainment",
                                  "stagger"});
            spec.neurons.assign(1, NeuronSpec{model, {}});
            spec.inputs.resize(1);
        } else if (topology == "hco") {
            if (!b.contains("inhibitory")) throw ConfigError(where + ": hco needs 'inhibitory'");
            spec = build_hco(model, synapse_params_from_json(b.at("inhibitory"), where + ".inhibitory"), stagger);
        } else if (topology == "ring") {
            if (!b.contains("inhibitory") || !b.contains("excitatory")) {
                throw ConfigError(where + ": ring needs 'inhibitory' and 'excitatory'");
            }
            const auto n = unsigned_or(b, "size", 5, where);
            spec = build_ring(n, model, synapse_params_from_json(b.at("inhibitory"), where + ".inhibitory"),
                              synapse_params_from_json(b.at("excitatory"), where + ".excitatory"), stagger);
        } else {
            throw ConfigError(where + ": unknown topology '" + topology + "' (expected single, hco or ring)");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }

    const std::size_t n = spec.size();
    const double bias = number_or(b, "bias", 0.0, where);
    const double noise = number_or(b, "noise_variance", 0.0, where);
    if (noise < 0.0) throw ConfigError(where + ".noise_variance: must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (bias != 0.0) spec.inputs[i].push_back(ConstantBias{bias});
        if (noise > 0.0) spec.inputs[i].push_back(GaussianNoise{noise, 0});
        if (controlled) spec.inputs[i].push_back(ControllerDriven{});
    }
    if (b.contains("pulse")) {
        const Json& p = b.at("pulse");
        const std::string pw = where + ".pulse";
        allow_keys(p, pw, {"onset", "width", "period", "amplitude", "count", "target"});
        const auto target = unsigned_or(p, "target", 0, pw);
        if (target >= n) throw ConfigError(pw + ".target: out of range");
        Json signal = p;
        signal.erase("target");
        signal["type"] = "pulse_train";
        spec.inputs[target].push_back(input_signal_from_json(signal, pw));
    }
    if (b.contains("entrainment")) {
        const Json& e = b.at("entrainment");
        const std::string ew = where + ".entrainment";
        allow_keys(e, ew, {"target", "g_syn", "v_th", "alpha"});
        if (!reference) throw ConfigError(ew + ": requires a top-level 'reference'");
        const auto target = unsigned_or(e, "target", 0, ew);
        if (target >= n) throw ConfigError(ew + ".target: out of range");
        RhythmicPulses r{*reference, {}};
        r.coupling.g_syn = number_or(e, "g_syn", r.coupling.g_syn, ew);
        r.coupling.V_th = number_or(e, "v_th", r.coupling.V_th, ew);
        r.coupling.alpha = number_or(e, "alpha", r.coupling.alpha, ew);
        spec.inputs[target].push_back(r);
    }
    settle_initial_states(spec, stagger);
    return spec;
}

inline Json to_json(const SimConfig& c) {
    return Json{{"dt", c.dt},
                {"duration", c.duration},
                {"seed", c.seed},
                {"record_stride", c.record_stride},
                {"record_all", c.record_all}};
}

inline SimConfig sim_config_from_json(const Json& j) {
    using namespace config_detail;
    allow_keys(j, "sim", {"dt", "duration", "seed", "record_stride", "record_all"});
    SimConfig c;
    c.dt = number_or(j, "dt", c.dt, "sim");
    c.duration = number_or(j, "duration", c.duration, "sim");
    c.seed = unsigned_or(j, "seed", c.seed, "sim");
    c.record_stride = unsigned_or(j, "record_stride", c.record_stride, "sim");
    c.record_all = bool_or(j, "record_all", c.record_all, "sim");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline Json to_json(const ControllerParams& p, std::size_t monitored) {
    return Json{{"tau", p.tau}, {"gain", p.gain}, {"threshold", p.threshold}, {"monitored_neuron", monitored}};
}

// ---- overrides ------------------------------------------------------------

// Parses "a.b.3.c=value". The value is read as JSON when it parses,
// otherwise taken as a string.
inline std::pair<std::string, Json> parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(text) + "': expected <path>=<value>");
    }
    const std::string path(text.substr(0, eq));
    const std::string value(text.substr(eq + 1));
    Json v = Json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    return {path, v};
}

inline void apply_override(Json& doc, std::string_view path, const Json& value) {
    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (key.empty()) throw ConfigError("override path '" + std::string(path) + "' has an empty component");
        const bool last = dot == std::string_view::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            const auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (ec != std::errc{} || p != key.data() + key.size() || idx >= node->size()) {
                throw ConfigError("override path '" + std::string(path) + "': bad array index '" + key + "'");
            }
            node = &(*node)[idx];
        } else if (node->is_object() || node->is_null()) {
            node = &(*node)[key];
        } else {
            throw ConfigError("override path '" + std::string(path) + "': '" + key + "' is not inside an object");
        }
        if (last) break;
        start = dot + 1;
    }
    *node = value;
}

}  // namespace rwta
