#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "config.hpp"
#include "events.hpp"
#include "presets.hpp"
#include "simulate.hpp"

namespace rwta {

struct AnalysisOptions {
    double event_threshold = -40.0;
    double burst_window = 5.0;
    std::size_t discard_events = 5;
    std::size_t phase_neuron = 0;  // compared against the reference train

    friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

// Reference pulses are detected at the controller's -40 level.
inline constexpr double kReferenceThreshold = -40.0;

struct Scenario {
    std::string name;
    NetworkSpec network;
    SimConfig sim;
    std::optional<ReferencePulses> reference;
    std::optional<ControllerAttachment> controller;
    AnalysisOptions analysis;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline Json to_json(const Scenario& s) {
    Json doc{{"name", s.name}, {"network", to_json(s.network)}, {"sim", to_json(s.sim)}};
    if (s.reference) doc["reference"] = to_json(*s.reference);
    if (s.controller) doc["controller"] = to_json(s.controller->params, s.controller->monitored_neuron);
    doc["analysis"] = Json{{"event_threshold", s.analysis.event_threshold},
                           {"burst_window", s.analysis.burst_window},
                           {"discard_events", s.analysis.discard_events},
                           {"phase_neuron", s.analysis.phase_neuron}};
    return doc;
}

// Parses a config document in builder or raw network form. Raw form is what
// to_json(Scenario) writes, so a resolved config loads back unchanged.
inline Scenario scenario_from_json(const Json& doc) {
    using namespace config_detail;
    allow_keys(doc, "config", {"name", "network", "sim", "reference", "controller", "analysis"});
    Scenario s;
    s.name = string_or(doc, "name", "custom", "config");
    if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("config.name: must be a non-empty plain file name");
    }
    if (doc.contains("reference")) s.reference = reference_from_json(doc.at("reference"));
    if (doc.contains("controller")) {
        const Json& c = doc.at("controller");
        allow_keys(c, "controller", {"tau", "gain", "threshold", "monitored_neuron"});
        if (!s.reference) throw ConfigError("controller: requires a top-level 'reference'");
        ControllerAttachment a;
        a.params.tau = number_or(c, "tau", a.params.tau, "controller");
        a.params.gain = number_or(c, "gain", a.params.gain, "controller");
        a.params.threshold = number_or(c, "threshold", a.params.threshold, "controller");
        a.monitored_neuron = unsigned_or(c, "monitored_neuron", 0, "controller");
        a.reference = *s.reference;
        try {
            a.params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        s.controller = a;
    }
    if (!doc.contains("network")) throw ConfigError("config: missing 'network'");
    const Json& net = doc.at("network");
    require_object(net, "network");
    if (net.contains("builder")) {
        allow_keys(net, "network", {"builder"});
        s.network = built_network_from_json(net.at("builder"), s.reference, s.controller.has_value());
    } else {
        s.network = raw_network_from_json(net);
    }
    s.sim = doc.contains("sim") ? sim_config_from_json(doc.at("sim")) : SimConfig{};
    if (doc.contains("analysis")) {
        const Json& a = doc.at("analysis");
        allow_keys(a, "analysis", {"event_threshold", "burst_window", "discard_events", "phase_neuron"});
        s.analysis.event_threshold = number_or(a, "event_threshold", s.analysis.event_threshold, "analysis");
        s.analysis.burst_window = number_or(a, "burst_window", s.analysis.burst_window, "analysis");
        s.analysis.discard_events = unsigned_or(a, "discard_events", s.analysis.discard_events, "analysis");
        s.analysis.phase_neuron = unsigned_or(a, "phase_neuron", s.analysis.phase_neuron, "analysis");
    } else if (!s.network.neurons.empty() && !is_hh(s.network.neurons.front().model)) {
        s.analysis.event_threshold = 0.0;
    }
    if (s.controller && s.controller->monitored_neuron >= s.network.size()) {
        throw ConfigError("controller.monitored_neuron: out of range");
    }
    if (s.analysis.phase_neuron >= s.network.size()) throw ConfigError("analysis.phase_neuron: out of range");
    return s;
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    Json doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("'" + path.string() + "' is not valid JSON");
    return doc;
}

// A preset name or a path to a JSON config, with --set style overrides
// applied before parsing.
inline Json load_document(std::string_view source, const std::vector<std::string>& overrides = {}) {
    Json doc = is_preset(source) ? preset_document(source) : Json{};
    if (!is_preset(source)) {
        const std::filesystem::path p(source);
        if (!std::filesystem::exists(p)) throw UnknownPreset("'" + std::string(source) + "' is neither a preset nor a file");
        doc = read_json_file(p);
    }
    for (const auto& o : overrides) {
        const auto [path, value] = parse_override(o);
        apply_override(doc, path, value);
    }
    return doc;
}

// ---- numeric text ---------------------------------------------------------

inline std::string format_g9(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

// Rounds every sample to the 9 significant digits written to trace.csv so
// analysis on the in-memory trace matches analysis on the file.
inline void quantize(Trace& trace) {
    auto q = [](double x) { return parse_double(format_g9(x)); };
    for (auto& t : trace.times) t = q(t);
    for (auto& c : trace.channels) {
        for (auto& x : c) x = q(x);
    }
}

inline void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "t";
    for (const auto& n : trace.names) out << ',' << n;
    out << '\n';
    std::string line;
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        line = format_g9(trace.times[k]);
        for (const auto& c : trace.channels) {
            line += ',';
            line += format_g9(c[k]);
        }
        line += '\n';
        out << line;
    }
}

inline Trace read_trace_csv(std::istream& in) {
    Trace trace;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("trace.csv: empty file");
    {
        std::stringstream header(line);
        std::string cell;
        std::getline(header, cell, ',');
        if (cell != "t") throw std::invalid_argument("trace.csv: first column must be 't'");
        while (std::getline(header, cell, ',')) trace.add_channel(cell);
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t col = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const std::string_view cell(line.data() + start,
                                        (comma == std::string::npos ? line.size() : comma) - start);
            const double v = parse_double(cell);
            if (col == 0) {
                trace.times.push_back(v);
            } else if (col - 1 < trace.channels.size()) {
                trace.channels[col - 1].push_back(v);
            } else {
                throw std::invalid_argument("trace.csv: too many columns on row " + std::to_string(row));
            }
            ++col;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (col != trace.channels.size() + 1) {
            throw std::invalid_argument("trace.csv: too few columns on row " + std::to_string(row));
        }
    }
    return trace;
}

// ---- analysis -------------------------------------------------------------

// One train per neuron (channel nK), plus "ref" when the trace carries the
// reference waveform.
inline std::vector<EventTrain> extract_events(const Trace& trace, std::size_t neurons, double threshold) {
    std::vector<EventTrain> trains;
    for (std::size_t i = 0; i < neurons; ++i) {
        const std::string name = neuron_channel(i);
        trains.push_back(detect_events(trace.times, trace.channel(name + ".V"), threshold, name));
    }
    if (trace.has("ref.u")) {
        trains.push_back(detect_events(trace.times, trace.channel("ref.u"), kReferenceThreshold, "ref"));
    }
    return trains;
}

inline Json events_to_json(const std::vector<EventTrain>& trains) {
    Json out = Json::array();
    for (const auto& t : trains) out.push_back(Json{{"channel", t.channel}, {"times", t.times}});
    return out;
}

inline std::vector<EventTrain> events_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("events.json: expected an array");
    std::vector<EventTrain> trains;
    for (const auto& e : j) {
        trains.push_back({e.at("channel").get<std::string>(), e.at("times").get<std::vector<double>>()});
    }
    return trains;
}

inline Json period_json(const EventTrain& train, std::size_t discard) {
    Json j{{"channel", train.channel}, {"events", train.size()}};
    try {
        const PeriodEstimate p = estimate_period(train, discard);
        j["period_mean"] = p.mean;
        j["period_std"] = p.std;
        j["frequency"] = p.frequency();
    } catch (const InsufficientEvents&) {
        j["period_mean"] = nullptr;
        j["period_std"] = nullptr;
        j["frequency"] = nullptr;
    }
    return j;
}

// Summary metrics. Everything except "diagnostics" is a function of the
// event trains and the trace as written to disk.
inline Json summarize(const Scenario& s, const Trace& trace, const std::vector<EventTrain>& trains) {
    const std::size_t n = s.network.size();
    const std::span<const EventTrain> neuron_trains(trains.data(), n);

    Json channels = Json::array();
    for (const auto& t : trains) channels.push_back(period_json(t, s.analysis.discard_events));

    const auto seq = winner_sequence(neuron_trains, s.analysis.burst_window);
    const auto ids = winner_ids(seq);
    Json seq_ids = Json::array();
    Json seq_times = Json::array();
    for (const auto& e : seq) {
        seq_ids.push_back(e.neuron + 1);
        seq_times.push_back(e.time);
    }

    std::vector<std::vector<Interval>> active;
    for (std::size_t i = 0; i < n; ++i) {
        active.push_back(active_intervals(trace.times, trace.channel(neuron_channel(i) + ".V"),
                                          s.analysis.event_threshold));
    }

    Json summary{{"scenario", s.name},
                 {"seed", s.sim.seed},
                 {"event_threshold", s.analysis.event_threshold},
                 {"channels", std::move(channels)},
                 {"winner_sequence", {{"neurons", std::move(seq_ids)}, {"times", std::move(seq_times)}}},
                 {"phase_jumps", phase_jumps(ids, n)},
                 {"immediate_repeats", immediate_repeats(ids)},
                 {"max_active_overlap", max_pairwise_overlap(active)}};

    if (trains.size() > n && trains[n].channel == "ref") {
        const auto& observed = trains[s.analysis.phase_neuron];
        Json ph{{"channel", observed.channel}};
        try {
            ph["offsets"] = phase_difference(trains[n], observed);
        } catch (const InsufficientEvents&) {
            ph["offsets"] = Json::array();
        }
        summary["phase_offsets"] = std::move(ph);
    }
    if (s.controller && trace.has("ctrl.I_apply") && !trace.times.empty()) {
        summary["controller"] = Json{{"final_I_apply", trace.channel("ctrl.I_apply").back()},
                                     {"final_error", trace.channel("ctrl.e").back()}};
    }
    summary["diagnostics"] = Json{{"gating_violation", trace.gating_violation},
                                  {"gating_violation_time", trace.gating_violation_time}};
    summary["config"] = to_json(s);
    return summary;
}

struct RunResult {
    Trace trace;
    std::vector<EventTrain> events;
    Json summary;
};

inline RunResult run(const Scenario& s) {
    RunResult r;
    r.trace = simulate(s.network, s.sim, s.controller);
    if (s.reference && !r.trace.has("ref.u")) {
        auto& ch = r.trace.channels[r.trace.add_channel("ref.u")];
        ch.reserve(r.trace.times.size());
        for (double t : r.trace.times) ch.push_back(s.reference->value(t));
    }
    quantize(r.trace);
    r.events = extract_events(r.trace, s.network.size(), s.analysis.event_threshold);
    r.summary = summarize(s, r.trace, r.events);
    return r;
}

inline std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("RWTA_OUTPUT_DIR"); env && *env) return env;
    return "runs";
}

inline std::filesystem::path run_directory(const std::filesystem::path& root, const Scenario& s) {
    return root / (s.name + "_seed" + std::to_string(s.sim.seed));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

// Writes trace.csv, events.json, summary.json and config.resolved.json.
inline void write_run(const std::filesystem::path& dir, const Scenario& s, const RunResult& r) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "trace.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + (dir / "trace.csv").string() + "'");
        write_trace_csv(r.trace, out);
    }
    write_text(dir / "events.json", events_to_json(r.events).dump(2) + "\n");
    write_text(dir / "summary.json", r.summary.dump(2) + "\n");
    write_text(dir / "config.resolved.json", to_json(s).dump(2) + "\n");
}

// ---- sweeps ---------------------------------------------------------------

struct SweepRow {
    Json value;
    std::optional<PeriodEstimate> period;
    std::string error;  // empty on success
};

// One run per value with `path` set to it; the period is estimated on
// neuron `analysis.phase_neuron` after the configured discard. Failures are
// recorded per row.
inline std::vector<SweepRow> sweep(const Json& base, const std::string& path, const std::vector<Json>& values) {
    auto one = [&base, &path](Json value) {
        SweepRow row{value, std::nullopt, {}};
        try {
            Json doc = base;
            apply_override(doc, path, value);
            const Scenario s = scenario_from_json(doc);
            const Trace trace = simulate(s.network, s.sim, s.controller);
            const auto& v = trace.channel(neuron_channel(s.analysis.phase_neuron) + ".V");
            const EventTrain train = detect_events(trace.times, v, s.analysis.event_threshold);
            row.period = estimate_period(train, s.analysis.discard_events);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    };
    std::vector<std::future<SweepRow>> jobs;
    for (const auto& v : values) jobs.push_back(std::async(std::launch::async, one, v));
    std::vector<SweepRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "value,period,period_std,frequency,status\n";
    for (const auto& r : rows) {
        out << (r.value.is_string() ? r.value.get<std::string>() : r.value.dump()) << ',';
        if (r.period) {
            out << format_g9(r.period->mean) << ',' << format_g9(r.period->std) << ','
                << format_g9(r.period->frequency()) << ",ok\n";
        } else {
            std::string msg = r.error;
            for (auto& c : msg) {
                if (c == ',' || c == '\n') c = ';';
            }
            out << ",,," << msg << '\n';
        }
    }
}

}  // namespace rwta
