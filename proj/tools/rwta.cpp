#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rwta/rwta.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kDiverged = 3, kUnknownPreset = 4, kIo = 5 };

rwta::Json load(const std::string& source, const std::vector<std::string>& sets, const std::optional<std::uint64_t>& seed,
                bool record_all) {
    rwta::Json doc = rwta::load_document(source, sets);
    if (seed) doc["sim"]["seed"] = *seed;
    if (record_all) doc["sim"]["record_all"] = true;
    return doc;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const rwta::UnknownPreset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnknownPreset;
    } catch (const rwta::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiverged;
    } catch (const rwta::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const rwta::Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rebound winner-takes-all CPG simulator"};
    app.require_subcommand(1);

    std::string source;
    std::string out;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    bool record_all = false;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", source, "Preset name or path to a JSON config")->required();
        cmd->add_option("--set", sets, "Override a config value, e.g. sim.duration=500 (repeatable)")
            ->allow_extra_args(false);
        cmd->add_option("--seed", seed, "Noise seed");
    };

    auto* run = app.add_subcommand("run", "Simulate a scenario and write trace.csv, events.json, summary.json");
    common(run);
    run->add_option("--out", out, "Output root (default: $RWTA_OUTPUT_DIR or ./runs)");
    run->add_flag("--record-all", record_all, "Also record gating, filter, and input channels");

    std::string param;
    std::vector<std::string> values;
    auto* sweep = app.add_subcommand("sweep", "Run once per value of a config parameter and tabulate periods");
    common(sweep);
    sweep->add_option("--param", param, "Config path to vary, e.g. network.builder.bias")->required();
    sweep->add_option("--values", values, "Values to assign (JSON literals)")->expected(0, -1);
    sweep->add_option("--out", out, "Write the table here instead of stdout");

    auto* list = app.add_subcommand("list-presets", "Print the preset names");
    std::string dump_name;
    list->add_option("--show", dump_name, "Print the config document of one preset");

    auto* validate = app.add_subcommand("validate", "Check a preset or config and print its resolved form");
    common(validate);

    CLI11_PARSE(app, argc, argv);

    if (*list) {
        return guarded([&] {
            if (!dump_name.empty()) {
                std::cout << rwta::preset_document(dump_name).dump(2) << "\n";
                return int(kOk);
            }
            for (const auto& n : rwta::preset_names()) std::cout << n << "\n";
            return int(kOk);
        });
    }
    if (*validate) {
        return guarded([&] {
            const auto s = rwta::scenario_from_json(load(source, sets, seed, false));
            std::cout << rwta::to_json(s).dump(2) << "\n";
            return int(kOk);
        });
    }
    if (*run) {
        return guarded([&] {
            const auto s = rwta::scenario_from_json(load(source, sets, seed, record_all));
            const auto root = out.empty() ? rwta::default_output_root() : std::filesystem::path(out);
            const auto result = rwta::run(s);
            const auto dir = rwta::run_directory(root, s);
            rwta::write_run(dir, s, result);
            std::cout << dir.string() << "\n";
            return int(kOk);
        });
    }
    return guarded([&] {
        const rwta::Json base = load(source, sets, seed, false);
        rwta::scenario_from_json(base);
        std::vector<rwta::Json> parsed;
        for (const auto& v : values) {
            if (!v.empty()) parsed.push_back(rwta::parse_override(param + "=" + v).second);
        }
        const auto rows = rwta::sweep(base, param, parsed);
        if (out.empty()) {
            rwta::write_sweep_csv(rows, std::cout);
        } else {
            std::ofstream f(out);
            if (!f) throw std::runtime_error("cannot write '" + out + "'");
            rwta::write_sweep_csv(rows, f);
        }
        for (const auto& r : rows) {
            if (!r.error.empty()) std::cerr << "run " << r.value.dump() << " failed: " << r.error << "\n";
        }
        return int(kOk);
    });
}
