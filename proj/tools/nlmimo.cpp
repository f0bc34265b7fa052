// nlmimo: runs downlink distortion experiments and writes CSV/JSON artifacts.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlmimo/experiment.hpp"

namespace {

struct SpecFlags {
    std::string config;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::vector<std::string> sets;
};

void add_spec_flags(CLI::App& app, SpecFlags& f) {
    app.add_option("--config", f.config, "Config file (key = value lines, or JSON)")->envname("NLMIMO_CONFIG");
    app.add_option("--preset", f.preset, "Compiled-in preset, applied before --config")->envname("NLMIMO_PRESET");
    app.add_option("--out", f.out, "Output directory")->envname("NLMIMO_OUT");
    app.add_option("--seed", f.seed, "Master seed")->envname("NLMIMO_SEED");
    app.add_option("--trials", f.trials, "Monte Carlo trials per sweep point")->envname("NLMIMO_TRIALS");
    app.add_option("--threads", f.threads, "Worker threads (0: hardware concurrency)")->envname("NLMIMO_THREADS");
    app.add_option("--set", f.sets, "Override one key, e.g. --set L=5 (repeatable)");
}

nlmimo::ExperimentSpec build_spec(const SpecFlags& f) {
    nlmimo::ExperimentSpec spec;
    if (!f.preset.empty()) spec = nlmimo::preset(f.preset);
    if (!f.config.empty()) nlmimo::apply_config_file(spec, f.config);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw nlmimo::ConfigError("--set expects key=value, got '" + s + "'");
        nlmimo::apply_setting(spec, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!f.out.empty()) spec.outputs = f.out;
    if (f.seed) spec.base.seed = *f.seed;
    if (f.trials) spec.base.trials = *f.trials;
    if (f.threads) spec.mc.threads = *f.threads;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear distortion in massive MIMO OFDM downlinks"};
    app.require_subcommand(1);

    SpecFlags run_flags;
    bool selftest = false;
    bool no_mc = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write psd.csv / evm.csv / metadata.json");
    add_spec_flags(*run, run_flags);
    run->add_flag("--selftest", selftest, "Run the small-instance oracle suite instead");
    run->add_flag("--no-mc", no_mc, "Closed forms only");

    SpecFlags val_flags;
    auto* validate = app.add_subcommand("validate", "Report every problem with a spec without running it");
    add_spec_flags(*validate, val_flags);

    app.add_subcommand("presets", "List compiled-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("presets")) {
            for (const auto& n : nlmimo::preset_names()) std::cout << n << '\n';
            return 0;
        }
        if (app.got_subcommand(validate)) {
            const auto diags = build_spec(val_flags).validate();
            for (const auto& d : diags) std::cout << d.field << ": " << d.message << '\n';
            if (diags.empty()) std::cout << "ok\n";
            return diags.empty() ? 0 : 1;
        }
        if (selftest) return nlmimo::run_selftest(std::cout) ? 0 : 1;

        auto spec = build_spec(run_flags);
        if (no_mc) spec.run_mc = false;
        const auto report = nlmimo::run_experiment(spec);
        for (const auto& p : report.result.points) {
            std::cerr << nlmimo::to_string(report.result.axis) << '=' << p.value << "  " << p.runtime_s << " s\n";
        }
        for (const auto& p : report.written) std::cout << p.string() << '\n';
        return 0;
    } catch (const nlmimo::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
