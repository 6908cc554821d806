// mra -- command-line front end for the simulation laboratory.
//
// Every subcommand runs one manifest-described experiment and writes
// results.csv / summary.json (and optionally plot.svg) into the output
// directory.  Exit codes: 0 the experiment's verdict holds, 1 it fails,
// 2 the configuration is invalid, 3 the run itself broke down.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <mra/mra.hpp>

namespace {

struct CommonArgs {
    std::string manifest_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--manifest", args.manifest_path, "path to the experiment manifest (JSON)")
        ->required();
    cmd->add_option("--seed", [&args](const CLI::results_t& res) {
        args.seed = std::stoull(res[0]);
        return true;
    }, "override the manifest's master seed");
    cmd->add_option("--out", [&args](const CLI::results_t& res) {
        args.out_dir = res[0];
        return true;
    }, "override the manifest's output directory");
}

int run(const std::string& subcommand, const CommonArgs& args) {
    mra::Manifest man = mra::load_manifest(args.manifest_path);
    if (man.experiment != subcommand)
        throw mra::ConfigError("manifest describes a \"" + man.experiment +
                               "\" experiment, but the \"" + subcommand +
                               "\" subcommand was invoked");
    mra::RunOverrides ov;
    ov.seed = args.seed;
    ov.out_dir = args.out_dir;
    const mra::ExperimentResult result = mra::run_experiment(man, ov);
    std::cout << result.summary.dump(2) << "\n";
    return result.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral simulation laboratory for non-local reaction-diffusion dynamics"};
    app.require_subcommand(1);

    const char* kinds[] = {"check",      "simulate", "ensemble", "decay",
                           "absorb",     "entry-time", "steady",   "oracle-compare"};
    const char* blurbs[] = {
        "verify the structural hypotheses of a model",
        "integrate a single trajectory",
        "run a Monte Carlo ensemble and report moment curves",
        "test the mean-square decay estimate against its envelope",
        "test entry into the absorbing ball at a target time",
        "measure the pullback entry time over a grid of release leads",
        "solve the stationary problem and locate it inside the absorbing ball",
        "compare the integrator against a closed-form solution",
    };
    CommonArgs args[sizeof kinds / sizeof kinds[0]];
    for (std::size_t i = 0; i < sizeof kinds / sizeof kinds[0]; ++i)
        add_common(app.add_subcommand(kinds[i], blurbs[i]), args[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (std::size_t i = 0; i < sizeof kinds / sizeof kinds[0]; ++i)
            if (app.get_subcommand(kinds[i])->parsed()) return run(kinds[i], args[i]);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const mra::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const mra::RuntimeFailure& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
}
