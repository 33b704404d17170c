// Command-line front end: simulate, fit, diagnose, sweep-nu.

#include "garchmc/commands.hpp"
#include "garchmc/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct FlagDef {
    const char* key;
    const char* help;
};

// Flags accepted by every subcommand; unused ones are ignored.
const std::vector<FlagDef> kFlags = {
    {"alpha", "ARCH coefficient (simulate)"},
    {"beta", "GARCH coefficient (simulate)"},
    {"omega", "variance offset (simulate)"},
    {"n", "number of returns to simulate"},
    {"seed", "random seed"},
    {"method", "adaptive | metropolis"},
    {"nu", "Student-t degrees of freedom"},
    {"burn-in", "discarded Metropolis steps"},
    {"pilot", "Metropolis draws for the first proposal fit"},
    {"refresh-interval", "draws between proposal refits (also V-trace spacing in diagnose)"},
    {"draws", "recorded draws (default 199000 adaptive, 600000 metropolis)"},
    {"blocks", "jackknife blocks"},
    {"nu-list", "comma-separated nu values for sweep-nu"},
    {"max-lag", "largest ACF lag in diagnose"},
    {"record-timing", "store wall-clock seconds in the report (true/false)"},
    {"chain-out", "also write the chain CSV here (fit)"},
    {"out", "output file (simulate, fit) or directory (diagnose, sweep-nu)"},
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    std::string input;
};

void add_flags(Subcommand& sub, bool takes_input, const char* input_help) {
    for (const auto& f : kFlags) {
        sub.options[f.key] = sub.app->add_option(std::string("--") + f.key, sub.values[f.key], f.help);
    }
    sub.app->add_option("--config", sub.config_path, "key=value config file; flags take precedence");
    if (takes_input) sub.app->add_option("input", sub.input, input_help);
}

int dispatch(Subcommand& sub, int (*command)(const garchmc::RunConfig&, std::ostream&, std::ostream&)) {
    try {
        std::map<std::string, std::string> file_values;
        if (!sub.config_path.empty()) file_values = garchmc::read_config_file(sub.config_path);
        std::map<std::string, std::string> flag_values;
        for (const auto& [key, option] : sub.options) {
            if (option->count() > 0) flag_values[key] = sub.values[key];
        }
        if (!sub.input.empty()) flag_values["input"] = sub.input;
        const garchmc::RunConfig cfg = garchmc::resolve_config(file_values, flag_values);
        return command(cfg, std::cout, std::cerr);
    } catch (const garchmc::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return garchmc::kExitValidation;
    } catch (const garchmc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return garchmc::kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian GARCH(1,1) estimation with an adaptive Student-t Metropolis-Hastings sampler"};
    app.require_subcommand(1);

    Subcommand simulate{app.add_subcommand("simulate", "generate a synthetic GARCH(1,1) returns file")};
    Subcommand fit{app.add_subcommand("fit", "sample the posterior of a returns file")};
    Subcommand diagnose{app.add_subcommand("diagnose", "ACF, history, V-trace and scatter CSVs of a chain")};
    Subcommand sweep{app.add_subcommand("sweep-nu", "adaptive fits over a list of nu values")};

    add_flags(simulate, false, "");
    add_flags(fit, true, "returns file");
    add_flags(diagnose, true, "chain CSV file");
    add_flags(sweep, true, "returns file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : garchmc::kExitValidation;
    }

    if (simulate.app->parsed()) return dispatch(simulate, garchmc::cmd_simulate);
    if (fit.app->parsed()) return dispatch(fit, garchmc::cmd_fit);
    if (diagnose.app->parsed()) return dispatch(diagnose, garchmc::cmd_diagnose);
    return dispatch(sweep, garchmc::cmd_sweep_nu);
}
