#pragma once

#include "garchmc/io.hpp"
#include "garchmc/samplers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace garchmc {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitIo = 2, kExitNumeric = 3 };

/**
 * Settings shared by all subcommands. Each field can come from a `--flag` or
 * from a `key=value` line of a config file, where the key is the flag name
 * without dashes (e.g. `burn-in=3000`). Flags win over the file.
 */
struct RunConfig {
    double alpha = 0.1;
    double beta = 0.8;
    double omega = 0.1;
    std::size_t n = 2000;
    std::uint64_t seed = 42;

    std::string method = "adaptive";
    double nu = 10.0;
    std::size_t burn_in = 3000;
    std::size_t pilot = 1000;
    std::size_t refresh_interval = 1000;
    /// Defaults to 199000 (adaptive) or 600000 (metropolis).
    std::optional<std::size_t> draws;
    std::size_t blocks = kDefaultJackknifeBlocks;
    std::vector<double> nu_list = {4, 6, 8, 10, 12, 20};
    std::size_t max_lag = 200;
    bool record_timing = false;

    std::string input;
    std::string out;
    std::string chain_out;

    [[nodiscard]] std::size_t resolved_draws() const;
    [[nodiscard]] AdaptiveConfig adaptive() const;
};

inline constexpr std::size_t kAdaptiveDefaultDraws = 199000;
inline constexpr std::size_t kMetropolisDefaultDraws = 600000;

/// Recognized keys, in flag spelling without the leading dashes.
[[nodiscard]] const std::vector<std::string>& config_keys();

/// Sets one field from its textual value; ValidationError on unknown key or bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key=value` lines; blank lines and lines starting with '#' are skipped.
[[nodiscard]] std::map<std::string, std::string> parse_config_text(const std::string& text);
[[nodiscard]] std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Defaults, then file values, then flag values.
[[nodiscard]] RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                                       const std::map<std::string, std::string>& flag_values);

/// Mean of the last (up to) 10 acceptance windows.
[[nodiscard]] double final_acceptance(const std::vector<double>& trace);

struct FitOutcome {
    FitReport report;
    Chain chain;
};

/// Tunes Metropolis widths and runs the configured sampler on y.
[[nodiscard]] FitOutcome fit(const ReturnSeries& y, const RunConfig& cfg);

/// Per-nu seed used by sweep-nu: base seed + position in the list.
[[nodiscard]] std::uint64_t sweep_seed(std::uint64_t base, std::size_t index);

/// File name of the report for one nu inside a sweep directory.
[[nodiscard]] std::string sweep_report_name(double nu);

// Subcommands. Messages go to `log`, errors to `err`; the return value is an
// ExitCode. No output file is left behind when a command fails before writing.

int cmd_simulate(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_fit(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_diagnose(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_sweep_nu(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace garchmc
