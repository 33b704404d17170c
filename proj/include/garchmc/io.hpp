#pragma once

#include "garchmc/diagnostics.hpp"
#include "garchmc/garch.hpp"
#include "garchmc/samplers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace garchmc {

// Returns file: one value per line, optionally preceded by a single header
// line starting with '#'. Values are written in shortest round-trip form.

/// Parse errors are ValidationErrors that name the 1-based line number.
[[nodiscard]] ReturnSeries parse_returns(std::istream& in);
[[nodiscard]] ReturnSeries read_returns(const std::filesystem::path& path);
void write_returns(std::ostream& out, std::span<const double> values, std::string_view header);

// Chain file: CSV with header "step,alpha,beta,omega,accepted"; step counts
// from 1 and accepted is 0 or 1.

inline constexpr std::string_view kChainHeader = "step,alpha,beta,omega,accepted";

void write_chain_csv(std::ostream& out, const Chain& chain);
/// Cached log-posteriors are not stored in the file; they read back as NaN.
[[nodiscard]] Chain parse_chain_csv(std::istream& in);
[[nodiscard]] Chain read_chain_csv(const std::filesystem::path& path);

/// Sampler settings echoed into a fit report.
struct ScheduleEcho {
    std::size_t burn_in = 0;
    std::size_t pilot = 0;
    std::size_t refresh_interval = 0;
    std::size_t draws = 0;
    std::optional<double> nu;
    std::vector<double> step_widths;
    bool tuning_converged = false;
    double tuning_acceptance = 0.0;

    friend bool operator==(const ScheduleEcho&, const ScheduleEcho&) = default;
};

struct FitReport {
    std::string method;
    std::uint64_t seed = 0;
    std::size_t observations = 0;
    ScheduleEcho schedule;
    ChainSummary summary;
    /// Mean and V = E[(theta - M)(theta - M)^t] of the moment pool (adaptive)
    /// or of the recorded draws (metropolis), ordered (alpha, beta, omega).
    std::vector<double> moment_mean;
    std::vector<std::vector<double>> V;
    std::vector<double> acceptance_trace;
    double final_acceptance = 0.0;
    /// Only present when timing was requested; keeps reports byte-reproducible otherwise.
    std::optional<double> wall_clock_seconds;

    friend bool operator==(const FitReport&, const FitReport&) = default;
};

[[nodiscard]] std::string serialize(const FitReport& report);
/// Throws ValidationError on malformed input.
[[nodiscard]] FitReport parse_fit_report(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace garchmc
