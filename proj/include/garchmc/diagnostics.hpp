#pragma once

#include "garchmc/samplers.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace garchmc {

/// ACF(0..t_max) of one scalar series. values[0] == 1.
struct AcfSeries {
    std::vector<double> values;

    [[nodiscard]] std::size_t max_lag() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/**
 * Biased-normalization autocorrelation
 *   ACF(t) = (1/N) sum_{j=1}^{N-t} (x_j - m)(x_{j+t} - m) / s2
 * with m and s2 the full-series mean and (1/N) variance.
 * Throws ValidationError unless N > t_max, NumericError for a constant series.
 */
[[nodiscard]] AcfSeries acf(std::span<const double> x, std::size_t t_max);

/**
 * tau = 1/2 + sum_{i=1}^{W} ACF(i), W the initial-positive-sequence window: the
 * sum stops before the first non-positive ACF value or at the last stored lag.
 */
[[nodiscard]] double integrated_autocorrelation_time(const AcfSeries& a);

/// Same value as integrated_autocorrelation_time(acf(x, max_lag)) but only
/// evaluates lags up to the end of the window.
[[nodiscard]] double integrated_autocorrelation_time(std::span<const double> x, std::size_t max_lag);

enum class JackknifeStatistic { Mean, Tau };

struct JackknifeResult {
    double estimate = 0.0;
    double error = 0.0;
};

inline constexpr std::size_t kDefaultJackknifeBlocks = 20;

/**
 * @brief Delete-one-block jackknife.
 *
 * The series is truncated to blocks * floor(N / blocks) values and split into
 * equal contiguous blocks. With stat_b the statistic on the series with block b
 * removed (the remaining pieces joined end to end),
 *   error = sqrt((B-1)/B sum_b (stat_b - mean_b stat_b)^2).
 * The estimate is the statistic on the whole series.
 *
 * For the Tau statistic the leave-one-out autocovariances are assembled from
 * per-block lag sums plus boundary corrections rather than recomputed from
 * scratch.
 */
[[nodiscard]] JackknifeResult jackknife_error(std::span<const double> x, JackknifeStatistic statistic,
                                              std::size_t blocks = kDefaultJackknifeBlocks);

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double std_dev = 0.0;
    /// Unset when the component never moves.
    std::optional<double> tau;
    /// std_dev * sqrt(2 tau / k).
    std::optional<double> stat_error;
    std::optional<double> two_tau;
    std::optional<double> two_tau_error;
    /// Jackknife error of the mean.
    std::optional<double> mean_jackknife_error;
    bool degenerate = false;

    friend bool operator==(const ParameterSummary&, const ParameterSummary&) = default;
};

struct ChainSummary {
    std::size_t draws = 0;
    double acceptance = 0.0;
    std::vector<ParameterSummary> parameters;

    [[nodiscard]] bool degenerate() const noexcept;
    friend bool operator==(const ChainSummary&, const ChainSummary&) = default;
};

/// Coordinate names of GARCH chains.
[[nodiscard]] std::vector<std::string> garch_parameter_names();

/**
 * Per-coordinate mean, standard deviation, tau, statistical error and 2 tau with
 * its jackknife error. Zero-variance coordinates are reported as degenerate
 * instead of failing. Throws ValidationError for an empty chain.
 */
[[nodiscard]] ChainSummary summarize(const Chain& chain, const std::vector<std::string>& names,
                                     std::size_t blocks = kDefaultJackknifeBlocks);

}  // namespace garchmc
