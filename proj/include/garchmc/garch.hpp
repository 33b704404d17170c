#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace garchmc {

/**
 * @brief GARCH(1,1) parameter triple.
 *
 * The conditional variance follows
 *   sigma2_t = omega + alpha * y_{t-1}^2 + beta * sigma2_{t-1}
 * and is well defined (positive, stationary) when omega, alpha, beta > 0 and
 * alpha + beta < 1.
 *
 * As a sampler coordinate vector the ordering is (alpha, beta, omega).
 */
struct GarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    [[nodiscard]] bool is_valid() const noexcept;

    /// Throws ValidationError naming the violated constraint.
    void validate() const;

    [[nodiscard]] Eigen::VectorXd to_vector() const;
    [[nodiscard]] static GarchParams from_vector(const Eigen::VectorXd& theta);

    friend bool operator==(const GarchParams&, const GarchParams&) = default;
};

inline constexpr std::size_t kGarchDim = 3;
inline constexpr std::size_t kAlphaIndex = 0;
inline constexpr std::size_t kBetaIndex = 1;
inline constexpr std::size_t kOmegaIndex = 2;

/// Observed returns y_1..y_n. Finite, at least two values, not all zero.
class ReturnSeries {
public:
    explicit ReturnSeries(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Population variance of the series.
    [[nodiscard]] double sample_variance() const noexcept;

    friend bool operator==(const ReturnSeries&, const ReturnSeries&) = default;

private:
    std::vector<double> values_;
};

/// Conditional variances sigma2_1..sigma2_n, same length as the returns.
struct VolatilitySeries {
    std::vector<double> values;
};

/// omega / (1 - alpha - beta).
[[nodiscard]] double unconditional_variance(const GarchParams& params);

/// Runs the variance recursion; sigma2_1 is the unconditional variance.
[[nodiscard]] VolatilitySeries volatility_filter(const GarchParams& params,
                                                 std::span<const double> y);

/// Gaussian log-likelihood sum_t [-0.5 ln(2 pi sigma2_t) - y_t^2 / (2 sigma2_t)].
[[nodiscard]] double log_likelihood(const GarchParams& params, std::span<const double> y);
[[nodiscard]] double log_likelihood(const GarchParams& params, const ReturnSeries& y);

/// Flat-prior log-posterior; -infinity outside the valid parameter region.
[[nodiscard]] double log_posterior(const GarchParams& params, const ReturnSeries& y,
                                   double log_prior_constant = 0.0);

/// Steps discarded before recording in simulate().
inline constexpr std::size_t kSimulationWarmup = 1000;

/**
 * @brief Generates n returns y_t = sigma_t * eps_t with eps_t ~ N(0,1).
 *
 * The recursion starts at the unconditional variance and runs for
 * kSimulationWarmup + n steps; only the last n returns are kept. The output is
 * a deterministic function of (params, n, seed).
 */
[[nodiscard]] std::vector<double> simulate(const GarchParams& params, std::size_t n,
                                           std::uint64_t seed);

/// Log-posterior of the coordinate vector (alpha, beta, omega) given fixed data.
class GarchPosterior {
public:
    explicit GarchPosterior(ReturnSeries y, double log_prior_constant = 0.0)
        : y_(std::move(y)), log_prior_constant_(log_prior_constant) {}

    [[nodiscard]] double operator()(const Eigen::VectorXd& theta) const;

    [[nodiscard]] const ReturnSeries& data() const noexcept { return y_; }

private:
    ReturnSeries y_;
    double log_prior_constant_;
};

/// Interior starting point alpha=0.05, beta=0.90, omega=(1-alpha-beta)*var(y).
[[nodiscard]] GarchParams default_start(const ReturnSeries& y);

}  // namespace garchmc
