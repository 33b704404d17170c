#include "garchmc/garch.hpp"

#include "garchmc/error.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace garchmc {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // ln(2 pi)

}  // namespace

bool GarchParams::is_valid() const noexcept {
    // Written so that NaN fails every comparison.
    return omega > 0.0 && alpha > 0.0 && beta > 0.0 && alpha + beta < 1.0;
}

void GarchParams::validate() const {
    if (!(omega > 0.0)) {
        throw ValidationError("GARCH constraint violated: omega must be > 0 (got " +
                              std::to_string(omega) + ")");
    }
    if (!(alpha > 0.0)) {
        throw ValidationError("GARCH constraint violated: alpha must be > 0 (got " +
                              std::to_string(alpha) + ")");
    }
    if (!(beta > 0.0)) {
        throw ValidationError("GARCH constraint violated: beta must be > 0 (got " +
                              std::to_string(beta) + ")");
    }
    if (!(alpha + beta < 1.0)) {
        throw ValidationError(
            "GARCH stationarity constraint violated: alpha + beta must be < 1 (got " +
            std::to_string(alpha + beta) + ")");
    }
}

Eigen::VectorXd GarchParams::to_vector() const {
    Eigen::VectorXd theta(kGarchDim);
    theta[kAlphaIndex] = alpha;
    theta[kBetaIndex] = beta;
    theta[kOmegaIndex] = omega;
    return theta;
}

GarchParams GarchParams::from_vector(const Eigen::VectorXd& theta) {
    if (theta.size() != static_cast<Eigen::Index>(kGarchDim)) {
        throw ValidationError("GARCH parameter vector must have 3 entries (alpha, beta, omega)");
    }
    return GarchParams{theta[kOmegaIndex], theta[kAlphaIndex], theta[kBetaIndex]};
}

ReturnSeries::ReturnSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw ValidationError("return series needs at least 2 observations");
    }
    bool any_nonzero = false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("return series has a non-finite value at index " +
                                  std::to_string(i));
        }
        any_nonzero = any_nonzero || values_[i] != 0.0;
    }
    if (!any_nonzero) {
        throw ValidationError("return series is identically zero");
    }
}

double ReturnSeries::sample_variance() const noexcept {
    double mean = 0.0;
    for (double v : values_) mean += v;
    mean /= static_cast<double>(values_.size());
    double ss = 0.0;
    for (double v : values_) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values_.size());
}

double unconditional_variance(const GarchParams& params) {
    params.validate();
    return params.omega / (1.0 - params.alpha - params.beta);
}

VolatilitySeries volatility_filter(const GarchParams& params, std::span<const double> y) {
    const double sigma2_1 = unconditional_variance(params);
    VolatilitySeries out;
    out.values.resize(y.size());
    if (y.empty()) return out;
    out.values[0] = sigma2_1;
    for (std::size_t t = 1; t < y.size(); ++t) {
        out.values[t] =
            params.omega + params.alpha * y[t - 1] * y[t - 1] + params.beta * out.values[t - 1];
    }
    return out;
}

double log_likelihood(const GarchParams& params, std::span<const double> y) {
    // Fused form of volatility_filter; this is the sampler's hot loop.
    double sigma2 = unconditional_variance(params);
    double sum_log = 0.0;
    double sum_ratio = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t > 0) {
            sigma2 = params.omega + params.alpha * y[t - 1] * y[t - 1] + params.beta * sigma2;
        }
        sum_log += std::log(sigma2);
        sum_ratio += y[t] * y[t] / sigma2;
    }
    return -0.5 * (static_cast<double>(y.size()) * kLogTwoPi + sum_log + sum_ratio);
}

double log_likelihood(const GarchParams& params, const ReturnSeries& y) {
    return log_likelihood(params, y.values());
}

double log_posterior(const GarchParams& params, const ReturnSeries& y,
                     double log_prior_constant) {
    if (!params.is_valid()) return -std::numeric_limits<double>::infinity();
    return log_likelihood(params, y) + log_prior_constant;
}

std::vector<double> simulate(const GarchParams& params, std::size_t n, std::uint64_t seed) {
    params.validate();
    if (n == 0) throw ValidationError("simulate: n must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> out;
    out.reserve(n);
    double sigma2 = unconditional_variance(params);
    double y_prev = 0.0;
    const std::size_t total = kSimulationWarmup + n;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) sigma2 = params.omega + params.alpha * y_prev * y_prev + params.beta * sigma2;
        y_prev = std::sqrt(sigma2) * normal(rng);
        if (t >= kSimulationWarmup) out.push_back(y_prev);
    }
    return out;
}

double GarchPosterior::operator()(const Eigen::VectorXd& theta) const {
    return log_posterior(GarchParams::from_vector(theta), y_, log_prior_constant_);
}

GarchParams default_start(const ReturnSeries& y) {
    constexpr double alpha = 0.05;
    constexpr double beta = 0.90;
    return GarchParams{(1.0 - alpha - beta) * y.sample_variance(), alpha, beta};
}

}  // namespace garchmc
