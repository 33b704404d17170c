#pragma once

#include "garchmc/garch.hpp"
#include "garchmc/proposal.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace garchmc {

/// Unnormalized log target density; -infinity marks zero-probability states.
using LogTarget = std::function<double(const Eigen::VectorXd&)>;

/// Current point of a chain and its cached log-target.
struct ChainState {
    Eigen::VectorXd theta;
    double log_post = 0.0;

    /// Throws ValidationError if theta has zero target probability.
    static ChainState at(Eigen::VectorXd theta, const LogTarget& target);
};

/// Random-walk Metropolis widths: theta'_i = theta_i + d_i (r_i - 0.5), r_i ~ U[0,1].
struct MetropolisConfig {
    Eigen::VectorXd step_widths;
    double acceptance_floor = 0.5;
    double acceptance_ceiling = 0.9;

    void validate() const;
};

/// Starting widths for GARCH chains before tuning, ordered (alpha, beta, omega).
[[nodiscard]] MetropolisConfig default_garch_metropolis_config();

/// Schedule of the adaptive independence sampler.
struct AdaptiveConfig {
    std::size_t burn_in = 3000;
    std::size_t pilot = 1000;
    std::size_t refresh_interval = 1000;
    std::size_t analysis_draws = 199000;
    double nu = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Recorded draws of one chain, stored row-major.
class Chain {
public:
    explicit Chain(std::size_t dim) : dim_(dim) {}

    void push(const Eigen::VectorXd& theta, double log_post, bool accepted);
    void reserve(std::size_t n);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return accept_flags_.size(); }
    [[nodiscard]] bool empty() const noexcept { return accept_flags_.empty(); }

    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> draw(std::size_t i) const;
    [[nodiscard]] double value(std::size_t i, std::size_t coord) const { return draws_[i * dim_ + coord]; }
    [[nodiscard]] std::vector<double> column(std::size_t coord) const;
    [[nodiscard]] double log_posterior_at(std::size_t i) const { return log_posts_[i]; }
    [[nodiscard]] bool accepted(std::size_t i) const { return accept_flags_[i] != 0; }
    [[nodiscard]] const std::vector<std::uint8_t>& accept_flags() const noexcept { return accept_flags_; }

    /// Fraction of accepted steps; 0 for an empty chain.
    [[nodiscard]] double acceptance_rate() const noexcept;

    /// Chain lengths at which the proposal was refit.
    std::vector<std::size_t> phase_marks;
    /// Acceptance fraction per refresh window.
    std::vector<double> acceptance_trace;

private:
    std::size_t dim_;
    std::vector<double> draws_;
    std::vector<double> log_posts_;
    std::vector<std::uint8_t> accept_flags_;
};

/// Acceptance fraction of each complete window of `window` consecutive flags.
[[nodiscard]] std::vector<double> window_acceptance(const std::vector<std::uint8_t>& flags,
                                                    std::size_t window);

/// Seeds a generator from (seed, stream) so that independent uses of one seed do not overlap.
[[nodiscard]] Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// min(1, exp(log_post_candidate - log_post_current)).
[[nodiscard]] double metropolis_acceptance(double log_post_current, double log_post_candidate);

/// min(1, exp((lp' - lp) + (log g(theta) - log g(theta')))).
[[nodiscard]] double mh_acceptance(double log_post_current, double log_post_candidate,
                                   double log_proposal_current, double log_proposal_candidate);

/**
 * Accept/reject a given candidate under the symmetric-proposal rule. Exactly one
 * uniform is drawn from rng per call whatever the outcome, so decisions under a
 * shared stream are comparable across rules. Returns true on acceptance.
 */
bool metropolis_transition(ChainState& state, const Eigen::VectorXd& candidate,
                           const LogTarget& target, Rng& rng);

/// As metropolis_transition, with the independence-proposal correction from g.
bool mh_transition(ChainState& state, const Eigen::VectorXd& candidate,
                   const StudentTProposal& g, const LogTarget& target, Rng& rng);

/// Random-walk Metropolis step; on rejection state is left unchanged.
bool metropolis_step(ChainState& state, const MetropolisConfig& cfg, const LogTarget& target,
                     Rng& rng);

/// Independence Metropolis-Hastings step with candidate drawn from g.
bool mh_independence_step(ChainState& state, const StudentTProposal& g, const LogTarget& target,
                          Rng& rng);

struct AdaptiveResult {
    Chain chain;
    /// Moment pool: pilot draws plus every recorded draw.
    MomentAccumulator moments;
    /// Proposal fitted to the final pool.
    std::optional<StudentTProposal> final_proposal;
};

/**
 * @brief Adaptive independence Metropolis-Hastings.
 *
 * 1. burn_in random-walk Metropolis steps, discarded.
 * 2. pilot Metropolis steps, absorbed into the moment pool.
 * 3. Student-t proposal fitted to the pool.
 * 4. Blocks of refresh_interval independence-MH steps, each draw recorded and
 *    absorbed, with a refit after every complete block, until analysis_draws
 *    draws are recorded. A trailing partial block is not followed by a refit.
 */
[[nodiscard]] AdaptiveResult run_adaptive(const LogTarget& target, const Eigen::VectorXd& start,
                                          const AdaptiveConfig& acfg, const MetropolisConfig& mcfg);

/// GARCH posterior of y, started from default_start(y).
[[nodiscard]] AdaptiveResult run_adaptive(const ReturnSeries& y, const AdaptiveConfig& acfg,
                                          const MetropolisConfig& mcfg);

/// Window length used for Metropolis acceptance traces.
inline constexpr std::size_t kMetropolisTraceWindow = 1000;

/// Fixed-width random-walk Metropolis: burn_in discarded, then `draws` recorded.
[[nodiscard]] Chain run_metropolis(const LogTarget& target, const Eigen::VectorXd& start,
                                   const MetropolisConfig& mcfg, std::size_t burn_in,
                                   std::size_t draws, std::uint64_t seed);

[[nodiscard]] Chain run_metropolis(const ReturnSeries& y, const MetropolisConfig& mcfg,
                                   std::size_t burn_in, std::size_t draws, std::uint64_t seed);

struct TuneResult {
    MetropolisConfig config;
    double acceptance = 0.0;
    int iterations = 0;
    /// False when no tried widths landed in the acceptance band.
    bool converged = false;
};

inline constexpr int kMaxTuneIterations = 20;
inline constexpr std::size_t kTunePilotSteps = 2000;

/**
 * Runs consecutive pilot chains of kTunePilotSteps, halving every width while
 * acceptance is below the floor and doubling while it is above the ceiling.
 * Stops as soon as acceptance lies in [floor, ceiling]; otherwise returns the
 * widths whose acceptance was closest to the band.
 */
[[nodiscard]] TuneResult tune_step_widths(const LogTarget& target, const Eigen::VectorXd& start,
                                          const MetropolisConfig& initial, std::uint64_t seed);

[[nodiscard]] TuneResult tune_step_widths(const ReturnSeries& y, const MetropolisConfig& initial,
                                          std::uint64_t seed);

}  // namespace garchmc
