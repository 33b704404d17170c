#include "garchmc/samplers.hpp"

#include "garchmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace garchmc {

ChainState ChainState::at(Eigen::VectorXd theta, const LogTarget& target) {
    const double lp = target(theta);
    if (!(lp > -std::numeric_limits<double>::infinity()) || std::isnan(lp)) {
        throw ValidationError("chain start has zero target probability");
    }
    return ChainState{std::move(theta), lp};
}

void MetropolisConfig::validate() const {
    if (step_widths.size() == 0) throw ValidationError("Metropolis step widths are empty");
    for (Eigen::Index i = 0; i < step_widths.size(); ++i) {
        if (!(step_widths[i] > 0.0) || !std::isfinite(step_widths[i])) {
            throw ValidationError("Metropolis step width " + std::to_string(i) + " must be > 0");
        }
    }
    if (!(acceptance_floor >= 0.0 && acceptance_floor <= acceptance_ceiling &&
          acceptance_ceiling <= 1.0)) {
        throw ValidationError("Metropolis acceptance band must satisfy 0 <= floor <= ceiling <= 1");
    }
}

MetropolisConfig default_garch_metropolis_config() {
    MetropolisConfig cfg;
    cfg.step_widths = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(kGarchDim), 0.1);
    return cfg;
}

void AdaptiveConfig::validate() const {
    if (burn_in < 1 || pilot < 1 || refresh_interval < 1 || analysis_draws < 1) {
        throw ValidationError("adaptive schedule counts must all be >= 1");
    }
    if (!(nu > 2.0) || !std::isfinite(nu)) {
        throw ValidationError("nu must be > 2 (got " + std::to_string(nu) + ")");
    }
}

void Chain::push(const Eigen::VectorXd& theta, double log_post, bool accepted) {
    if (static_cast<std::size_t>(theta.size()) != dim_) {
        throw ValidationError("Chain::push: dimension mismatch");
    }
    draws_.insert(draws_.end(), theta.data(), theta.data() + theta.size());
    log_posts_.push_back(log_post);
    accept_flags_.push_back(accepted ? 1 : 0);
}

void Chain::reserve(std::size_t n) {
    draws_.reserve(n * dim_);
    log_posts_.reserve(n);
    accept_flags_.reserve(n);
}

Eigen::Map<const Eigen::VectorXd> Chain::draw(std::size_t i) const {
    return Eigen::Map<const Eigen::VectorXd>(draws_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
}

std::vector<double> Chain::column(std::size_t coord) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = draws_[i * dim_ + coord];
    return out;
}

double Chain::acceptance_rate() const noexcept {
    if (accept_flags_.empty()) return 0.0;
    std::size_t hits = 0;
    for (auto f : accept_flags_) hits += f;
    return static_cast<double>(hits) / static_cast<double>(accept_flags_.size());
}

std::vector<double> window_acceptance(const std::vector<std::uint8_t>& flags, std::size_t window) {
    std::vector<double> out;
    if (window == 0) return out;
    for (std::size_t start = 0; start + window <= flags.size(); start += window) {
        std::size_t hits = 0;
        for (std::size_t i = start; i < start + window; ++i) hits += flags[i];
        out.push_back(static_cast<double>(hits) / static_cast<double>(window));
    }
    return out;
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

double metropolis_acceptance(double log_post_current, double log_post_candidate) {
    const double log_ratio = log_post_candidate - log_post_current;
    if (std::isnan(log_ratio)) return 0.0;
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double mh_acceptance(double log_post_current, double log_post_candidate,
                     double log_proposal_current, double log_proposal_candidate) {
    if (log_post_candidate == -std::numeric_limits<double>::infinity()) return 0.0;
    const double log_ratio =
        (log_post_candidate - log_post_current) + (log_proposal_current - log_proposal_candidate);
    if (std::isnan(log_ratio)) return 0.0;
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

namespace {

double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool accept_into(ChainState& state, const Eigen::VectorXd& candidate, double candidate_lp,
                 double probability, double u) {
    if (u < probability) {
        state.theta = candidate;
        state.log_post = candidate_lp;
        return true;
    }
    return false;
}

}  // namespace

bool metropolis_transition(ChainState& state, const Eigen::VectorXd& candidate,
                           const LogTarget& target, Rng& rng) {
    const double candidate_lp = target(candidate);
    const double u = uniform01(rng);
    return accept_into(state, candidate, candidate_lp,
                       metropolis_acceptance(state.log_post, candidate_lp), u);
}

bool mh_transition(ChainState& state, const Eigen::VectorXd& candidate, const StudentTProposal& g,
                   const LogTarget& target, Rng& rng) {
    const double candidate_lp = target(candidate);
    const double u = uniform01(rng);
    if (candidate_lp == -std::numeric_limits<double>::infinity()) return false;
    const double probability = mh_acceptance(state.log_post, candidate_lp,
                                             g.log_density(state.theta), g.log_density(candidate));
    return accept_into(state, candidate, candidate_lp, probability, u);
}

bool metropolis_step(ChainState& state, const MetropolisConfig& cfg, const LogTarget& target,
                     Rng& rng) {
    Eigen::VectorXd candidate = state.theta;
    for (Eigen::Index i = 0; i < candidate.size(); ++i) {
        candidate[i] += cfg.step_widths[i] * (uniform01(rng) - 0.5);
    }
    return metropolis_transition(state, candidate, target, rng);
}

bool mh_independence_step(ChainState& state, const StudentTProposal& g, const LogTarget& target,
                          Rng& rng) {
    return mh_transition(state, g.sample(rng), g, target, rng);
}

AdaptiveResult run_adaptive(const LogTarget& target, const Eigen::VectorXd& start,
                            const AdaptiveConfig& acfg, const MetropolisConfig& mcfg) {
    acfg.validate();
    mcfg.validate();
    if (mcfg.step_widths.size() != start.size()) {
        throw ValidationError("run_adaptive: step widths and start differ in dimension");
    }

    Rng rng = make_rng(acfg.seed);
    ChainState state = ChainState::at(start, target);
    const auto dim = static_cast<std::size_t>(start.size());

    for (std::size_t i = 0; i < acfg.burn_in; ++i) metropolis_step(state, mcfg, target, rng);

    MomentAccumulator pool(dim);
    for (std::size_t i = 0; i < acfg.pilot; ++i) {
        metropolis_step(state, mcfg, target, rng);
        pool.accumulate(state.theta);
    }

    StudentTProposal proposal = proposal_from_moments(pool.mean(), pool.V(), acfg.nu);

    Chain chain(dim);
    chain.reserve(acfg.analysis_draws);
    while (chain.size() < acfg.analysis_draws) {
        const std::size_t window = std::min(acfg.refresh_interval, acfg.analysis_draws - chain.size());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < window; ++i) {
            const bool accepted = mh_independence_step(state, proposal, target, rng);
            hits += accepted ? 1 : 0;
            chain.push(state.theta, state.log_post, accepted);
            pool.accumulate(state.theta);
        }
        if (window == acfg.refresh_interval) {
            chain.acceptance_trace.push_back(static_cast<double>(hits) / static_cast<double>(window));
            proposal = proposal_from_moments(pool.mean(), pool.V(), acfg.nu);
            chain.phase_marks.push_back(chain.size());
        }
    }

    return AdaptiveResult{std::move(chain), std::move(pool), std::move(proposal)};
}

AdaptiveResult run_adaptive(const ReturnSeries& y, const AdaptiveConfig& acfg,
                            const MetropolisConfig& mcfg) {
    const GarchPosterior posterior(y);
    return run_adaptive(std::cref(posterior), default_start(y).to_vector(), acfg, mcfg);
}

Chain run_metropolis(const LogTarget& target, const Eigen::VectorXd& start,
                     const MetropolisConfig& mcfg, std::size_t burn_in, std::size_t draws,
                     std::uint64_t seed) {
    mcfg.validate();
    if (mcfg.step_widths.size() != start.size()) {
        throw ValidationError("run_metropolis: step widths and start differ in dimension");
    }
    Rng rng = make_rng(seed);
    ChainState state = ChainState::at(start, target);
    for (std::size_t i = 0; i < burn_in; ++i) metropolis_step(state, mcfg, target, rng);

    Chain chain(static_cast<std::size_t>(start.size()));
    chain.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        const bool accepted = metropolis_step(state, mcfg, target, rng);
        chain.push(state.theta, state.log_post, accepted);
    }
    chain.acceptance_trace = window_acceptance(chain.accept_flags(), kMetropolisTraceWindow);
    return chain;
}

Chain run_metropolis(const ReturnSeries& y, const MetropolisConfig& mcfg, std::size_t burn_in,
                     std::size_t draws, std::uint64_t seed) {
    const GarchPosterior posterior(y);
    return run_metropolis(std::cref(posterior), default_start(y).to_vector(), mcfg, burn_in, draws,
                          seed);
}

TuneResult tune_step_widths(const LogTarget& target, const Eigen::VectorXd& start,
                            const MetropolisConfig& initial, std::uint64_t seed) {
    initial.validate();
    if (initial.step_widths.size() != start.size()) {
        throw ValidationError("tune_step_widths: step widths and start differ in dimension");
    }
    Rng rng = make_rng(seed, 1);
    ChainState state = ChainState::at(start, target);

    auto band_distance = [&](double acc) {
        if (acc < initial.acceptance_floor) return initial.acceptance_floor - acc;
        if (acc > initial.acceptance_ceiling) return acc - initial.acceptance_ceiling;
        return 0.0;
    };

    MetropolisConfig current = initial;
    TuneResult best{initial, 0.0, 0, false};
    double best_distance = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= kMaxTuneIterations; ++iter) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < kTunePilotSteps; ++i) {
            hits += metropolis_step(state, current, target, rng) ? 1 : 0;
        }
        const double acc = static_cast<double>(hits) / static_cast<double>(kTunePilotSteps);
        const double distance = band_distance(acc);
        if (distance < best_distance) {
            best_distance = distance;
            best = TuneResult{current, acc, iter, false};
        }
        if (distance == 0.0) {
            best.converged = true;
            return best;
        }
        current.step_widths *= acc < initial.acceptance_floor ? 0.5 : 2.0;
    }
    best.iterations = kMaxTuneIterations;
    return best;
}

TuneResult tune_step_widths(const ReturnSeries& y, const MetropolisConfig& initial,
                            std::uint64_t seed) {
    const GarchPosterior posterior(y);
    return tune_step_widths(std::cref(posterior), default_start(y).to_vector(), initial, seed);
}

}  // namespace garchmc
