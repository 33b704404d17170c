#include "garchmc/proposal.hpp"

#include "garchmc/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace garchmc {

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      scatter_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {
    if (dim == 0) throw ValidationError("MomentAccumulator: dimension must be >= 1");
}

void MomentAccumulator::accumulate(const Eigen::VectorXd& draw) {
    if (draw.size() != mean_.size()) {
        throw ValidationError("MomentAccumulator: draw has dimension " + std::to_string(draw.size()) +
                              ", expected " + std::to_string(mean_.size()));
    }
    ++count_;
    const Eigen::VectorXd delta = draw - mean_;
    mean_ += delta / static_cast<double>(count_);
    const Eigen::VectorXd delta_after = draw - mean_;
    // Symmetric by construction: accumulate 0.5 (a b^t + b a^t).
    scatter_ += 0.5 * (delta * delta_after.transpose() + delta_after * delta.transpose());
}

Eigen::MatrixXd MomentAccumulator::V() const {
    if (count_ == 0) return Eigen::MatrixXd::Zero(scatter_.rows(), scatter_.cols());
    return scatter_ / static_cast<double>(count_);
}

StudentTProposal::StudentTProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu)
    : location_(std::move(location)), scale_(std::move(scale)), nu_(nu) {
    const auto p = location_.size();
    if (p == 0 || scale_.rows() != p || scale_.cols() != p) {
        throw ValidationError("StudentTProposal: location/scale dimensions disagree");
    }
    if (!(nu_ > 0.0) || !std::isfinite(nu_)) {
        throw ValidationError("StudentTProposal: nu must be a positive finite number");
    }
    llt_.compute(scale_);
    if (llt_.info() != Eigen::Success) {
        throw NumericError("StudentTProposal: scale matrix is not positive definite");
    }
    chol_lower_ = llt_.matrixL();
    log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
    const double dp = static_cast<double>(p);
    log_norm_ = std::lgamma(0.5 * (nu_ + dp)) - std::lgamma(0.5 * nu_) - 0.5 * log_det_ -
                0.5 * dp * std::log(nu_ * std::numbers::pi);
}

double StudentTProposal::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != location_.size()) {
        throw ValidationError("StudentTProposal::log_density: dimension mismatch");
    }
    const Eigen::VectorXd white = llt_.matrixL().solve(x - location_);
    const double quad = white.squaredNorm();
    const double dp = static_cast<double>(location_.size());
    return log_norm_ - 0.5 * (nu_ + dp) * std::log1p(quad / nu_);
}

Eigen::VectorXd StudentTProposal::sample(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(nu_);
    Eigen::VectorXd z(location_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    const double w = chi2(rng);
    return location_ + chol_lower_ * z * std::sqrt(nu_ / w);
}

StudentTProposal proposal_from_moments(const Eigen::VectorXd& mean, const Eigen::MatrixXd& V,
                                       double nu) {
    if (!(nu > 2.0) || !std::isfinite(nu)) {
        throw ValidationError("proposal_from_moments: nu must be > 2 (got " + std::to_string(nu) + ")");
    }
    if (V.rows() != mean.size() || V.cols() != mean.size()) {
        throw ValidationError("proposal_from_moments: V must be p x p with p = mean size");
    }
    if ((V.diagonal().array() < 0.0).any() || !V.allFinite() || !mean.allFinite()) {
        throw ValidationError("proposal_from_moments: V must be finite with nonnegative diagonal");
    }

    const Eigen::MatrixXd sigma = ((nu - 2.0) / nu) * 0.5 * (V + V.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return StudentTProposal(mean, sigma, nu);

    const double max_diag = sigma.diagonal().maxCoeff();
    double eps = 1e-10 * (max_diag > 0.0 ? max_diag : 1.0);
    const auto identity = Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    for (int attempt = 0; attempt <= kMaxJitterEscalations; ++attempt, eps *= 10.0) {
        Eigen::MatrixXd jittered = sigma + eps * identity;
        llt.compute(jittered);
        if (llt.info() == Eigen::Success) return StudentTProposal(mean, std::move(jittered), nu);
    }
    throw NumericError("proposal_from_moments: scale matrix not positive definite after jitter");
}

}  // namespace garchmc
