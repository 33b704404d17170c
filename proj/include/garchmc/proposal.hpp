#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>
#include <random>

namespace garchmc {

using Rng = std::mt19937_64;

/**
 * @brief Streaming sample mean and central second-moment matrix.
 *
 * After absorbing draws x_1..x_k, mean() is their average and V() is
 * (1/k) sum (x_i - mean)(x_i - mean)^t (population divisor). Updates use the
 * single-pass Welford recurrence, O(p^2) per draw.
 */
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t dim);

    void accumulate(const Eigen::VectorXd& draw);

    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
    [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }
    /// Zero matrix while count() == 0.
    [[nodiscard]] Eigen::MatrixXd V() const;

private:
    std::size_t count_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd scatter_;  // sum of outer products of deviations
};

/**
 * @brief Multivariate Student-t density with location M, scale Sigma and nu
 * degrees of freedom.
 *
 *   g(x) = Gamma((nu+p)/2) / (Gamma(nu/2) det(Sigma)^{1/2} (nu pi)^{p/2})
 *          * [1 + (x-M)^t Sigma^{-1} (x-M) / nu]^{-(nu+p)/2}
 *
 * Immutable after construction; the Cholesky factor and normalizing constant
 * are computed once.
 */
class StudentTProposal {
public:
    /// Throws NumericError if Sigma is not positive definite.
    StudentTProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu);

    [[nodiscard]] double log_density(const Eigen::VectorXd& x) const;

    /// M + L z sqrt(nu / w), z ~ N(0, I), w ~ chi2(nu).
    [[nodiscard]] Eigen::VectorXd sample(Rng& rng) const;

    [[nodiscard]] const Eigen::VectorXd& location() const noexcept { return location_; }
    [[nodiscard]] const Eigen::MatrixXd& scale() const noexcept { return scale_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(location_.size()); }
    [[nodiscard]] double log_det_scale() const noexcept { return log_det_; }

private:
    Eigen::VectorXd location_;
    Eigen::MatrixXd scale_;
    double nu_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::MatrixXd chol_lower_;
    double log_det_ = 0.0;
    double log_norm_ = 0.0;
};

/// Jitter attempts made by proposal_from_moments after a failed factorization.
inline constexpr int kMaxJitterEscalations = 3;

/**
 * Builds the proposal whose covariance nu/(nu-2) Sigma equals V, i.e.
 * Sigma = (nu-2)/nu V. If Sigma cannot be factored, eps I is added with
 * eps = 1e-10 max(diag Sigma) (1e-10 when the diagonal is all zero), escalating
 * tenfold up to kMaxJitterEscalations times.
 */
[[nodiscard]] StudentTProposal proposal_from_moments(const Eigen::VectorXd& mean,
                                                     const Eigen::MatrixXd& V, double nu);

}  // namespace garchmc
