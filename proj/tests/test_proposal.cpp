#include "catch_amalgamated.hpp"

#include "garchmc/error.hpp"
#include "garchmc/proposal.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace garchmc;
using Catch::Approx;

namespace {

Eigen::Matrix3d reference_v() {
    Eigen::Matrix3d v;
    v << 3.6e-4, -5.8e-4, 2.6e-4,
        -5.8e-4, 2.1e-3, -1.4e-3,
         2.6e-4, -1.4e-3, 1.2e-3;
    return v;
}

struct BatchMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// Two-pass mean and population covariance.
BatchMoments batch_moments(const std::vector<Eigen::VectorXd>& xs) {
    const auto p = xs.front().size();
    BatchMoments m{Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
    for (const auto& x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (const auto& x : xs) m.cov += (x - m.mean) * (x - m.mean).transpose();
    m.cov /= static_cast<double>(xs.size());
    return m;
}

}  // namespace

TEST_CASE("accumulator small examples", "[proposal]") {
    MomentAccumulator one(3);
    one.accumulate(Eigen::Vector3d(1, 2, 3));
    CHECK(one.count() == 1);
    CHECK(one.mean() == Eigen::Vector3d(1, 2, 3));
    CHECK(one.V().isZero(0.0));

    MomentAccumulator two(3);
    two.accumulate(Eigen::Vector3d(0, 0, 0));
    two.accumulate(Eigen::Vector3d(2, 0, 0));
    CHECK(two.mean() == Eigen::Vector3d(1, 0, 0));
    Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
    expected(0, 0) = 1.0;
    CHECK(two.V() == expected);

    MomentAccumulator same(2);
    for (int i = 0; i < 50; ++i) same.accumulate(Eigen::Vector2d(0.3, -7.1));
    CHECK(same.mean().isApprox(Eigen::Vector2d(0.3, -7.1), 1e-15));
    CHECK(same.V().norm() < 1e-28);

    CHECK(MomentAccumulator(3).V().isZero(0.0));
    CHECK_THROWS_AS(one.accumulate(Eigen::Vector2d(1, 2)), ValidationError);
}

TEST_CASE("accumulator is order independent", "[proposal]") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    std::vector<Eigen::VectorXd> xs(200, Eigen::VectorXd(3));
    for (auto& x : xs) x << normal(rng), 2.0 + normal(rng), -1.0 + 0.1 * normal(rng);

    MomentAccumulator forward(3);
    for (const auto& x : xs) forward.accumulate(x);
    std::shuffle(xs.begin(), xs.end(), rng);
    MomentAccumulator shuffled(3);
    for (const auto& x : xs) shuffled.accumulate(x);

    CHECK(forward.mean().isApprox(shuffled.mean(), 1e-13));
    CHECK(forward.V().isApprox(shuffled.V(), 1e-12));
    CHECK(forward.V().isApprox(forward.V().transpose(), 0.0));
}

TEST_CASE("streaming moments match the two-pass batch computation", "[proposal]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Eigen::VectorXd> xs(10000, Eigen::VectorXd(3));
        for (auto& x : xs) {
            const double a = normal(rng);
            x << 0.1 + 0.02 * a, 0.8 - 0.04 * a + 0.01 * normal(rng), 0.1 + 0.03 * normal(rng);
        }
        MomentAccumulator acc(3);
        for (const auto& x : xs) acc.accumulate(x);
        const auto batch = batch_moments(xs);
        CHECK((acc.mean() - batch.mean).norm() <= 1e-10 * batch.mean.norm());
        CHECK((acc.V() - batch.cov).norm() <= 1e-10 * batch.cov.norm());
        CHECK((acc.V().diagonal().array() >= 0.0).all());
    }
}

TEST_CASE("proposal scale follows the covariance relation", "[proposal]") {
    const Eigen::Vector3d m(0.1, 0.8, 0.1);
    const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
    CHECK(proposal_from_moments(m, I, 10.0).scale().isApprox(0.8 * I, 1e-15));
    CHECK(proposal_from_moments(m, I, 4.0).scale().isApprox(0.5 * I, 1e-15));

    const auto g = proposal_from_moments(m, reference_v(), 10.0);
    CHECK(g.scale()(0, 0) == Approx(0.8 * 3.6e-4).epsilon(1e-14));
    CHECK(g.scale()(1, 2) == Approx(0.8 * -1.4e-3).epsilon(1e-14));
    CHECK(g.scale().isApprox(0.8 * reference_v(), 1e-14));
    CHECK(g.location() == m);
    CHECK(g.nu() == 10.0);

    CHECK_THROWS_AS(proposal_from_moments(m, I, 2.0), ValidationError);
    CHECK_THROWS_AS(proposal_from_moments(m, I, 1.5), ValidationError);
    CHECK_THROWS_AS(proposal_from_moments(m, -I, 10.0), ValidationError);
}

TEST_CASE("degenerate moments are regularized by jitter", "[proposal]") {
    const Eigen::Vector3d m(0.1, 0.8, 0.1);
    const auto g = proposal_from_moments(m, Eigen::Matrix3d::Zero(), 10.0);
    CHECK(g.scale().isApprox(1e-10 * Eigen::Matrix3d::Identity(), 1e-12));
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) CHECK((g.sample(rng) - m).norm() < 1e-3);

    // Rank-one V still yields a usable proposal.
    Eigen::Vector3d d(0.01, -0.02, 0.03);
    const auto rank_one = proposal_from_moments(m, d * d.transpose(), 10.0);
    CHECK(rank_one.scale().diagonal().isApprox(0.8 * d.cwiseProduct(d), 1e-6));
    CHECK(rank_one.sample(rng).allFinite());
}

TEST_CASE("log density closed forms", "[proposal]") {
    const StudentTProposal cauchy(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 1.0);
    CHECK(std::abs(cauchy.log_density(Eigen::VectorXd::Zero(1)) - std::log(1.0 / std::numbers::pi)) < 1e-12);
    Eigen::VectorXd x(1);
    x << 2.0;
    CHECK(std::abs(cauchy.log_density(x) - std::log(1.0 / (std::numbers::pi * 5.0))) < 1e-12);

    const Eigen::Vector3d m(1, 2, 3);
    const auto g = proposal_from_moments(m, reference_v(), 10.0);
    const double p = 3.0;
    const double at_mode = std::lgamma((10.0 + p) / 2) - std::lgamma(5.0) - 0.5 * std::log(g.scale().determinant()) -
                           0.5 * p * std::log(10.0 * std::numbers::pi);
    CHECK(g.log_density(m) == Approx(at_mode).epsilon(1e-12));

    const StudentTProposal t10(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 10.0);
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    CHECK(t10.log_density(plus) == t10.log_density(minus));

    CHECK_THROWS_AS(g.log_density(Eigen::VectorXd::Zero(2)), ValidationError);
    CHECK_THROWS_AS(StudentTProposal(m, -Eigen::Matrix3d::Identity(), 10.0), NumericError);
}

TEST_CASE("log density is unimodal at the location", "[proposal]") {
    const Eigen::Vector3d m(0.1, 0.8, 0.1);
    const auto g = proposal_from_moments(m, reference_v(), 6.0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal(0.0, 0.05);
    const double peak = g.log_density(m);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Vector3d x = m + Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
        CHECK(g.log_density(x) <= peak);
    }
}

TEST_CASE("one-dimensional density integrates to one", "[proposal]") {
    for (double nu : {3.0, 10.0}) {
        Eigen::MatrixXd s(1, 1);
        s << 0.7;
        const StudentTProposal g(Eigen::VectorXd::Constant(1, 0.4), s, nu);
        // Substitution x = 0.4 + tan(u) maps the real line onto (-pi/2, pi/2).
        const int n = 200000;
        const double a = -std::numbers::pi / 2;
        const double h = std::numbers::pi / n;
        double total = 0.0;
        Eigen::VectorXd x(1);
        for (int i = 1; i < n; ++i) {
            const double u = a + i * h;
            x << 0.4 + std::tan(u);
            const double w = (i % 2 == 1) ? 4.0 : 2.0;
            total += w * std::exp(g.log_density(x)) / (std::cos(u) * std::cos(u));
        }
        total *= h / 3.0;
        CHECK(total == Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("large nu approaches the Gaussian", "[proposal]") {
    Eigen::MatrixXd s(1, 1);
    s << 0.5;
    const StudentTProposal t_mid(Eigen::VectorXd::Zero(1), s, 1e3);
    const StudentTProposal t_big(Eigen::VectorXd::Zero(1), s, 1e6);
    Eigen::VectorXd x(1);
    for (double v = -3.0; v <= 3.0; v += 0.25) {
        x << v;
        const double gauss = -0.5 * std::log(2.0 * std::numbers::pi * 0.5) - v * v / (2.0 * 0.5);
        CHECK(std::abs(t_big.log_density(x) - gauss) < 1e-3);
        CHECK(std::abs(t_big.log_density(x) - gauss) <= std::abs(t_mid.log_density(x) - gauss) + 1e-12);
    }
}

TEST_CASE("sampling reproduces location and covariance", "[proposal]") {
    const Eigen::Vector3d m(1, 2, 3);
    const StudentTProposal g(m, Eigen::Matrix3d::Identity(), 10.0);
    Rng rng(12345);
    MomentAccumulator acc(3);
    for (int i = 0; i < 1000000; ++i) acc.accumulate(g.sample(rng));
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(acc.mean()[i] - m[i]) < 0.01);
        CHECK(std::abs(acc.V()(i, i) - 1.25) < 0.05 * 1.25);
    }

    Rng a(9), b(9);
    CHECK(g.sample(a) == g.sample(b));
}

TEST_CASE("covariance of proposal draws converges to V, not Sigma", "[proposal]") {
    const Eigen::Vector3d m(0.1, 0.8, 0.1);
    const Eigen::Matrix3d v = reference_v();
    const auto g = proposal_from_moments(m, v, 8.0);
    Rng rng(77);
    MomentAccumulator acc(3);
    for (int i = 0; i < 400000; ++i) acc.accumulate(g.sample(rng));
    const Eigen::MatrixXd got = acc.V();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(got(i, j) - v(i, j)) < 0.05 * std::sqrt(v(i, i) * v(j, j)));
        }
    }
}
