#include <catch2/catch_amalgamated.hpp>

#include "oor/metrics.hpp"
#include "oor/synthdata.hpp"

using namespace oor;

namespace {

Eigen::MatrixXd rows_from(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::MatrixXd m(pts.size(), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
    return m;
}

}  // namespace

TEST_CASE("gaussian_stats hand example uses unbiased covariance") {
    const Eigen::MatrixXd samples = rows_from({{0, 0}, {2, 0}});
    const GaussianStats g = gaussian_stats(samples);
    REQUIRE(g.mean.isApprox(Eigen::Vector2d(1, 0)));
    REQUIRE(g.cov(0, 0) == Catch::Approx(2.0));  // divisor n-1 = 1
    REQUIRE(g.cov(0, 1) == 0.0);
    REQUIRE(g.cov(1, 1) == 0.0);
}

TEST_CASE("gaussian_stats constant samples give zero covariance") {
    Eigen::MatrixXd samples(5, 3);
    samples.rowwise() = Eigen::RowVector3d(1, 2, 3);
    REQUIRE(gaussian_stats(samples).cov.norm() == 0.0);
}

TEST_CASE("gaussian_stats rejects single sample") {
    REQUIRE_THROWS_AS(gaussian_stats(Eigen::MatrixXd::Zero(1, 3)), InsufficientSamples);
}

TEST_CASE("gaussian_stats matches N(0, I) at scale") {
    Rng rng(1);
    const int n = 100000;
    Eigen::MatrixXd samples(n, 3);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) samples(i, c) = rng.normal();
    const GaussianStats g = gaussian_stats(samples);
    REQUIRE(g.mean.cwiseAbs().maxCoeff() < 0.02);
    REQUIRE((g.cov - Eigen::Matrix3d::Identity()).norm() < 0.05);
}

TEST_CASE("frechet_distance of identical distributions is zero") {
    Rng rng(2);
    Eigen::MatrixXd samples(64, 4);
    for (int i = 0; i < samples.rows(); ++i)
        for (int c = 0; c < 4; ++c) samples(i, c) = rng.normal();
    const GaussianStats g = gaussian_stats(samples);
    REQUIRE(frechet_distance(g, g) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("frechet_distance 1-D closed form") {
    GaussianStats p, q;
    p.mean = Eigen::VectorXd::Zero(1);
    p.cov = Eigen::MatrixXd::Identity(1, 1);
    p.n = 2;
    q = p;
    q.mean(0) = 1.0;
    REQUIRE(frechet_distance(p, q) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("frechet_distance diagonal 2-D closed form") {
    GaussianStats p, q;
    p.mean = Eigen::Vector2d(0, 0);
    q.mean = Eigen::Vector2d(3, 4);
    p.cov = Eigen::Matrix2d::Identity();
    q.cov = 4.0 * Eigen::Matrix2d::Identity();
    p.n = q.n = 2;
    // d^2 = 25 + tr(I + 4I - 2*2I) = 27
    REQUIRE(frechet_distance(p, q) * frechet_distance(p, q) ==
            Catch::Approx(27.0).margin(1e-10));
}

TEST_CASE("frechet_distance is symmetric") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(40, 3), b(40, 3);
        for (int i = 0; i < 40; ++i)
            for (int c = 0; c < 3; ++c) {
                a(i, c) = rng.normal();
                b(i, c) = 0.5 * rng.normal() + 1.0;
            }
        const GaussianStats p = gaussian_stats(a), q = gaussian_stats(b);
        REQUIRE(std::abs(frechet_distance(p, q) - frechet_distance(q, p)) < 1e-10);
    }
}

TEST_CASE("frechet_distance commuting covariances match the diagonal sum") {
    Rng rng(4);
    const int d = 5;
    GaussianStats p, q;
    p.mean = Eigen::VectorXd::Zero(d);
    q.mean = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd dp(d), dq(d);
    for (int i = 0; i < d; ++i) {
        p.mean(i) = rng.normal();
        q.mean(i) = rng.normal();
        dp(i) = std::exp(rng.normal());
        dq(i) = std::exp(rng.normal());
    }
    p.cov = dp.asDiagonal();
    q.cov = dq.asDiagonal();
    p.n = q.n = 2;

    double expected_sq = 0.0;
    for (int i = 0; i < d; ++i) {
        const double dm = p.mean(i) - q.mean(i);
        const double ds = std::sqrt(dp(i)) - std::sqrt(dq(i));
        expected_sq += dm * dm + ds * ds;
    }
    const double got = frechet_distance(p, q);
    REQUIRE(got * got == Catch::Approx(expected_sq).margin(1e-10));
}

TEST_CASE("frechet_distance zero iff same moments") {
    GaussianStats p, q;
    p.mean = Eigen::Vector2d(0, 0);
    q.mean = Eigen::Vector2d(0, 0);
    p.cov = Eigen::Matrix2d::Identity();
    q.cov = Eigen::Matrix2d::Identity();
    q.cov(1, 1) = 1.5;
    p.n = q.n = 2;
    REQUIRE(frechet_distance(p, q) > 1e-3);
}

TEST_CASE("frechet_distance rejects dimension mismatch") {
    GaussianStats p, q;
    p.mean = Eigen::VectorXd::Zero(2);
    p.cov = Eigen::MatrixXd::Identity(2, 2);
    q.mean = Eigen::VectorXd::Zero(3);
    q.cov = Eigen::MatrixXd::Identity(3, 3);
    REQUIRE_THROWS_AS(frechet_distance(p, q), DimensionMismatch);
}

TEST_CASE("fd_between_sample_sets identical sets give zero") {
    Rng rng(5);
    const auto dist = ToyDistribution::on_top_of(Vec3(1, 1, 1), Vec3(0.2, 0.2, 0.2));
    const std::vector<OORSample> a = sample_toy(dist, 200, rng);
    REQUIRE(fd_between_sample_sets(a, a) == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("fd_between_sample_sets same distribution calibration") {
    Rng rng(6);
    const auto dist = ToyDistribution::on_top_of(Vec3(1, 0.8, 1), Vec3(0.3, 0.2, 0.3));
    const std::vector<OORSample> a = sample_toy(dist, 1000, rng);
    const std::vector<OORSample> b = sample_toy(dist, 1000, rng);
    REQUIRE(fd_between_state_sets(states_to_matrix(samples_to_states(a)),
                                  states_to_matrix(samples_to_states(b))) < 0.1);
}

TEST_CASE("fd_between_sample_sets planted separation") {
    // two 15-D Gaussians, modes separated by a known whitened distance
    Rng rng(7);
    State15 mode_a = State15::Zero(), mode_b = State15::Zero(), stdev;
    stdev.setConstant(0.1);
    mode_a(6) = 0.0;
    mode_b(6) = 1.0;
    // make rot6d components valid rotations with tiny jitter
    mode_a.segment<6>(0) << 1, 0, 0, 0, 1, 0;
    mode_b.segment<6>(0) << 1, 0, 0, 0, 1, 0;
    mode_a.segment<6>(9).setConstant(1.0);
    mode_b.segment<6>(9).setConstant(1.0);

    const auto da = ToyDistribution::gaussian(mode_a, stdev);
    const auto db = ToyDistribution::gaussian(mode_b, stdev);
    Eigen::MatrixXd a = states_to_matrix(sample_toy_states(da, 4000, rng));
    Eigen::MatrixXd b = states_to_matrix(sample_toy_states(db, 4000, rng));

    // after joint whitening the separated component contributes
    // (1.0 / pooled_std)^2 with pooled variance 0.1^2 + 0.25; other
    // components contribute ~0, so fd ~ sqrt of that
    const double pooled_sd = std::sqrt(0.1 * 0.1 + 0.25);
    const double expected = 1.0 / pooled_sd;
    const double got = fd_between_state_sets(a, b);
    REQUIRE(got == Catch::Approx(expected).epsilon(0.2));
}

TEST_CASE("fd_between_sample_sets rejects tiny sets") {
    std::vector<OORSample> one(1);
    std::vector<OORSample> two(2);
    REQUIRE_THROWS_AS(fd_between_sample_sets(one, two), InsufficientSamples);
}
