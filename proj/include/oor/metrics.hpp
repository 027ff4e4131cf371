#pragma once

#include <Eigen/Dense>
#include <vector>

#include "oor/common.hpp"
#include "oor/state.hpp"

namespace oor {

struct GaussianStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    int n = 0;
};

// Sample mean and unbiased covariance of row-stacked samples.
inline GaussianStats gaussian_stats(const Eigen::MatrixXd& samples) {
    const int n = static_cast<int>(samples.rows());
    if (n < 2) throw InsufficientSamples("gaussian_stats: need at least 2 samples");
    GaussianStats out;
    out.n = n;
    out.mean = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - out.mean.transpose();
    out.cov = centered.transpose() * centered / static_cast<double>(n - 1);
    return out;
}

// Frechet distance between two Gaussians:
//   d^2 = |mu_p - mu_q|^2 + tr(S_p + S_q - 2 (S_p S_q)^{1/2}).
// The cross term is evaluated as tr((S_p^{1/2} S_q S_p^{1/2})^{1/2}), which is
// symmetric PSD and shares its eigenvalues with (S_p S_q)^{1/2}.
inline double frechet_distance(const GaussianStats& p, const GaussianStats& q) {
    if (p.mean.size() != q.mean.size())
        throw DimensionMismatch("frechet_distance: dimension mismatch");

    auto psd_sqrt = [](const Eigen::MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        return Eigen::MatrixXd(es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose());
    };

    const Eigen::MatrixXd p_half = psd_sqrt(0.5 * (p.cov + p.cov.transpose()));
    const Eigen::MatrixXd inner = p_half * q.cov * p_half;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()));
    const double tr_cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double d2 = (p.mean - q.mean).squaredNorm() + p.cov.trace() + q.cov.trace() -
                      2.0 * tr_cross;
    return std::sqrt(std::max(0.0, d2));
}

// Frechet distance between two state-row matrices after joint whitening
// (zero mean, unit per-component variance over the union of both sets).
inline double fd_between_state_sets(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() < 2 || b.rows() < 2)
        throw InsufficientSamples("fd_between_state_sets: need at least 2 samples per set");
    if (a.cols() != b.cols())
        throw DimensionMismatch("fd_between_state_sets: dimension mismatch");

    Eigen::MatrixXd un(a.rows() + b.rows(), a.cols());
    un << a, b;
    const Eigen::RowVectorXd mu = un.colwise().mean();
    const Eigen::MatrixXd centered = un.rowwise() - mu;
    Eigen::RowVectorXd sd =
        (centered.array().square().colwise().sum() / double(un.rows() - 1)).sqrt();
    for (int j = 0; j < sd.size(); ++j)
        if (sd(j) <= 0.0) sd(j) = 1.0;  // constant component: leave unscaled

    auto whiten = [&](const Eigen::MatrixXd& m) {
        return Eigen::MatrixXd(((m.rowwise() - mu).array().rowwise() / sd.array()));
    };
    return frechet_distance(gaussian_stats(whiten(a)), gaussian_stats(whiten(b)));
}

inline double fd_between_sample_sets(const std::vector<OORSample>& a,
                                     const std::vector<OORSample>& b) {
    return fd_between_state_sets(states_to_matrix(samples_to_states(a)),
                                 states_to_matrix(samples_to_states(b)));
}

}  // namespace oor
