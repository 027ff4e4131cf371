#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "oor/common.hpp"
#include "oor/geometry.hpp"

namespace oor {

// 3D points with one semantic feature vector per point (row-per-point).
struct FeatureCloud {
    std::vector<Vec3> points;
    Eigen::MatrixXd features;  // N x F

    bool consistent() const {
        return static_cast<Eigen::Index>(points.size()) == features.rows();
    }
    PointCloud cloud() const { return PointCloud{points}; }
};

struct PcaModel {
    Eigen::VectorXd mean;         // F
    Eigen::MatrixXd basis;        // F' x F, orthonormal rows
    int f_prime = 0;
    Eigen::VectorXd eigenvalues;  // full spectrum, descending

    Eigen::MatrixXd project(const Eigen::MatrixXd& rows) const {
        return (rows.rowwise() - mean.transpose()) * basis.transpose();
    }
    Eigen::MatrixXd back_project(const Eigen::MatrixXd& reduced) const {
        return (reduced * basis).rowwise() + mean.transpose();
    }
};

// Top-f_prime principal directions of the sample covariance, fitted jointly
// on whatever feature rows are passed in (typically both clouds stacked).
inline PcaModel fit_pca(const Eigen::MatrixXd& features, int f_prime) {
    const auto n = features.rows();
    const auto f = features.cols();
    if (f_prime < 1 || f_prime > f)
        throw InsufficientRank("fit_pca: f_prime out of range");
    if (n < 2) throw InsufficientRank("fit_pca: need at least 2 samples");

    PcaModel model;
    model.f_prime = f_prime;
    model.mean = features.colwise().mean();
    const Eigen::MatrixXd centered = features.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);

    // eigenvalues ascend; flip to descending
    model.eigenvalues = es.eigenvalues().reverse();
    model.basis.resize(f_prime, f);
    for (int k = 0; k < f_prime; ++k)
        model.basis.row(k) = es.eigenvectors().col(f - 1 - k).transpose();

    const double lead = std::max(model.eigenvalues(0), 0.0);
    if (lead <= 0.0 || model.eigenvalues(f_prime - 1) <= lead * 1e-12)
        throw InsufficientRank("fit_pca: data rank below f_prime");
    return model;
}

struct Correspondence {
    int src = 0;
    int dst = 0;
    double similarity = 0.0;
};

struct CorrespondenceSet {
    std::vector<Correspondence> pairs;
};

// For each source point, its nearest destination point by cosine similarity
// in PCA space. Pairs below the threshold are dropped.
inline CorrespondenceSet match_features(const FeatureCloud& src, const FeatureCloud& dst,
                                        const PcaModel& pca, double threshold) {
    if (src.points.empty() || dst.points.empty())
        throw NoCorrespondences("match_features: empty cloud");

    Eigen::MatrixXd a = pca.project(src.features);
    Eigen::MatrixXd b = pca.project(dst.features);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double n = a.row(i).norm();
        a.row(i) = n > 0.0 ? a.row(i) / n : a.row(i);
    }
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        const double n = b.row(i).norm();
        b.row(i) = n > 0.0 ? b.row(i) / n : b.row(i);
    }

    CorrespondenceSet out;
    const Eigen::Index block = 256;
    for (Eigen::Index i0 = 0; i0 < a.rows(); i0 += block) {
        const Eigen::Index rows = std::min(block, a.rows() - i0);
        const Eigen::MatrixXd sim = a.middleRows(i0, rows) * b.transpose();
        for (Eigen::Index r = 0; r < rows; ++r) {
            Eigen::Index best;
            const double best_sim = sim.row(r).maxCoeff(&best);
            if (best_sim >= threshold)
                out.pairs.push_back({int(i0 + r), int(best), best_sim});
        }
    }
    if (out.pairs.empty())
        throw NoCorrespondences("match_features: no pair above threshold");
    return out;
}

// Closed-form least-squares similarity (Umeyama): minimizes
// sum |s R src_i + t - dst_i|^2 with det(R) = +1 enforced.
inline SimilarityTransform procrustes_similarity(const std::vector<Vec3>& src,
                                                 const std::vector<Vec3>& dst) {
    const std::size_t n = src.size();
    if (n != dst.size() || n < 3)
        throw DegenerateConfiguration("procrustes: need >=3 point pairs");

    Vec3 mu_src = Vec3::Zero(), mu_dst = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        mu_src += src[i];
        mu_dst += dst[i];
    }
    mu_src /= double(n);
    mu_dst /= double(n);

    Mat3 cross = Mat3::Zero();
    double var_src = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 x = src[i] - mu_src;
        const Vec3 y = dst[i] - mu_dst;
        cross += y * x.transpose();
        var_src += x.squaredNorm();
    }
    cross /= double(n);
    var_src /= double(n);
    if (var_src <= 0.0)
        throw DegenerateConfiguration("procrustes: source points coincide");

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 d = svd.singularValues();
    if (d(1) <= 1e-12 * std::max(d(0), 1e-300))
        throw DegenerateConfiguration("procrustes: collinear configuration");

    Vec3 flip = Vec3::Ones();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) flip(2) = -1.0;

    SimilarityTransform out;
    out.rot = svd.matrixU() * flip.asDiagonal() * svd.matrixV().transpose();
    out.s = d.dot(flip) / var_src;
    if (out.s <= 0.0) throw DegenerateConfiguration("procrustes: non-positive scale");
    out.trans = mu_dst - out.s * (out.rot * mu_src);
    return out;
}

struct RegistrationResult {
    SimilarityTransform transform;
    int inlier_count = 0;
    double rms_error = 0.0;
};

inline double rms_residual(const SimilarityTransform& t, const std::vector<Vec3>& src,
                           const std::vector<Vec3>& dst) {
    double acc = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
        acc += (t.apply(src[i]) - dst[i]).squaredNorm();
    return src.empty() ? 0.0 : std::sqrt(acc / double(src.size()));
}

// RANSAC over minimal 3-point samples, refit on the final inlier set.
inline RegistrationResult ransac_register(const CorrespondenceSet& corr,
                                          const PointCloud& src, const PointCloud& dst,
                                          int iters, double inlier_tol, Rng& rng) {
    const std::size_t n = corr.pairs.size();
    if (n < 3) throw ConsensusFailure("ransac: fewer than 3 correspondences");

    std::vector<Vec3> src_pts(n), dst_pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        src_pts[i] = src.points.at(corr.pairs[i].src);
        dst_pts[i] = dst.points.at(corr.pairs[i].dst);
    }

    auto count_inliers = [&](const SimilarityTransform& t, std::vector<int>* keep) {
        int count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((t.apply(src_pts[i]) - dst_pts[i]).norm() < inlier_tol) {
                ++count;
                if (keep) keep->push_back(int(i));
            }
        }
        return count;
    };

    int best_count = 0;
    SimilarityTransform best;
    for (int it = 0; it < iters; ++it) {
        std::size_t i = rng.index(n), j = rng.index(n), k = rng.index(n);
        if (i == j || j == k || i == k) continue;
        SimilarityTransform t;
        try {
            t = procrustes_similarity({src_pts[i], src_pts[j], src_pts[k]},
                                      {dst_pts[i], dst_pts[j], dst_pts[k]});
        } catch (const DegenerateConfiguration&) {
            continue;
        }
        const int count = count_inliers(t, nullptr);
        if (count > best_count) {
            best_count = count;
            best = t;
        }
    }
    if (best_count < 3) throw ConsensusFailure("ransac: no consensus set of size >= 3");

    std::vector<int> inliers;
    count_inliers(best, &inliers);
    std::vector<Vec3> in_src, in_dst;
    in_src.reserve(inliers.size());
    in_dst.reserve(inliers.size());
    for (int i : inliers) {
        in_src.push_back(src_pts[i]);
        in_dst.push_back(dst_pts[i]);
    }

    RegistrationResult out;
    out.transform = procrustes_similarity(in_src, in_dst);
    out.inlier_count = int(inliers.size());
    out.rms_error = rms_residual(out.transform, in_src, in_dst);
    return out;
}

// Index of the nearest dst point for every query point (brute force, blocked).
inline std::vector<int> nearest_indices(const std::vector<Vec3>& queries,
                                        const std::vector<Vec3>& dst) {
    Eigen::MatrixXd q(queries.size(), 3), d(dst.size(), 3);
    for (std::size_t i = 0; i < queries.size(); ++i) q.row(i) = queries[i].transpose();
    for (std::size_t i = 0; i < dst.size(); ++i) d.row(i) = dst[i].transpose();
    const Eigen::VectorXd d_sq = d.rowwise().squaredNorm();

    std::vector<int> out(queries.size());
    const Eigen::Index block = 512;
    for (Eigen::Index i0 = 0; i0 < q.rows(); i0 += block) {
        const Eigen::Index rows = std::min(block, q.rows() - i0);
        Eigen::MatrixXd dist = (-2.0 * q.middleRows(i0, rows) * d.transpose()).rowwise() +
                               d_sq.transpose();
        for (Eigen::Index r = 0; r < rows; ++r) {
            Eigen::Index best;
            dist.row(r).minCoeff(&best);
            out[i0 + r] = int(best);
        }
    }
    return out;
}

// Point-to-point ICP: alternate nearest-neighbor association with a similarity
// Procrustes refit until the association RMS stops improving.
inline RegistrationResult icp_refine(const SimilarityTransform& init,
                                     const PointCloud& src, const PointCloud& dst,
                                     int max_iters, double tol) {
    SimilarityTransform current = init;
    double prev_rms = std::numeric_limits<double>::infinity();
    RegistrationResult out;
    out.transform = init;
    out.inlier_count = int(src.points.size());
    if (src.points.empty() || dst.points.empty()) return out;

    for (int it = 0; it < max_iters; ++it) {
        std::vector<Vec3> moved(src.points.size());
        for (std::size_t i = 0; i < src.points.size(); ++i)
            moved[i] = current.apply(src.points[i]);
        const std::vector<int> nn = nearest_indices(moved, dst.points);

        std::vector<Vec3> matched(src.points.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < src.points.size(); ++i) {
            matched[i] = dst.points[nn[i]];
            acc += (moved[i] - matched[i]).squaredNorm();
        }
        const double rms = std::sqrt(acc / double(src.points.size()));
        if (rms <= prev_rms) {
            out.transform = current;
            out.rms_error = rms;
        }
        if (rms == 0.0 || prev_rms - rms < tol) break;
        prev_rms = rms;

        try {
            current = procrustes_similarity(src.points, matched);
        } catch (const DegenerateConfiguration&) {
            break;
        }
    }
    return out;
}

// Relative OOR from two mesh-to-cloud registrations plus the canonical-space
// bboxes of the two template meshes: T_rel = inv(T_base) o T_target, with the
// scale representation s_tb = s_rel * extents(target), s_b = extents(base).
inline OORSample relative_oor(const RegistrationResult& reg_base,
                              const RegistrationResult& reg_target,
                              const Aabb& bbox_base, const Aabb& bbox_target) {
    const SimilarityTransform rel =
        compose_similarity(invert_similarity(reg_base.transform), reg_target.transform);
    OORSample out;
    out.rot = rel.rot;
    out.trans = rel.trans;
    out.scale_tb = rel.s * bbox_target.extents();
    out.scale_b = bbox_base.extents();
    return out;
}

// Symmetric-free Chamfer term: mean distance from transformed mesh samples to
// their nearest cloud point (the direction used by the registration filter).
inline double chamfer_mesh_to_cloud(const SimilarityTransform& t,
                                    const std::vector<Vec3>& mesh_samples,
                                    const PointCloud& cloud) {
    std::vector<Vec3> moved(mesh_samples.size());
    for (std::size_t i = 0; i < mesh_samples.size(); ++i)
        moved[i] = t.apply(mesh_samples[i]);
    const std::vector<int> nn = nearest_indices(moved, cloud.points);
    double acc = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i)
        acc += (moved[i] - cloud.points[nn[i]]).norm();
    return moved.empty() ? 0.0 : acc / double(moved.size());
}

struct RegistrationParams {
    int f_prime = 15;
    double cosine_threshold = 0.7;
    int ransac_iters = 1000;
    double inlier_tol_rel = 0.05;    // fraction of dst cloud bbox diagonal
    int icp_max_iters = 50;
    double icp_tol = 1e-9;
    int min_points = 100;            // ingestion filter per object
    double chamfer_tol_rel = 0.1;    // fraction of registered mesh bbox diagonal
    std::uint64_t seed = 0;
};

struct ObjectRegistration {
    RegistrationResult result;
    double chamfer = 0.0;
    double chamfer_threshold = 0.0;
    bool chamfer_ok = true;
    int correspondences = 0;
};

// Full single-object pipeline: joint PCA over both feature sets, cloud-to-mesh
// cosine matching, RANSAC Procrustes (mesh -> cloud), ICP refinement, and the
// Chamfer quality check against the scaled mesh bbox diagonal.
inline ObjectRegistration register_object(const FeatureCloud& mesh_features,
                                          const FeatureCloud& scene_cloud,
                                          const RegistrationParams& params) {
    if (int(scene_cloud.points.size()) < params.min_points)
        throw InsufficientSamples("register_object: scene cloud below min_points");
    if (!mesh_features.consistent() || !scene_cloud.consistent())
        throw DimensionMismatch("register_object: points/features length mismatch");

    Eigen::MatrixXd all(mesh_features.features.rows() + scene_cloud.features.rows(),
                        mesh_features.features.cols());
    all << mesh_features.features, scene_cloud.features;
    const PcaModel pca = fit_pca(all, params.f_prime);

    // matching direction is cloud -> mesh (one candidate per cloud point)
    const CorrespondenceSet matches =
        match_features(scene_cloud, mesh_features, pca, params.cosine_threshold);
    CorrespondenceSet flipped;
    flipped.pairs.reserve(matches.pairs.size());
    for (const auto& m : matches.pairs) flipped.pairs.push_back({m.dst, m.src, m.similarity});

    const double diag = Aabb::of_points(scene_cloud.points).diagonal();
    Rng rng(params.seed);
    ObjectRegistration out;
    out.correspondences = int(matches.pairs.size());
    const RegistrationResult coarse =
        ransac_register(flipped, mesh_features.cloud(), scene_cloud.cloud(),
                        params.ransac_iters, params.inlier_tol_rel * diag, rng);
    out.result = icp_refine(coarse.transform, mesh_features.cloud(), scene_cloud.cloud(),
                            params.icp_max_iters, params.icp_tol);
    out.result.inlier_count = coarse.inlier_count;

    const double mesh_diag =
        Aabb::of_points(mesh_features.points).diagonal() * out.result.transform.s;
    out.chamfer = chamfer_mesh_to_cloud(out.result.transform, mesh_features.points,
                                        scene_cloud.cloud());
    out.chamfer_threshold = params.chamfer_tol_rel * mesh_diag;
    out.chamfer_ok = out.chamfer < out.chamfer_threshold;
    return out;
}

}  // namespace oor
