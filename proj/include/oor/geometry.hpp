#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "oor/common.hpp"

namespace oor {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline bool is_rotation(const Mat3& m, double tol = 1e-9) {
    return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(m.determinant() - 1.0) <= tol;
}

inline bool is_positive_scale(const Vec3& s) { return (s.array() > 0.0).all(); }

inline Mat3 rotation_x(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}
inline Mat3 rotation_y(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
inline Mat3 rotation_z(double a) {
    return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

// Angle between two rotations, in radians.
inline double rotation_angle_between(const Mat3& a, const Mat3& b) {
    const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Uniform random rotation (axis from normal draws, angle uniform).
inline Mat3 random_rotation(Rng& rng) {
    Vec3 axis(rng.normal(), rng.normal(), rng.normal());
    while (axis.norm() < 1e-9) axis = Vec3(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    return Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * M_PI), axis).toRotationMatrix();
}

// Nearest rotation matrix in Frobenius norm (SVD projection with det fix).
inline Mat3 project_to_rotation(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

// 6D rotation representation: the first two matrix columns, concatenated.
// Gram-Schmidt restores a proper rotation; degenerate inputs are rejected.
inline Mat3 rot6d_to_matrix(const Vec6& a) {
    const Vec3 a1 = a.head<3>();
    const Vec3 a2 = a.tail<3>();
    const double n1 = a1.norm();
    if (n1 <= 1e-12) throw DegenerateInput("rot6d: first column has near-zero norm");
    const Vec3 b1 = a1 / n1;
    const Vec3 v = a2 - b1.dot(a2) * b1;
    const double n2 = v.norm();
    if (n2 <= 1e-12) throw DegenerateInput("rot6d: columns are parallel");
    const Vec3 b2 = v / n2;
    Mat3 r;
    r.col(0) = b1;
    r.col(1) = b2;
    r.col(2) = b1.cross(b2);
    return r;
}

inline Vec6 matrix_to_rot6d(const Mat3& r) {
    Vec6 a;
    a.head<3>() = r.col(0);
    a.tail<3>() = r.col(1);
    return a;
}

// Isotropic-scale rigid transform: x -> s * R * x + t.
struct SimilarityTransform {
    double s = 1.0;
    Mat3 rot = Mat3::Identity();
    Vec3 trans = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return s * (rot * p) + trans; }
    bool valid(double tol = 1e-9) const { return s > 0.0 && is_rotation(rot, tol); }
};

// Applies b first, then a.
inline SimilarityTransform compose_similarity(const SimilarityTransform& a,
                                              const SimilarityTransform& b) {
    SimilarityTransform out;
    out.s = a.s * b.s;
    out.rot = a.rot * b.rot;
    out.trans = a.s * (a.rot * b.trans) + a.trans;
    return out;
}

inline SimilarityTransform invert_similarity(const SimilarityTransform& a) {
    if (a.s <= 0.0) throw DegenerateInput("invert_similarity: non-positive scale");
    SimilarityTransform out;
    out.s = 1.0 / a.s;
    out.rot = a.rot.transpose();
    out.trans = -(1.0 / a.s) * (a.rot.transpose() * a.trans);
    return out;
}

// Target pose+scales relative to a base object, in the base instance
// canonical space. Scales are anisotropic canonical-space ratios.
struct OORSample {
    Mat3 rot = Mat3::Identity();
    Vec3 trans = Vec3::Zero();
    Vec3 scale_tb = Vec3::Ones();
    Vec3 scale_b = Vec3::Ones();

    bool valid(double tol = 1e-9) const {
        return is_rotation(rot, tol) && is_positive_scale(scale_tb) &&
               is_positive_scale(scale_b);
    }
};

// Maps a target point from its scale-normalized canonical space into the base
// instance canonical space: R * (s_tb .* x) + t. Scaling happens before rotation.
inline Vec3 transform_target_point(const Vec3& x_hat, const OORSample& o) {
    return o.rot * o.scale_tb.cwiseProduct(x_hat) + o.trans;
}

// Restores the base object's aspect ratio: s_b .* x.
inline Vec3 scale_base_point(const Vec3& x_hat, const OORSample& o) {
    return o.scale_b.cwiseProduct(x_hat);
}

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    Vec3 extents() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
    double diagonal() const { return extents().norm(); }

    template <typename Range>
    static Aabb of_points(const Range& pts) {
        Aabb box;
        box.min = Vec3::Constant(std::numeric_limits<double>::infinity());
        box.max = Vec3::Constant(-std::numeric_limits<double>::infinity());
        for (const Vec3& p : pts) {
            box.min = box.min.cwiseMin(p);
            box.max = box.max.cwiseMax(p);
        }
        return box;
    }
};

inline double overlap_volume(const Aabb& a, const Aabb& b) {
    const Vec3 lo = a.min.cwiseMax(b.min);
    const Vec3 hi = a.max.cwiseMin(b.max);
    const Vec3 d = (hi - lo).cwiseMax(0.0);
    return d.x() * d.y() * d.z();
}

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

struct PointCloud {
    std::vector<Vec3> points;
};

// Re-centers the mesh at its tightest-bbox midpoint and scales the longest
// bbox edge to 1, preserving aspect ratios. Returns the canonical mesh and
// the bbox of the input mesh (pre-normalization).
inline std::pair<TriMesh, Aabb> canonicalize_mesh(const TriMesh& m) {
    if (m.vertices.empty()) throw EmptyMesh("canonicalize_mesh: mesh has no vertices");
    const Aabb box = Aabb::of_points(m.vertices);
    const Vec3 c = box.center();
    const double longest = box.extents().maxCoeff();
    if (longest <= 0.0) throw EmptyMesh("canonicalize_mesh: mesh has zero extent");
    TriMesh out;
    out.vertices.reserve(m.vertices.size());
    for (const Vec3& v : m.vertices) out.vertices.push_back((v - c) / longest);
    out.faces = m.faces;
    return {std::move(out), box};
}

// Canonical bbox extents of a mesh given its pre-normalization bbox.
inline Vec3 canonical_extents(const Aabb& original_box) {
    const Vec3 e = original_box.extents();
    return e / e.maxCoeff();
}

// Tight world AABB of a centered box with the given extents after rotation
// and translation. Half-width per world axis is sum_j |R_ij| * half_j, which
// equals the min/max over the 8 transformed corners.
inline Aabb aabb_of_placed(const Vec3& extents, const Mat3& rot, const Vec3& trans) {
    const Vec3 half = 0.5 * extents;
    const Vec3 world_half = rot.cwiseAbs() * half;
    return Aabb{trans - world_half, trans + world_half};
}

}  // namespace oor
