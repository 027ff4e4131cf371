#pragma once

#include "oor/registration.hpp"
#include "oor/state.hpp"

namespace oor {

// Parametric ground-truth OOR distributions that stand in for the paper's
// image-derived data. Parameters are explicit; nothing is fitted.
enum class ToyKind { Dirac, Gaussian, OnTopOf, Beside, PourInto, Ring };

struct ToyDistribution {
    ToyKind kind = ToyKind::Dirac;

    // dirac / gaussian (state space)
    State15 mode = State15::Zero();
    State15 stdev = State15::Zero();

    // box extents for the placement kinds
    Vec3 s_b = Vec3::Ones();
    Vec3 s_tb = Vec3::Ones();

    // on_top_of: playable area on the base top face
    double surface_x = 0.0;
    double surface_z = 0.0;

    // beside
    double gap_max = 0.2;
    double z_jitter = 0.2;

    // pour_into / ring
    double radius = 1.0;
    double height = 0.5;
    double tilt_min = 0.0;
    double tilt_max = 0.0;

    static ToyDistribution dirac(const OORSample& at) {
        ToyDistribution d;
        d.kind = ToyKind::Dirac;
        d.mode = state_from_sample(at);
        return d;
    }
    static ToyDistribution gaussian(const State15& mode, const State15& stdev) {
        ToyDistribution d;
        d.kind = ToyKind::Gaussian;
        d.mode = mode;
        d.stdev = stdev;
        return d;
    }
    static ToyDistribution on_top_of(const Vec3& s_b, const Vec3& s_tb) {
        ToyDistribution d;
        d.kind = ToyKind::OnTopOf;
        d.s_b = s_b;
        d.s_tb = s_tb;
        d.surface_x = std::max(0.0, s_b.x() - s_tb.x());
        d.surface_z = std::max(0.0, s_b.z() - s_tb.z());
        return d;
    }
    static ToyDistribution beside(const Vec3& s_b, const Vec3& s_tb, double gap_max,
                                  double z_jitter) {
        ToyDistribution d;
        d.kind = ToyKind::Beside;
        d.s_b = s_b;
        d.s_tb = s_tb;
        d.gap_max = gap_max;
        d.z_jitter = z_jitter;
        return d;
    }
    static ToyDistribution pour_into(const Vec3& s_b, const Vec3& s_tb, double radius,
                                     double height, double tilt_min, double tilt_max) {
        ToyDistribution d;
        d.kind = ToyKind::PourInto;
        d.s_b = s_b;
        d.s_tb = s_tb;
        d.radius = radius;
        d.height = height;
        d.tilt_min = tilt_min;
        d.tilt_max = tilt_max;
        return d;
    }
    static ToyDistribution ring(const Vec3& s_b, const Vec3& s_tb, double radius,
                                double height) {
        ToyDistribution d;
        d.kind = ToyKind::Ring;
        d.s_b = s_b;
        d.s_tb = s_tb;
        d.radius = radius;
        d.height = height;
        return d;
    }
};

// Raw training state. Gaussian draws live in the flat 15-D state space; the
// placement kinds build exact geometric configurations.
inline State15 sample_toy_state(const ToyDistribution& dist, Rng& rng) {
    switch (dist.kind) {
        case ToyKind::Dirac:
            return dist.mode;
        case ToyKind::Gaussian: {
            State15 out = dist.mode;
            for (int i = 0; i < kStateDim; ++i) out(i) += dist.stdev(i) * rng.normal();
            return out;
        }
        case ToyKind::OnTopOf: {
            OORSample s;
            s.rot = rotation_y(rng.uniform(0.0, 2.0 * M_PI));
            s.trans = Vec3(rng.uniform(-0.5, 0.5) * dist.surface_x,
                           (dist.s_b.y() + dist.s_tb.y()) / 2.0,
                           rng.uniform(-0.5, 0.5) * dist.surface_z);
            s.scale_tb = dist.s_tb;
            s.scale_b = dist.s_b;
            return state_from_sample(s);
        }
        case ToyKind::Beside: {
            OORSample s;
            s.rot = rotation_y(rng.uniform(0.0, 2.0 * M_PI));
            const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
            s.trans = Vec3(side * ((dist.s_b.x() + dist.s_tb.x()) / 2.0 +
                                   rng.uniform(0.0, dist.gap_max)),
                           (dist.s_tb.y() - dist.s_b.y()) / 2.0,
                           rng.uniform(-dist.z_jitter, dist.z_jitter));
            s.scale_tb = dist.s_tb;
            s.scale_b = dist.s_b;
            return state_from_sample(s);
        }
        case ToyKind::PourInto:
        case ToyKind::Ring: {
            const double theta = rng.uniform(0.0, 2.0 * M_PI);
            OORSample s;
            s.trans = Vec3(dist.radius * std::cos(theta), dist.height,
                           dist.radius * std::sin(theta));
            if (dist.kind == ToyKind::PourInto) {
                // tilt toward the base about the tangent direction
                const Vec3 tangent(-std::sin(theta), 0.0, std::cos(theta));
                const double tilt = rng.uniform(dist.tilt_min, dist.tilt_max);
                s.rot = Eigen::AngleAxisd(tilt, tangent).toRotationMatrix();
            } else {
                s.rot = rotation_y(rng.uniform(0.0, 2.0 * M_PI));
            }
            s.scale_tb = dist.s_tb;
            s.scale_b = dist.s_b;
            return state_from_sample(s);
        }
    }
    throw OutOfRange("sample_toy_state: unknown kind");
}

inline std::vector<State15> sample_toy_states(const ToyDistribution& dist, int n, Rng& rng) {
    std::vector<State15> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sample_toy_state(dist, rng));
    return out;
}

// OORSample view of the same draws; rot6d noise is resolved by Gram-Schmidt
// and scales are floored so every sample is valid.
inline std::vector<OORSample> sample_toy(const ToyDistribution& dist, int n, Rng& rng) {
    std::vector<OORSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(sample_from_state_clamped(sample_toy_state(dist, rng)));
    return out;
}

// ---- planted registration scenes -------------------------------------------

// Ground-truth construction for registration tests: two box meshes, their
// canonical-space surface-sample feature clouds, and the scene clouds obtained
// by pushing those samples through known similarity transforms.
struct PlantedRegistration {
    SimilarityTransform gt_base;
    SimilarityTransform gt_target;
    double noise_stdev = 0.0;      // fraction of each object's cloud extent
    double outlier_fraction = 0.0; // fraction of cloud points given random features
    int feature_dim = 64;
    int cloud_points = 400;
    int mesh_points = 400;
    Vec3 base_extents = Vec3(2.0, 1.0, 1.4);   // pre-canonical box shape
    Vec3 target_extents = Vec3(0.6, 1.0, 0.5);
};

struct FeatureScene {
    TriMesh base_mesh;            // canonical
    TriMesh target_mesh;          // canonical
    Aabb base_canonical_bbox;
    Aabb target_canonical_bbox;
    FeatureCloud base_mesh_features;    // canonical-space surface samples
    FeatureCloud target_mesh_features;
    FeatureCloud base_cloud;      // scene = gt transform of surface samples (+noise)
    FeatureCloud target_cloud;
    OORSample ground_truth;
};

namespace detail {

inline TriMesh box_mesh(const Vec3& extents, const Vec3& center) {
    TriMesh m;
    const Vec3 h = extents / 2.0;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back(center + Vec3(i & 1 ? h.x() : -h.x(), i & 2 ? h.y() : -h.y(),
                                           i & 4 ? h.z() : -h.z()));
    const int quads[6][4] = {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                             {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}};
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
    }
    return m;
}

inline std::vector<Vec3> sample_mesh_surface(const TriMesh& mesh, int n, Rng& rng) {
    std::vector<double> cum;
    cum.reserve(mesh.faces.size());
    double total = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
        total += 0.5 * (b - a).cross(c - a).norm();
        cum.push_back(total);
    }
    std::vector<Vec3> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double r = rng.uniform(0.0, total);
        const std::size_t fi =
            std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
        const auto& f = mesh.faces[std::min(fi, mesh.faces.size() - 1)];
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        out.push_back(mesh.vertices[f[0]] +
                      u * (mesh.vertices[f[1]] - mesh.vertices[f[0]]) +
                      v * (mesh.vertices[f[2]] - mesh.vertices[f[0]]));
    }
    return out;
}

// Smooth position-keyed features: random sinusoids of the canonical position.
// Nearby canonical points get similar features, so nearest-feature matching
// recovers nearest-canonical-point correspondences.
struct FeatureField {
    Eigen::MatrixXd waves;  // F x 3
    Eigen::VectorXd phases;

    static FeatureField make(int dim, Rng& rng) {
        FeatureField f;
        f.waves.resize(dim, 3);
        f.phases.resize(dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < 3; ++j) f.waves(i, j) = 4.0 * rng.normal();
            f.phases(i) = rng.uniform(0.0, 2.0 * M_PI);
        }
        return f;
    }

    Eigen::VectorXd at(const Vec3& p) const {
        return ((waves * p).array() + phases.array()).sin();
    }
};

}  // namespace detail

inline FeatureScene make_feature_scene(const PlantedRegistration& spec, Rng& rng) {
    FeatureScene out;

    auto build_object = [&](const Vec3& extents, const SimilarityTransform& gt,
                            TriMesh& mesh_out, Aabb& bbox_out, FeatureCloud& mesh_fc,
                            FeatureCloud& cloud_fc) {
        // place the raw box off-origin so canonicalization is exercised
        const TriMesh raw = detail::box_mesh(
            extents, Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)));
        auto [canonical, original_box] = canonicalize_mesh(raw);
        mesh_out = canonical;
        const Vec3 ce = canonical_extents(original_box);
        bbox_out = Aabb{-0.5 * ce, 0.5 * ce};

        const auto field = detail::FeatureField::make(spec.feature_dim, rng);
        mesh_fc.points = detail::sample_mesh_surface(canonical, spec.mesh_points, rng);
        mesh_fc.features.resize(spec.mesh_points, spec.feature_dim);
        for (int i = 0; i < spec.mesh_points; ++i)
            mesh_fc.features.row(i) = field.at(mesh_fc.points[i]).transpose();

        const std::vector<Vec3> surf =
            detail::sample_mesh_surface(canonical, spec.cloud_points, rng);
        cloud_fc.points.resize(spec.cloud_points);
        cloud_fc.features.resize(spec.cloud_points, spec.feature_dim);
        const double noise = spec.noise_stdev * bbox_out.diagonal() * gt.s;
        for (int i = 0; i < spec.cloud_points; ++i) {
            Vec3 p = gt.apply(surf[i]);
            for (int c = 0; c < 3; ++c) p(c) += noise * rng.normal();
            cloud_fc.points[i] = p;
            cloud_fc.features.row(i) = field.at(surf[i]).transpose();
        }
        const int n_outliers = static_cast<int>(spec.outlier_fraction * spec.cloud_points);
        for (int i = 0; i < n_outliers; ++i) {
            const std::size_t j = rng.index(spec.cloud_points);
            for (int c = 0; c < spec.feature_dim; ++c)
                cloud_fc.features(j, c) = rng.normal();
        }
    };

    build_object(spec.base_extents, spec.gt_base, out.base_mesh, out.base_canonical_bbox,
                 out.base_mesh_features, out.base_cloud);
    build_object(spec.target_extents, spec.gt_target, out.target_mesh,
                 out.target_canonical_bbox, out.target_mesh_features, out.target_cloud);

    RegistrationResult rb, rt;
    rb.transform = spec.gt_base;
    rt.transform = spec.gt_target;
    out.ground_truth =
        relative_oor(rb, rt, out.base_canonical_bbox, out.target_canonical_bbox);
    return out;
}

}  // namespace oor
