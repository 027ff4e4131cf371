#include <catch2/catch_amalgamated.hpp>

#include "oor/geometry.hpp"
#include "oor/obj_io.hpp"

#include <sstream>

using namespace oor;

namespace {

OORSample make_sample(const Mat3& r, const Vec3& t, const Vec3& s_tb, const Vec3& s_b) {
    OORSample o;
    o.rot = r;
    o.trans = t;
    o.scale_tb = s_tb;
    o.scale_b = s_b;
    return o;
}

SimilarityTransform make_sim(double s, const Mat3& r, const Vec3& t) {
    SimilarityTransform out;
    out.s = s;
    out.rot = r;
    out.trans = t;
    return out;
}

SimilarityTransform random_sim(Rng& rng) {
    return make_sim(std::exp(rng.uniform(-1.0, 1.0)), random_rotation(rng),
                    Vec3(rng.normal(), rng.normal(), rng.normal()));
}

}  // namespace

TEST_CASE("rot6d_to_matrix identity") {
    Vec6 a;
    a << 1, 0, 0, 0, 1, 0;
    REQUIRE((rot6d_to_matrix(a) - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("rot6d_to_matrix hand Gram-Schmidt") {
    Vec6 a;
    a << 0, 1, 0, -1, 0, 0;
    const Mat3 r = rot6d_to_matrix(a);
    REQUIRE(r.col(0).isApprox(Vec3(0, 1, 0), 1e-12));
    REQUIRE(r.col(1).isApprox(Vec3(-1, 0, 0), 1e-12));
    REQUIRE(r.col(2).isApprox(Vec3(0, 0, 1), 1e-12));
}

TEST_CASE("rot6d_to_matrix orthonormalizes skewed input") {
    Vec6 a;
    a << 1, 0.1, 0, 0, 1, 0;
    const Mat3 r = rot6d_to_matrix(a);
    REQUIRE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(r.determinant() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("rot6d_to_matrix rejects degenerate input") {
    Vec6 zero = Vec6::Zero();
    REQUIRE_THROWS_AS(rot6d_to_matrix(zero), DegenerateInput);
    Vec6 parallel;
    parallel << 1, 0, 0, 2, 0, 0;
    REQUIRE_THROWS_AS(rot6d_to_matrix(parallel), DegenerateInput);
}

TEST_CASE("matrix_to_rot6d identity and yaw") {
    REQUIRE(matrix_to_rot6d(Mat3::Identity()).isApprox((Vec6() << 1, 0, 0, 0, 1, 0).finished()));
    Vec6 expected;
    expected << 0, 0, -1, 0, 1, 0;
    REQUIRE((matrix_to_rot6d(rotation_y(M_PI / 2)) - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rot6d round-trip over random rotations") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 r = random_rotation(rng);
        const Mat3 back = rot6d_to_matrix(matrix_to_rot6d(r));
        REQUIRE((back - r).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("transform_target_point examples") {
    const OORSample ident =
        make_sample(Mat3::Identity(), Vec3::Zero(), Vec3::Ones(), Vec3::Ones());
    REQUIRE(transform_target_point(Vec3(0.3, 0.3, 0.3), ident)
                .isApprox(Vec3(0.3, 0.3, 0.3)));

    const OORSample stretched = make_sample(Mat3::Identity(), Vec3(0, 1, 0),
                                            Vec3(2, 1, 1), Vec3::Ones());
    REQUIRE(transform_target_point(Vec3(0.5, 0, 0), stretched).isApprox(Vec3(1, 1, 0)));
}

TEST_CASE("transform_target_point matches homogeneous-matrix oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat3 r = random_rotation(rng);
        const Vec3 t(rng.normal(), rng.normal(), rng.normal());
        const Vec3 s(std::exp(rng.normal()), std::exp(rng.normal()), std::exp(rng.normal()));
        const OORSample o = make_sample(r, t, s, Vec3::Ones());

        Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
        h.block<3, 3>(0, 0) = r * s.asDiagonal();
        h.block<3, 1>(0, 3) = t;

        for (int i = 0; i < 100; ++i) {
            const Vec3 x(rng.normal(), rng.normal(), rng.normal());
            const Eigen::Vector4d hx = h * Eigen::Vector4d(x.x(), x.y(), x.z(), 1.0);
            REQUIRE((transform_target_point(x, o) - hx.head<3>()).norm() < 1e-12);
        }
    }
}

TEST_CASE("scaling applies before rotation") {
    // for anisotropic s and nontrivial R the two orders disagree
    const Mat3 r = rotation_z(M_PI / 3);
    const Vec3 s(2, 1, 1);
    const OORSample o = make_sample(r, Vec3::Zero(), s, Vec3::Ones());
    const Vec3 x(1, 1, 0);
    const Vec3 ours = transform_target_point(x, o);
    REQUIRE(ours.isApprox(r * s.cwiseProduct(x), 1e-14));
    REQUIRE(!ours.isApprox(s.cwiseProduct(r * x), 1e-6));
}

TEST_CASE("scale_base_point examples") {
    REQUIRE(scale_base_point(Vec3::Ones(), make_sample(Mat3::Identity(), Vec3::Zero(),
                                                       Vec3::Ones(), Vec3::Ones()))
                .isApprox(Vec3::Ones()));
    const OORSample o = make_sample(Mat3::Identity(), Vec3::Zero(), Vec3::Ones(),
                                    Vec3(1, 0.4, 0.8));
    REQUIRE(scale_base_point(Vec3(0.5, 0.5, 0.5), o).isApprox(Vec3(0.5, 0.2, 0.4)));

    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x(rng.normal(), rng.normal(), rng.normal());
        const Vec3 sb(std::exp(rng.normal()), std::exp(rng.normal()), std::exp(rng.normal()));
        const OORSample oo = make_sample(Mat3::Identity(), Vec3::Zero(), Vec3::Ones(), sb);
        const Vec3 got = scale_base_point(x, oo);
        for (int c = 0; c < 3; ++c)
            REQUIRE(std::abs(got(c) - sb(c) * x(c)) < 1e-15);
    }
}

TEST_CASE("compose_similarity identity and inverse") {
    Rng rng(11);
    const SimilarityTransform x = random_sim(rng);
    const SimilarityTransform composed = compose_similarity(SimilarityTransform{}, x);
    REQUIRE(composed.s == Catch::Approx(x.s));
    REQUIRE(composed.rot.isApprox(x.rot, 1e-12));
    REQUIRE(composed.trans.isApprox(x.trans, 1e-12));

    const SimilarityTransform round = compose_similarity(x, invert_similarity(x));
    REQUIRE(std::abs(round.s - 1.0) < 1e-9);
    REQUIRE((round.rot - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(round.trans.norm() < 1e-9);
}

TEST_CASE("compose_similarity equals sequential application") {
    Rng rng(13);
    const SimilarityTransform a = random_sim(rng);
    const SimilarityTransform b = random_sim(rng);
    const SimilarityTransform ab = compose_similarity(a, b);
    for (int i = 0; i < 50; ++i) {
        const Vec3 p(rng.normal(), rng.normal(), rng.normal());
        REQUIRE((ab.apply(p) - a.apply(b.apply(p))).norm() < 1e-10);
    }
}

TEST_CASE("similarity group laws") {
    Rng rng(17);
    for (int i = 0; i < 25; ++i) {
        const SimilarityTransform a = random_sim(rng), b = random_sim(rng),
                                  c = random_sim(rng);
        const SimilarityTransform left = compose_similarity(compose_similarity(a, b), c);
        const SimilarityTransform right = compose_similarity(a, compose_similarity(b, c));
        REQUIRE(std::abs(left.s - right.s) < 1e-9 * left.s);
        REQUIRE((left.rot - right.rot).cwiseAbs().maxCoeff() < 1e-9);
        REQUIRE((left.trans - right.trans).norm() < 1e-9 * (1.0 + left.trans.norm()));

        const SimilarityTransform li = compose_similarity(invert_similarity(a), a);
        REQUIRE(std::abs(li.s - 1.0) < 1e-9);
        REQUIRE((li.rot - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        REQUIRE(li.trans.norm() < 1e-9);
    }
}

TEST_CASE("invert_similarity hand example") {
    const SimilarityTransform t = make_sim(2.0, Mat3::Identity(), Vec3(2, 0, 0));
    const SimilarityTransform inv = invert_similarity(t);
    REQUIRE(inv.s == Catch::Approx(0.5));
    REQUIRE(inv.rot.isApprox(Mat3::Identity()));
    REQUIRE(inv.trans.isApprox(Vec3(-1, 0, 0)));
}

TEST_CASE("canonicalize_mesh centers and normalizes") {
    TriMesh cube;
    for (int i = 0; i < 8; ++i)
        cube.vertices.push_back(Vec3(5 + (i & 1 ? 0.5 : -0.5), 5 + (i & 2 ? 0.5 : -0.5),
                                     5 + (i & 4 ? 0.5 : -0.5)));
    auto [canon, original] = canonicalize_mesh(cube);
    const Aabb box = Aabb::of_points(canon.vertices);
    REQUIRE(box.center().norm() < 1e-9);
    REQUIRE(box.extents().maxCoeff() == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(original.center().isApprox(Vec3(5, 5, 5)));
    REQUIRE(original.extents().isApprox(Vec3::Ones()));
}

TEST_CASE("canonicalize_mesh preserves aspect ratio") {
    TriMesh box;
    for (int i = 0; i < 8; ++i)
        box.vertices.push_back(
            Vec3(i & 1 ? 1.0 : -1.0, i & 2 ? 0.5 : -0.5, i & 4 ? 0.25 : -0.25));
    auto [canon, original] = canonicalize_mesh(box);
    REQUIRE(original.extents().isApprox(Vec3(2, 1, 0.5)));
    REQUIRE(Aabb::of_points(canon.vertices).extents().isApprox(Vec3(1, 0.5, 0.25), 1e-12));
}

TEST_CASE("canonicalize_mesh is idempotent") {
    Rng rng(5);
    TriMesh m;
    for (int i = 0; i < 40; ++i)
        m.vertices.push_back(Vec3(rng.normal() * 3 + 1, rng.normal(), rng.normal() - 2));
    auto [once, box1] = canonicalize_mesh(m);
    auto [twice, box2] = canonicalize_mesh(once);
    for (std::size_t i = 0; i < once.vertices.size(); ++i)
        REQUIRE((once.vertices[i] - twice.vertices[i]).norm() < 1e-9);
}

TEST_CASE("canonicalize_mesh rejects empty mesh") {
    REQUIRE_THROWS_AS(canonicalize_mesh(TriMesh{}), EmptyMesh);
}

TEST_CASE("aabb_of_placed identity") {
    const Aabb box = aabb_of_placed(Vec3::Ones(), Mat3::Identity(), Vec3::Zero());
    REQUIRE(box.min.isApprox(Vec3(-0.5, -0.5, -0.5)));
    REQUIRE(box.max.isApprox(Vec3(0.5, 0.5, 0.5)));
}

TEST_CASE("aabb_of_placed 45 degree yaw") {
    const Aabb box = aabb_of_placed(Vec3::Ones(), rotation_y(M_PI / 4), Vec3::Zero());
    REQUIRE(box.extents().x() == Catch::Approx(std::sqrt(2.0)));
    REQUIRE(box.extents().y() == Catch::Approx(1.0));
    REQUIRE(box.extents().z() == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("aabb_of_placed equals corner enumeration") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 extents(std::exp(rng.normal()), std::exp(rng.normal()),
                           std::exp(rng.normal()));
        const Mat3 r = random_rotation(rng);
        const Vec3 t(rng.normal(), rng.normal(), rng.normal());

        std::vector<Vec3> corners;
        for (int i = 0; i < 8; ++i) {
            const Vec3 c(i & 1 ? extents.x() / 2 : -extents.x() / 2,
                         i & 2 ? extents.y() / 2 : -extents.y() / 2,
                         i & 4 ? extents.z() / 2 : -extents.z() / 2);
            corners.push_back(r * c + t);
        }
        const Aabb expected = Aabb::of_points(corners);
        const Aabb got = aabb_of_placed(extents, r, t);
        REQUIRE((got.min - expected.min).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((got.max - expected.max).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("overlap_volume basics") {
    const Aabb a{Vec3(-0.5, -0.5, -0.5), Vec3(0.5, 0.5, 0.5)};
    const Aabb apart{Vec3(2, 2, 2), Vec3(3, 3, 3)};
    REQUIRE(overlap_volume(a, apart) == 0.0);
    const Aabb shifted{Vec3(0, -0.5, -0.5), Vec3(1, 0.5, 0.5)};
    REQUIRE(overlap_volume(a, shifted) == Catch::Approx(0.5));
}

TEST_CASE("obj round trip with fan triangulation") {
    std::istringstream in(
        "# comment\n"
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "f 1/1/1 2/2/2 3/3/3 4/4/4\n");
    const TriMesh m = read_obj(in);
    REQUIRE(m.vertices.size() == 4);
    REQUIRE(m.faces.size() == 2);
    REQUIRE(m.faces[0] == std::array<int, 3>{0, 1, 2});
    REQUIRE(m.faces[1] == std::array<int, 3>{0, 2, 3});

    std::ostringstream out;
    write_obj(out, m);
    std::istringstream back(out.str());
    const TriMesh m2 = read_obj(back);
    REQUIRE(m2.vertices.size() == m.vertices.size());
    REQUIRE(m2.faces == m.faces);
}

TEST_CASE("obj rejects malformed input") {
    std::istringstream bad_vertex("v 1 2\n");
    REQUIRE_THROWS_AS(read_obj(bad_vertex), ParseError);
    std::istringstream bad_index("v 0 0 0\nf 1 2 3\n");
    REQUIRE_THROWS_AS(read_obj(bad_index), ParseError);
}
