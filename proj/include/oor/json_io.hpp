#pragma once

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oor/registration.hpp"
#include "oor/sampler.hpp"
#include "oor/synthdata.hpp"

namespace oor {

using nlohmann::json;

// ---- primitives ------------------------------------------------------------

inline json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, z]");
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

// row-major 9-array
inline json mat3_json(const Mat3& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    return a;
}

inline Mat3 mat3_from(const json& j) {
    if (!j.is_array() || j.size() != 9) throw ParseError("expected 9-element rotation");
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j.at(3 * r + c).get<double>();
    return m;
}

template <int N>
inline json vecn_json(const Eigen::Matrix<double, N, 1>& v) {
    json a = json::array();
    for (int i = 0; i < N; ++i) a.push_back(v(i));
    return a;
}

template <int N>
inline Eigen::Matrix<double, N, 1> vecn_from(const json& j) {
    if (!j.is_array() || j.size() != N)
        throw ParseError("expected " + std::to_string(N) + "-element array");
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) v(i) = j.at(i).get<double>();
    return v;
}

// ---- samples and dataset lines ----------------------------------------------

// One training/evaluation record: conditioning triple plus the flat state,
// stored with the rotation in 6D form.
struct DatasetEntry {
    ContextKey key;
    State15 state = State15::Zero();
};

inline json dataset_entry_json(const DatasetEntry& e) {
    return json{{"context", e.key.context},
                {"base", e.key.base},
                {"target", e.key.target},
                {"rot6d", vecn_json<6>(e.state.segment<6>(0))},
                {"t", vec3_json(e.state.segment<3>(6))},
                {"s_tb", vec3_json(e.state.segment<3>(kScaleTbOffset))},
                {"s_b", vec3_json(e.state.segment<3>(kScaleBOffset))}};
}

inline DatasetEntry dataset_entry_from(const json& j) {
    DatasetEntry e;
    try {
        e.key = {j.at("context").get<std::string>(), j.at("base").get<std::string>(),
                 j.at("target").get<std::string>()};
        e.state.segment<6>(0) = vecn_from<6>(j.at("rot6d"));
        e.state.segment<3>(6) = vec3_from(j.at("t"));
        e.state.segment<3>(kScaleTbOffset) = vec3_from(j.at("s_tb"));
        e.state.segment<3>(kScaleBOffset) = vec3_from(j.at("s_b"));
    } catch (const json::exception& ex) {
        throw ParseError(std::string("dataset line: ") + ex.what());
    }
    return e;
}

inline void write_dataset_jsonl(const std::string& path,
                                const std::vector<DatasetEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open " + path + " for writing");
    for (const auto& e : entries) out << dataset_entry_json(e).dump() << "\n";
}

inline std::vector<DatasetEntry> read_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open " + path);
    std::vector<DatasetEntry> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        out.push_back(dataset_entry_from(j));
    }
    return out;
}

inline json oor_sample_json(const OORSample& s) {
    return json{{"R", mat3_json(s.rot)},
                {"t", vec3_json(s.trans)},
                {"s_tb", vec3_json(s.scale_tb)},
                {"s_b", vec3_json(s.scale_b)}};
}

inline OORSample oor_sample_from(const json& j) {
    OORSample s;
    s.rot = mat3_from(j.at("R"));
    s.trans = vec3_from(j.at("t"));
    s.scale_tb = vec3_from(j.at("s_tb"));
    s.scale_b = vec3_from(j.at("s_b"));
    return s;
}

inline json similarity_json(const SimilarityTransform& t) {
    return json{{"s", t.s}, {"R", mat3_json(t.rot)}, {"t", vec3_json(t.trans)}};
}

inline SimilarityTransform similarity_from(const json& j) {
    SimilarityTransform t;
    t.s = j.at("s").get<double>();
    t.rot = mat3_from(j.at("R"));
    t.trans = vec3_from(j.at("t"));
    return t;
}

// ---- feature clouds ----------------------------------------------------------

inline json feature_cloud_json(const FeatureCloud& fc) {
    json points = json::array(), features = json::array();
    for (const auto& p : fc.points) points.push_back(vec3_json(p));
    for (Eigen::Index i = 0; i < fc.features.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fc.features.cols(); ++c)
            row.push_back(fc.features(i, c));
        features.push_back(row);
    }
    return json{{"points", points}, {"features", features}};
}

inline FeatureCloud feature_cloud_from(const json& j) {
    FeatureCloud fc;
    try {
        const auto& points = j.at("points");
        for (const auto& p : points) fc.points.push_back(vec3_from(p));
        const auto& features = j.at("features");
        if (features.size() != points.size())
            throw ParseError("feature cloud: points/features length mismatch");
        if (!features.empty()) {
            const std::size_t dim = features.at(0).size();
            fc.features.resize(features.size(), dim);
            for (std::size_t i = 0; i < features.size(); ++i) {
                const auto& row = features.at(i);
                if (row.size() != dim)
                    throw ParseError("feature cloud: ragged feature rows");
                for (std::size_t c = 0; c < dim; ++c)
                    fc.features(i, c) = row.at(c).get<double>();
            }
        }
    } catch (const json::exception& ex) {
        throw ParseError(std::string("feature cloud: ") + ex.what());
    }
    return fc;
}

inline json point_cloud_json(const PointCloud& pc) {
    json points = json::array();
    for (const auto& p : pc.points) points.push_back(vec3_json(p));
    return points;
}

inline PointCloud point_cloud_from(const json& j) {
    PointCloud pc;
    for (const auto& p : j) pc.points.push_back(vec3_from(p));
    return pc;
}

// ---- scene graphs and layouts -------------------------------------------------

inline json scene_graph_json(const SceneGraph& g) {
    json nodes = json::array(), edges = json::array();
    for (const auto& n : g.nodes) {
        json jn{{"id", n.id}, {"category", n.category}};
        if (n.fixed_scale) jn["fixed_scale"] = vec3_json(*n.fixed_scale);
        nodes.push_back(jn);
    }
    for (const auto& e : g.edges)
        edges.push_back({{"base", e.base}, {"target", e.target}, {"context", e.context}});
    return json{{"nodes", nodes}, {"edges", edges}};
}

// Parses and validates (connected single-root DAG).
inline SceneGraph scene_graph_from(const json& j) {
    SceneGraph g;
    try {
        for (const auto& n : j.at("nodes")) {
            SceneNode node;
            node.id = n.at("id").get<std::string>();
            node.category = n.at("category").get<std::string>();
            if (n.contains("fixed_scale")) node.fixed_scale = vec3_from(n.at("fixed_scale"));
            g.nodes.push_back(node);
        }
        for (const auto& e : j.at("edges"))
            g.edges.push_back({e.at("base").get<std::string>(),
                               e.at("target").get<std::string>(),
                               e.at("context").get<std::string>()});
    } catch (const json::exception& ex) {
        throw ParseError(std::string("scene graph: ") + ex.what());
    }
    g.validate();
    return g;
}

inline json layout_json(const SceneLayout& layout) {
    json objects = json::array();
    for (const auto& n : layout.nodes)
        objects.push_back({{"id", n.id},
                           {"category", n.category},
                           {"R", mat3_json(n.rot)},
                           {"t", vec3_json(n.trans)},
                           {"s", vec3_json(n.scale)}});
    return json{{"objects", objects}};
}

inline SceneLayout layout_from(const json& j) {
    SceneLayout layout;
    try {
        for (const auto& o : j.at("objects")) {
            NodeLayout n;
            n.id = o.at("id").get<std::string>();
            n.category = o.at("category").get<std::string>();
            n.rot = mat3_from(o.at("R"));
            n.trans = vec3_from(o.at("t"));
            n.scale = vec3_from(o.at("s"));
            layout.nodes.push_back(n);
        }
    } catch (const json::exception& ex) {
        throw ParseError(std::string("layout: ") + ex.what());
    }
    return layout;
}

// per-edge samples keyed by "base->target", for fixed-edge files
inline json edge_samples_json(const SceneGraph& g, const EdgeSamples& samples) {
    json edges = json::array();
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        json je = oor_sample_json(samples[e]);
        je["base"] = g.edges[e].base;
        je["target"] = g.edges[e].target;
        je["context"] = g.edges[e].context;
        edges.push_back(je);
    }
    return json{{"edges", edges}};
}

inline std::map<std::pair<std::string, std::string>, OORSample> edge_sample_map_from(
    const json& j) {
    std::map<std::pair<std::string, std::string>, OORSample> out;
    try {
        for (const auto& e : j.at("edges"))
            out[{e.at("base").get<std::string>(), e.at("target").get<std::string>()}] =
                oor_sample_from(e);
    } catch (const json::exception& ex) {
        throw ParseError(std::string("edge samples: ") + ex.what());
    }
    return out;
}

// ---- toy distribution specs ----------------------------------------------------

inline ToyDistribution toy_distribution_from(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dirac") {
        ToyDistribution d;
        d.kind = ToyKind::Dirac;
        d.mode = vecn_from<15>(j.at("state"));
        return d;
    }
    if (kind == "gaussian")
        return ToyDistribution::gaussian(vecn_from<15>(j.at("mode")),
                                         vecn_from<15>(j.at("stdev")));
    if (kind == "on_top_of") {
        ToyDistribution d =
            ToyDistribution::on_top_of(vec3_from(j.at("s_b")), vec3_from(j.at("s_tb")));
        if (j.contains("surface")) {
            d.surface_x = j.at("surface").at(0).get<double>();
            d.surface_z = j.at("surface").at(1).get<double>();
        }
        return d;
    }
    if (kind == "beside")
        return ToyDistribution::beside(vec3_from(j.at("s_b")), vec3_from(j.at("s_tb")),
                                       j.value("gap_max", 0.2), j.value("z_jitter", 0.2));
    if (kind == "pour_into")
        return ToyDistribution::pour_into(
            vec3_from(j.at("s_b")), vec3_from(j.at("s_tb")), j.at("radius").get<double>(),
            j.at("height").get<double>(), j.at("tilt").at(0).get<double>(),
            j.at("tilt").at(1).get<double>());
    if (kind == "ring")
        return ToyDistribution::ring(vec3_from(j.at("s_b")), vec3_from(j.at("s_tb")),
                                     j.at("radius").get<double>(),
                                     j.at("height").get<double>());
    throw ParseError("toy distribution: unknown kind " + kind);
}

// ---- file helpers ----------------------------------------------------------------

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

inline void write_json_file(const std::string& path, const json& j, int indent = -1) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open " + path + " for writing");
    out << j.dump(indent) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open " + path + " for writing");
    out << text;
}

}  // namespace oor
