#pragma once

#include "oor/sampler.hpp"

namespace oor {

struct EditConfig {
    double eta = 0.01;     // gradient step size
    double lambda1 = 0.01; // likelihood weight
    int steps = 50;
};

using ScoreFn = std::function<State15(const State15&, double)>;
using EditTrace = std::function<void(int step, const State15&)>;

namespace detail {

// One proximal-likelihood descent step over the pose subspace:
//   phi <- phi - eta [ (phi - phi0) - lambda1 * Psi(phi, eps | c) ].
// Scale components never move. The 6D rotation block is re-orthonormalized
// whenever the step actually changed it.
inline State15 pose_descent_step(const State15& phi, const State15& phi0,
                                 const State15& psi, const EditConfig& cfg) {
    State15 out = phi;
    const State15 delta = (phi - phi0) - cfg.lambda1 * psi;
    bool rot_moved = false;
    for (int c = 0; c < kPoseDim; ++c) {
        const double step = cfg.eta * delta(c);
        out(c) -= step;
        if (c < 6 && step != 0.0) rot_moved = true;
    }
    if (rot_moved)
        out.segment<6>(0) = matrix_to_rot6d(rot6d_to_matrix(out.segment<6>(0)));
    return out;
}

}  // namespace detail

// Core edit loop with an injectable score field (tests drive it directly).
inline OORSample rearrange_with(const ScoreFn& score_fn, const OORSample& phi0,
                                const EditConfig& cfg, double epsilon,
                                const EditTrace& trace = nullptr) {
    const State15 start = state_from_sample(phi0);
    State15 phi = start;
    if (trace) trace(0, phi);
    for (int k = 0; k < cfg.steps; ++k) {
        const State15 psi = score_fn(phi, epsilon);
        phi = detail::pose_descent_step(phi, start, psi, cfg);
        if (trace) trace(k + 1, phi);
    }
    OORSample out;
    out.rot = rot6d_to_matrix(phi.segment<6>(0));
    out.trans = phi.segment<3>(6);
    out.scale_tb = phi0.scale_tb;
    out.scale_b = phi0.scale_b;
    return out;
}

// Denoise a noisy arrangement toward a high-likelihood region of the context's
// OOR distribution, staying close to the input (proximal term).
inline OORSample rearrange(const ScoreNet& net, const ContextKey& cond,
                           const OORSample& phi0, const EditConfig& cfg,
                           const EditTrace& trace = nullptr) {
    net.vocab.at(cond);  // UnknownContext before any work
    const double eps = net.cfg.schedule.epsilon;
    return rearrange_with(
        [&](const State15& phi, double t) { return score(net, phi, t, cond); }, phi0, cfg,
        eps, trace);
}

// Same iteration under a different conditioning context.
inline OORSample apply_context(const ScoreNet& net, const ContextKey& new_cond,
                               const OORSample& phi0, const EditConfig& cfg,
                               const EditTrace& trace = nullptr) {
    return rearrange(net, new_cond, phi0, cfg, trace);
}

using SceneEditTrace = std::function<void(int step, const std::vector<State15>&)>;

// Multi-object edit: per-edge pose descent plus collision/inconsistency
// guidance evaluated at the minimal noise level, pose components only.
inline MultiSampleResult rearrange_scene(const ScoreNet& net, const SceneGraph& graph,
                                         const EdgeSamples& initial, const EditConfig& cfg,
                                         const GuidanceConfig& gcfg = {},
                                         const SceneEditTrace& trace = nullptr) {
    graph.validate();
    if (initial.size() != graph.edges.size())
        throw GraphInvalid("rearrange_scene: need one initial sample per edge");

    const std::size_t n_edges = graph.edges.size();
    std::vector<int> cond(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e)
        cond[e] = net.vocab.at(graph.edge_key(graph.edges[e]));

    const double eps = net.cfg.schedule.epsilon;
    const double w1 = std::min(gcfg.l1_scale / eps, gcfg.l1_cap);
    const double w2 = std::min(gcfg.l2_scale / (eps * eps), gcfg.l2_cap);

    std::vector<State15> start(n_edges), states(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) start[e] = state_from_sample(initial[e]);
    states = start;
    if (trace) trace(0, states);

    Eigen::MatrixXd phis(n_edges, kStateDim);
    std::vector<double> ts(n_edges, eps);
    for (int k = 0; k < cfg.steps; ++k) {
        for (std::size_t e = 0; e < n_edges; ++e) phis.row(e) = states[e].transpose();
        const Eigen::MatrixXd psi = score_batch(net, phis, ts, cond);

        // pose-masked finite-difference gradient of the guidance losses
        std::vector<State15> grad(n_edges, State15::Zero());
        if (n_edges > 1) {
            std::vector<State15> probe = states;
            for (std::size_t e = 0; e < n_edges; ++e) {
                for (int c = 0; c < kPoseDim; ++c) {
                    const double saved = probe[e](c);
                    probe[e](c) = saved + gcfg.fd_step;
                    const double up = detail::guided_loss(graph, probe, w1, w2, 1e-4);
                    probe[e](c) = saved - gcfg.fd_step;
                    const double down = detail::guided_loss(graph, probe, w1, w2, 1e-4);
                    probe[e](c) = saved;
                    grad[e](c) = (up - down) / (2.0 * gcfg.fd_step);
                }
            }
        }

        for (std::size_t e = 0; e < n_edges; ++e) {
            State15 next = detail::pose_descent_step(
                states[e], start[e], State15(psi.row(e).transpose()), cfg);
            for (int c = 0; c < kPoseDim; ++c) next(c) -= cfg.eta * grad[e](c);
            states[e] = next;
        }
        if (trace) trace(k + 1, states);
    }

    MultiSampleResult out;
    out.edge_samples.reserve(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        OORSample s = sample_from_state_clamped(states[e]);
        s.scale_tb = initial[e].scale_tb;
        s.scale_b = initial[e].scale_b;
        out.edge_samples.push_back(s);
    }
    out.layout = compose_scene(graph, out.edge_samples);
    out.final_collision = collision_loss(graph, out.layout);
    out.final_inconsistency = inconsistency_parts(graph, states).total();
    return out;
}

// Insert new objects into an existing scene: fixed edges and listed node
// scales are pinned for the whole integration while the new edges are sampled
// with full collision/inconsistency guidance against the fixed objects.
inline MultiSampleResult insert_objects(
    const ScoreNet& net, const SceneGraph& graph,
    const std::map<std::pair<std::string, std::string>, OORSample>& fixed,
    const std::map<std::string, Vec3>& fixed_scales, const GuidanceConfig& gcfg,
    int steps, Rng& rng, const SampleOptions& opts = {}) {
    graph.validate();

    std::vector<std::optional<EdgeFreeze>> freeze(graph.edges.size());
    std::size_t matched = 0;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const auto it = fixed.find({edge.base, edge.target});
        if (it != fixed.end()) {
            EdgeFreeze f;
            f.all = true;
            f.values = state_from_sample(it->second);
            freeze[e] = f;
            ++matched;
            continue;
        }
        EdgeFreeze f;
        bool any = false;
        if (const auto ts = fixed_scales.find(edge.target); ts != fixed_scales.end()) {
            for (int c = 0; c < 3; ++c) {
                f.comps[kScaleTbOffset + c] = true;
                f.values(kScaleTbOffset + c) = ts->second(c);
            }
            any = true;
        }
        if (const auto bs = fixed_scales.find(edge.base); bs != fixed_scales.end()) {
            for (int c = 0; c < 3; ++c) {
                f.comps[kScaleBOffset + c] = true;
                f.values(kScaleBOffset + c) = bs->second(c);
            }
            any = true;
        }
        if (any) freeze[e] = f;
    }
    if (matched != fixed.size())
        throw GraphInvalid("insert_objects: fixed edge not present in graph");

    return sample_multi_masked(net, graph, gcfg, steps, rng, freeze, opts);
}

// Isotropic fit of a sampled anisotropic scale onto an instance mesh bbox:
// s' = mean(s / extents) * extents, preserving the instance aspect ratio.
inline Vec3 fit_instance_scale(const Vec3& s, const Vec3& mesh_bbox_extents) {
    if (!is_positive_scale(mesh_bbox_extents))
        throw DegenerateInput("fit_instance_scale: non-positive extents");
    const double ratio = (s.array() / mesh_bbox_extents.array()).mean();
    return ratio * mesh_bbox_extents;
}

}  // namespace oor
