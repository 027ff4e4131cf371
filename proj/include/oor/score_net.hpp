#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oor/common.hpp"
#include "oor/state.hpp"

namespace oor {

// Variance-exploding schedule: sigma(t) = sigma_min * (sigma_max/sigma_min)^t,
// defined on [epsilon, 1].
struct NoiseSchedule {
    double sigma_min = 0.01;
    double sigma_max = 50.0;
    double epsilon = 1e-5;

    double log_ratio() const { return std::log(sigma_max / sigma_min); }

    double sigma(double t) const {
        if (t < epsilon - 1e-12 || t > 1.0 + 1e-12)
            throw OutOfRange("sigma: t outside [epsilon, 1]");
        return sigma_min * std::pow(sigma_max / sigma_min, t);
    }

    // sigma(t) * d sigma(t) / dt, the probability-flow drift factor
    double drift_coeff(double t) const {
        const double s = sigma(t);
        return s * s * log_ratio();
    }
};

inline State15 perturb(const State15& phi, double t, const NoiseSchedule& sched, Rng& rng) {
    const double s = sched.sigma(t);
    State15 out = phi;
    for (int i = 0; i < kStateDim; ++i) out(i) += s * rng.normal();
    return out;
}

// Conditioning triple. The paper feeds these through a pretrained text
// encoder; here each exact triple maps to a learned embedding row.
struct ContextKey {
    std::string context;
    std::string base;
    std::string target;

    auto operator<=>(const ContextKey&) const = default;
    std::string pretty() const { return context + " [" + base + " -> " + target + "]"; }
};

struct ContextVocab {
    std::vector<ContextKey> keys;
    std::map<ContextKey, int> index;

    int add(const ContextKey& key) {
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(keys.size());
        keys.push_back(key);
        index.emplace(key, id);
        return id;
    }

    std::optional<int> find(const ContextKey& key) const {
        auto it = index.find(key);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }

    int at(const ContextKey& key) const {
        auto it = index.find(key);
        if (it == index.end())
            throw UnknownContext("unknown context triple: " + key.pretty());
        return it->second;
    }

    int size() const { return static_cast<int>(keys.size()); }
};

struct NetConfig {
    int time_dim = 64;
    int cond_dim = 64;
    int hidden_dim = 256;
    int hidden_layers = 5;
    NoiseSchedule schedule;

    int input_dim() const { return kStateDim + time_dim + cond_dim; }
};

// Conditional score model: an MLP over [state, sinusoidal time embedding,
// context embedding], with the raw output scaled by 1/sigma(t) so the
// regression target is unit-variance noise across all noise levels.
struct ScoreNet {
    NetConfig cfg;
    ContextVocab vocab;
    std::vector<Eigen::MatrixXd> weights;  // hidden_layers hidden + 1 output
    std::vector<Eigen::VectorXd> biases;
    Eigen::MatrixXd embedding;             // vocab x cond_dim

    Eigen::VectorXd time_embedding(double t) const {
        Eigen::VectorXd e(cfg.time_dim);
        const int half = cfg.time_dim / 2;
        for (int k = 0; k < half; ++k) {
            const double freq =
                std::exp(std::log(1000.0) * (half > 1 ? double(k) / double(half - 1) : 0.0));
            e(2 * k) = std::sin(t * freq);
            e(2 * k + 1) = std::cos(t * freq);
        }
        if (cfg.time_dim % 2 == 1) e(cfg.time_dim - 1) = t;
        return e;
    }
};

inline double silu(double x) { return x / (1.0 + std::exp(-x)); }
inline double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

// Hidden layers get scaled-uniform init; the output layer starts at zero so an
// untrained net reports a zero score everywhere.
inline ScoreNet make_score_net(const NetConfig& cfg, const ContextVocab& vocab,
                               std::uint64_t seed) {
    ScoreNet net;
    net.cfg = cfg;
    net.vocab = vocab;
    Rng rng(seed);

    auto init = [&rng](Eigen::MatrixXd& w, int rows, int cols) {
        w.resize(rows, cols);
        const double bound = std::sqrt(6.0 / double(rows + cols));
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
    };

    int in_dim = cfg.input_dim();
    for (int l = 0; l < cfg.hidden_layers; ++l) {
        Eigen::MatrixXd w;
        init(w, cfg.hidden_dim, in_dim);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(cfg.hidden_dim));
        in_dim = cfg.hidden_dim;
    }
    net.weights.push_back(Eigen::MatrixXd::Zero(kStateDim, in_dim));
    net.biases.push_back(Eigen::VectorXd::Zero(kStateDim));

    net.embedding.resize(vocab.size(), cfg.cond_dim);
    for (int i = 0; i < net.embedding.rows(); ++i)
        for (int j = 0; j < net.embedding.cols(); ++j)
            net.embedding(i, j) = 0.1 * rng.normal();
    return net;
}

namespace detail {

// Batched input rows: [phi, time_embed(t), embedding[cond]].
inline Eigen::MatrixXd build_inputs(const ScoreNet& net, const Eigen::MatrixXd& phis,
                                    const std::vector<double>& ts,
                                    const std::vector<int>& cond) {
    const auto b = phis.rows();
    Eigen::MatrixXd x(b, net.cfg.input_dim());
    for (Eigen::Index i = 0; i < b; ++i) {
        x.block(i, 0, 1, kStateDim) = phis.row(i);
        x.block(i, kStateDim, 1, net.cfg.time_dim) =
            net.time_embedding(ts[i]).transpose();
        x.block(i, kStateDim + net.cfg.time_dim, 1, net.cfg.cond_dim) =
            net.embedding.row(cond[i]);
    }
    return x;
}

// Forward pass returning the unscaled network output; optionally keeps
// intermediate activations for the backward pass.
inline Eigen::MatrixXd forward_raw(const ScoreNet& net, const Eigen::MatrixXd& x,
                                   std::vector<Eigen::MatrixXd>* pre,
                                   std::vector<Eigen::MatrixXd>* act) {
    Eigen::MatrixXd h = x;
    if (act) act->push_back(h);
    for (int l = 0; l < net.cfg.hidden_layers; ++l) {
        Eigen::MatrixXd z = (h * net.weights[l].transpose()).rowwise() +
                            net.biases[l].transpose();
        if (pre) pre->push_back(z);
        h = z.unaryExpr([](double v) { return silu(v); });
        if (act) act->push_back(h);
    }
    return (h * net.weights.back().transpose()).rowwise() + net.biases.back().transpose();
}

}  // namespace detail

// Batched score: rows of phis at times ts under conditions cond.
inline Eigen::MatrixXd score_batch(const ScoreNet& net, const Eigen::MatrixXd& phis,
                                   const std::vector<double>& ts,
                                   const std::vector<int>& cond) {
    Eigen::MatrixXd raw =
        detail::forward_raw(net, detail::build_inputs(net, phis, ts, cond), nullptr, nullptr);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) raw.row(i) /= net.cfg.schedule.sigma(ts[i]);
    return raw;
}

inline State15 score(const ScoreNet& net, const State15& phi_t, double t,
                     const ContextKey& cond) {
    const int idx = net.vocab.at(cond);
    const double sig = net.cfg.schedule.sigma(t);  // validates t
    Eigen::MatrixXd phis(1, kStateDim);
    phis.row(0) = phi_t.transpose();
    const Eigen::MatrixXd raw =
        detail::forward_raw(net, detail::build_inputs(net, phis, {t}, {idx}), nullptr, nullptr);
    return raw.row(0).transpose() / sig;
}

struct TrainExample {
    State15 state;
    int cond = 0;
};

struct NetGrads {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;
    Eigen::MatrixXd d_embedding;

    static NetGrads zeros_like(const ScoreNet& net) {
        NetGrads g;
        for (const auto& w : net.weights)
            g.d_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        for (const auto& b : net.biases)
            g.d_biases.push_back(Eigen::VectorXd::Zero(b.size()));
        g.d_embedding = Eigen::MatrixXd::Zero(net.embedding.rows(), net.embedding.cols());
        return g;
    }
};

// Denoising score matching over one batch with explicit noise draws:
//   mean_i lambda(t_i) | Psi(phi_i + sigma z_i, t_i | c_i) - (phi_i - phi_t_i)/sigma^2 |^2
// with lambda(t) = sigma(t)^2. Gradients (if requested) cover all weights,
// biases and the touched embedding rows.
inline double dsm_loss_given(const ScoreNet& net, const std::vector<TrainExample>& batch,
                             const std::vector<double>& ts,
                             const std::vector<State15>& zs, NetGrads* grads) {
    const int b = static_cast<int>(batch.size());
    if (b == 0) throw InsufficientSamples("dsm_loss: empty batch");

    Eigen::MatrixXd phis(b, kStateDim);
    std::vector<int> cond(b);
    Eigen::VectorXd sigmas(b);
    Eigen::MatrixXd targets(b, kStateDim);
    for (int i = 0; i < b; ++i) {
        const double sig = net.cfg.schedule.sigma(ts[i]);
        sigmas(i) = sig;
        phis.row(i) = (batch[i].state + sig * zs[i]).transpose();  // phi_t
        targets.row(i) = (-zs[i] / sig).transpose();               // (phi - phi_t)/sigma^2
        cond[i] = batch[i].cond;
    }

    const Eigen::MatrixXd x = detail::build_inputs(net, phis, ts, cond);
    std::vector<Eigen::MatrixXd> pre, act;
    const Eigen::MatrixXd raw =
        detail::forward_raw(net, x, grads ? &pre : nullptr, grads ? &act : nullptr);

    double loss = 0.0;
    Eigen::MatrixXd diff(b, kStateDim);
    for (int i = 0; i < b; ++i) {
        diff.row(i) = raw.row(i) / sigmas(i) - targets.row(i);
        loss += sigmas(i) * sigmas(i) * diff.row(i).squaredNorm();
    }
    loss /= double(b);
    if (!grads) return loss;

    // d loss / d raw_i = (2/b) * sigma_i * diff_i
    Eigen::MatrixXd g = diff;
    for (int i = 0; i < b; ++i) g.row(i) *= 2.0 * sigmas(i) / double(b);

    const int last = net.cfg.hidden_layers;
    grads->d_weights[last].noalias() += g.transpose() * act[last];
    grads->d_biases[last] += g.colwise().sum().transpose();
    Eigen::MatrixXd back = g * net.weights[last];
    for (int l = net.cfg.hidden_layers - 1; l >= 0; --l) {
        back = back.cwiseProduct(pre[l].unaryExpr([](double v) { return silu_grad(v); }));
        grads->d_weights[l].noalias() += back.transpose() * act[l];
        grads->d_biases[l] += back.colwise().sum().transpose();
        back = Eigen::MatrixXd(back * net.weights[l]);
    }
    const int cond_off = kStateDim + net.cfg.time_dim;
    for (int i = 0; i < b; ++i)
        grads->d_embedding.row(cond[i]) += back.block(i, cond_off, 1, net.cfg.cond_dim);
    return loss;
}

// Spec-facing variant: provided time draws, internally sampled noise.
inline double dsm_loss(const ScoreNet& net,
                       const std::vector<std::pair<State15, ContextKey>>& batch,
                       const std::vector<double>& t_draws, Rng& rng) {
    if (batch.empty()) throw InsufficientSamples("dsm_loss: empty batch");
    std::vector<TrainExample> ex(batch.size());
    std::vector<State15> zs(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        ex[i] = {batch[i].first, net.vocab.at(batch[i].second)};
        for (int k = 0; k < kStateDim; ++k) zs[i](k) = rng.normal();
    }
    return dsm_loss_given(net, ex, t_draws, zs, nullptr);
}

struct TrainConfig {
    int batch = 256;
    double lr = 1e-4;
    int epochs = 100;
    std::uint64_t seed = 0;
    NoiseSchedule schedule;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

namespace detail {

struct AdamState {
    NetGrads m, v;
    long step = 0;
};

template <typename M>
inline void adam_step_one(M& param, M& m, M& v, const M& grad, const TrainConfig& cfg,
                          double bc1, double bc2) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param -= (cfg.lr * (m / bc1).array() / ((v / bc2).array().sqrt() + cfg.adam_eps))
                 .matrix();
}

inline void adam_update(ScoreNet& net, const NetGrads& g, AdamState& st,
                        const TrainConfig& cfg) {
    ++st.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(st.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(st.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_step_one(net.weights[l], st.m.d_weights[l], st.v.d_weights[l], g.d_weights[l],
                      cfg, bc1, bc2);
        adam_step_one(net.biases[l], st.m.d_biases[l], st.v.d_biases[l], g.d_biases[l],
                      cfg, bc1, bc2);
    }
    adam_step_one(net.embedding, st.m.d_embedding, st.v.d_embedding, g.d_embedding, cfg,
                  bc1, bc2);
}

}  // namespace detail

// Deterministic minibatch Adam on the DSM objective. The schedule in cfg
// becomes the net's schedule so training and inference always agree.
inline ScoreNet train(ScoreNet net,
                      const std::vector<std::pair<State15, ContextKey>>& dataset,
                      const TrainConfig& cfg,
                      const std::function<void(int, double)>& on_epoch = nullptr) {
    if (dataset.empty()) throw InsufficientSamples("train: empty dataset");
    net.cfg.schedule = cfg.schedule;

    std::vector<TrainExample> data(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        data[i] = {dataset[i].first, net.vocab.at(dataset[i].second)};

    Rng rng(cfg.seed);
    detail::AdamState adam;
    adam.m = NetGrads::zeros_like(net);
    adam.v = NetGrads::zeros_like(net);

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const double eps = cfg.schedule.epsilon;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.index(i)]);

        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t count = std::min<std::size_t>(cfg.batch, order.size() - start);
            std::vector<TrainExample> batch(count);
            std::vector<double> ts(count);
            std::vector<State15> zs(count);
            for (std::size_t i = 0; i < count; ++i) {
                batch[i] = data[order[start + i]];
                ts[i] = rng.uniform(eps, 1.0);
                for (int k = 0; k < kStateDim; ++k) zs[i](k) = rng.normal();
            }
            NetGrads g = NetGrads::zeros_like(net);
            epoch_loss += dsm_loss_given(net, batch, ts, zs, &g);
            ++batches;
            detail::adam_update(net, g, adam, cfg);
        }
        if (on_epoch) on_epoch(epoch, epoch_loss / std::max(1, batches));
    }
    return net;
}

// ---- checkpoint I/O ------------------------------------------------------

inline constexpr const char* kCheckpointVersion = "oor-checkpoint/1";

inline nlohmann::json checkpoint_to_json(const ScoreNet& net) {
    nlohmann::json j;
    j["version"] = kCheckpointVersion;
    j["config"] = {{"time_dim", net.cfg.time_dim},
                   {"cond_dim", net.cfg.cond_dim},
                   {"hidden_dim", net.cfg.hidden_dim},
                   {"hidden_layers", net.cfg.hidden_layers},
                   {"schedule",
                    {{"sigma_min", net.cfg.schedule.sigma_min},
                     {"sigma_max", net.cfg.schedule.sigma_max},
                     {"epsilon", net.cfg.schedule.epsilon}}}};
    nlohmann::json vocab = nlohmann::json::array();
    for (const auto& k : net.vocab.keys)
        vocab.push_back({{"context", k.context}, {"base", k.base}, {"target", k.target}});
    j["vocab"] = vocab;

    auto matrix_entry = [](const std::string& name, const Eigen::MatrixXd& m) {
        std::vector<double> values;
        values.reserve(m.size());
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
        return nlohmann::json{
            {"name", name}, {"shape", {m.rows(), m.cols()}}, {"values", values}};
    };

    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        layers.push_back(matrix_entry("W" + std::to_string(l), net.weights[l]));
        layers.push_back(matrix_entry("b" + std::to_string(l), net.biases[l]));
    }
    layers.push_back(matrix_entry("embedding", net.embedding));
    j["layers"] = layers;
    return j;
}

inline void save_checkpoint(const ScoreNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot open " + path + " for writing");
    out << checkpoint_to_json(net).dump();
    out << "\n";
}

inline ScoreNet checkpoint_from_json(const nlohmann::json& j) {
    try {
        if (!j.contains("version"))
            throw CorruptCheckpoint("checkpoint: missing version field");
        if (j.at("version").get<std::string>() != kCheckpointVersion)
            throw FormatVersionMismatch("checkpoint: unsupported version " +
                                        j.at("version").get<std::string>());

        ScoreNet net;
        const auto& cfg = j.at("config");
        net.cfg.time_dim = cfg.at("time_dim").get<int>();
        net.cfg.cond_dim = cfg.at("cond_dim").get<int>();
        net.cfg.hidden_dim = cfg.at("hidden_dim").get<int>();
        net.cfg.hidden_layers = cfg.at("hidden_layers").get<int>();
        const auto& sched = cfg.at("schedule");
        net.cfg.schedule.sigma_min = sched.at("sigma_min").get<double>();
        net.cfg.schedule.sigma_max = sched.at("sigma_max").get<double>();
        net.cfg.schedule.epsilon = sched.at("epsilon").get<double>();

        for (const auto& v : j.at("vocab"))
            net.vocab.add({v.at("context").get<std::string>(), v.at("base").get<std::string>(),
                           v.at("target").get<std::string>()});

        std::map<std::string, Eigen::MatrixXd> mats;
        for (const auto& entry : j.at("layers")) {
            const auto shape = entry.at("shape");
            const Eigen::Index rows = shape.at(0).get<Eigen::Index>();
            const Eigen::Index cols = shape.at(1).get<Eigen::Index>();
            const auto& values = entry.at("values");
            if (static_cast<Eigen::Index>(values.size()) != rows * cols)
                throw CorruptCheckpoint("checkpoint: value count does not match shape");
            Eigen::MatrixXd m(rows, cols);
            Eigen::Index i = 0;
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values.at(i++).get<double>();
            mats[entry.at("name").get<std::string>()] = std::move(m);
        }

        int in_dim = net.cfg.input_dim();
        for (int l = 0; l <= net.cfg.hidden_layers; ++l) {
            const auto wi = mats.find("W" + std::to_string(l));
            const auto bi = mats.find("b" + std::to_string(l));
            if (wi == mats.end() || bi == mats.end())
                throw CorruptCheckpoint("checkpoint: missing layer " + std::to_string(l));
            const int out_dim = l == net.cfg.hidden_layers ? kStateDim : net.cfg.hidden_dim;
            if (wi->second.rows() != out_dim || wi->second.cols() != in_dim ||
                bi->second.size() != out_dim)
                throw CorruptCheckpoint("checkpoint: layer shape mismatch at " +
                                        std::to_string(l));
            net.weights.push_back(wi->second);
            net.biases.push_back(bi->second.col(0));
            in_dim = net.cfg.hidden_dim;
        }
        const auto ei = mats.find("embedding");
        if (ei == mats.end()) throw CorruptCheckpoint("checkpoint: missing embedding");
        if (ei->second.rows() != net.vocab.size() || ei->second.cols() != net.cfg.cond_dim)
            throw CorruptCheckpoint("checkpoint: embedding shape mismatch");
        net.embedding = ei->second;
        return net;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptCheckpoint(std::string("checkpoint: malformed document: ") + e.what());
    }
}

inline ScoreNet load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorruptCheckpoint("checkpoint: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw CorruptCheckpoint(std::string("checkpoint: parse failure: ") + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace oor
