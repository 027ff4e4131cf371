#pragma once

#include <Eigen/Dense>
#include <vector>

#include "oor/geometry.hpp"

namespace oor {

// Flat diffusion state: [rot6d(6), trans(3), scale_tb(3), scale_b(3)].
using State15 = Eigen::Matrix<double, 15, 1>;

constexpr int kStateDim = 15;
constexpr int kPoseDim = 9;        // rot6d + trans
constexpr int kScaleOffset = 9;    // first scale component
constexpr int kScaleTbOffset = 9;
constexpr int kScaleBOffset = 12;

inline State15 state_from_sample(const OORSample& s) {
    State15 v;
    v.segment<6>(0) = matrix_to_rot6d(s.rot);
    v.segment<3>(6) = s.trans;
    v.segment<3>(kScaleTbOffset) = s.scale_tb;
    v.segment<3>(kScaleBOffset) = s.scale_b;
    return v;
}

// Throws DegenerateInput for a degenerate rot6d and rejects non-positive scales.
inline OORSample sample_from_state(const State15& v) {
    OORSample s;
    s.rot = rot6d_to_matrix(v.segment<6>(0));
    s.trans = v.segment<3>(6);
    s.scale_tb = v.segment<3>(kScaleTbOffset);
    s.scale_b = v.segment<3>(kScaleBOffset);
    if (!is_positive_scale(s.scale_tb) || !is_positive_scale(s.scale_b))
        throw DegenerateInput("sample_from_state: non-positive scale");
    return s;
}

// Lenient conversion for mid-integration states: scales floored instead of rejected.
inline OORSample sample_from_state_clamped(const State15& v, double scale_floor = 1e-4) {
    State15 w = v;
    w.segment<6>(kScaleOffset) = w.segment<6>(kScaleOffset).cwiseMax(scale_floor);
    return sample_from_state(w);
}

inline std::vector<State15> samples_to_states(const std::vector<OORSample>& samples) {
    std::vector<State15> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(state_from_sample(s));
    return out;
}

inline Eigen::MatrixXd states_to_matrix(const std::vector<State15>& states) {
    Eigen::MatrixXd m(states.size(), kStateDim);
    for (std::size_t i = 0; i < states.size(); ++i) m.row(i) = states[i].transpose();
    return m;
}

}  // namespace oor
