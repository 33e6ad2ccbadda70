#pragma once

// Parametric synthetic skeleton-stream generator. Sequences alternate idle
// gaps (base pose + small noise) with action segments. Each class k moves a
// distinct subset of joints along a class-specific sinusoid (frequency, phase,
// direction all deterministic functions of k), so classes are separable by
// construction and the difficulty is controlled by the noise level.
//
// Two details matter for the downstream tasks:
//  - Approach/release ramps: in the last `windup_len` frames of the gap before
//    an action the pose morphs toward the class's ready stance, and after an
//    action it morphs back. These frames are NOT annotated; they are the
//    observable precursor that makes start forecasting learnable at all.
//  - A shared random-walk drift translates the whole body (all joints
//    equally), which per-frame root normalization removes exactly. Its step
//    size is tied to motion_noise so a zero-noise config is fully
//    deterministic in raw coordinates as well.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "actdet/dataset.hpp"
#include "actdet/errors.hpp"
#include "actdet/numerics.hpp"

namespace actdet {

struct SynthConfig {
    int num_classes = 3;
    int joints = 8;
    int num_sequences = 50;
    int actions_per_sequence = 3;
    double mean_action_len = 30.0;
    double action_len_jitter = 8.0;
    double mean_gap_len = 20.0;
    double gap_len_jitter = 6.0;
    double motion_noise = 0.05;  // per-coordinate Gaussian noise stddev
    int windup_len = 10;         // approach/release ramp length, frames
    double fps = 8.0;
    uint64_t seed = 1;

    void validate() const {
        if (num_classes < 1) throw ConfigError("synth: num_classes must be >= 1");
        if (joints < 2) throw ConfigError("synth: joints must be >= 2 (root plus movers)");
        if (num_sequences < 1) throw ConfigError("synth: num_sequences must be >= 1");
        if (actions_per_sequence < 1) throw ConfigError("synth: actions_per_sequence must be >= 1");
        if (!(mean_action_len > 0) || !(mean_gap_len > 0))
            throw ConfigError("synth: mean lengths must be > 0");
        if (action_len_jitter < 0 || gap_len_jitter < 0 || motion_noise < 0)
            throw ConfigError("synth: jitters and noise must be >= 0");
        if (windup_len < 0) throw ConfigError("synth: windup_len must be >= 0");
    }
};

namespace synth_detail {

inline std::array<double, 3> base_pose(int joint) {
    if (joint == 0) return {0.0, 0.0, 0.0};
    return {0.4 * std::cos(2.4 * joint), 0.4 * std::sin(2.4 * joint), 0.15 * joint};
}

// Class k moves the non-root joints with (j-1) % M == k-1.
inline bool in_limb_subset(int joint, int class_id, int num_classes) {
    return joint >= 1 && (joint - 1) % num_classes == class_id - 1;
}

inline std::array<double, 3> ready_offset(int class_id, int joint) {
    return {0.35 * std::sin(1.7 * class_id + 0.5 * joint),
            0.35 * std::cos(1.3 * class_id + 0.8 * joint),
            0.35 * std::sin(2.1 * class_id + 0.3 * joint)};
}

// Displacement of joint `joint` at normalized action phase u in [0,1].
// Zero-valued at u=0 on top of the ready offset, so the action continues
// the approach ramp without a jump.
inline std::array<double, 3> action_displacement(int class_id, int joint, double u) {
    const double amp = 0.8;
    const double freq = 1.0 + 0.5 * (class_id - 1);  // cycles per action
    const double phase = 0.9 * (class_id - 1);
    std::array<double, 3> d;
    for (int c = 0; c < 3; ++c) {
        const double psi = phase + 0.6 * c + 0.4 * joint;
        d[c] = amp * (std::sin(2.0 * M_PI * freq * u + psi) - std::sin(psi));
    }
    return d;
}

struct Segment {
    enum class Kind { Gap, Action } kind;
    int len = 0;
    int class_id = 0;  // actions only
};

inline int draw_len(Rng& rng, double mean, double jitter, int min_len) {
    double v = (jitter > 0) ? rng.uniform(mean - jitter, mean + jitter) : mean;
    int n = static_cast<int>(std::lround(v));
    return std::max(min_len, n);
}

}  // namespace synth_detail

inline std::vector<SkeletonSequence> generate(const SynthConfig& cfg) {
    using namespace synth_detail;
    cfg.validate();
    Rng rng(cfg.seed);
    const int M = cfg.num_classes;
    const int J = cfg.joints;
    const double drift_step = 0.4 * cfg.motion_noise;

    // Round-robin class assignment over reshuffled permutations keeps class
    // counts within +-1 across the whole call.
    std::vector<int> class_queue;
    auto next_class = [&]() {
        if (class_queue.empty()) {
            for (int k = 1; k <= M; ++k) class_queue.push_back(k);
            shuffle_in_place(class_queue, rng);
        }
        int k = class_queue.back();
        class_queue.pop_back();
        return k;
    };

    std::vector<SkeletonSequence> out;
    out.reserve(cfg.num_sequences);
    for (int s = 0; s < cfg.num_sequences; ++s) {
        std::vector<Segment> segments;
        for (int a = 0; a < cfg.actions_per_sequence; ++a) {
            segments.push_back({Segment::Kind::Gap,
                                draw_len(rng, cfg.mean_gap_len, cfg.gap_len_jitter, 2), 0});
            segments.push_back({Segment::Kind::Action,
                                draw_len(rng, cfg.mean_action_len, cfg.action_len_jitter, 4),
                                next_class()});
        }
        segments.push_back({Segment::Kind::Gap,
                            draw_len(rng, cfg.mean_gap_len, cfg.gap_len_jitter, 2), 0});

        int total = 0;
        for (const auto& seg : segments) total += seg.len;

        // Per-frame, per-joint displacement field on top of the base pose.
        std::vector<std::vector<std::array<double, 3>>> disp(
            total, std::vector<std::array<double, 3>>(J, {0.0, 0.0, 0.0}));

        SkeletonSequence seq;
        seq.num_classes = M;
        seq.fps = cfg.fps;
        seq.name = "synth-" + std::to_string(s);

        int t0 = 0;
        for (size_t si = 0; si < segments.size(); ++si) {
            const Segment& seg = segments[si];
            if (seg.kind == Segment::Kind::Action) {
                seq.annotations.push_back({seg.class_id, t0, t0 + seg.len});
                for (int a = 0; a < seg.len; ++a) {
                    const double u = static_cast<double>(a) / seg.len;
                    for (int j = 1; j < J; ++j) {
                        if (!in_limb_subset(j, seg.class_id, M)) continue;
                        auto ro = ready_offset(seg.class_id, j);
                        auto ad = action_displacement(seg.class_id, j, u);
                        for (int c = 0; c < 3; ++c) disp[t0 + a][j][c] = ro[c] + ad[c];
                    }
                }
            } else {
                const int prev_class = si > 0 ? segments[si - 1].class_id : 0;
                const int next_cls =
                    si + 1 < segments.size() ? segments[si + 1].class_id : 0;
                const int release_len =
                    prev_class ? std::min(cfg.windup_len, seg.len / 2) : 0;
                const int approach_len =
                    next_cls ? std::min(cfg.windup_len, seg.len - release_len) : 0;
                for (int q = 0; q < seg.len; ++q) {
                    if (prev_class && q < release_len) {
                        // Ease the end-of-action pose back to base.
                        const double w = 1.0 - static_cast<double>(q + 1) / release_len;
                        for (int j = 1; j < J; ++j) {
                            if (!in_limb_subset(j, prev_class, M)) continue;
                            auto ro = ready_offset(prev_class, j);
                            auto ad = action_displacement(prev_class, j, 1.0);
                            for (int c = 0; c < 3; ++c) disp[t0 + q][j][c] = w * (ro[c] + ad[c]);
                        }
                    } else if (next_cls && q >= seg.len - approach_len) {
                        // Ramp toward the next action's ready stance.
                        const double w =
                            static_cast<double>(q - (seg.len - approach_len) + 1) / approach_len;
                        for (int j = 1; j < J; ++j) {
                            if (!in_limb_subset(j, next_cls, M)) continue;
                            auto ro = ready_offset(next_cls, j);
                            for (int c = 0; c < 3; ++c) disp[t0 + q][j][c] = w * ro[c];
                        }
                    }
                }
            }
            t0 += seg.len;
        }

        std::array<double, 3> drift = {0.0, 0.0, 0.0};
        seq.frames.reserve(total);
        for (int t = 0; t < total; ++t) {
            for (int c = 0; c < 3; ++c) drift[c] += rng.normal(0.0, drift_step);
            SkeletonFrame f;
            f.t = t;
            f.joints.resize(J);
            for (int j = 0; j < J; ++j) {
                auto base = base_pose(j);
                for (int c = 0; c < 3; ++c)
                    f.joints[j][c] =
                        base[c] + disp[t][j][c] + drift[c] + rng.normal(0.0, cfg.motion_noise);
            }
            seq.frames.push_back(std::move(f));
        }
        seq.validate();
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace actdet
