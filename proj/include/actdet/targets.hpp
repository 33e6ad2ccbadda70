#pragma once

// Per-frame training targets derived from annotations:
//  - class labels, shifted so the `horizon` frames before each action start
//    already carry that action's class (blank frames only; an action's own
//    frames are never relabeled, and on contested blank frames the earlier
//    action wins);
//  - start/end confidence curves exp(-(t - a)^2 / (2 sigma^2)) against the
//    nearest anchor along time, value exactly 1 at the anchor. Start anchors
//    are the annotated start frames; end anchors are the last in-action frames
//    (end - 1 under half-open intervals). Sequences without annotations get
//    identically-zero confidence. Distance ties go to the earlier action.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "actdet/dataset.hpp"
#include "actdet/errors.hpp"

namespace actdet {

struct TargetConfig {
    double sigma = 5.0;
    int horizon = 10;  // forecast look-ahead T, frames

    void validate() const {
        if (!(sigma > 0)) throw ConfigError("targets: sigma must be > 0");
        if (horizon < 0) throw ConfigError("targets: horizon must be >= 0");
    }
};

struct FrameTargets {
    int label = 0;       // forecast-shifted class, 0 = blank
    Vec z;               // one-hot over M+1 classes
    double c_start = 0;  // in [0,1]
    double c_end = 0;    // in [0,1]
};

inline std::vector<int> class_labels(const SkeletonSequence& seq, int horizon) {
    if (horizon < 0) throw ConfigError("class_labels: horizon must be >= 0");
    std::vector<int> labels(seq.length(), 0);
    for (const auto& a : seq.annotations)
        for (int t = a.start; t < a.end; ++t) labels[t] = a.class_id;
    // Earlier actions are processed first, so they claim contested blanks.
    for (const auto& a : seq.annotations)
        for (int t = std::max(0, a.start - horizon); t < a.start; ++t)
            if (labels[t] == 0) labels[t] = a.class_id;
    return labels;
}

enum class Boundary { Start, End };

inline std::vector<double> confidence_curve(const SkeletonSequence& seq, Boundary kind,
                                            double sigma) {
    if (!(sigma > 0)) throw ConfigError("confidence_curve: sigma must be > 0");
    const int n = seq.length();
    std::vector<double> c(n, 0.0);
    if (seq.annotations.empty()) return c;

    std::vector<int> anchors;
    anchors.reserve(seq.annotations.size());
    for (const auto& a : seq.annotations)
        anchors.push_back(kind == Boundary::Start ? a.start : a.end - 1);

    for (int t = 0; t < n; ++t) {
        int best = anchors[0];
        for (int a : anchors)
            if (std::abs(t - a) < std::abs(t - best)) best = a;  // tie keeps the earlier anchor
        const double d = static_cast<double>(t - best);
        c[t] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    return c;
}

inline std::vector<FrameTargets> build_targets(const SkeletonSequence& seq,
                                               const TargetConfig& cfg) {
    cfg.validate();
    const auto labels = class_labels(seq, cfg.horizon);
    const auto cs = confidence_curve(seq, Boundary::Start, cfg.sigma);
    const auto ce = confidence_curve(seq, Boundary::End, cfg.sigma);
    std::vector<FrameTargets> out(seq.length());
    for (int t = 0; t < seq.length(); ++t) {
        out[t].label = labels[t];
        out[t].z.assign(seq.num_classes + 1, 0.0);
        out[t].z[labels[t]] = 1.0;
        out[t].c_start = cs[t];
        out[t].c_end = ce[t];
    }
    return out;
}

}  // namespace actdet
