#pragma once

// Online frame-by-frame detection on top of the network outputs.
//
// Event rules (all causal):
//  - forecast_start fires when p_start crosses theta_start from below (the
//    frame before the stream counts as below), unless a forecast_start or a
//    start was emitted within the last peak_min_separation frames. Same for
//    forecast_end with theta_end.
//  - start fires one frame after a confirmed local maximum: at frame t+1 when
//    p[t-1] <= p[t] > p[t+1] and p[t] >= theta_start, anchored at t. Peaks
//    closer than peak_min_separation (anchor distance) to the previous start
//    are dropped. Same for end.
//  - Event class is the majority-vote-smoothed argmax label at the anchor,
//    using the frames available at emission time.
//
// finalize() assembles intervals: maximal runs of the smoothed argmax label
// (class != 0, length >= min_segment_len), with boundaries refined to the
// nearest start/end anchors within +-refine_window frames when present.
//
// The event logic is independent of the model so it can be driven by scripted
// confidence series in tests; Detector binds it to a Model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "actdet/errors.hpp"
#include "actdet/network.hpp"

namespace actdet {

struct DetectorConfig {
    double theta_start = 0.5;
    double theta_end = 0.5;
    int peak_min_separation = 10;  // 2*sigma at the default sigma
    int smoothing_window = 5;      // odd; 1 disables smoothing
    int min_segment_len = 3;
    int refine_window = 10;  // 2*sigma at the default sigma

    void validate() const {
        if (!(theta_start >= 0 && theta_start <= 1) || !(theta_end >= 0 && theta_end <= 1))
            throw ConfigError("detector: thresholds must be in [0,1]");
        if (peak_min_separation < 1) throw ConfigError("detector: peak_min_separation must be >= 1");
        if (smoothing_window < 1 || smoothing_window % 2 == 0)
            throw ConfigError("detector: smoothing_window must be odd and >= 1");
        if (min_segment_len < 1) throw ConfigError("detector: min_segment_len must be >= 1");
        if (refine_window < 0) throw ConfigError("detector: refine_window must be >= 0");
    }
};

struct DetectionEvent {
    enum class Kind { ForecastStart, ForecastEnd, Start, End };
    Kind kind;
    int class_id = 0;
    int frame = 0;         // emission frame
    int anchor_frame = 0;  // localized peak frame for start/end; == frame for forecasts
    double confidence = 0;
};

inline const char* event_kind_name(DetectionEvent::Kind k) {
    switch (k) {
        case DetectionEvent::Kind::ForecastStart: return "forecast_start";
        case DetectionEvent::Kind::ForecastEnd: return "forecast_end";
        case DetectionEvent::Kind::Start: return "start";
        case DetectionEvent::Kind::End: return "end";
    }
    return "?";
}

struct ActionDetection {
    int class_id = 0;
    int start = 0;  // [start, end)
    int end = 0;
};

class EventTracker {
  public:
    explicit EventTracker(const DetectorConfig& cfg) : cfg_(cfg) { cfg.validate(); reset(); }

    // Feed one frame's confidences and raw argmax label; returns the events
    // emitted at this frame.
    std::vector<DetectionEvent> step(double p_start, double p_end, int raw_label) {
        ++t_;
        labels_.push_back(raw_label);
        push_ring(ps_, p_start);
        push_ring(pe_, p_end);

        std::vector<DetectionEvent> out;
        // Rising-edge forecasts.
        if (crossed(ps_, cfg_.theta_start) && t_ - last_fs_ >= cfg_.peak_min_separation &&
            t_ - last_start_emit_ >= cfg_.peak_min_separation) {
            last_fs_ = t_;
            out.push_back({DetectionEvent::Kind::ForecastStart, smoothed_label(t_, t_), t_, t_,
                           p_start});
        }
        if (crossed(pe_, cfg_.theta_end) && t_ - last_fe_ >= cfg_.peak_min_separation &&
            t_ - last_end_emit_ >= cfg_.peak_min_separation) {
            last_fe_ = t_;
            out.push_back({DetectionEvent::Kind::ForecastEnd, smoothed_label(t_, t_), t_, t_,
                           p_end});
        }
        // Peak confirmation with one frame of lag: test the previous frame.
        if (t_ >= 1 && peak_at_prev(ps_, cfg_.theta_start) &&
            t_ - 1 - last_start_anchor_ >= cfg_.peak_min_separation) {
            last_start_anchor_ = t_ - 1;
            last_start_emit_ = t_;
            out.push_back({DetectionEvent::Kind::Start, smoothed_label(t_ - 1, t_), t_, t_ - 1,
                           ps_[1]});
        }
        if (t_ >= 1 && peak_at_prev(pe_, cfg_.theta_end) &&
            t_ - 1 - last_end_anchor_ >= cfg_.peak_min_separation) {
            last_end_anchor_ = t_ - 1;
            last_end_emit_ = t_;
            out.push_back({DetectionEvent::Kind::End, smoothed_label(t_ - 1, t_), t_, t_ - 1,
                           pe_[1]});
        }
        events_.insert(events_.end(), out.begin(), out.end());
        return out;
    }

    const std::vector<DetectionEvent>& events() const { return events_; }
    int frames_seen() const { return t_ + 1; }

    // Majority vote over the window centered at tau, truncated to [0, upto].
    // Ties prefer the raw label at tau, then the smallest class id.
    int smoothed_label(int tau, int upto) const {
        const int half = cfg_.smoothing_window / 2;
        const int lo = std::max(0, tau - half);
        const int hi = std::min(upto, tau + half);
        std::vector<int> seen;
        std::vector<int> count;
        for (int t = lo; t <= hi; ++t) {
            const int lab = labels_[t];
            auto it = std::find(seen.begin(), seen.end(), lab);
            if (it == seen.end()) {
                seen.push_back(lab);
                count.push_back(1);
            } else {
                ++count[it - seen.begin()];
            }
        }
        int best = labels_[tau];
        int best_count = -1;
        for (size_t i = 0; i < seen.size(); ++i) {
            if (count[i] > best_count ||
                (count[i] == best_count &&
                 (seen[i] == labels_[tau] || (best != labels_[tau] && seen[i] < best)))) {
                best = seen[i];
                best_count = count[i];
            }
        }
        return best;
    }

    // Segment assembly once the stream has ended.
    std::vector<ActionDetection> finalize() const {
        const int n = static_cast<int>(labels_.size());
        std::vector<ActionDetection> out;
        if (n == 0) return out;
        std::vector<int> sm(n);
        for (int t = 0; t < n; ++t) sm[t] = smoothed_label(t, n - 1);

        std::vector<int> start_anchors, end_anchors;
        for (const auto& e : events_) {
            if (e.kind == DetectionEvent::Kind::Start) start_anchors.push_back(e.anchor_frame);
            if (e.kind == DetectionEvent::Kind::End) end_anchors.push_back(e.anchor_frame);
        }

        int run_start = 0;
        for (int t = 1; t <= n; ++t) {
            if (t == n || sm[t] != sm[run_start]) {
                const int cls = sm[run_start];
                const int len = t - run_start;
                if (cls != 0 && len >= cfg_.min_segment_len) {
                    int a = run_start, b = t;
                    if (const int* p = nearest(start_anchors, run_start))
                        if (std::abs(*p - run_start) <= cfg_.refine_window) a = *p;
                    // End anchors mark the last in-action frame.
                    if (const int* p = nearest(end_anchors, t - 1))
                        if (std::abs(*p - (t - 1)) <= cfg_.refine_window) b = *p + 1;
                    a = std::max(0, a);
                    b = std::min(n, b);
                    if (b <= a) {  // refinement inverted the interval; keep the run
                        a = run_start;
                        b = t;
                    }
                    out.push_back({cls, a, b});
                }
                run_start = t;
            }
        }
        return out;
    }

    void reset() {
        t_ = -1;
        labels_.clear();
        events_.clear();
        ps_ = {0, 0, 0};
        pe_ = {0, 0, 0};
        const int far = std::numeric_limits<int>::min() / 2;
        last_fs_ = last_fe_ = last_start_emit_ = last_end_emit_ = far;
        last_start_anchor_ = last_end_anchor_ = far;
    }

  private:
    // ring[0] = p[t-2], ring[1] = p[t-1], ring[2] = p[t]; entries older than
    // the stream are never consulted (t_ guards every access).
    static void push_ring(std::array<double, 3>& ring, double v) {
        ring[0] = ring[1];
        ring[1] = ring[2];
        ring[2] = v;
    }

    bool crossed(const std::array<double, 3>& ring, double theta) const {
        if (t_ == 0) return ring[2] >= theta;  // stream start counts as below
        return ring[1] < theta && ring[2] >= theta;
    }

    bool peak_at_prev(const std::array<double, 3>& ring, double theta) const {
        if (ring[1] < theta) return false;
        const bool left_ok = (t_ - 1 == 0) ? true : ring[0] <= ring[1];
        return left_ok && ring[1] > ring[2];
    }

    static const int* nearest(const std::vector<int>& anchors, int target) {
        const int* best = nullptr;
        for (const int& a : anchors)
            if (!best || std::abs(a - target) < std::abs(*best - target)) best = &a;
        return best;  // caller applies the refine window
    }

    DetectorConfig cfg_;
    int t_ = -1;
    std::vector<int> labels_;
    std::vector<DetectionEvent> events_;
    std::array<double, 3> ps_{}, pe_{};
    int last_fs_ = 0, last_fe_ = 0, last_start_emit_ = 0, last_end_emit_ = 0;
    int last_start_anchor_ = 0, last_end_anchor_ = 0;
};

// Streaming detector over a model. Frames must arrive normalized and
// flattened; outputs are bitwise identical to a whole-sequence infer pass.
class Detector {
  public:
    Detector(const Model& model, const DetectorConfig& cfg)
        : model_(&model), tracker_(cfg), state_(RecurrentState::zeros(model.cfg)) {}

    std::pair<FrameOutput, std::vector<DetectionEvent>> step(const Vec& frame) {
        FrameOutput out = forward_step(*model_, frame, state_, RunMode::Infer, nullptr, nullptr);
        for (double v : out.y)
            if (!std::isfinite(v)) throw NumericError("detector: non-finite class posterior");
        if (!std::isfinite(out.p_start) || !std::isfinite(out.p_end))
            throw NumericError("detector: non-finite confidence");
        const int argmax =
            static_cast<int>(std::max_element(out.y.begin(), out.y.end()) - out.y.begin());
        auto events = tracker_.step(out.p_start, out.p_end, argmax);
        return {std::move(out), std::move(events)};
    }

    std::vector<ActionDetection> finalize() const { return tracker_.finalize(); }
    const std::vector<DetectionEvent>& events() const { return tracker_.events(); }
    const EventTracker& tracker() const { return tracker_; }

    void reset() {
        state_ = RecurrentState::zeros(model_->cfg);
        tracker_.reset();
    }

  private:
    const Model* model_;
    EventTracker tracker_;
    RecurrentState state_;
};

}  // namespace actdet
