#pragma once

// Detection and forecast metrics.
//
//  - overlap_ratio: intersection-over-union of half-open frame intervals.
//  - match_and_f1: a detection is correct iff it has the right class and IoU
//    above the threshold against a still-unmatched ground-truth instance;
//    matching is greedy by descending IoU, one match per instance. Per-class
//    precision/recall/F1 plus the cross-class average.
//  - sl/el scores: per matched pair exp(-|boundary error| / gt length);
//    false positives and false negatives contribute 0; averaged over
//    (#groundtruth + #false positives).
//  - action_based_f1: correct iff class matches and |predicted start - true
//    start| <= tolerance, greedy by smallest start distance.
//  - forecast_pr: frame-level precision/recall sweep; a frame predicts a
//    start-forecast at threshold theta iff p_start >= theta, and it is a true
//    positive iff its predicted class g has a ground-truth action of class g
//    with t in [start - T, start]. Recall's denominator counts T+1
//    forecastable frames per instance. End forecasts are symmetric over
//    [end - T, end].
//  - forecast_confusion: rows are the ground-truth class of the forecast
//    window an emitted start-forecast falls in (row 0 when it falls in none),
//    columns the predicted class.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actdet/dataset.hpp"
#include "actdet/detector.hpp"
#include "actdet/errors.hpp"

namespace actdet {

struct EvalConfig {
    double alpha_threshold = 0.6;
    int action_f1_tolerance = 4;
    int horizon = 10;
    std::vector<double> threshold_grid;  // defaults to 0..1 step 0.05

    void validate() const {
        if (!(alpha_threshold > 0 && alpha_threshold <= 1))
            throw ConfigError("eval: alpha_threshold must be in (0,1]");
        if (action_f1_tolerance < 0) throw ConfigError("eval: tolerance must be >= 0");
        if (horizon < 0) throw ConfigError("eval: horizon must be >= 0");
    }

    std::vector<double> grid() const {
        if (!threshold_grid.empty()) return threshold_grid;
        std::vector<double> g;
        for (int i = 0; i <= 20; ++i) g.push_back(i * 0.05);
        return g;
    }
};

inline double overlap_ratio(int s1, int e1, int s2, int e2) {
    if (e1 <= s1 || e2 <= s2) throw ConfigError("overlap_ratio: intervals must be non-empty");
    const int inter = std::max(0, std::min(e1, e2) - std::max(s1, s2));
    const int uni = (e1 - s1) + (e2 - s2) - inter;
    return static_cast<double>(inter) / uni;
}

inline double overlap_ratio(const ActionDetection& d, const ActionAnnotation& g) {
    return overlap_ratio(d.start, d.end, g.start, g.end);
}

// One test sequence's worth of material for the metrics.
struct SequenceEval {
    std::vector<ActionDetection> detections;
    std::vector<ActionAnnotation> groundtruth;
    std::vector<DetectionEvent> events;   // for the forecast confusion matrix
    std::vector<double> p_start, p_end;   // per-frame confidence series
    std::vector<int> pred_class;          // per-frame argmax
};

struct MatchPair {
    int seq = 0, det = 0, gt = 0;
    double alpha = 0;
};

// Greedy matching by descending IoU; class must agree and IoU must exceed the
// threshold; each detection and each ground-truth instance matches at most once.
inline std::vector<MatchPair> match_detections(const std::vector<SequenceEval>& seqs,
                                               double alpha_threshold) {
    std::vector<MatchPair> candidates;
    for (size_t s = 0; s < seqs.size(); ++s) {
        const auto& dets = seqs[s].detections;
        const auto& gts = seqs[s].groundtruth;
        for (size_t d = 0; d < dets.size(); ++d)
            for (size_t g = 0; g < gts.size(); ++g) {
                if (dets[d].class_id != gts[g].class_id) continue;
                const double a = overlap_ratio(dets[d], gts[g]);
                if (a > alpha_threshold)
                    candidates.push_back({static_cast<int>(s), static_cast<int>(d),
                                          static_cast<int>(g), a});
            }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const MatchPair& x, const MatchPair& y) { return x.alpha > y.alpha; });
    std::vector<MatchPair> matched;
    std::map<std::pair<int, int>, bool> det_used, gt_used;
    for (const auto& c : candidates) {
        if (det_used[{c.seq, c.det}] || gt_used[{c.seq, c.gt}]) continue;
        det_used[{c.seq, c.det}] = gt_used[{c.seq, c.gt}] = true;
        matched.push_back(c);
    }
    return matched;
}

struct ClassScore {
    int tp = 0, detections = 0, groundtruth = 0;
    double precision = 0, recall = 0, f1 = 0;
};

inline double f1_of(double precision, double recall) {
    return (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

inline std::map<int, ClassScore> match_and_f1(const std::vector<SequenceEval>& seqs,
                                              double alpha_threshold) {
    std::map<int, ClassScore> per_class;
    for (const auto& se : seqs) {
        for (const auto& d : se.detections) per_class[d.class_id].detections++;
        for (const auto& g : se.groundtruth) per_class[g.class_id].groundtruth++;
    }
    for (const auto& m : match_detections(seqs, alpha_threshold))
        per_class[seqs[m.seq].detections[m.det].class_id].tp++;
    for (auto& [cls, sc] : per_class) {
        sc.precision = sc.detections > 0 ? static_cast<double>(sc.tp) / sc.detections : 0.0;
        sc.recall = sc.groundtruth > 0 ? static_cast<double>(sc.tp) / sc.groundtruth : 0.0;
        sc.f1 = f1_of(sc.precision, sc.recall);
    }
    return per_class;
}

inline double average_f1(const std::map<int, ClassScore>& per_class) {
    if (per_class.empty()) return 0.0;
    double sum = 0;
    for (const auto& [cls, sc] : per_class) sum += sc.f1;
    return sum / per_class.size();
}

// Start/End localization scores over the same IoU matching as F1.
inline std::pair<double, double> sl_el_scores(const std::vector<SequenceEval>& seqs,
                                              double alpha_threshold) {
    int total_gt = 0, total_det = 0;
    for (const auto& se : seqs) {
        total_gt += static_cast<int>(se.groundtruth.size());
        total_det += static_cast<int>(se.detections.size());
    }
    const auto matches = match_detections(seqs, alpha_threshold);
    const int fp = total_det - static_cast<int>(matches.size());
    const int denom = total_gt + fp;
    if (denom == 0) return {0.0, 0.0};
    double sl = 0, el = 0;
    for (const auto& m : matches) {
        const auto& d = seqs[m.seq].detections[m.det];
        const auto& g = seqs[m.seq].groundtruth[m.gt];
        const double len = g.end - g.start;
        sl += std::exp(-std::abs(d.start - g.start) / len);
        el += std::exp(-std::abs(d.end - g.end) / len);
    }
    return {sl / denom, el / denom};
}

// G3D-style score: only the start boundary matters, within `tolerance` frames.
inline double action_based_f1(const std::vector<SequenceEval>& seqs, int tolerance) {
    struct Cand {
        int seq, det, gt, dist;
    };
    std::vector<Cand> candidates;
    int total_det = 0, total_gt = 0;
    for (size_t s = 0; s < seqs.size(); ++s) {
        const auto& dets = seqs[s].detections;
        const auto& gts = seqs[s].groundtruth;
        total_det += static_cast<int>(dets.size());
        total_gt += static_cast<int>(gts.size());
        for (size_t d = 0; d < dets.size(); ++d)
            for (size_t g = 0; g < gts.size(); ++g) {
                if (dets[d].class_id != gts[g].class_id) continue;
                const int dist = std::abs(dets[d].start - gts[g].start);
                if (dist <= tolerance)
                    candidates.push_back(
                        {static_cast<int>(s), static_cast<int>(d), static_cast<int>(g), dist});
            }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Cand& x, const Cand& y) { return x.dist < y.dist; });
    std::map<std::pair<int, int>, bool> det_used, gt_used;
    int tp = 0;
    for (const auto& c : candidates) {
        if (det_used[{c.seq, c.det}] || gt_used[{c.seq, c.gt}]) continue;
        det_used[{c.seq, c.det}] = gt_used[{c.seq, c.gt}] = true;
        ++tp;
    }
    const double precision = total_det > 0 ? static_cast<double>(tp) / total_det : 0.0;
    const double recall = total_gt > 0 ? static_cast<double>(tp) / total_gt : 0.0;
    return f1_of(precision, recall);
}

struct PrPoint {
    double theta = 0, precision = 0, recall = 0;
};

namespace eval_detail {

inline bool in_forecast_window(int t, int cls, const std::vector<ActionAnnotation>& gts,
                               int horizon, Boundary kind) {
    for (const auto& g : gts) {
        if (g.class_id != cls) continue;
        const int anchor = kind == Boundary::Start ? g.start : g.end;
        if (t >= anchor - horizon && t <= anchor) return true;
    }
    return false;
}

}  // namespace eval_detail

// Frame-level PR sweep; re-thresholds the stored confidence series, which is
// equivalent to rerunning the detector since thresholding is the only
// theta-dependent step of the forecast decision.
inline std::vector<PrPoint> forecast_pr(const std::vector<SequenceEval>& seqs, Boundary kind,
                                        int horizon, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("forecast_pr: empty threshold grid");
    long forecastable = 0;
    for (const auto& se : seqs) forecastable += (horizon + 1) * se.groundtruth.size();

    std::vector<PrPoint> out;
    for (double theta : grid) {
        long predicted = 0, tp = 0;
        for (const auto& se : seqs) {
            const auto& series = kind == Boundary::Start ? se.p_start : se.p_end;
            for (size_t t = 0; t < series.size(); ++t) {
                if (series[t] < theta) continue;
                ++predicted;
                if (eval_detail::in_forecast_window(static_cast<int>(t), se.pred_class[t],
                                                    se.groundtruth, horizon, kind))
                    ++tp;
            }
        }
        PrPoint p;
        p.theta = theta;
        p.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        p.recall = forecastable > 0 ? static_cast<double>(tp) / forecastable : 0.0;
        out.push_back(p);
    }
    return out;
}

// (M+1)x(M+1) counts over emitted start-forecast events. Row = ground-truth
// class of the window the event falls in (0 if none; nearest upcoming start
// when windows overlap), column = the event's predicted class.
inline std::vector<std::vector<int>> forecast_confusion(const std::vector<SequenceEval>& seqs,
                                                        int num_classes, int horizon) {
    std::vector<std::vector<int>> cm(num_classes + 1, std::vector<int>(num_classes + 1, 0));
    for (const auto& se : seqs) {
        for (const auto& e : se.events) {
            if (e.kind != DetectionEvent::Kind::ForecastStart) continue;
            int row = 0;
            int best_start = std::numeric_limits<int>::max();
            for (const auto& g : se.groundtruth) {
                if (e.frame >= g.start - horizon && e.frame <= g.start && g.start < best_start) {
                    best_start = g.start;
                    row = g.class_id;
                }
            }
            const int col = std::min(std::max(e.class_id, 0), num_classes);
            cm[row][col]++;
        }
    }
    return cm;
}

struct EvalReport {
    std::map<int, ClassScore> per_class;
    double avg_f1 = 0;
    double sl = 0, el = 0;
    double action_f1 = 0;
    std::vector<PrPoint> pr_start, pr_end;
    std::vector<std::vector<int>> confusion;
    int num_classes = 0;
    int num_sequences = 0;
};

inline EvalReport evaluate(const std::vector<SequenceEval>& seqs, int num_classes,
                           const EvalConfig& cfg) {
    cfg.validate();
    EvalReport r;
    r.num_classes = num_classes;
    r.num_sequences = static_cast<int>(seqs.size());
    r.per_class = match_and_f1(seqs, cfg.alpha_threshold);
    r.avg_f1 = average_f1(r.per_class);
    std::tie(r.sl, r.el) = sl_el_scores(seqs, cfg.alpha_threshold);
    r.action_f1 = action_based_f1(seqs, cfg.action_f1_tolerance);
    const auto grid = cfg.grid();
    r.pr_start = forecast_pr(seqs, Boundary::Start, cfg.horizon, grid);
    r.pr_end = forecast_pr(seqs, Boundary::End, cfg.horizon, grid);
    r.confusion = forecast_confusion(seqs, num_classes, cfg.horizon);
    return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["num_classes"] = r.num_classes;
    j["num_sequences"] = r.num_sequences;
    nlohmann::json pc = nlohmann::json::object();
    for (const auto& [cls, sc] : r.per_class)
        pc[std::to_string(cls)] = {{"tp", sc.tp},
                                   {"detections", sc.detections},
                                   {"groundtruth", sc.groundtruth},
                                   {"precision", sc.precision},
                                   {"recall", sc.recall},
                                   {"f1", sc.f1}};
    j["per_class"] = std::move(pc);
    j["avg_f1"] = r.avg_f1;
    j["sl_score"] = r.sl;
    j["el_score"] = r.el;
    j["action_f1"] = r.action_f1;
    auto pr_json = [](const std::vector<PrPoint>& pts) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& p : pts)
            a.push_back({{"theta", p.theta}, {"precision", p.precision}, {"recall", p.recall}});
        return a;
    };
    j["pr_start"] = pr_json(r.pr_start);
    j["pr_end"] = pr_json(r.pr_end);
    j["forecast_confusion"] = r.confusion;
    return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.num_classes = j.at("num_classes").get<int>();
    r.num_sequences = j.at("num_sequences").get<int>();
    for (const auto& [key, v] : j.at("per_class").items()) {
        ClassScore sc;
        sc.tp = v.at("tp").get<int>();
        sc.detections = v.at("detections").get<int>();
        sc.groundtruth = v.at("groundtruth").get<int>();
        sc.precision = v.at("precision").get<double>();
        sc.recall = v.at("recall").get<double>();
        sc.f1 = v.at("f1").get<double>();
        r.per_class[std::stoi(key)] = sc;
    }
    r.avg_f1 = j.at("avg_f1").get<double>();
    r.sl = j.at("sl_score").get<double>();
    r.el = j.at("el_score").get<double>();
    r.action_f1 = j.at("action_f1").get<double>();
    auto pr_parse = [](const nlohmann::json& a) {
        std::vector<PrPoint> pts;
        for (const auto& p : a)
            pts.push_back({p.at("theta").get<double>(), p.at("precision").get<double>(),
                           p.at("recall").get<double>()});
        return pts;
    };
    r.pr_start = pr_parse(j.at("pr_start"));
    r.pr_end = pr_parse(j.at("pr_end"));
    r.confusion = j.at("forecast_confusion").get<std::vector<std::vector<int>>>();
    return r;
}

}  // namespace actdet
