#pragma once

// Skeleton stream data model: frames of J 3D joints plus ground-truth action
// annotations over half-open frame intervals [start, end). Class 0 is the
// blank/background class; annotations use classes 1..M only.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actdet/errors.hpp"
#include "actdet/numerics.hpp"

namespace actdet {

using json = nlohmann::json;

struct SkeletonFrame {
    int t = 0;
    std::vector<std::array<double, 3>> joints;
};

struct ActionAnnotation {
    int class_id = 0;  // in [1..M]
    int start = 0;     // interval is [start, end)
    int end = 0;
};

struct SkeletonSequence {
    std::vector<SkeletonFrame> frames;
    std::vector<ActionAnnotation> annotations;  // disjoint, sorted by start
    int num_classes = 0;                        // M; valid action classes are 1..M
    double fps = 0.0;                           // metadata only
    std::string name;                           // optional identifier for reports

    int length() const { return static_cast<int>(frames.size()); }
    int joint_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].joints.size()); }

    void validate() const {
        if (num_classes < 1) throw DataError("sequence '" + name + "': num_classes must be >= 1");
        const int j = joint_count();
        if (!frames.empty() && j < 1) throw DataError("sequence '" + name + "': frames need >= 1 joint");
        for (size_t i = 0; i < frames.size(); ++i) {
            const auto& f = frames[i];
            if (f.t != static_cast<int>(i))
                throw DataError("sequence '" + name + "': frame index " + std::to_string(f.t) +
                                " at position " + std::to_string(i) + " (must be contiguous from 0)");
            if (static_cast<int>(f.joints.size()) != j)
                throw DataError("sequence '" + name + "': frame " + std::to_string(f.t) + " has " +
                                std::to_string(f.joints.size()) + " joints, expected " + std::to_string(j));
            for (const auto& p : f.joints)
                for (double c : p)
                    if (!std::isfinite(c))
                        throw DataError("sequence '" + name + "': non-finite coordinate at frame " +
                                        std::to_string(f.t));
        }
        const int n = length();
        int prev_end = 0;
        for (size_t i = 0; i < annotations.size(); ++i) {
            const auto& a = annotations[i];
            std::string which = "annotation " + std::to_string(i) + " (class " +
                                std::to_string(a.class_id) + ", [" + std::to_string(a.start) + "," +
                                std::to_string(a.end) + "))";
            if (a.class_id < 1 || a.class_id > num_classes)
                throw DataError("sequence '" + name + "': " + which + ": class outside [1.." +
                                std::to_string(num_classes) + "]");
            if (!(0 <= a.start && a.start < a.end && a.end <= n))
                throw DataError("sequence '" + name + "': " + which + ": bounds outside sequence of length " +
                                std::to_string(n));
            if (a.start < prev_end)
                throw DataError("sequence '" + name + "': " + which + ": overlaps or is out of order");
            prev_end = a.end;
        }
    }
};

// Per-frame position normalization: translate every joint of a frame by the
// same vector so that joint 0 (root) lands at the origin. Pure translation,
// idempotent, preserves inter-joint geometry.
inline SkeletonSequence normalize(const SkeletonSequence& seq) {
    SkeletonSequence out = seq;
    for (auto& f : out.frames) {
        if (f.joints.empty()) continue;
        const std::array<double, 3> root = f.joints[0];
        for (auto& p : f.joints)
            for (int c = 0; c < 3; ++c) p[c] -= root[c];
    }
    return out;
}

// Flatten a frame to the network input layout: joint-major x,y,z.
inline Vec flatten_frame(const SkeletonFrame& f) {
    Vec x;
    x.reserve(f.joints.size() * 3);
    for (const auto& p : f.joints) {
        x.push_back(p[0]);
        x.push_back(p[1]);
        x.push_back(p[2]);
    }
    return x;
}

inline std::vector<Vec> flatten_sequence(const SkeletonSequence& seq) {
    std::vector<Vec> xs;
    xs.reserve(seq.frames.size());
    for (const auto& f : seq.frames) xs.push_back(flatten_frame(f));
    return xs;
}

// --- File formats ---
// Frames file: JSON Lines, one object per line {"t": <int>, "joints": [[x,y,z], ...]},
// frames in order of t. Annotations file: one JSON document
// {"num_classes": M, "fps": <number>, "actions": [{"class": k, "start": s, "end": e}, ...]}.
// Floats go through nlohmann's shortest round-trip formatting, so save->load is bit exact.

inline void save_sequence(const SkeletonSequence& seq, const std::string& frames_path,
                          const std::string& annotations_path) {
    std::ofstream ff(frames_path);
    if (!ff) throw DataError("cannot open for writing: " + frames_path);
    for (const auto& f : seq.frames) {
        json row;
        row["t"] = f.t;
        json joints = json::array();
        for (const auto& p : f.joints) joints.push_back({p[0], p[1], p[2]});
        row["joints"] = std::move(joints);
        ff << row.dump() << "\n";
    }
    if (!ff) throw DataError("write failed: " + frames_path);

    json doc;
    doc["num_classes"] = seq.num_classes;
    doc["fps"] = seq.fps;
    json acts = json::array();
    for (const auto& a : seq.annotations)
        acts.push_back({{"class", a.class_id}, {"start", a.start}, {"end", a.end}});
    doc["actions"] = std::move(acts);
    std::ofstream af(annotations_path);
    if (!af) throw DataError("cannot open for writing: " + annotations_path);
    af << doc.dump(2) << "\n";
    if (!af) throw DataError("write failed: " + annotations_path);
}

inline std::vector<SkeletonFrame> load_frames_file(const std::string& frames_path) {
    std::ifstream ff(frames_path);
    if (!ff) throw DataError("cannot open: " + frames_path);
    std::vector<SkeletonFrame> frames;
    std::string line;
    int lineno = 0;
    while (std::getline(ff, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(frames_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        std::string ctx = frames_path + ":" + std::to_string(lineno);
        if (!row.is_object() || !row.contains("t") || !row.contains("joints"))
            throw DataError(ctx + ": frame object needs \"t\" and \"joints\"");
        SkeletonFrame f;
        if (!row["t"].is_number_integer()) throw DataError(ctx + ": \"t\" must be an integer");
        f.t = row["t"].get<int>();
        if (!row["joints"].is_array()) throw DataError(ctx + ": \"joints\" must be an array");
        for (const auto& jp : row["joints"]) {
            if (!jp.is_array() || jp.size() != 3)
                throw DataError(ctx + ": each joint must be [x,y,z]");
            std::array<double, 3> p;
            for (int c = 0; c < 3; ++c) {
                if (!jp[c].is_number()) throw DataError(ctx + ": joint coordinate must be a number");
                p[c] = jp[c].get<double>();
            }
            f.joints.push_back(p);
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

inline SkeletonSequence load_sequence(const std::string& frames_path,
                                      const std::string& annotations_path) {
    SkeletonSequence seq;
    seq.name = frames_path;
    seq.frames = load_frames_file(frames_path);

    std::ifstream af(annotations_path);
    if (!af) throw DataError("cannot open: " + annotations_path);
    json doc;
    try {
        doc = json::parse(af);
    } catch (const json::exception& e) {
        throw DataError(annotations_path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("num_classes") || !doc.contains("actions"))
        throw DataError(annotations_path + ": needs \"num_classes\" and \"actions\"");
    seq.num_classes = doc["num_classes"].get<int>();
    seq.fps = doc.value("fps", 0.0);
    for (const auto& a : doc["actions"]) {
        if (!a.is_object() || !a.contains("class") || !a.contains("start") || !a.contains("end"))
            throw DataError(annotations_path + ": each action needs \"class\", \"start\", \"end\"");
        seq.annotations.push_back(
            {a["class"].get<int>(), a["start"].get<int>(), a["end"].get<int>()});
    }
    seq.validate();  // reject, never repair
    return seq;
}

// Deterministic shuffle split. Train gets round(n * fraction), clamped so both
// sides are non-empty.
inline std::pair<std::vector<SkeletonSequence>, std::vector<SkeletonSequence>> split(
    const std::vector<SkeletonSequence>& sequences, double train_fraction, uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("split: train_fraction must be in (0,1)");
    const int n = static_cast<int>(sequences.size());
    if (n < 2) throw DataError("split: need at least 2 sequences, got " + std::to_string(n));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    shuffle_in_place(idx, rng);
    int n_train = static_cast<int>(std::lround(n * train_fraction));
    n_train = std::max(1, std::min(n - 1, n_train));
    std::pair<std::vector<SkeletonSequence>, std::vector<SkeletonSequence>> out;
    for (int i = 0; i < n; ++i)
        (i < n_train ? out.first : out.second).push_back(sequences[idx[i]]);
    return out;
}

}  // namespace actdet
