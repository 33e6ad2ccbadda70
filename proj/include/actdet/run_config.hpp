#pragma once

// One JSON document drives every command, so an experiment is reproducible
// from a single committed artifact. Parsing is strict: unknown keys are fatal
// at every level. Missing keys fall back to the defaults visible in the
// struct definitions; `configs/example.json` in the repo shows them all.
//
// The top-level "seed" seeds everything unless a section provides its own
// ("synth.seed", "train.seed").

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actdet/detector.hpp"
#include "actdet/errors.hpp"
#include "actdet/evaluation.hpp"
#include "actdet/network.hpp"
#include "actdet/synth.hpp"
#include "actdet/targets.hpp"
#include "actdet/training.hpp"

namespace actdet {

struct ModelSettings {
    std::array<int, 6> layer_sizes = {100, 100, 110, 110, 100, 100};
    int fc2_multiplier = 10;
    bool use_soft_selector = true;
    double dropout_p = 0.25;
    RegOutput regression_output = RegOutput::Sigmoid;

    // input_dim and num_classes come from the data at train time.
    ModelConfig instantiate(int input_dim, int num_classes) const {
        ModelConfig cfg;
        cfg.input_dim = input_dim;
        cfg.num_classes = num_classes;
        cfg.layer_sizes = layer_sizes;
        cfg.fc2_multiplier = fc2_multiplier;
        cfg.use_soft_selector = use_soft_selector;
        cfg.dropout_p = dropout_p;
        cfg.regression_output = regression_output;
        cfg.validate();
        return cfg;
    }
};

struct RunPaths {
    std::string data_dir = "data";
    std::string run_dir = "runs/default";
};

struct RunConfig {
    uint64_t seed = 1;
    double train_fraction = 0.6;
    SynthConfig synth;
    TargetConfig targets;
    ModelSettings model;
    TrainConfig train;
    DetectorConfig detector;
    EvalConfig eval;
    RunPaths paths;
};

namespace config_detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: \"" + where + "\" must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key \"" + where + "." + it.key() + "\"");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace config_detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    using config_detail::read;
    using config_detail::reject_unknown;
    reject_unknown(j, {"seed", "train_fraction", "synth", "targets", "model", "train", "detector",
                       "eval", "paths"},
                   "<root>");
    RunConfig cfg;
    read(j, "seed", cfg.seed);
    read(j, "train_fraction", cfg.train_fraction);
    if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
        throw ConfigError("config: train_fraction must be in (0,1)");

    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        reject_unknown(s,
                       {"num_classes", "joints", "num_sequences", "actions_per_sequence",
                        "mean_action_len", "action_len_jitter", "mean_gap_len", "gap_len_jitter",
                        "motion_noise", "windup_len", "fps", "seed"},
                       "synth");
        read(s, "num_classes", cfg.synth.num_classes);
        read(s, "joints", cfg.synth.joints);
        read(s, "num_sequences", cfg.synth.num_sequences);
        read(s, "actions_per_sequence", cfg.synth.actions_per_sequence);
        read(s, "mean_action_len", cfg.synth.mean_action_len);
        read(s, "action_len_jitter", cfg.synth.action_len_jitter);
        read(s, "mean_gap_len", cfg.synth.mean_gap_len);
        read(s, "gap_len_jitter", cfg.synth.gap_len_jitter);
        read(s, "motion_noise", cfg.synth.motion_noise);
        read(s, "windup_len", cfg.synth.windup_len);
        read(s, "fps", cfg.synth.fps);
        cfg.synth.seed = cfg.seed;
        read(s, "seed", cfg.synth.seed);
    } else {
        cfg.synth.seed = cfg.seed;
    }
    cfg.synth.validate();

    if (j.contains("targets")) {
        const auto& t = j.at("targets");
        reject_unknown(t, {"sigma", "horizon"}, "targets");
        read(t, "sigma", cfg.targets.sigma);
        read(t, "horizon", cfg.targets.horizon);
    }
    cfg.targets.validate();

    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m,
                       {"layer_sizes", "fc2_multiplier", "use_soft_selector", "dropout_p",
                        "regression_output"},
                       "model");
        if (m.contains("layer_sizes")) {
            auto sizes = m.at("layer_sizes").get<std::vector<int>>();
            if (sizes.size() != 6) throw ConfigError("config: model.layer_sizes needs 6 entries");
            std::copy(sizes.begin(), sizes.end(), cfg.model.layer_sizes.begin());
        }
        read(m, "fc2_multiplier", cfg.model.fc2_multiplier);
        read(m, "use_soft_selector", cfg.model.use_soft_selector);
        read(m, "dropout_p", cfg.model.dropout_p);
        if (m.contains("regression_output")) {
            const std::string v = m.at("regression_output").get<std::string>();
            if (v == "sigmoid")
                cfg.model.regression_output = RegOutput::Sigmoid;
            else if (v == "linear")
                cfg.model.regression_output = RegOutput::Linear;
            else
                throw ConfigError("config: model.regression_output must be sigmoid|linear");
        }
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        reject_unknown(t,
                       {"lr", "momentum", "epochs_stage1", "epochs_stage2", "lambda_max",
                        "dropout_p", "max_bptt_len", "grad_clip", "seed", "checkpoint_every"},
                       "train");
        read(t, "lr", cfg.train.lr);
        read(t, "momentum", cfg.train.momentum);
        read(t, "epochs_stage1", cfg.train.epochs_stage1);
        read(t, "epochs_stage2", cfg.train.epochs_stage2);
        read(t, "lambda_max", cfg.train.lambda_max);
        cfg.train.dropout_p = cfg.model.dropout_p;
        read(t, "dropout_p", cfg.train.dropout_p);
        read(t, "max_bptt_len", cfg.train.max_bptt_len);
        read(t, "grad_clip", cfg.train.grad_clip);
        cfg.train.seed = cfg.seed;
        read(t, "seed", cfg.train.seed);
        read(t, "checkpoint_every", cfg.train.checkpoint_every);
    } else {
        cfg.train.dropout_p = cfg.model.dropout_p;
        cfg.train.seed = cfg.seed;
    }
    cfg.train.validate();

    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        reject_unknown(d,
                       {"theta_start", "theta_end", "peak_min_separation", "smoothing_window",
                        "min_segment_len", "refine_window"},
                       "detector");
        read(d, "theta_start", cfg.detector.theta_start);
        read(d, "theta_end", cfg.detector.theta_end);
        read(d, "peak_min_separation", cfg.detector.peak_min_separation);
        read(d, "smoothing_window", cfg.detector.smoothing_window);
        read(d, "min_segment_len", cfg.detector.min_segment_len);
        read(d, "refine_window", cfg.detector.refine_window);
    }
    cfg.detector.validate();

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        reject_unknown(e, {"alpha_threshold", "action_f1_tolerance", "horizon", "threshold_grid"},
                       "eval");
        read(e, "alpha_threshold", cfg.eval.alpha_threshold);
        read(e, "action_f1_tolerance", cfg.eval.action_f1_tolerance);
        cfg.eval.horizon = cfg.targets.horizon;
        read(e, "horizon", cfg.eval.horizon);
        read(e, "threshold_grid", cfg.eval.threshold_grid);
    } else {
        cfg.eval.horizon = cfg.targets.horizon;
    }
    cfg.eval.validate();

    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        reject_unknown(p, {"data_dir", "run_dir"}, "paths");
        read(p, "data_dir", cfg.paths.data_dir);
        read(p, "run_dir", cfg.paths.run_dir);
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace actdet
