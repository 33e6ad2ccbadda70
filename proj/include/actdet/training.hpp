#pragma once

// Two-stage optimization. Stage 1 trains the classification path alone
// (lambda = 0); stage 2 fine-tunes the whole network on the joint objective
// with lambda ramped linearly per epoch up to lambda_max. SGD with momentum
// and global-norm gradient clipping; one update per BPTT chunk; sequence order
// reshuffled per epoch under the config seed, so a run is fully reproducible.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "actdet/dataset.hpp"
#include "actdet/errors.hpp"
#include "actdet/network.hpp"
#include "actdet/targets.hpp"

namespace actdet {

struct TrainConfig {
    double lr = 0.05;
    double momentum = 0.9;
    int epochs_stage1 = 40;
    int epochs_stage2 = 40;
    double lambda_max = 10.0;
    double dropout_p = 0.25;
    int max_bptt_len = 200;
    double grad_clip = 5.0;
    uint64_t seed = 1;
    int checkpoint_every = 0;  // 0 = stage ends only

    void validate() const {
        if (!(lr >= 0)) throw ConfigError("train: lr must be >= 0");
        if (!(momentum >= 0 && momentum < 1)) throw ConfigError("train: momentum must be in [0,1)");
        if (epochs_stage1 < 0 || epochs_stage2 < 0)
            throw ConfigError("train: epoch counts must be >= 0");
        if (lambda_max < 0) throw ConfigError("train: lambda_max must be >= 0");
        if (!(dropout_p >= 0 && dropout_p < 1)) throw ConfigError("train: dropout_p must be in [0,1)");
        if (max_bptt_len < 1) throw ConfigError("train: max_bptt_len must be >= 1");
        if (!(grad_clip > 0)) throw ConfigError("train: grad_clip must be > 0");
        if (checkpoint_every < 0) throw ConfigError("train: checkpoint_every must be >= 0");
    }
};

struct EpochStats {
    int epoch = 0;        // 1-based within its stage
    double ce_loss = 0;   // mean over frames
    double reg_loss = 0;  // mean over frames, unweighted by lambda
    double lambda = 0;
    double seconds = 0;
};

using TrainLog = std::vector<EpochStats>;

// -(1/N) sum_t sum_k z ln y, with ln clamped at ln(1e-12).
inline double loss_classification(const std::vector<FrameOutput>& outputs,
                                  const std::vector<FrameTargets>& targets) {
    if (outputs.size() != targets.size() || outputs.empty())
        throw DimensionError("loss_classification: " + std::to_string(outputs.size()) +
                             " outputs vs " + std::to_string(targets.size()) + " targets");
    double sum = 0.0;
    for (size_t t = 0; t < outputs.size(); ++t) {
        const Vec& y = outputs[t].y;
        const Vec& z = targets[t].z;
        if (y.size() != z.size())
            throw DimensionError("loss_classification: class-count mismatch at frame " +
                                 std::to_string(t));
        for (size_t k = 0; k < y.size(); ++k)
            if (z[k] != 0.0) sum -= z[k] * std::log(std::max(y[k], 1e-12));
    }
    return sum / outputs.size();
}

struct JointLoss {
    double total = 0, ce = 0, reg = 0;  // reg is reported unweighted
};

inline JointLoss loss_joint(const std::vector<FrameOutput>& outputs,
                            const std::vector<FrameTargets>& targets, double lambda) {
    if (lambda < 0) throw ConfigError("loss_joint: lambda must be >= 0");
    JointLoss l;
    l.ce = loss_classification(outputs, targets);
    double reg = 0.0;
    for (size_t t = 0; t < outputs.size(); ++t) {
        const double ds = outputs[t].p_start - targets[t].c_start;
        const double de = outputs[t].p_end - targets[t].c_end;
        reg += ds * ds + de * de;
    }
    l.reg = reg / outputs.size();
    l.total = l.ce + lambda * l.reg;
    return l;
}

// Clip by global L2 norm, then v <- momentum*v - lr*g, theta <- theta + v.
inline void sgd_step(Model& model, const Model& grads, Model& velocity, double lr, double momentum,
                     double grad_clip) {
    double norm_sq = 0.0;
    visit_params(grads, [&](const std::string&, const Matrix& p) {
        for (double v : p.data) norm_sq += v * v;
    });
    const double norm = std::sqrt(norm_sq);
    const double scale = (grad_clip > 0 && norm > grad_clip) ? grad_clip / norm : 1.0;

    std::vector<Matrix*> mp, vp;
    std::vector<const Matrix*> gp;
    visit_params(model, [&](const std::string&, Matrix& p) { mp.push_back(&p); });
    visit_params(velocity, [&](const std::string&, Matrix& p) { vp.push_back(&p); });
    visit_params(grads, [&](const std::string&, const Matrix& p) { gp.push_back(&p); });
    for (size_t b = 0; b < mp.size(); ++b) {
        if (!mp[b]->same_shape(*gp[b]) || !mp[b]->same_shape(*vp[b]))
            throw DimensionError("sgd_step: parameter/gradient/velocity shape mismatch");
        for (size_t i = 0; i < mp[b]->data.size(); ++i) {
            double& v = vp[b]->data[i];
            v = momentum * v - lr * scale * gp[b]->data[i];
            mp[b]->data[i] += v;
        }
    }
}

namespace train_detail {

struct PreparedSequence {
    std::vector<Vec> inputs;
    std::vector<FrameTargets> targets;
};

inline std::vector<PreparedSequence> prepare(const std::vector<SkeletonSequence>& seqs,
                                             const TargetConfig& tcfg, const ModelConfig& mcfg) {
    if (seqs.empty()) throw DataError("training: empty training set");
    std::vector<PreparedSequence> out;
    out.reserve(seqs.size());
    for (const auto& s : seqs) {
        if (s.length() == 0) throw DataError("training: sequence '" + s.name + "' is empty");
        if (s.num_classes != mcfg.num_classes)
            throw DimensionError("training: sequence '" + s.name + "' has " +
                                 std::to_string(s.num_classes) + " classes, model expects " +
                                 std::to_string(mcfg.num_classes));
        if (s.joint_count() * 3 != mcfg.input_dim)
            throw DimensionError("training: sequence '" + s.name + "' frame dim " +
                                 std::to_string(s.joint_count() * 3) + ", model expects " +
                                 std::to_string(mcfg.input_dim));
        const SkeletonSequence norm = normalize(s);
        out.push_back({flatten_sequence(norm), build_targets(norm, tcfg)});
    }
    return out;
}

using CheckpointFn = std::function<void(int epoch, const Model&)>;

// Shared epoch loop. Long sequences are cut into contiguous chunks of at most
// max_bptt_len frames; hidden state carries across chunks within a sequence
// and resets between sequences. One SGD update per chunk.
inline TrainLog run_stage(Model& model, const std::vector<SkeletonSequence>& seqs,
                          const TargetConfig& tcfg, const TrainConfig& cfg, int epochs,
                          std::function<double(int epoch)> lambda_of_epoch, uint64_t seed_tag,
                          const CheckpointFn& checkpoint) {
    cfg.validate();
    tcfg.validate();
    model.cfg.dropout_p = cfg.dropout_p;
    const auto data = prepare(seqs, tcfg, model.cfg);

    Rng rng(cfg.seed ^ seed_tag);
    Model velocity = zeros_like(model);
    TrainLog log;
    std::vector<int> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const auto t_begin = std::chrono::steady_clock::now();
        const double lambda = lambda_of_epoch(epoch);
        shuffle_in_place(order, rng);

        double ce_sum = 0, reg_sum = 0;
        long frame_count = 0;
        for (int idx : order) {
            const auto& seq = data[idx];
            RecurrentState state = RecurrentState::zeros(model.cfg);
            const int n = static_cast<int>(seq.inputs.size());
            for (int a = 0; a < n; a += cfg.max_bptt_len) {
                const int b = std::min(n, a + cfg.max_bptt_len);
                std::vector<Vec> chunk(seq.inputs.begin() + a, seq.inputs.begin() + b);
                std::vector<FrameTargets> tchunk(seq.targets.begin() + a, seq.targets.begin() + b);
                ForwardCache cache;
                auto outputs = forward_sequence(model, chunk, RunMode::Train, &rng, &state, &cache);
                const JointLoss l = loss_joint(outputs, tchunk, lambda);
                if (!std::isfinite(l.total))
                    throw NumericError("training diverged: non-finite loss at epoch " +
                                       std::to_string(epoch));
                ce_sum += l.ce * (b - a);
                reg_sum += l.reg * (b - a);
                frame_count += b - a;
                Model grads = backward_sequence(model, cache, tchunk, lambda);
                sgd_step(model, grads, velocity, cfg.lr, cfg.momentum, cfg.grad_clip);
            }
        }

        EpochStats st;
        st.epoch = epoch;
        st.ce_loss = ce_sum / frame_count;
        st.reg_loss = reg_sum / frame_count;
        st.lambda = lambda;
        st.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
        log.push_back(st);
        if (checkpoint && ((cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) ||
                           epoch == epochs))
            checkpoint(epoch, model);
    }
    return log;
}

}  // namespace train_detail

inline TrainLog train_stage1(Model& model, const std::vector<SkeletonSequence>& train_seqs,
                             const TargetConfig& tcfg, const TrainConfig& cfg,
                             const train_detail::CheckpointFn& checkpoint = nullptr) {
    return train_detail::run_stage(model, train_seqs, tcfg, cfg, cfg.epochs_stage1,
                                   [](int) { return 0.0; }, 0xA11CE001ULL, checkpoint);
}

inline TrainLog train_stage2(Model& model, const std::vector<SkeletonSequence>& train_seqs,
                             const TargetConfig& tcfg, const TrainConfig& cfg,
                             const train_detail::CheckpointFn& checkpoint = nullptr) {
    const int e2 = cfg.epochs_stage2;
    return train_detail::run_stage(
        model, train_seqs, tcfg, cfg, e2,
        [&cfg, e2](int epoch) { return e2 > 0 ? cfg.lambda_max * epoch / e2 : cfg.lambda_max; },
        0xA11CE002ULL, checkpoint);
}

}  // namespace actdet
