#pragma once

// The joint classification-regression recurrent network.
//
// Architecture: a shared stack of 3 LSTM layers followed by 3 tanh
// fully-connected layers (sizes layer_sizes[0..5]), then two heads reading the
// stack output:
//   - classification: linear layer `cls` + softmax over M+1 classes;
//   - regression: tanh layer `reg_hidden` of size fc2_multiplier*(M+1), a soft
//     selector that multiplies each row of the reshaped feature block by the
//     class posterior, and a linear layer `reg_out` with 2 units (start/end
//     confidence), sigmoid by default.
//
// Forward and backward passes are hand-derived; the cache stores everything
// backpropagation through time needs. Dropout (inverted scaling) applies to
// the three shared FC layers in train mode only.
//
// LSTM gate packing: the gate weight blocks are stacked row-wise in the order
// input, forget, candidate, output (i, f, g, o), so wx is (4n x in),
// wh is (4n x n), b is (4n x 1). Per step:
//   i = sigmoid(.), f = sigmoid(.), g = tanh(.), o = sigmoid(.)
//   c_t = f .* c_prev + i .* g,  h_t = o .* tanh(c_t)

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "actdet/errors.hpp"
#include "actdet/numerics.hpp"
#include "actdet/targets.hpp"

namespace actdet {

enum class RegOutput { Sigmoid, Linear };

struct ModelConfig {
    int input_dim = 75;   // J*3
    int num_classes = 10; // M; heads use M+1 including blank
    std::array<int, 6> layer_sizes = {100, 100, 110, 110, 100, 100};  // 3 LSTM, then 3 FC
    int fc2_multiplier = 10;
    bool use_soft_selector = true;
    double dropout_p = 0.25;
    RegOutput regression_output = RegOutput::Sigmoid;

    int lstm_size(int l) const { return layer_sizes[l]; }
    int fc_size(int l) const { return layer_sizes[3 + l]; }
    int cls_size() const { return num_classes + 1; }
    int reg_hidden_size() const { return fc2_multiplier * (num_classes + 1); }

    void validate() const {
        if (input_dim < 1) throw ConfigError("model: input_dim must be >= 1");
        if (num_classes < 1) throw ConfigError("model: num_classes must be >= 1");
        for (int s : layer_sizes)
            if (s < 1) throw ConfigError("model: layer sizes must be >= 1");
        if (fc2_multiplier < 1) throw ConfigError("model: fc2_multiplier must be >= 1");
        if (!(dropout_p >= 0.0 && dropout_p < 1.0))
            throw ConfigError("model: dropout_p must be in [0,1)");
    }
};

struct LstmLayer {
    Matrix wx, wh, b;  // (4n x in), (4n x n), (4n x 1)
    int in = 0, size = 0;
};

struct FcLayer {
    Matrix w, b;  // (out x in), (out x 1)
};

struct Model {
    ModelConfig cfg;
    std::array<LstmLayer, 3> lstm;
    std::array<FcLayer, 3> fc;  // shared tanh stack
    FcLayer cls;                // -> M+1 logits
    FcLayer reg_hidden;         // -> fc2_multiplier*(M+1), tanh
    FcLayer reg_out;            // -> 2 confidences
};

template <class ModelT, class F>
void visit_params(ModelT& m, F&& f) {
    for (int l = 0; l < 3; ++l) {
        const std::string p = "lstm" + std::to_string(l);
        f(p + "/wx", m.lstm[l].wx);
        f(p + "/wh", m.lstm[l].wh);
        f(p + "/b", m.lstm[l].b);
    }
    for (int l = 0; l < 3; ++l) {
        const std::string p = "fc" + std::to_string(l);
        f(p + "/w", m.fc[l].w);
        f(p + "/b", m.fc[l].b);
    }
    f("cls/w", m.cls.w);
    f("cls/b", m.cls.b);
    f("reg_hidden/w", m.reg_hidden.w);
    f("reg_hidden/b", m.reg_hidden.b);
    f("reg_out/w", m.reg_out.w);
    f("reg_out/b", m.reg_out.b);
}

inline Model shaped_model(const ModelConfig& cfg) {
    cfg.validate();
    Model m;
    m.cfg = cfg;
    int in = cfg.input_dim;
    for (int l = 0; l < 3; ++l) {
        const int n = cfg.lstm_size(l);
        m.lstm[l] = {Matrix(4 * n, in), Matrix(4 * n, n), Matrix(4 * n, 1), in, n};
        in = n;
    }
    for (int l = 0; l < 3; ++l) {
        const int n = cfg.fc_size(l);
        m.fc[l] = {Matrix(n, in), Matrix(n, 1)};
        in = n;
    }
    m.cls = {Matrix(cfg.cls_size(), in), Matrix(cfg.cls_size(), 1)};
    m.reg_hidden = {Matrix(cfg.reg_hidden_size(), in), Matrix(cfg.reg_hidden_size(), 1)};
    m.reg_out = {Matrix(2, cfg.reg_hidden_size()), Matrix(2, 1)};
    return m;
}

inline Model zeros_like(const Model& m) { return shaped_model(m.cfg); }

// Weights uniform in [-0.08, 0.08]; biases zero except the LSTM forget-gate
// block, which starts at 1 so memory persists early in training.
inline Model init_model(const ModelConfig& cfg, Rng& rng) {
    Model m = shaped_model(cfg);
    visit_params(m, [&](const std::string& name, Matrix& p) {
        if (name.size() >= 2 && name.substr(name.size() - 2) == "/b") return;
        for (double& v : p.data) v = rng.uniform(-0.08, 0.08);
    });
    for (int l = 0; l < 3; ++l) {
        const int n = m.lstm[l].size;
        for (int r = n; r < 2 * n; ++r) m.lstm[l].b(r, 0) = 1.0;
    }
    return m;
}

struct RecurrentState {
    std::array<Vec, 3> h, c;

    static RecurrentState zeros(const ModelConfig& cfg) {
        RecurrentState s;
        for (int l = 0; l < 3; ++l) {
            s.h[l].assign(cfg.lstm_size(l), 0.0);
            s.c[l].assign(cfg.lstm_size(l), 0.0);
        }
        return s;
    }
};

struct LstmStepResult {
    Vec h, c;
    Vec tanh_c;
    Vec gates;  // 4n post-activation, packed i, f, g, o
};

inline LstmStepResult lstm_step(const LstmLayer& layer, const Vec& x, const Vec& h_prev,
                                const Vec& c_prev) {
    const int n = layer.size;
    if (static_cast<int>(x.size()) != layer.in || static_cast<int>(h_prev.size()) != n ||
        static_cast<int>(c_prev.size()) != n)
        throw DimensionError("lstm_step: input/state sizes do not match layer (in=" +
                             std::to_string(layer.in) + ", size=" + std::to_string(n) + ")");
    LstmStepResult r;
    r.gates.resize(4 * n);
    for (int i = 0; i < 4 * n; ++i) r.gates[i] = layer.b(i, 0);
    gemv_add(layer.wx, x, r.gates);
    gemv_add(layer.wh, h_prev, r.gates);
    for (int i = 0; i < n; ++i) {
        r.gates[i] = sigmoid(r.gates[i]);                    // input gate
        r.gates[n + i] = sigmoid(r.gates[n + i]);            // forget gate
        r.gates[2 * n + i] = std::tanh(r.gates[2 * n + i]);  // candidate
        r.gates[3 * n + i] = sigmoid(r.gates[3 * n + i]);    // output gate
    }
    r.c.resize(n);
    r.tanh_c.resize(n);
    r.h.resize(n);
    for (int i = 0; i < n; ++i) {
        r.c[i] = r.gates[n + i] * c_prev[i] + r.gates[i] * r.gates[2 * n + i];
        r.tanh_c[i] = std::tanh(r.c[i]);
        r.h[i] = r.gates[3 * n + i] * r.tanh_c[i];
    }
    return r;
}

// Reshape fc2_out to rows x |probs| (row-major) and scale every row
// elementwise by probs, then flatten back.
inline Vec soft_selector(const Vec& fc2_out, const Vec& probs) {
    if (probs.empty() || fc2_out.size() % probs.size() != 0)
        throw DimensionError("soft_selector: feature length " + std::to_string(fc2_out.size()) +
                             " is not a multiple of class count " + std::to_string(probs.size()));
    Vec out(fc2_out.size());
    const size_t k = probs.size();
    for (size_t i = 0; i < fc2_out.size(); ++i) out[i] = fc2_out[i] * probs[i % k];
    return out;
}

struct FrameOutput {
    Vec y;  // class posterior, length M+1
    double p_start = 0.0;
    double p_end = 0.0;
};

enum class RunMode { Train, Infer };

struct LstmCache {
    Vec gates, c, tanh_c, h;
};

struct FcCache {
    Vec act;   // tanh output before dropout
    Vec mask;  // per-unit scale 0 or 1/(1-p); empty when dropout is off
    Vec out;   // act scaled by mask (== act when off)
};

struct StepCache {
    Vec input;
    std::array<LstmCache, 3> lstm;
    std::array<FcCache, 3> fc;
    Vec y;   // softmax output
    Vec r;   // reg_hidden tanh output
    Vec ss;  // selector output (== r when the selector is off)
    std::array<double, 2> p;
};

struct ForwardCache {
    RecurrentState initial;
    std::vector<StepCache> steps;
};

inline Vec fc_affine(const FcLayer& fl, const Vec& x) {
    if (static_cast<int>(x.size()) != fl.w.cols)
        throw DimensionError("fc layer: input length " + std::to_string(x.size()) +
                             " does not match weight " + shape_str(fl.w));
    Vec out(fl.w.rows);
    for (int i = 0; i < fl.w.rows; ++i) out[i] = fl.b(i, 0);
    gemv_add(fl.w, x, out);
    return out;
}

// One causal timestep. `state` carries h/c across calls; in Train mode with
// dropout_p > 0 an Rng must be supplied for the masks.
inline FrameOutput forward_step(const Model& m, const Vec& x, RecurrentState& state, RunMode mode,
                                Rng* rng, StepCache* cache) {
    const ModelConfig& cfg = m.cfg;
    if (static_cast<int>(x.size()) != cfg.input_dim)
        throw DimensionError("forward_step: frame dim " + std::to_string(x.size()) +
                             " != model input_dim " + std::to_string(cfg.input_dim));
    const bool use_dropout = mode == RunMode::Train && cfg.dropout_p > 0.0;
    if (use_dropout && rng == nullptr)
        throw ConfigError("forward_step: train mode with dropout needs an Rng");

    if (cache) cache->input = x;
    const Vec* cur = &x;
    for (int l = 0; l < 3; ++l) {
        LstmStepResult r = lstm_step(m.lstm[l], *cur, state.h[l], state.c[l]);
        state.h[l] = r.h;
        state.c[l] = r.c;
        if (cache) {
            cache->lstm[l] = {std::move(r.gates), std::move(r.c), std::move(r.tanh_c),
                              std::move(r.h)};
            cur = &cache->lstm[l].h;
        } else {
            cur = &state.h[l];
        }
    }

    Vec fc_out;
    for (int l = 0; l < 3; ++l) {
        Vec act = fc_affine(m.fc[l], *cur);
        for (double& v : act) v = std::tanh(v);
        Vec mask;
        Vec out;
        if (use_dropout) {
            const double keep = 1.0 - cfg.dropout_p;
            mask.resize(act.size());
            out.resize(act.size());
            for (size_t i = 0; i < act.size(); ++i) {
                mask[i] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
                out[i] = act[i] * mask[i];
            }
        } else {
            out = act;
        }
        if (cache) {
            cache->fc[l] = {std::move(act), std::move(mask), std::move(out)};
            cur = &cache->fc[l].out;
        } else {
            fc_out = std::move(out);
            cur = &fc_out;
        }
    }
    const Vec& q = *cur;

    FrameOutput fo;
    fo.y = softmax_row(fc_affine(m.cls, q));

    Vec r = fc_affine(m.reg_hidden, q);
    for (double& v : r) v = std::tanh(v);
    Vec ss = cfg.use_soft_selector ? soft_selector(r, fo.y) : r;
    Vec conf = fc_affine(m.reg_out, ss);
    if (cfg.regression_output == RegOutput::Sigmoid)
        for (double& v : conf) v = sigmoid(v);
    fo.p_start = conf[0];
    fo.p_end = conf[1];

    if (cache) {
        cache->y = fo.y;
        cache->r = std::move(r);
        cache->ss = std::move(ss);
        cache->p = {fo.p_start, fo.p_end};
    }
    return fo;
}

// Whole-sequence forward pass. `state` may be null (zero initial state) or
// carry hidden state across chunk boundaries; `cache` may be null in Infer
// mode. Outputs at frame t depend only on frames <= t.
inline std::vector<FrameOutput> forward_sequence(const Model& m, const std::vector<Vec>& xs,
                                                 RunMode mode, Rng* rng,
                                                 RecurrentState* state = nullptr,
                                                 ForwardCache* cache = nullptr) {
    RecurrentState local = RecurrentState::zeros(m.cfg);
    RecurrentState& st = state ? *state : local;
    if (cache) {
        cache->initial = st;
        cache->steps.assign(xs.size(), StepCache{});
    }
    std::vector<FrameOutput> out;
    out.reserve(xs.size());
    for (size_t t = 0; t < xs.size(); ++t)
        out.push_back(forward_step(m, xs[t], st, mode, rng, cache ? &cache->steps[t] : nullptr));
    return out;
}

// BPTT over a cached forward pass. Returns gradients of
//   (1/N) sum_t [ CE_t + lambda * ((p_s - c_s)^2 + (p_e - c_e)^2) ]
// with respect to every parameter, in a Model-shaped container. Gradient flows
// through the soft selector into both the feature branch and the softmax.
inline Model backward_sequence(const Model& m, const ForwardCache& cache,
                               const std::vector<FrameTargets>& targets, double lambda) {
    const ModelConfig& cfg = m.cfg;
    const int n_frames = static_cast<int>(cache.steps.size());
    if (n_frames == 0) throw DimensionError("backward_sequence: empty cache");
    if (static_cast<int>(targets.size()) != n_frames)
        throw DimensionError("backward_sequence: cache has " + std::to_string(n_frames) +
                             " steps but " + std::to_string(targets.size()) + " targets");
    const int ncls = cfg.cls_size();
    const double inv_n = 1.0 / n_frames;

    Model g = zeros_like(m);
    std::array<Vec, 3> dh_next, dc_next;
    for (int l = 0; l < 3; ++l) {
        dh_next[l].assign(cfg.lstm_size(l), 0.0);
        dc_next[l].assign(cfg.lstm_size(l), 0.0);
    }

    for (int t = n_frames - 1; t >= 0; --t) {
        const StepCache& sc = cache.steps[t];
        const FrameTargets& tg = targets[t];
        if (static_cast<int>(tg.z.size()) != ncls)
            throw DimensionError("backward_sequence: target one-hot length " +
                                 std::to_string(tg.z.size()) + " != " + std::to_string(ncls));
        const Vec& q = sc.fc[2].out;

        // Classification head: d(pre-softmax) = (y - z)/N for the CE term.
        Vec ds(ncls);
        for (int k = 0; k < ncls; ++k) ds[k] = (sc.y[k] - tg.z[k]) * inv_n;

        Vec dq(q.size(), 0.0);
        if (lambda > 0.0) {
            Vec dconf(2);
            dconf[0] = inv_n * lambda * 2.0 * (sc.p[0] - tg.c_start);
            dconf[1] = inv_n * lambda * 2.0 * (sc.p[1] - tg.c_end);
            if (cfg.regression_output == RegOutput::Sigmoid)
                for (int j = 0; j < 2; ++j) dconf[j] *= sigmoid_deriv_from_output(sc.p[j]);
            outer_add(dconf, sc.ss, g.reg_out.w);
            for (int j = 0; j < 2; ++j) g.reg_out.b(j, 0) += dconf[j];
            Vec dss(sc.ss.size(), 0.0);
            gemv_transpose_add(m.reg_out.w, dconf, dss);

            Vec dr(sc.r.size());
            if (cfg.use_soft_selector) {
                Vec dy_sel(ncls, 0.0);
                for (size_t i = 0; i < dss.size(); ++i) {
                    const int k = static_cast<int>(i % ncls);
                    dr[i] = dss[i] * sc.y[k];
                    dy_sel[k] += dss[i] * sc.r[i];
                }
                // Softmax Jacobian applied to the selector's pull on y.
                double dot = 0.0;
                for (int k = 0; k < ncls; ++k) dot += sc.y[k] * dy_sel[k];
                for (int k = 0; k < ncls; ++k) ds[k] += sc.y[k] * (dy_sel[k] - dot);
            } else {
                dr = dss;
            }
            for (size_t i = 0; i < dr.size(); ++i) dr[i] *= tanh_deriv_from_output(sc.r[i]);
            outer_add(dr, q, g.reg_hidden.w);
            for (size_t i = 0; i < dr.size(); ++i) g.reg_hidden.b(static_cast<int>(i), 0) += dr[i];
            gemv_transpose_add(m.reg_hidden.w, dr, dq);
        }

        outer_add(ds, q, g.cls.w);
        for (int k = 0; k < ncls; ++k) g.cls.b(k, 0) += ds[k];
        gemv_transpose_add(m.cls.w, ds, dq);

        // Shared FC stack, top down.
        Vec dcur = std::move(dq);
        for (int l = 2; l >= 0; --l) {
            const FcCache& fcc = sc.fc[l];
            Vec dact = std::move(dcur);
            if (!fcc.mask.empty())
                for (size_t i = 0; i < dact.size(); ++i) dact[i] *= fcc.mask[i];
            for (size_t i = 0; i < dact.size(); ++i) dact[i] *= tanh_deriv_from_output(fcc.act[i]);
            const Vec& in = (l == 0) ? sc.lstm[2].h : sc.fc[l - 1].out;
            outer_add(dact, in, g.fc[l].w);
            for (size_t i = 0; i < dact.size(); ++i) g.fc[l].b(static_cast<int>(i), 0) += dact[i];
            dcur.assign(in.size(), 0.0);
            gemv_transpose_add(m.fc[l].w, dact, dcur);
        }

        // LSTM stack, top down; dcur is the gradient on lstm[2].h from above.
        for (int l = 2; l >= 0; --l) {
            const LstmCache& lc = sc.lstm[l];
            const int n = m.lstm[l].size;
            Vec dh(n);
            for (int i = 0; i < n; ++i) dh[i] = dcur[i] + dh_next[l][i];
            const Vec& h_prev = (t == 0) ? cache.initial.h[l] : cache.steps[t - 1].lstm[l].h;
            const Vec& c_prev = (t == 0) ? cache.initial.c[l] : cache.steps[t - 1].lstm[l].c;

            Vec da(4 * n);
            for (int i = 0; i < n; ++i) {
                const double gi = lc.gates[i];
                const double gf = lc.gates[n + i];
                const double gg = lc.gates[2 * n + i];
                const double go = lc.gates[3 * n + i];
                const double dc = dh[i] * go * tanh_deriv_from_output(lc.tanh_c[i]) + dc_next[l][i];
                da[i] = dc * gg * sigmoid_deriv_from_output(gi);
                da[n + i] = dc * c_prev[i] * sigmoid_deriv_from_output(gf);
                da[2 * n + i] = dc * gi * tanh_deriv_from_output(gg);
                da[3 * n + i] = dh[i] * lc.tanh_c[i] * sigmoid_deriv_from_output(go);
                dc_next[l][i] = dc * gf;
            }

            const Vec& x_in = (l == 0) ? sc.input : sc.lstm[l - 1].h;
            outer_add(da, x_in, g.lstm[l].wx);
            outer_add(da, h_prev, g.lstm[l].wh);
            for (int i = 0; i < 4 * n; ++i) g.lstm[l].b(i, 0) += da[i];

            dh_next[l].assign(n, 0.0);
            gemv_transpose_add(m.lstm[l].wh, da, dh_next[l]);
            if (l > 0) {
                dcur.assign(m.lstm[l].in, 0.0);
                gemv_transpose_add(m.lstm[l].wx, da, dcur);
            }
        }
    }
    return g;
}

// --- Checkpoints ---
// Single JSON document {"format_version": 1, "config": {...}, "params":
// {"<layer>/<block>": [[...], ...]}}. Loading validates version, config,
// completeness and shapes; a bad file never yields a partial model.

inline nlohmann::json model_config_to_json(const ModelConfig& cfg) {
    nlohmann::json j;
    j["input_dim"] = cfg.input_dim;
    j["num_classes"] = cfg.num_classes;
    j["layer_sizes"] = cfg.layer_sizes;
    j["fc2_multiplier"] = cfg.fc2_multiplier;
    j["use_soft_selector"] = cfg.use_soft_selector;
    j["dropout_p"] = cfg.dropout_p;
    j["regression_output"] = cfg.regression_output == RegOutput::Sigmoid ? "sigmoid" : "linear";
    return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> keys = {
        "input_dim",     "num_classes", "layer_sizes", "fc2_multiplier",
        "use_soft_selector", "dropout_p", "regression_output"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw ConfigError("model config: unknown key \"" + it.key() + "\"");
    }
    ModelConfig cfg;
    cfg.input_dim = j.at("input_dim").get<int>();
    cfg.num_classes = j.at("num_classes").get<int>();
    auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (sizes.size() != 6) throw ConfigError("model config: layer_sizes must have 6 entries");
    std::copy(sizes.begin(), sizes.end(), cfg.layer_sizes.begin());
    cfg.fc2_multiplier = j.value("fc2_multiplier", 10);
    cfg.use_soft_selector = j.value("use_soft_selector", true);
    cfg.dropout_p = j.value("dropout_p", 0.25);
    const std::string reg = j.value("regression_output", "sigmoid");
    if (reg == "sigmoid")
        cfg.regression_output = RegOutput::Sigmoid;
    else if (reg == "linear")
        cfg.regression_output = RegOutput::Linear;
    else
        throw ConfigError("model config: regression_output must be \"sigmoid\" or \"linear\"");
    cfg.validate();
    return cfg;
}

inline void save_model(const Model& m, const std::string& path) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["config"] = model_config_to_json(m.cfg);
    nlohmann::json params = nlohmann::json::object();
    visit_params(m, [&](const std::string& name, const Matrix& p) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < p.rows; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < p.cols; ++c) row.push_back(p(r, c));
            rows.push_back(std::move(row));
        }
        params[name] = std::move(rows);
    });
    doc["params"] = std::move(params);
    std::ofstream f(path);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << doc.dump() << "\n";
    if (!f) throw DataError("write failed: " + path);
}

inline Model load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1)
        throw DataError(path + ": unsupported checkpoint format_version");
    Model m = shaped_model(model_config_from_json(doc.at("config")));
    const auto& params = doc.at("params");
    size_t used = 0;
    visit_params(m, [&](const std::string& name, Matrix& p) {
        if (!params.contains(name)) throw DataError(path + ": missing parameter \"" + name + "\"");
        const auto& rows = params.at(name);
        if (!rows.is_array() || static_cast<int>(rows.size()) != p.rows)
            throw DimensionError(path + ": parameter \"" + name + "\" expects " +
                                 std::to_string(p.rows) + " rows");
        for (int r = 0; r < p.rows; ++r) {
            const auto& row = rows[r];
            if (!row.is_array() || static_cast<int>(row.size()) != p.cols)
                throw DimensionError(path + ": parameter \"" + name + "\" row " +
                                     std::to_string(r) + " expects " + std::to_string(p.cols) +
                                     " columns");
            for (int c = 0; c < p.cols; ++c) {
                const double v = row[c].get<double>();
                if (!std::isfinite(v))
                    throw DataError(path + ": non-finite value in \"" + name + "\"");
                p(r, c) = v;
            }
        }
        ++used;
    });
    if (params.size() != used)
        throw DataError(path + ": checkpoint carries extra parameter blocks");
    return m;
}

}  // namespace actdet
