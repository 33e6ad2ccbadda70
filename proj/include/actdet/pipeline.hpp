#pragma once

// Command implementations behind the CLI: dataset generation, two-stage
// training, evaluation, stream simulation, PR-curve export and a throughput
// benchmark. The CLI binary is a thin argument-parsing wrapper over these so
// tests can drive the exact same code paths.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "actdet/dataset.hpp"
#include "actdet/detector.hpp"
#include "actdet/errors.hpp"
#include "actdet/evaluation.hpp"
#include "actdet/network.hpp"
#include "actdet/run_config.hpp"
#include "actdet/synth.hpp"
#include "actdet/targets.hpp"
#include "actdet/training.hpp"

namespace actdet::pipeline {

namespace fs = std::filesystem;

// Shortest decimal representation that parses back to the same double.
inline std::string fmt_double(double v) { return nlohmann::json(v).dump(); }

inline std::string seq_stem(int index) {
    std::ostringstream os;
    os << "seq" << std::setw(3) << std::setfill('0') << index;
    return os.str();
}

inline void save_split(const std::vector<SkeletonSequence>& seqs, const fs::path& dir) {
    fs::create_directories(dir);
    for (size_t i = 0; i < seqs.size(); ++i) {
        const std::string stem = seq_stem(static_cast<int>(i));
        save_sequence(seqs[i], (dir / (stem + ".frames.jsonl")).string(),
                      (dir / (stem + ".annot.json")).string());
    }
}

inline std::vector<SkeletonSequence> load_split(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".frames.jsonl";
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            stems.push_back(name.substr(0, name.size() - suffix.size()));
    }
    std::sort(stems.begin(), stems.end());
    if (stems.empty()) throw DataError("no sequences (*.frames.jsonl) in " + dir.string());
    std::vector<SkeletonSequence> out;
    for (const auto& stem : stems) {
        auto seq = load_sequence((dir / (stem + ".frames.jsonl")).string(),
                                 (dir / (stem + ".annot.json")).string());
        seq.name = stem;
        out.push_back(std::move(seq));
    }
    return out;
}

// gen: synthesize the dataset and write train/ and test/ splits under out_dir.
inline void cmd_gen(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    auto seqs = generate(cfg.synth);
    auto [train, test] = split(seqs, cfg.train_fraction, cfg.seed);
    save_split(train, fs::path(out_dir) / "train");
    save_split(test, fs::path(out_dir) / "test");
    long train_frames = 0, test_frames = 0;
    for (const auto& s : train) train_frames += s.length();
    for (const auto& s : test) test_frames += s.length();
    log << "generated " << train.size() << " train sequences (" << train_frames << " frames), "
        << test.size() << " test sequences (" << test_frames << " frames) in " << out_dir << "\n";
}

inline void write_train_log_csv(const fs::path& path, const TrainLog& stage1,
                                const TrainLog& stage2) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << "epoch,ce_loss,reg_loss,lambda,seconds\n";
    for (const TrainLog* log : {&stage1, &stage2})
        for (const auto& e : *log)
            f << e.epoch << "," << fmt_double(e.ce_loss) << "," << fmt_double(e.reg_loss) << ","
              << fmt_double(e.lambda) << "," << fmt_double(e.seconds) << "\n";
}

struct TrainOptions {
    bool stage1_only = false;      // classification-alone ablation
    bool no_soft_selector = false; // bypass the selector, FC features feed the head directly
};

inline void cmd_train(const RunConfig& cfg, const std::string& data_dir,
                      const std::string& out_dir, const TrainOptions& opts, std::ostream& log) {
    auto train_seqs = load_split(fs::path(data_dir) / "train");
    const int num_classes = train_seqs[0].num_classes;
    const int input_dim = train_seqs[0].joint_count() * 3;
    for (const auto& s : train_seqs)
        if (s.num_classes != num_classes || s.joint_count() * 3 != input_dim)
            throw DataError("training set is not homogeneous (sequence '" + s.name + "')");

    ModelSettings ms = cfg.model;
    if (opts.no_soft_selector) ms.use_soft_selector = false;
    const ModelConfig mcfg = ms.instantiate(input_dim, num_classes);

    fs::create_directories(out_dir);
    Rng init_rng(cfg.seed);
    Model model = init_model(mcfg, init_rng);

    auto saver = [&](const std::string& stage) {
        return [&, stage](int epoch, const Model& m) {
            save_model(m, (fs::path(out_dir) / (stage + "-" + std::to_string(epoch) + ".json"))
                              .string());
        };
    };
    log << "stage 1: " << cfg.train.epochs_stage1 << " epochs over " << train_seqs.size()
        << " sequences\n";
    TrainLog log1 = train_stage1(model, train_seqs, cfg.targets, cfg.train, saver("stage1"));
    TrainLog log2;
    if (!opts.stage1_only) {
        log << "stage 2: " << cfg.train.epochs_stage2 << " epochs, lambda ramp to "
            << cfg.train.lambda_max << "\n";
        log2 = train_stage2(model, train_seqs, cfg.targets, cfg.train, saver("stage2"));
    }
    save_model(model, (fs::path(out_dir) / "final.json").string());
    write_train_log_csv(fs::path(out_dir) / "train_log.csv", log1, log2);
    if (!log1.empty())
        log << "final ce loss " << (opts.stage1_only ? log1.back() : log2.back()).ce_loss << "\n";
}

inline nlohmann::json event_to_json(const DetectionEvent& e) {
    return {{"kind", event_kind_name(e.kind)}, {"class", e.class_id},     {"frame", e.frame},
            {"anchor", e.anchor_frame},        {"confidence", e.confidence}};
}

inline void write_frame_line(std::ostream& out, int t, const FrameOutput& fo,
                             const std::vector<DetectionEvent>& events) {
    nlohmann::json row;
    row["t"] = t;
    row["argmax"] =
        static_cast<int>(std::max_element(fo.y.begin(), fo.y.end()) - fo.y.begin());
    row["y"] = fo.y;
    row["p_start"] = fo.p_start;
    row["p_end"] = fo.p_end;
    nlohmann::json evs = nlohmann::json::array();
    for (const auto& e : events) evs.push_back(event_to_json(e));
    row["events"] = std::move(evs);
    out << row.dump() << "\n";
}

// Run the streaming detector over one normalized sequence; optionally mirrors
// the per-frame stream format to `dump`.
inline SequenceEval run_detector(const Model& model, const DetectorConfig& dcfg,
                                 const SkeletonSequence& seq, std::ostream* dump = nullptr) {
    const SkeletonSequence norm = normalize(seq);
    Detector det(model, dcfg);
    SequenceEval se;
    se.groundtruth = seq.annotations;
    for (int t = 0; t < norm.length(); ++t) {
        auto [fo, events] = det.step(flatten_frame(norm.frames[t]));
        se.p_start.push_back(fo.p_start);
        se.p_end.push_back(fo.p_end);
        se.pred_class.push_back(
            static_cast<int>(std::max_element(fo.y.begin(), fo.y.end()) - fo.y.begin()));
        if (dump) write_frame_line(*dump, t, fo, events);
    }
    se.events = det.events();
    se.detections = det.finalize();
    return se;
}

// Perfect predictions synthesized from the annotations; exercises the metric
// pipeline end to end without a model.
inline SequenceEval oracle_eval(const SkeletonSequence& seq, const TargetConfig& tcfg) {
    SequenceEval se;
    se.groundtruth = seq.annotations;
    for (const auto& a : seq.annotations) {
        se.detections.push_back({a.class_id, a.start, a.end});
        se.events.push_back({DetectionEvent::Kind::ForecastStart, a.class_id, a.start, a.start, 1.0});
        se.events.push_back({DetectionEvent::Kind::Start, a.class_id, a.start + 1, a.start, 1.0});
        se.events.push_back({DetectionEvent::Kind::End, a.class_id, a.end, a.end - 1, 1.0});
    }
    se.p_start = confidence_curve(seq, Boundary::Start, tcfg.sigma);
    se.p_end = confidence_curve(seq, Boundary::End, tcfg.sigma);
    se.pred_class = class_labels(seq, tcfg.horizon);
    return se;
}

inline void write_pr_csv(const fs::path& path, const std::vector<PrPoint>& start,
                         const std::vector<PrPoint>& end) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    f << "kind,theta,precision,recall\n";
    for (const auto& p : start)
        f << "start," << fmt_double(p.theta) << "," << fmt_double(p.precision) << ","
          << fmt_double(p.recall) << "\n";
    for (const auto& p : end)
        f << "end," << fmt_double(p.theta) << "," << fmt_double(p.precision) << ","
          << fmt_double(p.recall) << "\n";
}

inline void write_confusion_csv(const fs::path& path,
                                const std::vector<std::vector<int>>& cm) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open for writing: " + path.string());
    for (const auto& row : cm) {
        for (size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << row[c];
        f << "\n";
    }
}

struct EvalOptions {
    bool oracle = false;
    std::string dump_frames_dir;  // per-sequence JSONL mirrors of the stream format
};

inline EvalReport cmd_eval(const RunConfig& cfg, const std::string& checkpoint,
                           const std::string& data_dir, const std::string& out_dir,
                           const EvalOptions& opts, std::ostream& log) {
    auto test_seqs = load_split(fs::path(data_dir) / "test");
    std::vector<SequenceEval> evals;
    int num_classes = test_seqs[0].num_classes;
    if (opts.oracle) {
        for (const auto& s : test_seqs) evals.push_back(oracle_eval(s, cfg.targets));
    } else {
        Model model = load_model(checkpoint);
        num_classes = model.cfg.num_classes;
        for (const auto& s : test_seqs) {
            if (s.joint_count() * 3 != model.cfg.input_dim)
                throw DimensionError("sequence '" + s.name + "' frame dim " +
                                     std::to_string(s.joint_count() * 3) +
                                     " does not match checkpoint input_dim " +
                                     std::to_string(model.cfg.input_dim));
            if (s.num_classes != model.cfg.num_classes)
                throw DimensionError("sequence '" + s.name + "' has " +
                                     std::to_string(s.num_classes) +
                                     " classes, checkpoint expects " +
                                     std::to_string(model.cfg.num_classes));
            std::ofstream dump;
            if (!opts.dump_frames_dir.empty()) {
                fs::create_directories(opts.dump_frames_dir);
                dump.open(fs::path(opts.dump_frames_dir) / (s.name + ".stream.jsonl"));
            }
            evals.push_back(run_detector(model, cfg.detector, s, dump.is_open() ? &dump : nullptr));
        }
    }
    const EvalReport report = evaluate(evals, num_classes, cfg.eval);

    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "report.json");
        if (!f) throw DataError("cannot open for writing: " + out_dir + "/report.json");
        f << report_to_json(report).dump(2) << "\n";
    }
    write_pr_csv(fs::path(out_dir) / "pr_curves.csv", report.pr_start, report.pr_end);
    write_confusion_csv(fs::path(out_dir) / "confusion.csv", report.confusion);
    log << "avg F1 " << report.avg_f1 << "  SL " << report.sl << "  EL " << report.el
        << "  action F1 " << report.action_f1 << "  (" << report.num_sequences << " sequences)\n";
    return report;
}

// stream: frame-by-frame JSON Lines over a frames file (no annotations needed).
inline void cmd_stream(const RunConfig& cfg, const std::string& checkpoint,
                       const std::string& frames_file, double realtime_fps, std::ostream& out) {
    Model model = load_model(checkpoint);
    auto frames = load_frames_file(frames_file);
    Detector det(model, cfg.detector);
    for (size_t t = 0; t < frames.size(); ++t) {
        if (frames[t].t != static_cast<int>(t))
            throw DataError(frames_file + ": frame index " + std::to_string(frames[t].t) +
                            " out of order");
        if (static_cast<int>(frames[t].joints.size()) * 3 != model.cfg.input_dim)
            throw DimensionError(frames_file + ": frame dim does not match checkpoint");
        SkeletonFrame f = frames[t];
        const auto root = f.joints[0];
        for (auto& p : f.joints)
            for (int c = 0; c < 3; ++c) p[c] -= root[c];
        auto [fo, events] = det.step(flatten_frame(f));
        write_frame_line(out, static_cast<int>(t), fo, events);
        if (realtime_fps > 0)
            std::this_thread::sleep_for(std::chrono::duration<double>(1.0 / realtime_fps));
    }
}

// pr-curve: extract the PR sweep of an existing report as CSV.
inline void cmd_pr_curve(const std::string& report_path, const std::string& out_csv) {
    std::ifstream f(report_path);
    if (!f) throw DataError("cannot open: " + report_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(report_path + ": " + e.what());
    }
    const EvalReport r = report_from_json(j);
    write_pr_csv(out_csv, r.pr_start, r.pr_end);
}

struct BenchResult {
    int frames = 0;
    int runs = 0;
    double mean_ms_per_frame = 0;
    double frames_per_second = 0;
};

inline BenchResult cmd_bench(const RunConfig& cfg, const std::string& checkpoint,
                             const std::string& frames_file, std::ostream& log, int runs = 3) {
    if (runs < 3) runs = 3;
    Model model = load_model(checkpoint);
    auto raw = load_frames_file(frames_file);
    if (raw.empty()) throw DataError(frames_file + ": no frames");
    std::vector<Vec> xs;
    for (auto f : raw) {
        const auto root = f.joints[0];
        for (auto& p : f.joints)
            for (int c = 0; c < 3; ++c) p[c] -= root[c];
        Vec x = flatten_frame(f);
        if (static_cast<int>(x.size()) != model.cfg.input_dim)
            throw DimensionError(frames_file + ": frame dim does not match checkpoint");
        xs.push_back(std::move(x));
    }

    Detector det(model, cfg.detector);
    for (const auto& x : xs) det.step(x);  // warm-up

    double total_seconds = 0;
    for (int r = 0; r < runs; ++r) {
        det.reset();
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& x : xs) det.step(x);
        total_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    BenchResult b;
    b.frames = static_cast<int>(xs.size());
    b.runs = runs;
    const double per_run = total_seconds / runs;
    b.mean_ms_per_frame = per_run * 1000.0 / b.frames;
    b.frames_per_second = b.frames / per_run;
    log << "bench: " << b.frames << " frames x " << b.runs << " runs, "
        << b.mean_ms_per_frame << " ms/frame, " << b.frames_per_second << " fps\n";
    return b;
}

}  // namespace actdet::pipeline
