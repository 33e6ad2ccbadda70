// actdet: online action detection on streaming skeleton data.
//
// Subcommands: gen | train | eval | stream | pr-curve | bench.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "actdet/pipeline.hpp"

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"online action detection on streaming skeleton data"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "run configuration JSON")->required();

    std::string out_dir, data_dir, checkpoint, frames_file, report_path, out_csv, dump_dir;
    double realtime_fps = 0.0;
    int bench_runs = 3;
    actdet::pipeline::TrainOptions train_opts;
    actdet::pipeline::EvalOptions eval_opts;

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset (train/ and test/ splits)");
    gen->add_option("--out", out_dir, "output directory");

    auto* train = app.add_subcommand("train", "two-stage training; writes checkpoints and a log");
    train->add_option("--data", data_dir, "dataset directory (with train/)");
    train->add_option("--out", out_dir, "run output directory");
    train->add_flag("--stage1-only", train_opts.stage1_only,
                    "stop after stage 1 (classification-alone model)");
    train->add_flag("--no-soft-selector", train_opts.no_soft_selector,
                    "bypass the soft selector in the regression branch");

    auto* eval = app.add_subcommand("eval", "run the detector over the test split and score it");
    eval->add_option("--checkpoint", checkpoint, "model checkpoint JSON");
    eval->add_option("--data", data_dir, "dataset directory (with test/)");
    eval->add_option("--out", out_dir, "report output directory");
    eval->add_flag("--oracle", eval_opts.oracle, "score perfect detections built from annotations");
    eval->add_option("--dump-frames", dump_dir, "also write per-frame stream JSONL here");

    auto* stream = app.add_subcommand("stream", "frame-by-frame detection as JSON Lines on stdout");
    stream->add_option("--checkpoint", checkpoint, "model checkpoint JSON");
    stream->add_option("--frames", frames_file, "frames file (JSON Lines)");
    stream->add_option("--realtime", realtime_fps, "pace emission at this many frames/second");

    auto* pr = app.add_subcommand("pr-curve", "extract PR curves from a report as CSV");
    pr->add_option("--report", report_path, "report.json produced by eval");
    pr->add_option("--out", out_csv, "output CSV path");

    auto* bench = app.add_subcommand("bench", "inference throughput over a frames file");
    bench->add_option("--checkpoint", checkpoint, "model checkpoint JSON");
    bench->add_option("--frames", frames_file, "frames file (JSON Lines)");
    bench->add_option("--runs", bench_runs, "timed runs (minimum 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    auto require = [](const std::string& v, const char* flag) {
        if (v.empty()) throw actdet::ConfigError(std::string("missing required option ") + flag);
    };

    const actdet::RunConfig cfg = actdet::load_run_config(config_path);
    using namespace actdet::pipeline;
    if (gen->parsed()) {
        if (out_dir.empty()) out_dir = cfg.paths.data_dir;
        cmd_gen(cfg, out_dir, std::cout);
    } else if (train->parsed()) {
        if (data_dir.empty()) data_dir = cfg.paths.data_dir;
        if (out_dir.empty()) out_dir = cfg.paths.run_dir;
        cmd_train(cfg, data_dir, out_dir, train_opts, std::cout);
    } else if (eval->parsed()) {
        if (data_dir.empty()) data_dir = cfg.paths.data_dir;
        if (out_dir.empty()) out_dir = cfg.paths.run_dir;
        if (!eval_opts.oracle) require(checkpoint, "--checkpoint");
        eval_opts.dump_frames_dir = dump_dir;
        cmd_eval(cfg, checkpoint, data_dir, out_dir, eval_opts, std::cerr);
    } else if (stream->parsed()) {
        require(checkpoint, "--checkpoint");
        require(frames_file, "--frames");
        cmd_stream(cfg, checkpoint, frames_file, realtime_fps, std::cout);
    } else if (pr->parsed()) {
        require(report_path, "--report");
        require(out_csv, "--out");
        cmd_pr_curve(report_path, out_csv);
    } else if (bench->parsed()) {
        require(checkpoint, "--checkpoint");
        require(frames_file, "--frames");
        cmd_bench(cfg, checkpoint, frames_file, std::cout, bench_runs);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const actdet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const actdet::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const actdet::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
