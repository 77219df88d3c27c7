#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "falldet/bench.hpp"
#include "falldet/classifier.hpp"
#include "falldet/cost_tuner.hpp"
#include "falldet/errors.hpp"
#include "falldet/evaluator.hpp"
#include "falldet/io.hpp"
#include "falldet/rng.hpp"
#include "falldet/segmentation.hpp"
#include "falldet/stream_detector.hpp"
#include "falldet/synth.hpp"

namespace fsys = std::filesystem;
using namespace falldet;

namespace {

// Exit codes: 0 success, 2 config, 3 I/O, 4 degenerate training data,
// 5 contract violation.
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitContract = 5;

constexpr std::array<int, 7> kSweepWindows = {3, 5, 7, 10, 15, 30, 60};

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

struct Options {
    std::string data_dir;
    std::string out_path;
    std::string model_path;
    std::string signal_path;
    std::string detections_dir;
    std::string subject = "S001";

    double w_seconds = 10.0;
    double step_seconds = 1.0;
    double tolerance_seconds = 20.0;
    double guard_seconds = 5.0;
    double gate_g = 1.4;
    int grid_points = 100;
    int folds = 5;
    int cost_ratio = 2;
    double tau = -1.0;  // negative: resolve from the model sidecar, else 0.5
    int n_trees = 200;
    int depth = 4;
    int quantiles = 4;
    std::uint64_t seed = 42;
    int fs = 100;
    int threads = 0;  // 0: hardware concurrency

    SynthConfig synth;
    std::vector<int> sweep_w{kSweepWindows.begin(), kSweepWindows.end()};
    int bench_warmup = 16;

    int thread_count() const {
        if (threads > 0) return threads;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }

    FeatureSpec feature_spec() const {
        FeatureSpec spec;
        spec.depth = depth;
        spec.quantiles_per_interval = quantiles;
        return spec;
    }
};

std::string canonical_config(const std::string& cmd, const Options& opt) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "cmd=%s;w=%g;step=%g;tol=%g;guard=%g;gate=%g;grid=%d;folds=%d;ratio=%d;"
                  "tau=%g;trees=%d;depth=%d;quantiles=%d;seed=%llu;fs=%d;subjects=%d;"
                  "spsub=%d;dur=%g;falls=%d;burst=%g;supra=%g;noise=%g",
                  cmd.c_str(), opt.w_seconds, opt.step_seconds, opt.tolerance_seconds,
                  opt.guard_seconds, opt.gate_g, opt.grid_points, opt.folds, opt.cost_ratio,
                  opt.tau, opt.n_trees, opt.depth, opt.quantiles,
                  static_cast<unsigned long long>(opt.seed), opt.fs, opt.synth.n_subjects,
                  opt.synth.signals_per_subject, opt.synth.duration_seconds,
                  opt.synth.falls_per_signal, opt.synth.adl_burst_rate_per_min,
                  opt.synth.supra_burst_fraction, opt.synth.noise_std);
    return buf;
}

std::string stem_of(const std::string& file_name) {
    return fsys::path(file_name).stem().string();
}

double resolve_tau(const Options& opt) {
    if (opt.tau >= 0.0) return opt.tau;
    if (!opt.model_path.empty()) {
        const std::string meta_path = model_meta_path(opt.model_path);
        if (fsys::exists(meta_path)) {
            const Json meta = read_json(meta_path);
            if (meta.contains("tau")) return meta["tau"].get<double>();
        }
    }
    return 0.5;
}

std::vector<ToleranceWindow> ground_truth_windows(const Signal& sig, double w_seconds,
                                                  double tolerance_seconds) {
    std::vector<ToleranceWindow> out;
    out.reserve(sig.annotations.size());
    for (const auto& ann : sig.annotations) {
        out.push_back(tolerance_window(static_cast<double>(ann.impact_index) / sig.fs, w_seconds,
                                       tolerance_seconds, sig.duration_seconds()));
    }
    return out;
}

int cmd_synth(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("synth", opt));
    SynthConfig cfg = opt.synth;
    cfg.seed = opt.seed;
    cfg.fs = opt.fs;

    const auto signals = generate_dataset(cfg);
    int total_falls = 0;
    for (const auto& sig : signals) total_falls += static_cast<int>(sig.annotations.size());

    Json extra;
    extra["seed"] = cfg.seed;
    extra["config_hash"] = hash;
    extra["synth"] = {{"n_subjects", cfg.n_subjects},
                      {"signals_per_subject", cfg.signals_per_subject},
                      {"duration_seconds", cfg.duration_seconds},
                      {"falls_per_signal", cfg.falls_per_signal},
                      {"adl_burst_rate_per_min", cfg.adl_burst_rate_per_min},
                      {"supra_burst_fraction", cfg.supra_burst_fraction},
                      {"noise_std", cfg.noise_std}};
    write_dataset(opt.out_path, signals, cfg.fs, extra, {{"config_hash", hash}});

    std::cout << "wrote " << signals.size() << " recordings, " << total_falls << " falls, to "
              << opt.out_path << " (config " << hash << ")\n";
    return 0;
}

int cmd_train(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("train", opt));
    const auto signals = load_dataset(opt.data_dir);

    const TrainingSet ts = build_training_set(signals, opt.w_seconds, opt.gate_g,
                                              opt.step_seconds, opt.guard_seconds);
    std::cout << "training set: " << ts.count_label(1) << " fall / " << ts.count_label(0)
              << " adl segments";
    if (ts.skipped_falls > 0) std::cout << " (" << ts.skipped_falls << " boundary falls skipped)";
    std::cout << "\n";

    const IntervalQuantileModel model =
        fit(ts, opt.feature_spec(), opt.n_trees, opt.seed, opt.thread_count());
    save_file(model, opt.out_path);

    Json meta;
    meta["config_hash"] = hash;
    meta["w_seconds"] = model.w_seconds;
    meta["fs"] = model.fs;
    meta["n_trees"] = model.n_trees();
    meta["feature_spec"] = {{"depth", model.spec.depth},
                            {"quantiles_per_interval", model.spec.quantiles_per_interval},
                            {"representations", Json::array({"raw", "first_difference"})}};
    meta["seed"] = opt.seed;
    write_json(model_meta_path(opt.out_path), meta);

    std::cout << "model written to " << opt.out_path << " (" << model.n_trees() << " trees)\n";
    return 0;
}

int cmd_tune(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("tune", opt));
    const auto signals = load_dataset(opt.data_dir);
    const IntervalQuantileModel model = load_file(opt.model_path);

    TuneConfig cfg;
    cfg.w_seconds = model.w_seconds;
    cfg.step_seconds = opt.step_seconds;
    cfg.tolerance_seconds = opt.tolerance_seconds;
    cfg.gate_g = opt.gate_g;
    cfg.guard_seconds = opt.guard_seconds;
    cfg.folds = opt.folds;
    cfg.grid_points = opt.grid_points;
    cfg.spec = model.spec;
    cfg.n_trees = model.n_trees();
    cfg.gain_matrix = GainMatrix(opt.cost_ratio);
    cfg.seed = opt.seed;
    cfg.n_threads = opt.thread_count();

    const GainCurve curve = tune_threshold(signals, cfg);
    write_gain_curve_csv(opt.out_path, curve,
                         {{"config_hash", hash}, {"best_tau", format("%.3f", curve.best_tau)}});

    Json meta = fsys::exists(model_meta_path(opt.model_path))
                    ? read_json(model_meta_path(opt.model_path))
                    : Json::object();
    meta["tau"] = curve.best_tau;
    meta["tune_config_hash"] = hash;
    write_json(model_meta_path(opt.model_path), meta);

    std::cout << "best tau = " << curve.best_tau << " (gain curve: " << opt.out_path << ")\n";
    return 0;
}

void detect_one(const IntervalQuantileModel& model, const Signal& sig, double tau,
                const Options& opt, const std::string& map_path, const std::string& det_path,
                const CsvMeta& meta) {
    const WindowProbSeq wp = window_probabilities(model, sig, opt.gate_g);
    const ConfidenceMap map = confidence_map(wp, sig.size(), sig.fs);
    const auto dets = detect(wp, tau);

    write_confidence_map_csv(map_path, map, meta);
    write_detections_csv(det_path, dets, sig.fs, meta);
    std::cout << sig.subject_id << ": " << dets.size() << " detection(s)\n";
}

int cmd_detect(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("detect", opt));
    const IntervalQuantileModel model = load_file(opt.model_path);
    const double tau = resolve_tau(opt);
    const CsvMeta meta = {{"config_hash", hash}, {"tau", format("%.6f", tau)}};

    fsys::create_directories(opt.out_path);
    if (!opt.signal_path.empty()) {
        const Signal sig = read_signal_csv(opt.signal_path, opt.fs, opt.subject);
        const std::string stem = stem_of(opt.signal_path);
        detect_one(model, sig, tau, opt, opt.out_path + "/" + stem + ".map.csv",
                   opt.out_path + "/" + stem + ".det.csv", meta);
        return 0;
    }

    const auto signals = load_dataset(opt.data_dir);
    int fs = 0;
    const auto entries = read_manifest(opt.data_dir, fs);
    for (std::size_t i = 0; i < signals.size(); ++i) {
        const std::string stem = stem_of(entries[i].signal_file);
        detect_one(model, signals[i], tau, opt, opt.out_path + "/" + stem + ".map.csv",
                   opt.out_path + "/" + stem + ".det.csv", meta);
    }
    return 0;
}

int cmd_eval(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("eval", opt));
    double w_seconds = opt.w_seconds;
    if (!opt.model_path.empty()) {
        w_seconds = load_file(opt.model_path).w_seconds;
    }

    const auto signals = load_dataset(opt.data_dir);
    int fs = 0;
    const auto entries = read_manifest(opt.data_dir, fs);
    const GainMatrix gm(opt.cost_ratio);

    EvalReport report;
    for (std::size_t i = 0; i < signals.size(); ++i) {
        const Signal& sig = signals[i];
        const std::string det_path =
            opt.detections_dir + "/" + stem_of(entries[i].signal_file) + ".det.csv";
        const auto dets = read_detections_csv(det_path, w_seconds);

        const Index wlen = static_cast<Index>(std::llround(w_seconds * sig.fs));
        if (sig.size() < wlen) throw ContractError("signal shorter than the window size");
        const Index n_grid = (sig.size() - wlen) / sig.fs + 1;
        const auto res = match(dets, ground_truth_windows(sig, w_seconds, opt.tolerance_seconds),
                               sig.fs, n_grid);
        accumulate(report, res);
    }
    report.ratios = metrics(report.counts);
    report.gain = static_cast<double>(gain(report.counts.fp, report.counts.fn, gm));

    Json echo;
    echo["config_hash"] = hash;
    echo["w_seconds"] = w_seconds;
    echo["tolerance_seconds"] = opt.tolerance_seconds;
    echo["tau"] = resolve_tau(opt);  // same default chain the detector uses
    echo["gain_matrix"] = {{"fn", gm.fn_gain()}, {"fp", gm.fp_gain()}};
    echo["seed"] = opt.seed;
    write_json(opt.out_path, eval_report_json(report, echo));

    std::printf(
        "tp=%lld fp=%lld fn=%lld tn=%lld | precision=%.3f recall=%.3f f1=%.3f ba=%.3f gain=%g\n",
        static_cast<long long>(report.counts.tp), static_cast<long long>(report.counts.fp),
        static_cast<long long>(report.counts.fn), static_cast<long long>(report.counts.tn),
        report.ratios.precision, report.ratios.recall, report.ratios.f1,
        report.ratios.balanced_accuracy, report.gain);
    return 0;
}

int cmd_sweep(const Options& opt) {
    const std::string hash = config_hash_hex(canonical_config("sweep", opt));
    for (const int w : opt.sweep_w) {
        if (std::find(kSweepWindows.begin(), kSweepWindows.end(), w) == kSweepWindows.end()) {
            throw ConfigError("sweep windows must come from {3,5,7,10,15,30,60}");
        }
    }
    const auto signals = load_dataset(opt.data_dir);
    const double tau = opt.tau >= 0.0 ? opt.tau : 0.5;

    std::vector<std::string> subjects;
    subjects.reserve(signals.size());
    for (const auto& sig : signals) subjects.push_back(sig.subject_id);

    std::ofstream out(opt.out_path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + opt.out_path);
    out << "# config_hash=" << hash << "\n";
    out << "w,ba,precision,recall,f1,f1_std,mean_delay,gain\n";

    for (const int w : opt.sweep_w) {
        const auto folds = fold_split(subjects, opt.folds, opt.seed);
        std::vector<double> fold_f1;
        double ba_sum = 0.0;
        double precision_sum = 0.0;
        double recall_sum = 0.0;
        double delay_sum = 0.0;
        std::int64_t delay_count = 0;
        std::int64_t fp_total = 0;
        std::int64_t fn_total = 0;

        for (const auto& fold : folds) {
            const std::set<std::string> held_out(fold.begin(), fold.end());
            std::vector<Signal> train_signals;
            std::vector<const Signal*> test_signals;
            for (const auto& sig : signals) {
                if (held_out.count(sig.subject_id) != 0) {
                    test_signals.push_back(&sig);
                } else {
                    train_signals.push_back(sig);
                }
            }
            const TrainingSet ts = build_training_set(train_signals, w, opt.gate_g,
                                                      opt.step_seconds, opt.guard_seconds);
            const IntervalQuantileModel model =
                fit(ts, opt.feature_spec(), opt.n_trees,
                    derive_seed(opt.seed, static_cast<std::uint64_t>(w)), opt.thread_count());
            EvalReport fold_report;
            for (const Signal* sig : test_signals) {
                const WindowProbSeq wp = window_probabilities(model, *sig, opt.gate_g);
                const auto res =
                    match(detect(wp, tau), ground_truth_windows(*sig, w, opt.tolerance_seconds),
                          sig->fs, wp.n_windows());
                accumulate(fold_report, res);
            }
            fold_report.ratios = metrics(fold_report.counts);
            fold_f1.push_back(fold_report.ratios.f1);
            ba_sum += fold_report.ratios.balanced_accuracy;
            precision_sum += fold_report.ratios.precision;
            recall_sum += fold_report.ratios.recall;
            for (const double d : fold_report.delays) delay_sum += d;
            delay_count += static_cast<std::int64_t>(fold_report.delays.size());
            fp_total += fold_report.counts.fp;
            fn_total += fold_report.counts.fn;
        }

        const double n_folds = static_cast<double>(folds.size());
        double f1_mean = 0.0;
        for (const double f : fold_f1) f1_mean += f;
        f1_mean /= n_folds;
        double f1_var = 0.0;
        for (const double f : fold_f1) f1_var += (f - f1_mean) * (f - f1_mean);
        const double f1_std = std::sqrt(f1_var / n_folds);
        const double mean_delay =
            delay_count > 0 ? delay_sum / static_cast<double>(delay_count) : 0.0;
        const double mean_gain =
            static_cast<double>(gain(fp_total, fn_total, GainMatrix(opt.cost_ratio))) / n_folds;

        char row[256];
        std::snprintf(row, sizeof(row), "%d,%.4f,%.4f,%.4f,%.4f,%.4f,%.3f,%.3f\n", w,
                      ba_sum / n_folds, precision_sum / n_folds, recall_sum / n_folds, f1_mean,
                      f1_std, mean_delay, mean_gain);
        out << row;
        std::cout << "w=" << w << " f1=" << f1_mean << " (+/-" << f1_std << ")\n";
    }
    if (!out) throw IoError("failed while writing " + opt.out_path);
    std::cout << "sweep table: " << opt.out_path << "\n";
    return 0;
}

int cmd_bench(const Options& opt) {
    const IntervalQuantileModel model = load_file(opt.model_path);

    std::vector<Signal> signals;
    if (!opt.signal_path.empty()) {
        signals.push_back(read_signal_csv(opt.signal_path, opt.fs, opt.subject));
    } else {
        signals = load_dataset(opt.data_dir);
    }

    BenchReport total;
    double mean_weighted = 0.0;
    double scored_weighted = 0.0;
    double p95_worst = 0.0;
    double scored_p95_worst = 0.0;
    for (const auto& sig : signals) {
        const BenchReport r = run_bench(model, sig, opt.gate_g, opt.bench_warmup);
        total.n_windows += r.n_windows;
        total.n_gated += r.n_gated;
        total.n_scored += r.n_scored;
        mean_weighted += r.mean_ms * static_cast<double>(r.n_windows);
        scored_weighted += r.scored_mean_ms * static_cast<double>(r.n_scored);
        p95_worst = std::max(p95_worst, r.p95_ms);
        scored_p95_worst = std::max(scored_p95_worst, r.scored_p95_ms);
        total.windows_per_second += r.windows_per_second;
    }
    total.mean_ms = mean_weighted / static_cast<double>(total.n_windows);
    total.p95_ms = p95_worst;
    total.scored_mean_ms =
        total.n_scored > 0 ? scored_weighted / static_cast<double>(total.n_scored) : 0.0;
    total.scored_p95_ms = scored_p95_worst;
    total.windows_per_second /= static_cast<double>(signals.size());

    std::printf("windows=%zu gated=%zu scored=%zu\n", total.n_windows, total.n_gated,
                total.n_scored);
    std::printf("per-window latency: mean=%.4f ms  p95=%.4f ms\n", total.mean_ms, total.p95_ms);
    std::printf("model-invoked windows: mean=%.4f ms  p95=%.4f ms\n", total.scored_mean_ms,
                total.scored_p95_ms);
    std::printf("throughput: %.0f windows/s\n", total.windows_per_second);

    if (!opt.out_path.empty()) {
        Json doc;
        doc["n_windows"] = total.n_windows;
        doc["n_gated"] = total.n_gated;
        doc["n_scored"] = total.n_scored;
        doc["mean_ms"] = total.mean_ms;
        doc["p95_ms"] = total.p95_ms;
        doc["scored_mean_ms"] = total.scored_mean_ms;
        doc["scored_p95_ms"] = total.scored_p95_ms;
        doc["windows_per_second"] = total.windows_per_second;
        write_json(opt.out_path, doc);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"falldet: streaming fall detection over accelerometer magnitude streams"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--gate", opt.gate_g, "physical gate threshold, g");
        cmd->add_option("--step", opt.step_seconds, "sliding step, seconds");
        cmd->add_option("--seed", opt.seed, "master RNG seed");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate an annotated synthetic dataset");
    synth->add_option("--out", opt.out_path, "output dataset directory")->required();
    synth->add_option("--subjects", opt.synth.n_subjects, "number of subjects");
    synth->add_option("--signals-per-subject", opt.synth.signals_per_subject, "recordings each");
    synth->add_option("--duration", opt.synth.duration_seconds, "seconds per recording");
    synth->add_option("--fs", opt.fs, "sampling rate, Hz");
    synth->add_option("--falls", opt.synth.falls_per_signal, "falls per recording");
    synth->add_option("--burst-rate", opt.synth.adl_burst_rate_per_min, "ADL bursts per minute");
    synth->add_option("--supra-fraction", opt.synth.supra_burst_fraction,
                      "fraction of bursts above the gate");
    synth->add_option("--noise-std", opt.synth.noise_std, "background noise sigma, g");
    add_common(synth);

    CLI::App* train = app.add_subcommand("train", "segment recordings and fit the classifier");
    train->add_option("--data", opt.data_dir, "dataset directory")->required();
    train->add_option("--out", opt.out_path, "model file")->required();
    train->add_option("--w", opt.w_seconds, "window size, seconds");
    train->add_option("--guard", opt.guard_seconds, "ADL guard band around falls, seconds");
    train->add_option("--trees", opt.n_trees, "ensemble size");
    train->add_option("--depth", opt.depth, "dyadic interval depth");
    train->add_option("--quantiles", opt.quantiles, "quantiles per interval");
    add_common(train);

    CLI::App* tune = app.add_subcommand("tune", "cost-sensitive threshold selection");
    tune->add_option("--data", opt.data_dir, "dataset directory")->required();
    tune->add_option("--model", opt.model_path, "trained model file")->required();
    tune->add_option("--out", opt.out_path, "gain curve CSV")->required();
    tune->add_option("--folds", opt.folds, "cross-validation folds");
    tune->add_option("--grid", opt.grid_points, "threshold grid size");
    tune->add_option("--tolerance", opt.tolerance_seconds, "match tolerance, seconds");
    tune->add_option("--cost-ratio", opt.cost_ratio, "FN cost / FP cost");
    tune->add_option("--guard", opt.guard_seconds, "ADL guard band, seconds");
    add_common(tune);

    CLI::App* det = app.add_subcommand("detect", "stream a signal into map + detections");
    det->add_option("--model", opt.model_path, "trained model file")->required();
    det->add_option("--out", opt.out_path, "output directory")->required();
    auto* sig_opt = det->add_option("--signal", opt.signal_path, "single signal CSV");
    det->add_option("--data", opt.data_dir, "dataset directory (all recordings)")
        ->excludes(sig_opt);
    det->add_option("--fs", opt.fs, "sampling rate for --signal");
    det->add_option("--subject", opt.subject, "subject id for --signal");
    det->add_option("--tau", opt.tau, "decision threshold (default: tuned sidecar, else 0.5)");
    add_common(det);

    CLI::App* ev = app.add_subcommand("eval", "match detections against annotations");
    ev->add_option("--data", opt.data_dir, "dataset directory")->required();
    ev->add_option("--detections", opt.detections_dir, "directory of .det.csv files")->required();
    ev->add_option("--out", opt.out_path, "report JSON")->required();
    ev->add_option("--model", opt.model_path, "model file (for window size)");
    ev->add_option("--w", opt.w_seconds, "window size, seconds (if no model)");
    ev->add_option("--tolerance", opt.tolerance_seconds, "match tolerance, seconds");
    ev->add_option("--cost-ratio", opt.cost_ratio, "FN cost / FP cost");
    ev->add_option("--tau", opt.tau, "threshold echoed into the report");
    add_common(ev);

    CLI::App* sweep = app.add_subcommand("sweep", "window-size sweep under cross-validation");
    sweep->add_option("--data", opt.data_dir, "dataset directory")->required();
    sweep->add_option("--out", opt.out_path, "sweep table CSV")->required();
    sweep->add_option("--w-list", opt.sweep_w, "window sizes to sweep");
    sweep->add_option("--folds", opt.folds, "cross-validation folds");
    sweep->add_option("--trees", opt.n_trees, "ensemble size");
    sweep->add_option("--tau", opt.tau, "fixed threshold (default 0.5)");
    sweep->add_option("--tolerance", opt.tolerance_seconds, "match tolerance, seconds");
    sweep->add_option("--cost-ratio", opt.cost_ratio, "FN cost / FP cost");
    sweep->add_option("--guard", opt.guard_seconds, "ADL guard band, seconds");
    sweep->add_option("--depth", opt.depth, "dyadic interval depth");
    sweep->add_option("--quantiles", opt.quantiles, "quantiles per interval");
    add_common(sweep);

    CLI::App* bench = app.add_subcommand("bench", "per-window inference latency");
    bench->add_option("--model", opt.model_path, "trained model file")->required();
    auto* bsig = bench->add_option("--signal", opt.signal_path, "signal CSV");
    bench->add_option("--data", opt.data_dir, "dataset directory")->excludes(bsig);
    bench->add_option("--fs", opt.fs, "sampling rate for --signal");
    bench->add_option("--out", opt.out_path, "optional report JSON");
    bench->add_option("--warmup", opt.bench_warmup, "warmup windows");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(synth)) return cmd_synth(opt);
        if (app.got_subcommand(train)) return cmd_train(opt);
        if (app.got_subcommand(tune)) return cmd_tune(opt);
        if (app.got_subcommand(det)) {
            if (opt.signal_path.empty() && opt.data_dir.empty()) {
                throw ConfigError("detect needs --signal or --data");
            }
            return cmd_detect(opt);
        }
        if (app.got_subcommand(ev)) return cmd_eval(opt);
        if (app.got_subcommand(sweep)) return cmd_sweep(opt);
        if (app.got_subcommand(bench)) {
            if (opt.signal_path.empty() && opt.data_dir.empty()) {
                throw ConfigError("bench needs --signal or --data");
            }
            return cmd_bench(opt);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DegenerateDataError& e) {
        std::cerr << "degenerate training data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return kExitContract;
    }
    return 0;
}
