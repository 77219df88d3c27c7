#include "falldet/cost_tuner.hpp"

#include <algorithm>
#include <set>

#include "falldet/errors.hpp"
#include "falldet/rng.hpp"
#include "falldet/segmentation.hpp"

namespace falldet {

void GainMatrix::validate() const {
    if (m_(0, 0) != 0 || m_(1, 1) != 0) throw DomainError("gain matrix diagonal must be zero");
    if (m_(0, 1) > 0 || m_(1, 0) > 0) throw DomainError("misclassification gains must be <= 0");
}

std::int64_t gain(std::int64_t fp, std::int64_t fn, const GainMatrix& g) {
    if (fp < 0 || fn < 0) throw DomainError("misclassification counts must be non-negative");
    return fp * g.fp_gain() + fn * g.fn_gain();
}

std::vector<double> threshold_grid(int n_points) {
    if (n_points < 1) throw DomainError("threshold grid needs at least one point");
    constexpr double lo = 0.005;
    constexpr double hi = 0.995;
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    if (n_points == 1) {
        grid[0] = 0.5;
        return grid;
    }
    for (int i = 0; i < n_points; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
    }
    return grid;
}

double select_best_tau(const std::vector<double>& thresholds,
                       const std::vector<double>& mean_gain) {
    double best_tau = thresholds.front();
    double best = mean_gain.front();
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (mean_gain[i] >= best) {  // >= so ties move toward the largest tau
            best = mean_gain[i];
            best_tau = thresholds[i];
        }
    }
    return best_tau;
}

std::vector<std::vector<std::string>> fold_split(const std::vector<std::string>& subject_ids,
                                                 int folds, std::uint64_t seed) {
    std::set<std::string> unique(subject_ids.begin(), subject_ids.end());
    std::vector<std::string> subjects(unique.begin(), unique.end());
    if (folds < 1 || static_cast<int>(subjects.size()) < folds) {
        throw SplitError("need at least as many distinct subjects as folds");
    }

    Rng rng(derive_seed(seed, 0x666F6C64));  // "fold"
    rng.shuffle(subjects.data(), subjects.size());

    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(folds));
    const std::size_t base = subjects.size() / static_cast<std::size_t>(folds);
    const std::size_t extra = subjects.size() % static_cast<std::size_t>(folds);
    std::size_t at = 0;
    for (std::size_t f = 0; f < out.size(); ++f) {
        const std::size_t take = base + (f < extra ? 1 : 0);
        out[f].assign(subjects.begin() + at, subjects.begin() + at + take);
        at += take;
    }
    return out;
}

GainCurve tune_threshold(const std::vector<Signal>& signals, const TuneConfig& cfg) {
    std::vector<std::string> subjects;
    subjects.reserve(signals.size());
    for (const auto& sig : signals) subjects.push_back(sig.subject_id);
    const auto folds = fold_split(subjects, cfg.folds, cfg.seed);

    GainCurve curve;
    curve.thresholds = threshold_grid(cfg.grid_points);
    std::vector<std::int64_t> fp_pool(curve.thresholds.size(), 0);
    std::vector<std::int64_t> fn_pool(curve.thresholds.size(), 0);

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::set<std::string> held_out(folds[f].begin(), folds[f].end());

        std::vector<Signal> train_signals;
        std::vector<const Signal*> test_signals;
        for (const auto& sig : signals) {
            if (held_out.count(sig.subject_id) != 0) {
                test_signals.push_back(&sig);
            } else {
                train_signals.push_back(sig);
            }
        }

        const TrainingSet ts = build_training_set(train_signals, cfg.w_seconds, cfg.gate_g,
                                                  cfg.step_seconds, cfg.guard_seconds);
        const IntervalQuantileModel model =
            fit(ts, cfg.spec, cfg.n_trees, derive_seed(cfg.seed, 0xF01D + f), cfg.n_threads);

        for (const Signal* sig : test_signals) {
            const WindowProbSeq wp = window_probabilities(model, *sig, cfg.gate_g);

            std::vector<ToleranceWindow> falls;
            falls.reserve(sig->annotations.size());
            for (const auto& ann : sig->annotations) {
                falls.push_back(tolerance_window(static_cast<double>(ann.impact_index) / sig->fs,
                                                 cfg.w_seconds, cfg.tolerance_seconds,
                                                 sig->duration_seconds()));
            }

            for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
                const auto dets = detect(wp, curve.thresholds[i]);
                const MatchResult m = match(dets, falls, sig->fs, wp.n_windows());
                fp_pool[i] += m.counts.fp;
                fn_pool[i] += m.counts.fn;
            }
        }
    }

    curve.mean_gain.resize(curve.thresholds.size());
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        curve.mean_gain[i] = static_cast<double>(gain(fp_pool[i], fn_pool[i], cfg.gain_matrix)) /
                             static_cast<double>(folds.size());
    }
    curve.best_tau = select_best_tau(curve.thresholds, curve.mean_gain);
    return curve;
}

}  // namespace falldet
