#include "falldet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "falldet/errors.hpp"
#include "falldet/rng.hpp"
#include "parallel.hpp"

namespace falldet {

namespace {

constexpr std::uint32_t kFormatVersion = 1;
constexpr char kMagic[8] = {'F', 'D', 'I', 'Q', 'M', 'D', 'L', '\0'};
constexpr std::uint64_t kSentinel = 0x31454C444F4D4446ull;

void validate_spec(const FeatureSpec& spec) {
    if (spec.depth < 0 || spec.quantiles_per_interval < 1 || spec.representation_count() < 1) {
        throw FeatureSpecError("feature spec needs depth >= 0, m >= 1 and a representation");
    }
}

/// Linear-interpolated empirical quantile of an ascending-sorted buffer.
Scalar sorted_quantile(const std::vector<Scalar>& sorted, double q) {
    const std::size_t k = sorted.size();
    const double pos = q * static_cast<double>(k - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= k) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void emit_quantiles(const Eigen::Ref<const Array>& series, const FeatureSpec& spec,
                    std::vector<Scalar>& scratch, Vec& features, Index& at) {
    const Index n = series.size();
    const int m = spec.quantiles_per_interval;
    for (int d = 0; d <= spec.depth; ++d) {
        const Index n_intervals = Index{1} << d;
        for (Index k = 0; k < n_intervals; ++k) {
            const Index lo = (k * n) / n_intervals;
            const Index hi = ((k + 1) * n) / n_intervals;
            scratch.assign(series.data() + lo, series.data() + hi);
            std::sort(scratch.begin(), scratch.end());
            if (m == 1) {
                features[at++] = sorted_quantile(scratch, 0.5);
            } else {
                for (int j = 0; j < m; ++j) {
                    features[at++] = sorted_quantile(scratch, static_cast<double>(j) / (m - 1));
                }
            }
        }
    }
}

struct TreeBuilder {
    const Mat& X;                 // n_samples x n_features
    const std::vector<int>& y;
    Rng rng;
    int n_candidates;

    std::vector<TreeNode> nodes;
    std::vector<int> feature_pool;
    std::vector<int> scratch;

    TreeBuilder(const Mat& X_, const std::vector<int>& y_, std::uint64_t seed)
        : X(X_), y(y_), rng(seed) {
        const int n_features = static_cast<int>(X.cols());
        n_candidates = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_features))));
        feature_pool.resize(n_features);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    std::int32_t build(std::vector<int>& ids, int begin, int end) {
        const std::int32_t me = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();

        const int n = end - begin;
        int n_fall = 0;
        for (int i = begin; i < end; ++i) n_fall += y[ids[i]];
        nodes[me].fall_fraction = static_cast<Scalar>(n_fall) / static_cast<Scalar>(n);

        // Grown to purity: only pure nodes, singletons and nodes with no
        // splittable feature become leaves.
        if (n_fall == 0 || n_fall == n || n < 2) return me;

        // Extremely randomized split: per candidate feature a single uniform
        // threshold inside its observed range, scored by weighted Gini.
        int best_feature = -1;
        Scalar best_threshold = 0.0;
        Scalar best_score = std::numeric_limits<Scalar>::infinity();

        const int f_total = static_cast<int>(feature_pool.size());
        for (int c = 0; c < n_candidates; ++c) {
            const int swap_at = c + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(f_total - c)));
            std::swap(feature_pool[c], feature_pool[swap_at]);
            const int f = feature_pool[c];

            Scalar lo = X(ids[begin], f);
            Scalar hi = lo;
            for (int i = begin + 1; i < end; ++i) {
                const Scalar v = X(ids[i], f);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(hi > lo)) continue;
            const Scalar thr = rng.uniform(lo, hi);
            if (!(thr > lo)) continue;

            int nl = 0;
            int fl = 0;
            for (int i = begin; i < end; ++i) {
                if (X(ids[i], f) < thr) {
                    ++nl;
                    fl += y[ids[i]];
                }
            }
            const int nr = n - nl;
            if (nl == 0 || nr == 0) continue;
            const int fr = n_fall - fl;

            const Scalar pl = static_cast<Scalar>(fl) / nl;
            const Scalar pr = static_cast<Scalar>(fr) / nr;
            const Scalar gini_l = 2.0 * pl * (1.0 - pl);
            const Scalar gini_r = 2.0 * pr * (1.0 - pr);
            const Scalar score = (nl * gini_l + nr * gini_r) / n;
            if (score < best_score) {
                best_score = score;
                best_feature = f;
                best_threshold = thr;
            }
        }

        if (best_feature < 0) return me;

        // Stable partition keeps sample order deterministic for the children.
        scratch.clear();
        int mid = begin;
        for (int i = begin; i < end; ++i) {
            const int id = ids[i];
            if (X(id, best_feature) < best_threshold) {
                ids[mid++] = id;
            } else {
                scratch.push_back(id);
            }
        }
        std::copy(scratch.begin(), scratch.end(), ids.begin() + mid);

        nodes[me].feature = best_feature;
        nodes[me].threshold = best_threshold;
        nodes[me].left = build(ids, begin, mid);
        nodes[me].right = build(ids, mid, end);
        return me;
    }
};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw CorruptModelError("model payload truncated");
    return v;
}

}  // namespace

FeatureVector extract_features(const Window& win, const FeatureSpec& spec) {
    validate_spec(spec);
    const Index n = win.values.size();
    const Index min_len = Index{1} << spec.depth;
    if (n < min_len || (spec.use_first_difference && n - 1 < min_len)) {
        throw FeatureSpecError("window shorter than the dyadic interval grid");
    }

    Vec features(spec.feature_count());
    Index at = 0;
    std::vector<Scalar> scratch;
    scratch.reserve(static_cast<std::size_t>(n));

    if (spec.use_raw) {
        emit_quantiles(win.values, spec, scratch, features, at);
    }
    if (spec.use_first_difference) {
        const Array diff = win.values.tail(n - 1) - win.values.head(n - 1);
        emit_quantiles(diff, spec, scratch, features, at);
    }
    return features;
}

IntervalQuantileModel fit(const TrainingSet& ts, const FeatureSpec& spec,
                          int n_trees, std::uint64_t seed, int n_threads) {
    validate_spec(spec);
    if (n_trees < 1) throw DomainError("ensemble needs at least one tree");
    const Index n = static_cast<Index>(ts.segments.size());
    if (n == 0) throw EmptyTrainingSetError("training set is empty");

    const Index n_fall = ts.count_label(1);
    if (n_fall == 0 || n_fall == n) {
        throw DegenerateTrainingError("training set contains a single class");
    }

    Mat X(n, spec.feature_count());
    std::vector<int> y(static_cast<std::size_t>(n));
    parallel_for(static_cast<int>(n), n_threads, [&](int i) {
        X.row(i) = extract_features(ts.segments[i].window, spec).transpose();
        y[i] = ts.segments[i].label;
    });

    IntervalQuantileModel model;
    model.spec = spec;
    model.w_seconds = ts.w_seconds;
    model.fs = ts.fs;
    model.trees.resize(n_trees);

    parallel_for(n_trees, n_threads, [&](int t) {
        TreeBuilder builder(X, y, derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<int> ids(static_cast<std::size_t>(n));
        std::iota(ids.begin(), ids.end(), 0);
        builder.build(ids, 0, static_cast<int>(n));
        model.trees[t].nodes = std::move(builder.nodes);
    });
    return model;
}

Scalar predict_proba_features(const IntervalQuantileModel& model,
                              const Eigen::Ref<const Vec>& features) {
    Scalar sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(features);
    return sum / static_cast<Scalar>(model.trees.size());
}

Scalar predict_proba(const IntervalQuantileModel& model, const Window& win) {
    if (win.values.size() != model.window_samples()) {
        throw ShapeError("window length does not match the trained window size");
    }
    return predict_proba_features(model, extract_features(win, model.spec));
}

void save(const IntervalQuantileModel& model, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kFormatVersion);
    write_pod(out, model.w_seconds);
    write_pod(out, static_cast<std::uint32_t>(model.fs));
    write_pod(out, static_cast<std::uint32_t>(model.spec.depth));
    write_pod(out, static_cast<std::uint32_t>(model.spec.quantiles_per_interval));
    write_pod(out, static_cast<std::uint8_t>(model.spec.use_raw));
    write_pod(out, static_cast<std::uint8_t>(model.spec.use_first_difference));
    write_pod(out, static_cast<std::uint32_t>(model.trees.size()));
    for (const auto& tree : model.trees) {
        write_pod(out, static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            write_pod(out, node.feature);
            write_pod(out, node.threshold);
            write_pod(out, node.left);
            write_pod(out, node.right);
            write_pod(out, node.fall_fraction);
        }
    }
    write_pod(out, kSentinel);
    if (!out) throw IoError("failed to write model payload");
}

void save_file(const IntervalQuantileModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    save(model, out);
}

IntervalQuantileModel load(std::istream& in) {
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CorruptModelError("not a model file");
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kFormatVersion) {
        throw VersionError("unsupported model format version " + std::to_string(version));
    }

    IntervalQuantileModel model;
    model.version = version;
    model.w_seconds = read_pod<double>(in);
    model.fs = static_cast<int>(read_pod<std::uint32_t>(in));
    model.spec.depth = static_cast<int>(read_pod<std::uint32_t>(in));
    model.spec.quantiles_per_interval = static_cast<int>(read_pod<std::uint32_t>(in));
    model.spec.use_raw = read_pod<std::uint8_t>(in) != 0;
    model.spec.use_first_difference = read_pod<std::uint8_t>(in) != 0;
    if (!(model.w_seconds > 0.0) || model.w_seconds > 1e6 || model.fs < 1 || model.fs > 100000 ||
        model.spec.depth < 0 || model.spec.depth > 24 || model.spec.quantiles_per_interval < 1 ||
        model.spec.quantiles_per_interval > 4096 || model.spec.representation_count() < 1) {
        throw CorruptModelError("model header fields out of range");
    }

    const auto n_trees = read_pod<std::uint32_t>(in);
    if (n_trees == 0 || n_trees > 1000000) throw CorruptModelError("implausible tree count");
    model.trees.resize(n_trees);
    for (auto& tree : model.trees) {
        const auto n_nodes = read_pod<std::uint32_t>(in);
        if (n_nodes == 0 || n_nodes > 100000000) {
            throw CorruptModelError("implausible node count");
        }
        tree.nodes.resize(n_nodes);
        for (auto& node : tree.nodes) {
            node.feature = read_pod<std::int32_t>(in);
            node.threshold = read_pod<Scalar>(in);
            node.left = read_pod<std::int32_t>(in);
            node.right = read_pod<std::int32_t>(in);
            node.fall_fraction = read_pod<Scalar>(in);
            const auto limit = static_cast<std::int32_t>(n_nodes);
            if (node.feature >= model.spec.feature_count() || node.left >= limit ||
                node.right >= limit) {
                throw CorruptModelError("model node indices out of range");
            }
            if (node.feature >= 0 && (node.left < 0 || node.right < 0)) {
                throw CorruptModelError("internal model node missing a child");
            }
        }
    }
    if (read_pod<std::uint64_t>(in) != kSentinel) {
        throw CorruptModelError("model payload sentinel mismatch");
    }
    return model;
}

IntervalQuantileModel load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    return load(in);
}

}  // namespace falldet
