#include "falldet/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "falldet/errors.hpp"
#include "falldet/signal_core.hpp"

namespace fs = std::filesystem;

namespace falldet {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

void write_meta(std::ofstream& out, const CsvMeta& meta) {
    for (const auto& [key, value] : meta) {
        out << "# " << key << "=" << value << "\n";
    }
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

bool data_line(const std::string& line) {
    return !line.empty() && line[0] != '#' && line.find_first_not_of(" \t\r") != std::string::npos;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t at = 0;
    while (true) {
        const std::size_t comma = line.find(',', at);
        std::string field = line.substr(at, comma == std::string::npos ? comma : comma - at);
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        out.push_back(field);
        if (comma == std::string::npos) break;
        at = comma + 1;
    }
    return out;
}

double parse_double(const std::string& field, const std::string& path, int line_no) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && *begin == ' ') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw IoError(path + ":" + std::to_string(line_no) + ": bad numeric field '" + field + "'");
    }
    return v;
}

long long parse_int(const std::string& field, const std::string& path, int line_no) {
    long long v = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && *begin == ' ') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw IoError(path + ":" + std::to_string(line_no) + ": bad integer field '" + field + "'");
    }
    return v;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string config_hash_hex(const std::string& canonical_config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config)));
    return buf;
}

void write_signal_csv(const std::string& path, const Signal& sig, const CsvMeta& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    out << "t,mag\n";
    for (Index i = 0; i < sig.size(); ++i) {
        out << format_double(static_cast<double>(i) / sig.fs, "%.3f") << ","
            << format_double(sig.samples[i], "%.17g") << "\n";
    }
    if (!out) throw IoError("failed while writing " + path);
}

Signal read_signal_csv(const std::string& path, int fs, const std::string& subject_id) {
    if (fs <= 0) throw ConfigError("sampling rate must be positive");
    auto in = open_in(path);

    Signal sig;
    sig.fs = fs;
    sig.subject_id = subject_id;
    std::vector<Scalar> samples;

    std::string line;
    int line_no = 0;
    bool header_seen = false;
    bool triaxial = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!data_line(line)) continue;
        const auto fields = split_csv(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() == 2 && fields[0] == "t" && fields[1] == "mag") {
                triaxial = false;
            } else if (fields.size() == 4 && fields[0] == "t" && fields[1] == "ax" &&
                       fields[2] == "ay" && fields[3] == "az") {
                triaxial = true;
            } else {
                throw IoError(path + ": expected header 't,mag' or 't,ax,ay,az'");
            }
            continue;
        }
        if (fields.size() != (triaxial ? 4u : 2u)) {
            throw IoError(path + ":" + std::to_string(line_no) + ": wrong column count");
        }
        Scalar mag = 0.0;
        if (triaxial) {
            TriaxialSample s{parse_double(fields[1], path, line_no),
                             parse_double(fields[2], path, line_no),
                             parse_double(fields[3], path, line_no)};
            mag = magnitude(s);
        } else {
            mag = parse_double(fields[1], path, line_no);
        }
        if (!std::isfinite(mag) || mag < 0.0) {
            throw IoError(path + ":" + std::to_string(line_no) + ": magnitude must be finite and >= 0");
        }
        samples.push_back(mag);
    }
    if (samples.empty()) throw IoError(path + ": no samples");
    sig.samples = Eigen::Map<const Array>(samples.data(), static_cast<Index>(samples.size()));
    return sig;
}

void write_annotations_csv(const std::string& path, const std::vector<Annotation>& annotations,
                           const CsvMeta& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    out << "impact_index\n";
    for (const auto& ann : annotations) out << ann.impact_index << "\n";
    if (!out) throw IoError("failed while writing " + path);
}

std::vector<Annotation> read_annotations_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<Annotation> out;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!data_line(line)) continue;
        const auto fields = split_csv(line);
        if (!header_seen) {
            if (fields[0] != "impact_index") {
                throw IoError(path + ": expected header 'impact_index'");
            }
            header_seen = true;
            continue;
        }
        out.push_back({static_cast<Index>(parse_int(fields[0], path, line_no))});
    }
    if (!header_seen) throw IoError(path + ": missing header");
    return out;
}

void write_confidence_map_csv(const std::string& path, const ConfidenceMap& map,
                              const CsvMeta& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    out << "sample_index,probability\n";
    for (Index i = 0; i < map.probs.size(); ++i) {
        out << i << "," << format_double(map.probs[i], "%.17g") << "\n";
    }
    if (!out) throw IoError("failed while writing " + path);
}

void write_detections_csv(const std::string& path, const std::vector<Detection>& dets, int fs,
                          const CsvMeta& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    out << "start_index,start_seconds,probability\n";
    for (const auto& det : dets) {
        out << det.start_index << ","
            << format_double(static_cast<double>(det.start_index) / fs, "%.3f") << ","
            << format_double(det.prob, "%.17g") << "\n";
    }
    if (!out) throw IoError("failed while writing " + path);
}

std::vector<Detection> read_detections_csv(const std::string& path, double w_seconds) {
    auto in = open_in(path);
    std::vector<Detection> out;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!data_line(line)) continue;
        const auto fields = split_csv(line);
        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "start_index") {
                throw IoError(path + ": expected header 'start_index,start_seconds,probability'");
            }
            header_seen = true;
            continue;
        }
        Detection det;
        det.start_index = static_cast<Index>(parse_int(fields[0], path, line_no));
        det.prob = parse_double(fields[2], path, line_no);
        det.w_seconds = w_seconds;
        out.push_back(det);
    }
    if (!header_seen) throw IoError(path + ": missing header");
    return out;
}

void write_gain_curve_csv(const std::string& path, const GainCurve& curve, const CsvMeta& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    out << "tau,mean_gain\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << format_double(curve.thresholds[i], "%.3f") << ","
            << format_double(curve.mean_gain[i], "%.17g") << "\n";
    }
    if (!out) throw IoError("failed while writing " + path);
}

void write_dataset(const std::string& dir, const std::vector<Signal>& signals, int fs,
                   const Json& manifest_extra, const CsvMeta& meta) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create dataset directory: " + dir);

    Json recordings = Json::array();
    std::map<std::string, int> per_subject;
    for (const auto& sig : signals) {
        const int idx = per_subject[sig.subject_id]++;
        char stem[64];
        std::snprintf(stem, sizeof(stem), "%s_R%02d", sig.subject_id.c_str(), idx);
        const std::string signal_file = std::string(stem) + ".csv";
        const std::string ann_file = std::string(stem) + ".ann.csv";

        write_signal_csv(dir + "/" + signal_file, sig, meta);
        write_annotations_csv(dir + "/" + ann_file, sig.annotations, meta);

        recordings.push_back({{"subject", sig.subject_id},
                              {"signal", signal_file},
                              {"annotations", ann_file},
                              {"n_samples", sig.size()},
                              {"n_falls", sig.annotations.size()}});
    }

    Json manifest = manifest_extra;
    manifest["format"] = "falldet-dataset/1";
    manifest["fs"] = fs;
    manifest["recordings"] = recordings;
    write_json(dir + "/manifest.json", manifest);
}

std::vector<DatasetEntry> read_manifest(const std::string& dir, int& fs_out) {
    const Json manifest = read_json(dir + "/manifest.json");
    if (!manifest.contains("fs") || !manifest.contains("recordings")) {
        throw IoError(dir + "/manifest.json: missing fs or recordings");
    }
    fs_out = manifest["fs"].get<int>();
    std::vector<DatasetEntry> out;
    for (const auto& rec : manifest["recordings"]) {
        DatasetEntry entry;
        entry.subject_id = rec.at("subject").get<std::string>();
        entry.signal_file = rec.at("signal").get<std::string>();
        entry.annotation_file = rec.at("annotations").get<std::string>();
        entry.n_samples = rec.value("n_samples", Index{0});
        entry.n_falls = rec.value("n_falls", 0);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<Signal> load_dataset(const std::string& dir) {
    int fs = 0;
    const auto entries = read_manifest(dir, fs);
    std::vector<Signal> out;
    out.reserve(entries.size());
    for (const auto& entry : entries) {
        Signal sig = read_signal_csv(dir + "/" + entry.signal_file, fs, entry.subject_id);
        sig.annotations = read_annotations_csv(dir + "/" + entry.annotation_file);
        for (const auto& ann : sig.annotations) {
            if (ann.impact_index < 0 || ann.impact_index >= sig.size()) {
                throw IoError(entry.annotation_file + ": impact index out of signal bounds");
            }
        }
        out.push_back(std::move(sig));
    }
    return out;
}

void write_json(const std::string& path, const Json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("failed while writing " + path);
}

Json read_json(const std::string& path) {
    auto in = open_in(path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    return doc;
}

Json eval_report_json(const EvalReport& report, const Json& config_echo) {
    double delay_sum = 0.0;
    double abs_delay_sum = 0.0;
    for (const double d : report.delays) {
        delay_sum += d;
        abs_delay_sum += std::abs(d);
    }
    const double n_delays = report.delays.empty() ? 1.0 : static_cast<double>(report.delays.size());

    Json doc;
    doc["config"] = config_echo;
    doc["counts"] = {{"tp", report.counts.tp},
                     {"fp", report.counts.fp},
                     {"fn", report.counts.fn},
                     {"tn", report.counts.tn}};
    doc["metrics"] = {{"precision", report.ratios.precision},
                      {"recall", report.ratios.recall},
                      {"specificity", report.ratios.specificity},
                      {"f1", report.ratios.f1},
                      {"balanced_accuracy", report.ratios.balanced_accuracy},
                      {"degenerate", report.ratios.degenerate}};
    doc["delays_seconds"] = report.delays;
    doc["mean_delay_seconds"] = delay_sum / n_delays;
    doc["mean_abs_delay_seconds"] = abs_delay_sum / n_delays;
    doc["gain"] = report.gain;
    return doc;
}

std::string model_meta_path(const std::string& model_path) {
    return model_path + ".meta.json";
}

}  // namespace falldet
