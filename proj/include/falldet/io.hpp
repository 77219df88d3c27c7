#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "falldet/cost_tuner.hpp"
#include "falldet/evaluator.hpp"
#include "falldet/stream_detector.hpp"
#include "falldet/types.hpp"

#include <json.hpp>

namespace falldet {

using Json = nlohmann::json;

/// Key=value lines emitted as `# key=value` ahead of every CSV header; readers
/// skip them. Stored sorted so identical runs produce identical bytes.
using CsvMeta = std::map<std::string, std::string>;

/// FNV-1a over the canonical config string; all output files carry it so a
/// run can be reproduced exactly.
std::uint64_t fnv1a64(const std::string& text);
std::string config_hash_hex(const std::string& canonical_config);

// --- signal + annotation files -------------------------------------------

/// Rows `t,mag` with full-precision magnitudes (lossless parse-back).
void write_signal_csv(const std::string& path, const Signal& sig, const CsvMeta& meta = {});

/// Accepts `t,mag` or `t,ax,ax,az` layouts; tri-axial rows are aggregated to
/// magnitudes on ingest. Sampling rate and subject come from the caller.
Signal read_signal_csv(const std::string& path, int fs, const std::string& subject_id);

void write_annotations_csv(const std::string& path, const std::vector<Annotation>& annotations,
                           const CsvMeta& meta = {});
std::vector<Annotation> read_annotations_csv(const std::string& path);

// --- detector output ------------------------------------------------------

void write_confidence_map_csv(const std::string& path, const ConfidenceMap& map,
                              const CsvMeta& meta = {});

void write_detections_csv(const std::string& path, const std::vector<Detection>& dets, int fs,
                          const CsvMeta& meta = {});
std::vector<Detection> read_detections_csv(const std::string& path, double w_seconds);

void write_gain_curve_csv(const std::string& path, const GainCurve& curve,
                          const CsvMeta& meta = {});

// --- dataset directory ----------------------------------------------------

struct DatasetEntry {
    std::string subject_id;
    std::string signal_file;       // relative to the dataset directory
    std::string annotation_file;
    Index n_samples = 0;
    int n_falls = 0;
};

/// Write one CSV per recording plus an annotation sidecar and a manifest that
/// records subjects, files and the generating config.
void write_dataset(const std::string& dir, const std::vector<Signal>& signals, int fs,
                   const Json& manifest_extra, const CsvMeta& meta = {});

std::vector<DatasetEntry> read_manifest(const std::string& dir, int& fs_out);
std::vector<Signal> load_dataset(const std::string& dir);

// --- reports and sidecars ---------------------------------------------------

void write_json(const std::string& path, const Json& doc);
Json read_json(const std::string& path);

Json eval_report_json(const EvalReport& report, const Json& config_echo);

/// Model metadata sidecar lives at `<model path>.meta.json`.
std::string model_meta_path(const std::string& model_path);

}  // namespace falldet
