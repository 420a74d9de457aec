#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/experiments.hpp"

namespace heterodet {
namespace io {

// A fully resolved run: scenario with every override applied, detector list,
// output location. manifest_json(parse_config(x)) re-parses to the same run.
struct RunManifest {
    std::string format_version = "1";
    experiments::Scenario scenario;
    std::vector<detectors::DetectorId> detectors = {};
    std::string out_dir = "out";
    // Exponential-decay test covariance parameters; echoed only when applied
    // (HET preset, or alpha/decay given explicitly).
    bool hetero_cov_applied = false;
    double alpha = 2.0;
    double decay = 0.95;
};

// Strict parse: the key set is closed and unknown keys raise an error naming
// the key. paper_scale = false applies the desk-scale caps to the preset
// before explicit overrides.
RunManifest parse_config(const nlohmann::json& config, bool paper_scale = false);

RunManifest load_config_file(const std::string& path, bool paper_scale = false);

nlohmann::json manifest_json(const RunManifest& manifest);

struct DetectorResult {
    detectors::DetectorId id = detectors::DetectorId::Amf;
    experiments::StatSamples samples;
    experiments::RocCurve roc;
    experiments::Histogram hist;
};

// Writes roc_<det>.csv, stats_<det>.csv, hist_<det>.csv per detector plus
// summary.csv and manifest.json. LF endings, floats at full precision.
void write_outputs(const std::vector<DetectorResult>& results, const RunManifest& manifest);

// Runs every requested detector, writes outputs, prints an AUC summary table.
// Returns 0 when all detectors completed, 1 when any run aborted.
int run_campaign(const RunManifest& manifest, int threads = 0);

// %.17g: enough digits to round-trip an IEEE double exactly.
std::string format_double(double v);

}  // namespace io
}  // namespace heterodet
