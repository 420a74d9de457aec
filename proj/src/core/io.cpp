#include "core/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace heterodet {
namespace io {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "scenario", "n", "p", "t", "k", "group_sizes", "group_scales", "sigma2_test",
    "snr_db", "epsilon", "rho", "eta", "max_iter", "outer_iters", "trials", "seed",
    "detectors", "alpha", "decay", "out_dir", "format_version",
};

double require_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) {
        throw Error("config key '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

double require_positive(const json& j, const std::string& key) {
    const double v = require_number(j, key);
    if (!(v > 0.0)) {
        throw Error("config key '" + key + "' must be positive");
    }
    return v;
}

int require_positive_int(const json& j, const std::string& key) {
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 1) {
        throw Error("config key '" + key + "' must be a positive integer");
    }
    return j.at(key).get<int>();
}

linalg::HermitianPd base_structure(int n) {
    if (n == 5) {
        return linalg::HermitianPd::trusted(0.44 * CMatrix::Identity(5, 5), 0.44);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    return linalg::HermitianPd::trusted(scale * CMatrix::Identity(n, n), scale);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RunManifest parse_config(const json& config, bool paper_scale) {
    if (!config.is_object()) {
        throw Error("config must be a JSON object");
    }
    for (const auto& [key, value] : config.items()) {
        (void)value;
        if (kKnownKeys.find(key) == kKnownKeys.end()) {
            throw Error("unknown config key: " + key);
        }
    }
    if (config.contains("format_version") && config.at("format_version") != json("1")) {
        throw Error("unsupported format_version");
    }
    if (!config.contains("scenario") || !config.at("scenario").is_string()) {
        throw Error("config requires a 'scenario' string");
    }

    const experiments::ScenarioName name =
        experiments::scenario_from_string(config.at("scenario").get<std::string>());
    experiments::Scenario sc = experiments::preset(name);
    if (!paper_scale) {
        experiments::apply_desk_scale(sc);
    }

    // Dimensions first: they decide the covariance structure.
    if (config.contains("n")) sc.subspace.n = require_positive_int(config, "n");
    if (config.contains("p")) sc.subspace.p = require_positive_int(config, "p");
    if (config.contains("t")) sc.subspace.t = require_positive_int(config, "t");
    sc.subspace.validate();

    RunManifest manifest{.scenario = std::move(sc)};
    experiments::Scenario& out = manifest.scenario;

    manifest.hetero_cov_applied =
        name == experiments::ScenarioName::HET || config.contains("alpha") || config.contains("decay");
    if (config.contains("alpha")) {
        manifest.alpha = require_number(config, "alpha");
    }
    if (config.contains("decay")) {
        manifest.decay = require_number(config, "decay");
    }
    if (config.contains("n") || config.contains("t")) {
        out.phi = CVector::Constant(
            out.subspace.t, Complex(1.0 / std::sqrt(static_cast<double>(out.subspace.t)), 0.0));
    }
    if (config.contains("n") || manifest.hetero_cov_applied) {
        out.noise.rs_base = base_structure(out.subspace.n);
        out.noise.r_test = manifest.hetero_cov_applied
                               ? model::heterogeneous_test_cov(out.noise.rs_base, manifest.alpha,
                                                               manifest.decay)
                               : out.noise.rs_base;
    }

    const bool has_sizes = config.contains("group_sizes");
    const bool has_scales = config.contains("group_scales");
    const bool has_k = config.contains("k");
    if (has_sizes) {
        if (!config.at("group_sizes").is_array() || config.at("group_sizes").empty()) {
            throw Error("config key 'group_sizes' must be a non-empty array");
        }
        std::vector<int> sizes;
        for (const auto& v : config.at("group_sizes")) {
            if (!v.is_number_integer() || v.get<long long>() < 1) {
                throw Error("config key 'group_sizes' must hold positive integers");
            }
            sizes.push_back(v.get<int>());
        }
        out.noise.group_sizes = std::move(sizes);
    }
    if (has_scales) {
        if (!config.at("group_scales").is_array() || config.at("group_scales").empty()) {
            throw Error("config key 'group_scales' must be a non-empty array");
        }
        std::vector<double> scales;
        for (const auto& v : config.at("group_scales")) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                throw Error("config key 'group_scales' must hold positive numbers");
            }
            scales.push_back(v.get<double>());
        }
        out.noise.group_scales = std::move(scales);
    }
    if (out.noise.group_sizes.size() != out.noise.group_scales.size()) {
        throw Error("group_sizes and group_scales lengths disagree");
    }
    if (has_k) {
        const int k = require_positive_int(config, "k");
        if (has_sizes) {
            if (out.noise.total_secondary() != k) {
                throw Error("config key 'k' disagrees with the sum of group_sizes");
            }
        } else {
            out.noise.group_sizes = experiments::regroup(out.noise.group_sizes, k);
        }
    }

    if (config.contains("sigma2_test")) out.noise.sigma2_test = require_positive(config, "sigma2_test");
    if (config.contains("snr_db")) out.snr_db = require_number(config, "snr_db");
    if (config.contains("epsilon")) {
        out.admm.epsilon = require_number(config, "epsilon");
        if (out.admm.epsilon < 0.0) {
            throw Error("config key 'epsilon' must be non-negative");
        }
    }
    if (config.contains("rho")) out.admm.rho = require_positive(config, "rho");
    if (config.contains("eta")) out.admm.eta = require_positive(config, "eta");
    if (config.contains("max_iter")) out.admm.max_iter = require_positive_int(config, "max_iter");
    if (config.contains("outer_iters")) out.admm.outer_iters = require_positive_int(config, "outer_iters");
    if (config.contains("trials")) out.trials = require_positive_int(config, "trials");
    if (config.contains("seed")) {
        if (!config.at("seed").is_number_integer() || config.at("seed").get<long long>() < 0) {
            throw Error("config key 'seed' must be a non-negative integer");
        }
        out.seed = config.at("seed").get<std::uint64_t>();
    }

    if (config.contains("detectors")) {
        if (!config.at("detectors").is_array() || config.at("detectors").empty()) {
            throw Error("config key 'detectors' must be a non-empty array");
        }
        manifest.detectors.clear();
        for (const auto& v : config.at("detectors")) {
            if (!v.is_string()) {
                throw Error("config key 'detectors' must hold strings");
            }
            const auto id = detectors::detector_from_string(v.get<std::string>());
            if (std::find(manifest.detectors.begin(), manifest.detectors.end(), id) !=
                manifest.detectors.end()) {
                throw Error("duplicate detector: " + v.get<std::string>());
            }
            manifest.detectors.push_back(id);
        }
    } else {
        manifest.detectors = {detectors::DetectorId::Asd, detectors::DetectorId::Amf,
                              detectors::DetectorId::AmfKnown, detectors::DetectorId::HeteroGlrt};
    }
    if (config.contains("out_dir")) {
        if (!config.at("out_dir").is_string() || config.at("out_dir").get<std::string>().empty()) {
            throw Error("config key 'out_dir' must be a non-empty string");
        }
        manifest.out_dir = config.at("out_dir").get<std::string>();
    }

    out.validate();
    return manifest;
}

RunManifest load_config_file(const std::string& path, bool paper_scale) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file: " + path);
    }
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw Error("config parse error: " + std::string(e.what()));
    }
    return parse_config(config, paper_scale);
}

json manifest_json(const RunManifest& manifest) {
    const experiments::Scenario& sc = manifest.scenario;
    json j;
    j["format_version"] = manifest.format_version;
    j["scenario"] = experiments::to_string(sc.name);
    j["n"] = sc.subspace.n;
    j["p"] = sc.subspace.p;
    j["t"] = sc.subspace.t;
    j["k"] = sc.noise.total_secondary();
    j["group_sizes"] = sc.noise.group_sizes;
    j["group_scales"] = sc.noise.group_scales;
    j["sigma2_test"] = sc.noise.sigma2_test;
    j["snr_db"] = sc.snr_db;
    j["epsilon"] = sc.admm.epsilon;
    j["rho"] = sc.admm.rho;
    j["eta"] = sc.admm.eta;
    j["max_iter"] = sc.admm.max_iter;
    j["outer_iters"] = sc.admm.outer_iters;
    j["trials"] = sc.trials;
    j["seed"] = sc.seed;
    json dets = json::array();
    for (const auto id : manifest.detectors) {
        dets.push_back(detectors::to_string(id));
    }
    j["detectors"] = std::move(dets);
    if (manifest.hetero_cov_applied) {
        j["alpha"] = manifest.alpha;
        j["decay"] = manifest.decay;
    }
    j["out_dir"] = manifest.out_dir;
    return j;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out << body;
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

}  // namespace

void write_outputs(const std::vector<DetectorResult>& results, const RunManifest& manifest) {
    const std::filesystem::path dir(manifest.out_dir);
    std::filesystem::create_directories(dir);

    std::string summary = "detector,auc,trials,failures\n";
    for (const DetectorResult& res : results) {
        const std::string id = detectors::to_string(res.id);

        std::string roc = "pfa,pd\n";
        for (const auto& pt : res.roc.points) {
            roc += format_double(pt.pfa);
            roc += ',';
            roc += format_double(pt.pd);
            roc += '\n';
        }
        write_file(dir / ("roc_" + id + ".csv"), roc);

        std::string stats = "hypothesis,value\n";
        for (const double v : res.samples.h0_values) {
            stats += "h0,";
            stats += format_double(v);
            stats += '\n';
        }
        for (const double v : res.samples.h1_values) {
            stats += "h1,";
            stats += format_double(v);
            stats += '\n';
        }
        write_file(dir / ("stats_" + id + ".csv"), stats);

        std::string hist = "hypothesis,bin_lo,bin_hi,count\n";
        const std::size_t bins = res.hist.h0_counts.size();
        const double width = bins > 0 ? (res.hist.hi - res.hist.lo) / static_cast<double>(bins) : 0.0;
        const auto hist_rows = [&](const char* label, const std::vector<long>& counts) {
            for (std::size_t i = 0; i < counts.size(); ++i) {
                hist += label;
                hist += ',';
                hist += format_double(res.hist.lo + width * static_cast<double>(i));
                hist += ',';
                hist += format_double(i + 1 == counts.size() ? res.hist.hi
                                                             : res.hist.lo + width * static_cast<double>(i + 1));
                hist += ',';
                hist += std::to_string(counts[i]);
                hist += '\n';
            }
        };
        hist_rows("h0", res.hist.h0_counts);
        hist_rows("h1", res.hist.h1_counts);
        write_file(dir / ("hist_" + id + ".csv"), hist);

        summary += id;
        summary += ',';
        summary += format_double(res.roc.auc);
        summary += ',';
        summary += std::to_string(res.samples.trials_requested);
        summary += ',';
        summary += std::to_string(res.samples.failures);
        summary += '\n';
    }
    write_file(dir / "summary.csv", summary);
    write_file(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

int run_campaign(const RunManifest& manifest, int threads) {
    std::vector<DetectorResult> results;
    bool aborted = false;
    for (const auto id : manifest.detectors) {
        try {
            DetectorResult res;
            res.id = id;
            res.samples = experiments::run_trials(manifest.scenario, id, threads);
            res.roc = experiments::empirical_roc(res.samples);
            res.hist = experiments::histogram(res.samples, 50);
            results.push_back(std::move(res));
        } catch (const std::exception& e) {
            std::cerr << "heterodet: detector " << detectors::to_string(id)
                      << " aborted: " << e.what() << "\n";
            aborted = true;
        }
    }
    write_outputs(results, manifest);

    std::printf("%-12s %-22s %8s %9s\n", "detector", "auc", "trials", "failures");
    for (const DetectorResult& res : results) {
        std::printf("%-12s %-22s %8d %9d\n", detectors::to_string(res.id).c_str(),
                    format_double(res.roc.auc).c_str(), res.samples.trials_requested,
                    res.samples.failures);
    }
    return aborted ? 1 : 0;
}

}  // namespace io
}  // namespace heterodet
