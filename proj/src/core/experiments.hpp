#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/detectors.hpp"
#include "core/glrt.hpp"
#include "core/model.hpp"

namespace heterodet {
namespace experiments {

// HE: matched covariance, plentiful secondary data. PHE: matched structure,
// mismatched power, scarce data. NSPHE: two secondary groups at different
// powers. HET: NSPHE plus a structurally different test-cell covariance and a
// nonzero proximity budget. Custom: HE defaults meant to be overridden.
enum class ScenarioName { HE, PHE, NSPHE, HET, Custom };

std::string to_string(ScenarioName name);
ScenarioName scenario_from_string(const std::string& name);

struct Scenario {
    ScenarioName name;
    model::SubspaceSpec subspace;
    model::NoiseSpec noise;
    double snr_db;
    glrt::AdmmParams admm;
    int trials;
    std::uint64_t seed;
    // Interference coordinates, dimension t; defaults to unit-norm all-ones.
    CVector phi;

    void validate() const;
};

Scenario preset(ScenarioName name);

// Shrinks a preset to interactive cost: trials capped at 500 and the total
// secondary count capped at 100 (group sizes rescaled proportionally).
// Presets already at or below the caps are unchanged.
void apply_desk_scale(Scenario& scenario);

// Rescale group sizes to sum to k_target, preserving proportions; every group
// keeps at least one sample.
std::vector<int> regroup(const std::vector<int>& sizes, int k_target);

// Paired detector outputs. Trial i of the null and alternative runs shares
// one derived noise stream, so h0_values[i] and h1_values[i] differ only by
// the injected signal. Failed trials are dropped pairwise.
struct StatSamples {
    detectors::DetectorId id = detectors::DetectorId::Amf;
    std::vector<double> h0_values;
    std::vector<double> h1_values;
    int failures = 0;
    int trials_requested = 0;
};

// Runs scenario.trials paired draws of the given detector. threads = 0 picks
// the hardware default; the HETERODET_THREADS environment variable (when > 0)
// caps the worker count either way. Throws when more than 1% of trials fail.
StatSamples run_trials(const Scenario& scenario, detectors::DetectorId id, int threads = 0);

struct RocPoint {
    double pfa = 0.0;
    double pd = 0.0;
};

// Points swept over the descending union of observed statistics, prepended
// with (0,0); monotone in both coordinates and ending at (1,1). auc is the
// trapezoid integral, which equals the Mann-Whitney statistic
// P(h1 > h0) + P(h1 = h0)/2 on the same samples.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

RocCurve empirical_roc(const StatSamples& samples);

// True when a.auc >= b.auc + margin.
bool auc_pair_test(const RocCurve& a, const RocCurve& b, double margin);

// Equal-width bins over the pooled [min, max] range; a degenerate range puts
// every sample into bin 0.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> h0_counts;
    std::vector<long> h1_counts;
};

Histogram histogram(const StatSamples& samples, int bins);

// Worker count actually used for `requested` (0 = auto), after the
// HETERODET_THREADS cap.
int resolve_thread_count(int requested);

}  // namespace experiments
}  // namespace heterodet
