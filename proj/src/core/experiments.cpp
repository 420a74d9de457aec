#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "core/rng.hpp"

namespace heterodet {
namespace experiments {

namespace {

linalg::HermitianPd base_structure(int n) {
    // The reference geometry uses 0.44 I_5 (Frobenius norm 0.9839); other
    // dimensions fall back to the exactly unit-norm I_n / sqrt(n).
    if (n == 5) {
        return linalg::HermitianPd::trusted(0.44 * CMatrix::Identity(5, 5), 0.44);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    return linalg::HermitianPd::trusted(scale * CMatrix::Identity(n, n), scale);
}

CVector default_phi(int t) {
    return CVector::Constant(t, Complex(1.0 / std::sqrt(static_cast<double>(t)), 0.0));
}

}  // namespace

std::string to_string(ScenarioName name) {
    switch (name) {
        case ScenarioName::HE: return "HE";
        case ScenarioName::PHE: return "PHE";
        case ScenarioName::NSPHE: return "NSPHE";
        case ScenarioName::HET: return "HET";
        case ScenarioName::Custom: return "CUSTOM";
    }
    throw Error("unknown scenario name");
}

ScenarioName scenario_from_string(const std::string& name) {
    if (name == "HE") return ScenarioName::HE;
    if (name == "PHE") return ScenarioName::PHE;
    if (name == "NSPHE") return ScenarioName::NSPHE;
    if (name == "HET") return ScenarioName::HET;
    if (name == "CUSTOM") return ScenarioName::Custom;
    throw Error("unknown scenario: " + name);
}

void Scenario::validate() const {
    subspace.validate();
    noise.validate();
    admm.validate();
    if (noise.rs_base.dim() != subspace.n) {
        throw Error("covariance dimension disagrees with the subspace spec");
    }
    if (trials < 1) {
        throw Error("trials must be positive");
    }
    if (phi.size() != subspace.t) {
        throw Error("phi dimension disagrees with the subspace spec");
    }
}

Scenario preset(ScenarioName name) {
    const model::SubspaceSpec sub{5, 2, 1};
    const linalg::HermitianPd rs = base_structure(sub.n);

    glrt::AdmmParams admm;
    admm.epsilon = 0.0;
    admm.rho = 2.0;
    admm.eta = 1e-4;
    admm.max_iter = 2000;

    Scenario sc{name, sub,
                model::NoiseSpec{rs, rs, 5.0, {500}, {5.0}},
                8.0, admm, 2000, 1234, default_phi(sub.t)};

    switch (name) {
        case ScenarioName::HE:
        case ScenarioName::Custom:
            break;
        case ScenarioName::PHE:
            sc.noise.sigma2_test = 20.0;
            sc.noise.group_sizes = {40};
            break;
        case ScenarioName::NSPHE:
            sc.noise.sigma2_test = 30.0;
            sc.noise.group_sizes = {250, 250};
            sc.noise.group_scales = {5.0, 15.0};
            break;
        case ScenarioName::HET:
            sc.noise.sigma2_test = 30.0;
            sc.noise.group_sizes = {250, 250};
            sc.noise.group_scales = {5.0, 15.0};
            sc.noise.r_test = model::heterogeneous_test_cov(rs, 2.0, 0.95);
            sc.admm.epsilon = 0.2;
            break;
    }
    return sc;
}

std::vector<int> regroup(const std::vector<int>& sizes, int k_target) {
    if (sizes.empty() || k_target < static_cast<int>(sizes.size())) {
        throw Error("cannot regroup: need at least one sample per group");
    }
    const double total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), 0L));
    std::vector<int> out(sizes.size());
    int assigned = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        out[j] = std::max(1, static_cast<int>(std::floor(k_target * sizes[j] / total)));
        assigned += out[j];
    }
    // Distribute the rounding remainder, front groups first.
    std::size_t j = 0;
    while (assigned < k_target) {
        ++out[j % out.size()];
        ++assigned;
        ++j;
    }
    while (assigned > k_target) {
        if (out[j % out.size()] > 1) {
            --out[j % out.size()];
            --assigned;
        }
        ++j;
    }
    return out;
}

void apply_desk_scale(Scenario& scenario) {
    scenario.trials = std::min(scenario.trials, 500);
    const int k = scenario.noise.total_secondary();
    if (k > 100) {
        scenario.noise.group_sizes = regroup(scenario.noise.group_sizes, 100);
    }
}

int resolve_thread_count(int requested) {
    int count = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (count < 1) {
        count = 1;
    }
    if (const char* env = std::getenv("HETERODET_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            count = std::min(count, cap);
        }
    }
    return count;
}

namespace {

double evaluate_detector(detectors::DetectorId id, const model::Dataset& data, const CMatrix& h,
                         const CMatrix& b, const Scenario& scenario) {
    switch (id) {
        case detectors::DetectorId::Asd:
        case detectors::DetectorId::Amf: {
            std::vector<CVector> pooled;
            pooled.reserve(static_cast<std::size_t>(scenario.noise.total_secondary()));
            for (const auto& group : data.secondary) {
                pooled.insert(pooled.end(), group.begin(), group.end());
            }
            const linalg::HermitianPd s = linalg::pd_repair_rel(linalg::sample_covariance(pooled));
            return id == detectors::DetectorId::Asd ? detectors::asd_statistic(data.y, h, b, s)
                                                    : detectors::amf_statistic(data.y, h, b, s);
        }
        case detectors::DetectorId::AmfKnown:
            return detectors::amf_known(data.y, h, b,
                                        scenario.noise.r_test.scaled(scenario.noise.sigma2_test));
        case detectors::DetectorId::HeteroGlrt:
            return glrt::hetero_glrt_statistic(data.y, h, b, data.secondary, scenario.admm);
    }
    throw Error("unknown detector id");
}

}  // namespace

StatSamples run_trials(const Scenario& scenario, detectors::DetectorId id, int threads) {
    scenario.validate();
    const auto [h, b] = model::build_subspaces(scenario.subspace);
    const CVector theta = model::theta_for_snr(h, scenario.noise.r_test,
                                               scenario.noise.sigma2_test, scenario.snr_db);

    const int trials = scenario.trials;
    std::vector<double> h0(trials, 0.0);
    std::vector<double> h1(trials, 0.0);
    std::vector<char> ok(trials, 0);

    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= trials) {
                return;
            }
            const std::uint64_t seed_i = derive_stream_seed(scenario.seed, static_cast<std::uint64_t>(i));
            try {
                Rng rng0(seed_i);
                const model::Dataset d0 = model::generate_dataset(
                    scenario.subspace, scenario.noise, theta, scenario.phi,
                    model::Hypothesis::Null, rng0);
                Rng rng1(seed_i);
                const model::Dataset d1 = model::generate_dataset(
                    scenario.subspace, scenario.noise, theta, scenario.phi,
                    model::Hypothesis::Alt, rng1);
                const double v0 = evaluate_detector(id, d0, h, b, scenario);
                const double v1 = evaluate_detector(id, d1, h, b, scenario);
                h0[i] = v0;
                h1[i] = v1;
                ok[i] = 1;
            } catch (const std::exception&) {
                ok[i] = 0;
            }
        }
    };

    const int worker_count = std::min(resolve_thread_count(threads), trials);
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int w = 0; w < worker_count; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    StatSamples out;
    out.id = id;
    out.trials_requested = trials;
    for (int i = 0; i < trials; ++i) {
        if (ok[i]) {
            out.h0_values.push_back(h0[i]);
            out.h1_values.push_back(h1[i]);
        } else {
            ++out.failures;
        }
    }
    if (out.failures * 100 > trials) {
        throw Error("more than 1% of trials failed for detector " + detectors::to_string(id));
    }
    return out;
}

RocCurve empirical_roc(const StatSamples& samples) {
    if (samples.h0_values.empty() || samples.h1_values.empty()) {
        throw Error("empirical ROC needs samples under both hypotheses");
    }
    std::vector<double> h0 = samples.h0_values;
    std::vector<double> h1 = samples.h1_values;
    std::sort(h0.begin(), h0.end());
    std::sort(h1.begin(), h1.end());

    std::vector<double> thresholds;
    thresholds.reserve(h0.size() + h1.size());
    thresholds.insert(thresholds.end(), h0.begin(), h0.end());
    thresholds.insert(thresholds.end(), h1.begin(), h1.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double n0 = static_cast<double>(h0.size());
    const double n1 = static_cast<double>(h1.size());
    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    for (const double tau : thresholds) {
        // Count of values >= tau in a sorted ascending vector.
        const double pfa = static_cast<double>(h0.end() - std::lower_bound(h0.begin(), h0.end(), tau)) / n0;
        const double pd = static_cast<double>(h1.end() - std::lower_bound(h1.begin(), h1.end(), tau)) / n1;
        const RocPoint pt{pfa, pd};
        if (pt.pfa != curve.points.back().pfa || pt.pd != curve.points.back().pd) {
            curve.points.push_back(pt);
        }
    }
    if (curve.points.back().pfa != 1.0 || curve.points.back().pd != 1.0) {
        curve.points.push_back({1.0, 1.0});
    }

    double auc = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        auc += (b.pfa - a.pfa) * 0.5 * (b.pd + a.pd);
    }
    curve.auc = auc;
    return curve;
}

bool auc_pair_test(const RocCurve& a, const RocCurve& b, double margin) {
    return a.auc >= b.auc + margin;
}

Histogram histogram(const StatSamples& samples, int bins) {
    if (bins < 1) {
        throw Error("histogram needs at least one bin");
    }
    if (samples.h0_values.empty() || samples.h1_values.empty()) {
        throw Error("histogram needs samples under both hypotheses");
    }
    Histogram out;
    out.lo = std::min(*std::min_element(samples.h0_values.begin(), samples.h0_values.end()),
                      *std::min_element(samples.h1_values.begin(), samples.h1_values.end()));
    out.hi = std::max(*std::max_element(samples.h0_values.begin(), samples.h0_values.end()),
                      *std::max_element(samples.h1_values.begin(), samples.h1_values.end()));
    out.h0_counts.assign(bins, 0);
    out.h1_counts.assign(bins, 0);
    const double width = out.hi - out.lo;
    const auto bin_of = [&](double v) {
        if (!(width > 0.0)) {
            return 0;
        }
        const int idx = static_cast<int>(std::floor((v - out.lo) / width * bins));
        return std::clamp(idx, 0, bins - 1);
    };
    for (const double v : samples.h0_values) {
        ++out.h0_counts[bin_of(v)];
    }
    for (const double v : samples.h1_values) {
        ++out.h1_counts[bin_of(v)];
    }
    return out;
}

}  // namespace experiments
}  // namespace heterodet
