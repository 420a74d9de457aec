#include "heterodet.h"

#include <cstring>
#include <new>
#include <string>

#include "core/detectors.hpp"
#include "core/experiments.hpp"
#include "core/glrt.hpp"
#include "core/io.hpp"

namespace {

using namespace heterodet;

thread_local std::string g_last_error;

heterodet_status fail(heterodet_status code, const char* msg) {
    g_last_error = msg;
    return code;
}

// Exceptions map to status codes; Error carries contract messages, anything
// else is reported as-is.
template <typename Fn>
heterodet_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return HETERODET_OK;
    } catch (const Error& e) {
        return fail(HETERODET_ERR_NUMERIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(HETERODET_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(HETERODET_ERR_INVALID, e.what());
    }
}

CVector to_vector(const double* data, int32_t n) {
    CVector v(n);
    for (int32_t k = 0; k < n; ++k) {
        v(k) = Complex(data[2 * k], data[2 * k + 1]);
    }
    return v;
}

CMatrix to_matrix(const double* data, int32_t rows, int32_t cols) {
    CMatrix m(rows, cols);
    for (int32_t c = 0; c < cols; ++c) {
        for (int32_t r = 0; r < rows; ++r) {
            const int32_t k = 2 * (c * rows + r);
            m(r, c) = Complex(data[k], data[k + 1]);
        }
    }
    return m;
}

bool bad_detector_args(const double* y, int32_t n, const double* h, int32_t p, const double* b,
                       int32_t t, const double* cov, const double* out) {
    return y == nullptr || h == nullptr || b == nullptr || cov == nullptr || out == nullptr ||
           n < 2 || p < 1 || t < 1;
}

glrt::AdmmParams from_c(const heterodet_admm_params& p) {
    glrt::AdmmParams out;
    out.epsilon = p.epsilon;
    out.rho = p.rho;
    out.eta = p.eta;
    out.max_iter = p.max_iter;
    out.pd_floor = p.pd_floor;
    out.primal_tol = p.primal_tol;
    out.outer_iters = p.outer_iters;
    return out;
}

}  // namespace

struct heterodet_manifest {
    heterodet::io::RunManifest manifest;
};

extern "C" {

const char* heterodet_version(void) {
    return "1.0.0";
}

const char* heterodet_last_error(void) {
    return g_last_error.c_str();
}

heterodet_admm_params heterodet_admm_params_default(void) {
    const glrt::AdmmParams d;
    heterodet_admm_params out;
    out.epsilon = d.epsilon;
    out.rho = d.rho;
    out.eta = d.eta;
    out.max_iter = d.max_iter;
    out.pd_floor = d.pd_floor;
    out.primal_tol = d.primal_tol;
    out.outer_iters = d.outer_iters;
    return out;
}

heterodet_status heterodet_asd(const double* y, int32_t n, const double* h, int32_t p,
                               const double* b, int32_t t, const double* cov, double* out) {
    if (bad_detector_args(y, n, h, p, b, t, cov, out)) {
        return fail(HETERODET_ERR_INVALID, "invalid detector arguments");
    }
    return guarded([&] {
        const auto s = linalg::pd_repair_rel(to_matrix(cov, n, n));
        *out = detectors::asd_statistic(to_vector(y, n), to_matrix(h, n, p), to_matrix(b, n, t), s);
    });
}

heterodet_status heterodet_amf(const double* y, int32_t n, const double* h, int32_t p,
                               const double* b, int32_t t, const double* cov, double* out) {
    if (bad_detector_args(y, n, h, p, b, t, cov, out)) {
        return fail(HETERODET_ERR_INVALID, "invalid detector arguments");
    }
    return guarded([&] {
        const auto s = linalg::pd_repair_rel(to_matrix(cov, n, n));
        *out = detectors::amf_statistic(to_vector(y, n), to_matrix(h, n, p), to_matrix(b, n, t), s);
    });
}

heterodet_status heterodet_amf_known(const double* y, int32_t n, const double* h, int32_t p,
                                     const double* b, int32_t t, const double* true_cov,
                                     double* out) {
    return heterodet_amf(y, n, h, p, b, t, true_cov, out);
}

heterodet_status heterodet_hetero_glrt(const double* y, int32_t n, const double* h, int32_t p,
                                       const double* b, int32_t t, const double* secondary,
                                       const int32_t* group_sizes, int32_t num_groups,
                                       const heterodet_admm_params* params, double* out) {
    if (y == nullptr || h == nullptr || b == nullptr || secondary == nullptr ||
        group_sizes == nullptr || out == nullptr || n < 2 || p < 1 || t < 1 || num_groups < 1) {
        return fail(HETERODET_ERR_INVALID, "invalid detector arguments");
    }
    for (int32_t j = 0; j < num_groups; ++j) {
        if (group_sizes[j] < 1) {
            return fail(HETERODET_ERR_INVALID, "group sizes must be positive");
        }
    }
    return guarded([&] {
        glrt::SampleGroups groups(num_groups);
        int32_t offset = 0;
        for (int32_t j = 0; j < num_groups; ++j) {
            groups[j].reserve(group_sizes[j]);
            for (int32_t k = 0; k < group_sizes[j]; ++k, ++offset) {
                groups[j].push_back(to_vector(secondary + 2 * offset * n, n));
            }
        }
        const glrt::AdmmParams cpp_params = params ? from_c(*params) : glrt::AdmmParams{};
        *out = glrt::hetero_glrt_statistic(to_vector(y, n), to_matrix(h, n, p),
                                           to_matrix(b, n, t), groups, cpp_params);
    });
}

heterodet_status heterodet_empirical_auc(const double* h0, int32_t n0, const double* h1,
                                         int32_t n1, double* out) {
    if (h0 == nullptr || h1 == nullptr || out == nullptr || n0 < 1 || n1 < 1) {
        return fail(HETERODET_ERR_INVALID, "invalid AUC arguments");
    }
    return guarded([&] {
        experiments::StatSamples samples;
        samples.h0_values.assign(h0, h0 + n0);
        samples.h1_values.assign(h1, h1 + n1);
        *out = experiments::empirical_roc(samples).auc;
    });
}

heterodet_status heterodet_manifest_parse(const char* json_text, int32_t paper_scale,
                                          heterodet_manifest** out) {
    if (json_text == nullptr || out == nullptr) {
        return fail(HETERODET_ERR_INVALID, "invalid manifest arguments");
    }
    *out = nullptr;
    // Malformed configuration is an invalid-argument failure, not a numeric one.
    try {
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::exception& e) {
            throw Error("config parse error: " + std::string(e.what()));
        }
        auto manifest = io::parse_config(config, paper_scale != 0);
        *out = new heterodet_manifest{std::move(manifest)};
        g_last_error.clear();
        return HETERODET_OK;
    } catch (const std::bad_alloc&) {
        return fail(HETERODET_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(HETERODET_ERR_INVALID, e.what());
    }
}

heterodet_status heterodet_manifest_to_json(const heterodet_manifest* manifest, char** out) {
    if (manifest == nullptr || out == nullptr) {
        return fail(HETERODET_ERR_INVALID, "invalid manifest arguments");
    }
    *out = nullptr;
    return guarded([&] {
        const std::string text = io::manifest_json(manifest->manifest).dump(2) + "\n";
        char* buf = new char[text.size() + 1];
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void heterodet_string_free(char* s) {
    delete[] s;
}

void heterodet_manifest_free(heterodet_manifest* manifest) {
    delete manifest;
}

heterodet_status heterodet_campaign_run(const heterodet_manifest* manifest, int32_t threads) {
    if (manifest == nullptr) {
        return fail(HETERODET_ERR_INVALID, "invalid manifest arguments");
    }
    int rc = 0;
    const heterodet_status guard = guarded([&] { rc = io::run_campaign(manifest->manifest, threads); });
    if (guard != HETERODET_OK) {
        return guard;
    }
    if (rc != 0) {
        // run_campaign already logged the per-detector reason to stderr.
        return fail(HETERODET_ERR_NUMERIC, "one or more detector runs aborted");
    }
    return HETERODET_OK;
}

}  // extern "C"
