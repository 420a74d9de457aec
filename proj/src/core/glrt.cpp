#include "core/glrt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <string_view>

namespace heterodet {
namespace glrt {

namespace {

constexpr double kDivergenceNorm = 1e3;
constexpr double kLogStatClamp = 700.0;
constexpr int kMaxEtaRetries = 2;
constexpr double kSpanTol = 1e-14;

void warn(const std::string& msg) {
    std::cerr << "heterodet: warning: " << msg << "\n";
}

struct EigPd {
    CMatrix inverse;
    double log_det;
};

// Inverse and log-determinant of a Hermitian matrix that must be PD.
EigPd invert_pd(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(linalg::hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const auto& vals = solver.eigenvalues();
    if (!(vals.minCoeff() > 0.0)) {
        throw Error("not positive definite");
    }
    EigPd out;
    out.inverse = linalg::hermitian_part(solver.eigenvectors() *
                                         vals.cwiseInverse().asDiagonal() *
                                         solver.eigenvectors().adjoint());
    out.log_det = vals.array().log().sum();
    return out;
}

double log_det_pd(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(linalg::hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    if (!(solver.eigenvalues().minCoeff() > 0.0)) {
        throw Error("not positive definite");
    }
    return solver.eigenvalues().array().log().sum();
}

struct Repaired {
    CMatrix mat;
    CMatrix inverse;
    double floor = 0.0;
};

// One eigendecomposition yields the repaired iterate and its inverse.
// Mirrors linalg::pd_repair_rel exactly on the matrix part.
Repaired repair_with_inverse(const CMatrix& raw, double rel) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(linalg::hermitian_part(raw));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const double lmax = solver.eigenvalues().maxCoeff();
    const double floor = lmax > 0.0 ? rel * lmax : rel;
    const Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(floor);
    Repaired out;
    out.mat = linalg::hermitian_part(solver.eigenvectors() * vals.asDiagonal() *
                                     solver.eigenvectors().adjoint());
    out.inverse = linalg::hermitian_part(solver.eigenvectors() *
                                         vals.cwiseInverse().asDiagonal() *
                                         solver.eigenvectors().adjoint());
    out.floor = floor;
    return out;
}

double pos_part(double v) {
    return v > 0.0 ? v : 0.0;
}

CMatrix grad_r_impl(const CMatrix& r, const CMatrix& r_inv, const CMatrix& z, const CMatrix& u,
                    double gamma, double lambda, const AdmmParams& params, const CMatrix& rs) {
    const CMatrix diff_rs = r - rs;
    const double mp = pos_part(diff_rs.squaredNorm() - params.epsilon);
    const double mn = pos_part(r.squaredNorm() - 1.0);
    CMatrix g = r_inv;
    g += (4.0 * params.rho * mp * mp * mp + 4.0 * lambda * mp) * diff_rs;
    g += (4.0 * params.rho * mn * mn * mn + 4.0 * gamma * mn) * r;
    g += u;
    g += params.rho * (r - z);
    return g;
}

CMatrix grad_z_impl(const CMatrix& z, const CMatrix& z_inv, const CMatrix& r, const CMatrix& u,
                    const AdmmParams& params, const CMatrix& resid_outer, double sigma2) {
    CMatrix g = -(z_inv * resid_outer * z_inv) / sigma2;
    g += params.rho * (z - r);
    g -= u;
    return g;
}

// Shared by estimate_phi / estimate_beta.
CVector whitened_gram_coeff(const CVector& y, const CMatrix& d, const linalg::HermitianPd& r) {
    if (y.size() != r.dim() || d.rows() != r.dim() || d.cols() < 1) {
        throw Error("dimensions disagree");
    }
    const CMatrix w = linalg::inv_sqrt(r);
    const CMatrix d_bar = w * d;
    const CVector y_bar = w * y;
    return linalg::gram_solve(d_bar, d_bar.adjoint() * y_bar);
}

}  // namespace

void AdmmParams::validate() const {
    if (!(epsilon >= 0.0)) throw Error("epsilon must be non-negative");
    if (!(rho > 0.0)) throw Error("rho must be positive");
    if (!(eta > 0.0)) throw Error("eta must be positive");
    if (max_iter < 1) throw Error("max_iter must be positive");
    if (!(pd_floor > 0.0)) throw Error("pd_floor must be positive");
    if (!(primal_tol >= 0.0)) throw Error("primal_tol must be non-negative");
    if (outer_iters < 1) throw Error("outer_iters must be positive");
}

CMatrix weighted_sample_cov(const SampleGroups& groups, const std::vector<double>& scales) {
    if (groups.empty() || groups.size() != scales.size()) {
        throw Error("groups and scales must be non-empty and of equal length");
    }
    Eigen::Index n = -1;
    long total = 0;
    for (const auto& group : groups) {
        for (const CVector& x : group) {
            if (n < 0) n = x.size();
            if (x.size() != n) throw Error("sample dimensions disagree");
            ++total;
        }
    }
    if (total == 0) {
        throw Error("insufficient secondary data");
    }
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (!(scales[j] > 0.0)) {
            throw Error("group scales must be positive");
        }
        const double w = 1.0 / scales[j];
        for (const CVector& x : groups[j]) {
            acc.noalias() += w * (x * x.adjoint());
        }
    }
    return acc / static_cast<double>(total);
}

std::vector<double> estimate_group_scales(const SampleGroups& groups,
                                          const linalg::HermitianPd& rs, double scale_floor) {
    if (groups.empty()) {
        throw Error("insufficient secondary data");
    }
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(rs.matrix()));
    if (llt.info() != Eigen::Success) {
        throw Error("not positive definite");
    }
    const double n = static_cast<double>(rs.dim());
    std::vector<double> scales(groups.size());
    for (std::size_t j = 0; j < groups.size(); ++j) {
        double acc = 0.0;
        for (const CVector& x : groups[j]) {
            acc += x.dot(llt.solve(x)).real();
        }
        const double count = static_cast<double>(groups[j].size());
        double s = count > 0.0 ? acc / (n * count) : 0.0;
        if (s < scale_floor) {
            warn("group " + std::to_string(j) + " noise power clamped to floor (degenerate group)");
            s = scale_floor;
        }
        scales[j] = s;
    }
    return scales;
}

SecondaryEstimate estimate_rs_alternating(const SampleGroups& groups, double tol,
                                          int max_alt_iters, double pd_floor_rel) {
    if (groups.empty()) {
        throw Error("insufficient secondary data");
    }
    long total = 0;
    Eigen::Index n = -1;
    for (const auto& group : groups) {
        for (const CVector& x : group) {
            if (n < 0) n = x.size();
            ++total;
        }
    }
    if (total == 0) {
        throw Error("insufficient secondary data");
    }
    if (total < n) {
        warn("fewer secondary samples than the observation dimension; structure estimate is floored");
    }

    const auto normalized = [](const linalg::HermitianPd& m) {
        const double norm = linalg::frobenius(m.matrix());
        return linalg::HermitianPd::trusted(m.matrix() / norm, m.floor() / norm);
    };

    std::vector<double> scales(groups.size(), 1.0);
    CMatrix pooled = weighted_sample_cov(groups, scales);
    if (!(linalg::frobenius(pooled) > 0.0)) {
        throw Error("insufficient secondary data");
    }
    SecondaryEstimate out{normalized(linalg::pd_repair_rel(pooled, pd_floor_rel)), scales, 0};
    for (int it = 1; it <= max_alt_iters; ++it) {
        out.iterations = it;
        out.group_scales = estimate_group_scales(groups, out.rs_hat);
        const CMatrix s_w = weighted_sample_cov(groups, out.group_scales);
        linalg::HermitianPd next = normalized(linalg::pd_repair_rel(s_w, pd_floor_rel));
        const double delta = linalg::frobenius(next.matrix() - out.rs_hat.matrix());
        out.rs_hat = std::move(next);
        if (delta < tol) {
            break;
        }
    }
    return out;
}

CVector estimate_phi(const CVector& y, const CMatrix& b, const linalg::HermitianPd& r) {
    return whitened_gram_coeff(y, b, r);
}

CVector estimate_beta(const CVector& y, const CMatrix& c, const linalg::HermitianPd& r) {
    return whitened_gram_coeff(y, c, r);
}

double estimate_sigma2(const CVector& y, const CMatrix& d, const linalg::HermitianPd& r,
                       double floor) {
    if (y.size() != r.dim() || d.rows() != r.dim()) {
        throw Error("dimensions disagree");
    }
    const CMatrix w = linalg::inv_sqrt(r);
    const CVector y_bar = w * y;
    const double q = (linalg::complement_projector(w * d) * y_bar).squaredNorm();
    double s = q / static_cast<double>(y.size());
    if (s < floor) {
        warn("profiled noise power clamped to floor");
        s = floor;
    }
    return s;
}

double augmented_lagrangian(const AdmmState& state, const AdmmParams& params,
                            const CMatrix& resid_outer, double sigma2, const CMatrix& rs) {
    if (!(sigma2 > 0.0)) {
        throw Error("sigma2 must be positive");
    }
    const EigPd z = invert_pd(state.z);
    const double mp = pos_part((state.r - rs).squaredNorm() - params.epsilon);
    const double mn = pos_part(state.r.squaredNorm() - 1.0);
    const CMatrix consensus = state.r - state.z;
    double l = log_det_pd(state.r);
    l += (z.inverse * resid_outer).trace().real() / sigma2;
    l += 0.5 * params.rho * (mp * mp * mp * mp + mn * mn * mn * mn);
    l += state.lambda * mp * mp + state.gamma * mn * mn;
    l += 0.5 * params.rho * consensus.squaredNorm();
    l += (state.u * consensus).trace().real();
    return l;
}

CMatrix lagrangian_grad_r(const AdmmState& state, const AdmmParams& params, const CMatrix& rs) {
    const EigPd r = invert_pd(state.r);
    return grad_r_impl(state.r, r.inverse, state.z, state.u, state.gamma, state.lambda, params,
                       rs);
}

CMatrix lagrangian_grad_z(const AdmmState& state, const AdmmParams& params,
                          const CMatrix& resid_outer, double sigma2) {
    if (!(sigma2 > 0.0)) {
        throw Error("sigma2 must be positive");
    }
    const EigPd z = invert_pd(state.z);
    return grad_z_impl(state.z, z.inverse, state.r, state.u, params, resid_outer, sigma2);
}

namespace {

constexpr const char* kDivergedMessage = "ADMM diverged; reduce eta";

linalg::HermitianPd admm_attempt(const CMatrix& m, const linalg::HermitianPd& rs, double sigma2,
                                 const AdmmParams& params, const AdmmObserver& observer) {
    const CMatrix& rs_mat = rs.matrix();

    AdmmState state;
    state.r = rs_mat;
    state.z = rs_mat;
    state.u = CMatrix::Zero(rs.dim(), rs.dim());
    CMatrix r_inv = invert_pd(state.r).inverse;
    CMatrix z_inv = r_inv;
    double floor = rs.floor();
    if (observer) {
        observer(state);
    }

    for (int t = 0; t < params.max_iter; ++t) {
        const CMatrix g_r = grad_r_impl(state.r, r_inv, state.z, state.u, state.gamma,
                                        state.lambda, params, rs_mat);
        Repaired r_next = repair_with_inverse(state.r - params.eta * g_r, params.pd_floor);

        const CMatrix g_z = grad_z_impl(state.z, z_inv, r_next.mat, state.u, params, m, sigma2);
        Repaired z_next = repair_with_inverse(state.z - params.eta * g_z, params.pd_floor);

        const double step = std::max((r_next.mat - state.r).norm(), (z_next.mat - state.z).norm());

        state.u += params.rho * (r_next.mat - z_next.mat);
        const double mp = pos_part((r_next.mat - rs_mat).squaredNorm() - params.epsilon);
        const double mn = pos_part(r_next.mat.squaredNorm() - 1.0);
        state.lambda += params.rho * mp * mp;
        state.gamma += params.rho * mn * mn;

        state.r = std::move(r_next.mat);
        state.z = std::move(z_next.mat);
        r_inv = std::move(r_next.inverse);
        z_inv = std::move(z_next.inverse);
        floor = r_next.floor;
        state.iter = t + 1;
        if (observer) {
            observer(state);
        }

        const double r_norm = state.r.norm();
        if (!(r_norm <= kDivergenceNorm)) {
            throw Error(kDivergedMessage);
        }
        if (params.primal_tol > 0.0 && (state.r - state.z).norm() < params.primal_tol &&
            step < params.primal_tol) {
            break;
        }
    }
    return linalg::HermitianPd::trusted(state.r, floor);
}

}  // namespace

linalg::HermitianPd admm_estimate_r(const CVector& y, const CMatrix& d, const CVector& coeff,
                                    double sigma2, const linalg::HermitianPd& rs,
                                    const AdmmParams& params, const AdmmObserver& observer) {
    params.validate();
    if (y.size() != rs.dim() || d.rows() != rs.dim() || d.cols() != coeff.size()) {
        throw Error("dimensions disagree");
    }
    if (!(sigma2 > 0.0)) {
        throw Error("sigma2 must be positive");
    }
    const CVector resid = y - d * coeff;
    const CMatrix m = resid * resid.adjoint();

    // The log-det term keeps shrinking eigenvalues until the repair floor turns the
    // Z-step's Z^{-1}MZ^{-1} into a catapult, so large steps can blow past the
    // divergence guard. The guard's own remedy is to reduce eta; retry with eta/10.
    AdmmParams attempt = params;
    for (int tries = 0;; ++tries) {
        try {
            return admm_attempt(m, rs, sigma2, attempt, observer);
        } catch (const Error& e) {
            if (tries >= kMaxEtaRetries || std::string_view(e.what()) != kDivergedMessage) {
                throw;
            }
            attempt.eta *= 0.1;
            static std::atomic<bool> noticed{false};
            if (!noticed.exchange(true)) {
                warn("ADMM diverged; retrying with a 10x smaller step (further notices suppressed)");
            }
        }
    }
}

double assemble_log_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                              const linalg::HermitianPd& r0, const linalg::HermitianPd& r1) {
    const Eigen::Index n = y.size();
    if (h.rows() != n || b.rows() != n || r0.dim() != n || r1.dim() != n) {
        throw Error("dimensions disagree");
    }
    const CMatrix w0 = linalg::inv_sqrt(r0);
    const CVector y0 = w0 * y;
    const double q0 = (linalg::complement_projector(w0 * b) * y0).squaredNorm();

    const CMatrix w1 = linalg::inv_sqrt(r1);
    CMatrix c(n, h.cols() + b.cols());
    c << h, b;
    const CVector y1 = w1 * y;
    const double q1 = (linalg::complement_projector(w1 * c) * y1).squaredNorm();

    // A vector sitting in the H0 span leaves a roundoff-sized q0, never an
    // exact zero, so that check is relative. q1 may be legitimately tiny
    // relative to a strong signal (the statistic is then clamped, not an
    // error); only an exact zero is degenerate there.
    if (!(y0.squaredNorm() > 0.0) || q0 < kSpanTol * y0.squaredNorm() || !(q1 > 0.0)) {
        throw Error("test vector lies in the fitted subspace");
    }
    const double two_n = 2.0 * static_cast<double>(n);
    return two_n * (std::log(q0) - std::log(q1)) + log_det_pd(r0.matrix()) -
           log_det_pd(r1.matrix());
}

namespace {

linalg::HermitianPd refine_covariance(const CVector& y, const CMatrix& d,
                                      const SecondaryEstimate& sec, const AdmmParams& params) {
    linalg::HermitianPd r = sec.rs_hat;
    for (int pass = 0; pass < params.outer_iters; ++pass) {
        const CVector coeff = whitened_gram_coeff(y, d, r);
        const double sigma2 = estimate_sigma2(y, d, r);
        r = admm_estimate_r(y, d, coeff, sigma2, sec.rs_hat, params);
    }
    return r;
}

}  // namespace

double hetero_glrt_log_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                                 const SampleGroups& secondary, const AdmmParams& params) {
    params.validate();
    const SecondaryEstimate sec = estimate_rs_alternating(secondary);
    const linalg::HermitianPd r0 = refine_covariance(y, b, sec, params);
    CMatrix c(h.rows(), h.cols() + b.cols());
    c << h, b;
    const linalg::HermitianPd r1 = refine_covariance(y, c, sec, params);
    return assemble_log_statistic(y, h, b, r0, r1);
}

double hetero_glrt_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                             const SampleGroups& secondary, const AdmmParams& params) {
    return std::exp(std::min(hetero_glrt_log_statistic(y, h, b, secondary, params),
                             kLogStatClamp));
}

}  // namespace glrt
}  // namespace heterodet
