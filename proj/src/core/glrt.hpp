#pragma once

#include <functional>
#include <vector>

#include "core/linalg.hpp"

namespace heterodet {
namespace glrt {

// Secondary data grouped by noise-power region.
using SampleGroups = std::vector<std::vector<CVector>>;

struct AdmmParams {
    // Budget on ||R - Rs||_F^2; 0 pins the estimate to the secondary structure.
    double epsilon = 0.0;
    // Penalty weight shared by the constraint and consensus terms.
    double rho = 2.0;
    // Gradient step size for both primal updates.
    double eta = 1e-4;
    int max_iter = 2000;
    // Relative eigenvalue floor applied when repairing iterates. Kept well
    // above machine scale: the log-det force pushes trailing eigenvalues onto
    // the floor, and a floor much below eta * ||M|| / sigma2 turns the next
    // Z^{-1} M Z^{-1} evaluation into a step large enough to diverge.
    double pd_floor = 1e-2;
    // Early stop once ||R - Z||_F and the step change are both below this;
    // 0 disables early stopping (always runs max_iter steps).
    double primal_tol = 1e-6;
    // Coefficient / noise-power / covariance refinement passes per hypothesis.
    int outer_iters = 3;

    void validate() const;
};

struct AdmmState {
    CMatrix r;
    CMatrix z;
    CMatrix u;
    double gamma = 0.0;   // dual for the unit-norm constraint
    double lambda = 0.0;  // dual for the proximity constraint
    int iter = 0;
};

struct SecondaryEstimate {
    linalg::HermitianPd rs_hat;
    std::vector<double> group_scales;
    int iterations = 0;
};

// Pooled covariance with per-group power normalization:
// (1/K) sum_j sum_k (1/scales[j]) n_{j,k} n_{j,k}^H.
CMatrix weighted_sample_cov(const SampleGroups& groups, const std::vector<double>& scales);

// Per-group noise power sigma_j^2 = (1/(n K_j)) sum_k n^H rs^{-1} n, clamped
// below at scale_floor with a warning (degenerate group).
std::vector<double> estimate_group_scales(const SampleGroups& groups,
                                          const linalg::HermitianPd& rs,
                                          double scale_floor = 1e-8);

// Alternate scale and structure estimation until the unit-Frobenius structure
// estimate moves less than tol, or max_alt_iters alternations.
SecondaryEstimate estimate_rs_alternating(const SampleGroups& groups, double tol = 1e-6,
                                          int max_alt_iters = 100,
                                          double pd_floor_rel = linalg::kDefaultPdFloorRel);

// Interference coordinates minimizing the whitened residual:
// (B~^H B~)^{-1} B~^H y~ with ~ denoting r^{-1/2} whitening.
CVector estimate_phi(const CVector& y, const CMatrix& b, const linalg::HermitianPd& r);

// Same estimator against the stacked basis C = [H B].
CVector estimate_beta(const CVector& y, const CMatrix& c, const linalg::HermitianPd& r);

// Profiled noise power: ||P_{D~ perp} y~||^2 / n, clamped below at floor with
// a warning.
double estimate_sigma2(const CVector& y, const CMatrix& d, const linalg::HermitianPd& r,
                       double floor = 1e-8);

// Penalized objective steered by the ADMM loop. resid_outer is the rank-one
// outer product of the regression residual; requires state.r and state.z
// positive definite. Performs no repair, so it is safe to difference.
double augmented_lagrangian(const AdmmState& state, const AdmmParams& params,
                            const CMatrix& resid_outer, double sigma2, const CMatrix& rs);

// Gradient of the objective in R at fixed (Z, duals), in the sense
// d L = Re tr(G dR) for Hermitian perturbations.
CMatrix lagrangian_grad_r(const AdmmState& state, const AdmmParams& params, const CMatrix& rs);

// Gradient in Z at fixed (R, duals).
CMatrix lagrangian_grad_z(const AdmmState& state, const AdmmParams& params,
                          const CMatrix& resid_outer, double sigma2);

// Called with the initial state (iter = 0) and after every iteration.
// Must not mutate anything the loop depends on.
using AdmmObserver = std::function<void(const AdmmState&)>;

// Covariance estimate for one hypothesis: alternating gradient steps in R and
// Z with dual ascent, starting from R = Z = rs, iterates repaired to the
// positive-definite cone each step. If ||R||_F exceeds 1e3 the attempt is
// restarted with a 10x smaller eta (twice at most, observer iter counts reset);
// a divergent final attempt throws Error("ADMM diverged; reduce eta").
linalg::HermitianPd admm_estimate_r(const CVector& y, const CMatrix& d, const CVector& coeff,
                                    double sigma2, const linalg::HermitianPd& rs,
                                    const AdmmParams& params, const AdmmObserver& observer = {});

// log of the detection statistic for fixed per-hypothesis covariances:
// 2n (log q0 - log q1) + logdet r0 - logdet r1, where q0/q1 are the
// interference-deflated residual energies whitened by r0/r1.
double assemble_log_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                              const linalg::HermitianPd& r0, const linalg::HermitianPd& r1);

// Full detector: secondary structure/scale estimation, then per-hypothesis
// coefficient, noise-power and covariance refinement, then assembly.
double hetero_glrt_log_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                                 const SampleGroups& secondary, const AdmmParams& params);

// exp of the log statistic, clamped to stay finite.
double hetero_glrt_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                             const SampleGroups& secondary, const AdmmParams& params);

}  // namespace glrt
}  // namespace heterodet
