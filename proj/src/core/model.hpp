#pragma once

#include <utility>
#include <vector>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace heterodet {
namespace model {

// Dimensions of the signal model: observation length n, signal subspace rank
// p, interference subspace rank t.
struct SubspaceSpec {
    int n = 5;
    int p = 2;
    int t = 1;

    // Requires n >= 2, p >= 1, t >= 1, p + t < n.
    void validate() const;
};

// Covariance structure of the test cell and the secondary groups.
// rs_base must have (approximately) unit Frobenius norm; r_test is the true
// test-cell structure (equals rs_base in the matched scenarios).
struct NoiseSpec {
    linalg::HermitianPd rs_base;
    linalg::HermitianPd r_test;
    double sigma2_test = 1.0;
    std::vector<int> group_sizes;
    std::vector<double> group_scales;

    int total_secondary() const;

    // norm_tol bounds | ||rs_base||_F - 1 |.
    void validate(double norm_tol = 0.02) const;
};

enum class Hypothesis { Null, Alt };

// One Monte Carlo draw: test-cell vector plus grouped secondary samples.
struct Dataset {
    CVector y;
    std::vector<std::vector<CVector>> secondary;
    Hypothesis truth = Hypothesis::Null;
};

// Unit-norm steering vector (1/sqrt(n)) [1, e^{-j 2 pi f}, ..., e^{-j 2 pi f (n-1)}].
CVector fourier_steering(double freq, int n);

// Signal basis H (columns at f_i = 0.05 i + 0.05, i = 1..p) and interference
// basis B (columns at g_i = -0.025 i + 0.025, i = 1..t). Throws if the stacked
// [H B] loses full column rank.
std::pair<CMatrix, CMatrix> build_subspaces(const SubspaceSpec& spec);

// Draw from CN(mean, cov): mean + L g with L a factor of cov (Cholesky, with
// eigendecomposition fallback near singularity) and g i.i.d. complex normal.
CVector sample_complex_gaussian(const CVector& mean, const linalg::HermitianPd& cov, Rng& rng);

// Coordinates theta (equal-weight direction) scaled so that
// 10 log10(theta^H H^H (sigma2 R)^{-1} H theta) = snr_db.
CVector theta_for_snr(const CMatrix& h, const linalg::HermitianPd& r_test, double sigma2,
                      double snr_db);

// Unit-Frobenius covariance with added exponential-decay correlation:
// normalize(rs + alpha * decay^{|i-j|}). Requires alpha >= 0, 0 < decay < 1.
linalg::HermitianPd heterogeneous_test_cov(const linalg::HermitianPd& rs, double alpha,
                                           double decay);

// One draw of the full model. Under Alt the test cell carries H theta + B phi,
// under Null only B phi. Draw order is fixed: test-cell noise first, then the
// secondary groups in order.
Dataset generate_dataset(const SubspaceSpec& spec, const NoiseSpec& noise, const CVector& theta,
                         const CVector& phi, Hypothesis hyp, Rng& rng);

}  // namespace model
}  // namespace heterodet
