#include "core/model.hpp"

#include <cmath>
#include <numeric>

namespace heterodet {
namespace model {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void SubspaceSpec::validate() const {
    if (n < 2 || p < 1 || t < 1 || p + t >= n) {
        throw Error("subspace dimensions require n >= 2, p >= 1, t >= 1, p + t < n");
    }
}

int NoiseSpec::total_secondary() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
}

void NoiseSpec::validate(double norm_tol) const {
    if (group_sizes.empty() || group_sizes.size() != group_scales.size()) {
        throw Error("group_sizes and group_scales must be non-empty and of equal length");
    }
    for (int k : group_sizes) {
        if (k < 1) {
            throw Error("group sizes must be positive");
        }
    }
    for (double s : group_scales) {
        if (!(s > 0.0)) {
            throw Error("group scales must be positive");
        }
    }
    if (!(sigma2_test > 0.0)) {
        throw Error("sigma2_test must be positive");
    }
    if (rs_base.dim() != r_test.dim()) {
        throw Error("rs_base and r_test dimensions disagree");
    }
    const double norm = linalg::frobenius(rs_base.matrix());
    if (std::abs(norm - 1.0) > norm_tol) {
        throw Error("rs_base must have unit Frobenius norm");
    }
}

CVector fourier_steering(double freq, int n) {
    if (n < 1) {
        throw Error("steering vector length must be positive");
    }
    CVector v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        const double angle = -kTwoPi * freq * static_cast<double>(k);
        v(k) = Complex(scale * std::cos(angle), scale * std::sin(angle));
    }
    return v;
}

std::pair<CMatrix, CMatrix> build_subspaces(const SubspaceSpec& spec) {
    spec.validate();
    CMatrix h(spec.n, spec.p);
    for (int i = 1; i <= spec.p; ++i) {
        h.col(i - 1) = fourier_steering(0.05 * i + 0.05, spec.n);
    }
    CMatrix b(spec.n, spec.t);
    for (int i = 1; i <= spec.t; ++i) {
        b.col(i - 1) = fourier_steering(-0.025 * i + 0.025, spec.n);
    }
    CMatrix stacked(spec.n, spec.p + spec.t);
    stacked << h, b;
    Eigen::JacobiSVD<CMatrix> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-8 * sv(0)) {
        throw Error("signal and interference subspaces are degenerate");
    }
    return {std::move(h), std::move(b)};
}

CVector sample_complex_gaussian(const CVector& mean, const linalg::HermitianPd& cov, Rng& rng) {
    if (mean.size() != cov.dim()) {
        throw Error("mean and covariance dimensions disagree");
    }
    const Eigen::Index n = cov.dim();
    CVector g(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        g(k) = rng.complex_normal();
    }
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(cov.matrix()));
    if (llt.info() == Eigen::Success) {
        return mean + llt.matrixL() * g;
    }
    // Near-singular: factor through the eigendecomposition instead.
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(linalg::hermitian_part(cov.matrix()));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    if (solver.eigenvalues().minCoeff() < -1e-12 * std::abs(solver.eigenvalues().maxCoeff())) {
        throw Error("not positive definite");
    }
    const Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
    return mean + solver.eigenvectors() * vals.cwiseSqrt().asDiagonal() * g;
}

CVector theta_for_snr(const CMatrix& h, const linalg::HermitianPd& r_test, double sigma2,
                      double snr_db) {
    if (h.rows() != r_test.dim() || h.cols() < 1) {
        throw Error("signal basis and covariance dimensions disagree");
    }
    if (!(sigma2 > 0.0)) {
        throw Error("sigma2 must be positive");
    }
    const Eigen::Index p = h.cols();
    CVector u = CVector::Constant(p, Complex(1.0 / std::sqrt(static_cast<double>(p)), 0.0));
    const CVector x = h * u;
    Eigen::LLT<CMatrix> llt(linalg::hermitian_part(r_test.matrix()) * sigma2);
    if (llt.info() != Eigen::Success) {
        throw Error("not positive definite");
    }
    const double q = x.dot(llt.solve(x)).real();
    if (!(q > 0.0)) {
        throw Error("signal direction carries no energy under the noise whitening");
    }
    const double target = std::pow(10.0, snr_db / 10.0);
    return std::sqrt(target / q) * u;
}

linalg::HermitianPd heterogeneous_test_cov(const linalg::HermitianPd& rs, double alpha,
                                           double decay) {
    if (!(alpha >= 0.0)) {
        throw Error("alpha must be non-negative");
    }
    if (!(decay > 0.0 && decay < 1.0)) {
        throw Error("decay must lie in (0, 1)");
    }
    const Eigen::Index n = rs.dim();
    CMatrix t = rs.matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            t(i, j) += alpha * std::pow(decay, std::abs(static_cast<double>(i - j)));
        }
    }
    t /= linalg::frobenius(t);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(linalg::hermitian_part(t));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const double lmin = solver.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) {
        throw Error("not positive definite");
    }
    return linalg::HermitianPd::trusted(linalg::hermitian_part(t), lmin * (1.0 - 1e-9));
}

Dataset generate_dataset(const SubspaceSpec& spec, const NoiseSpec& noise, const CVector& theta,
                         const CVector& phi, Hypothesis hyp, Rng& rng) {
    spec.validate();
    noise.validate();
    if (noise.rs_base.dim() != spec.n) {
        throw Error("covariance dimension disagrees with the subspace spec");
    }
    if (theta.size() != spec.p || phi.size() != spec.t) {
        throw Error("coordinate dimensions disagree with the subspace spec");
    }
    const auto [h, b] = build_subspaces(spec);

    CVector mean = b * phi;
    if (hyp == Hypothesis::Alt) {
        mean += h * theta;
    }

    Dataset out;
    out.truth = hyp;
    out.y = sample_complex_gaussian(mean, noise.r_test.scaled(noise.sigma2_test), rng);
    out.secondary.resize(noise.group_sizes.size());
    const CVector zero = CVector::Zero(spec.n);
    for (std::size_t j = 0; j < noise.group_sizes.size(); ++j) {
        const linalg::HermitianPd cov_j = noise.rs_base.scaled(noise.group_scales[j]);
        auto& group = out.secondary[j];
        group.reserve(noise.group_sizes[j]);
        for (int k = 0; k < noise.group_sizes[j]; ++k) {
            group.push_back(sample_complex_gaussian(zero, cov_j, rng));
        }
    }
    return out;
}

}  // namespace model
}  // namespace heterodet
