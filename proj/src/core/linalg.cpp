#include "core/linalg.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace heterodet {
namespace linalg {

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> eig_of(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    return solver;
}

HermitianPd repair_from_solver(const Eigen::SelfAdjointEigenSolver<CMatrix>& solver, double floor) {
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(floor);
    CMatrix repaired = solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
    return HermitianPd::trusted(hermitian_part(repaired), floor);
}

}  // namespace

HermitianPd::HermitianPd(CMatrix matrix, double floor) {
    if (matrix.rows() != matrix.cols()) {
        throw Error("HermitianPd requires a square matrix");
    }
    if (!(floor > 0.0)) {
        throw Error("HermitianPd requires a positive floor");
    }
    if (!is_hermitian(matrix)) {
        throw Error("HermitianPd requires a Hermitian matrix");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(matrix));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const double lmax = solver.eigenvalues().maxCoeff();
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(lmax, floor);
    if (solver.eigenvalues().minCoeff() < floor - slack) {
        throw Error("not positive definite");
    }
    mat_ = std::move(matrix);
    floor_ = floor;
}

HermitianPd HermitianPd::trusted(CMatrix matrix, double floor) {
    HermitianPd out;
    out.mat_ = std::move(matrix);
    out.floor_ = floor;
    return out;
}

HermitianPd HermitianPd::scaled(double c) const {
    if (!(c > 0.0)) {
        throw Error("scale factor must be positive");
    }
    return trusted(mat_ * c, floor_ * c);
}

double frobenius(const CMatrix& m) {
    return m.norm();
}

double hermitian_asymmetry(const CMatrix& m) {
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    return (m - m.adjoint()).norm() / scale;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
    return m.rows() == m.cols() && hermitian_asymmetry(m) <= rel_tol;
}

CMatrix hermitian_part(const CMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

double quad_form(const CVector& x, const CMatrix& m) {
    const Complex v = x.dot(m * x);  // Eigen's dot conjugates the left argument.
#ifndef NDEBUG
    const double scale = std::max(std::abs(v), 1.0);
    assert(std::abs(v.imag()) <= 1e-12 * scale && "quadratic form has non-negligible imaginary part");
#endif
    return v.real();
}

CMatrix gram_solve(const CMatrix& d, const CMatrix& rhs) {
    const CMatrix gram = d.adjoint() * d;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(gram));
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    const auto& vals = solver.eigenvalues();
    const double lmax = vals.maxCoeff();
    const double lmin = vals.minCoeff();
    if (!(lmin > 0.0) || lmax >= kGramConditionLimit * lmin) {
        throw Error("singular Gram matrix");
    }
    const CMatrix vt_rhs = solver.eigenvectors().adjoint() * rhs;
    return solver.eigenvectors() * vals.cwiseInverse().asDiagonal() * vt_rhs;
}

CMatrix orthogonal_projector(const CMatrix& d) {
    if (d.rows() < d.cols() || d.cols() < 1) {
        throw Error("projector basis must be a tall matrix");
    }
    return d * gram_solve(d, d.adjoint());
}

CMatrix complement_projector(const CMatrix& d) {
    return CMatrix::Identity(d.rows(), d.rows()) - orthogonal_projector(d);
}

CMatrix inv_sqrt(const HermitianPd& m) {
    const auto solver = eig_of(hermitian_part(m.matrix()));
    const auto& vals = solver.eigenvalues();
    const double lmax = vals.maxCoeff();
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(lmax, m.floor());
    if (!(vals.minCoeff() > 0.0) || vals.minCoeff() < m.floor() - slack) {
        throw Error("not positive definite");
    }
    const CMatrix w = solver.eigenvectors() *
                      vals.cwiseSqrt().cwiseInverse().asDiagonal() *
                      solver.eigenvectors().adjoint();
    return hermitian_part(w);
}

CMatrix sample_covariance(const std::vector<CVector>& samples) {
    if (samples.empty()) {
        throw Error("sample covariance of an empty sample set");
    }
    const Eigen::Index n = samples.front().size();
    CMatrix acc = CMatrix::Zero(n, n);
    for (const CVector& x : samples) {
        if (x.size() != n) {
            throw Error("sample dimensions disagree");
        }
        acc.noalias() += x * x.adjoint();
    }
    return acc / static_cast<double>(samples.size());
}

HermitianPd pd_repair(const CMatrix& m, double floor) {
    if (m.rows() != m.cols()) {
        throw Error("pd_repair requires a square matrix");
    }
    if (!(floor > 0.0)) {
        throw Error("pd_repair requires a positive floor");
    }
    const auto solver = eig_of(hermitian_part(m));
    return repair_from_solver(solver, floor);
}

HermitianPd pd_repair_rel(const CMatrix& m, double rel) {
    if (m.rows() != m.cols()) {
        throw Error("pd_repair requires a square matrix");
    }
    if (!(rel > 0.0)) {
        throw Error("pd_repair requires a positive floor");
    }
    const auto solver = eig_of(hermitian_part(m));
    const double lmax = solver.eigenvalues().maxCoeff();
    const double floor = lmax > 0.0 ? rel * lmax : rel;
    return repair_from_solver(solver, floor);
}

}  // namespace linalg
}  // namespace heterodet
