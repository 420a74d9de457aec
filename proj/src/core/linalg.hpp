#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace heterodet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Single error type for the whole library; the message strings are part of
// the contract and surface unchanged through the C API.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

namespace linalg {

// Gram matrices with condition number at or above this are treated as singular.
inline constexpr double kGramConditionLimit = 1e12;

// Default relative eigenvalue floor for pd_repair_rel (fraction of lambda_max).
inline constexpr double kDefaultPdFloorRel = 1e-8;

// Hermitian positive definite matrix whose eigenvalues are known to sit at or
// above `floor`. Construct through the checked constructor or pd_repair.
class HermitianPd {
public:
    // Validates squareness, Hermitian symmetry (1e-12 relative) and the
    // eigenvalue floor; throws Error on violation.
    HermitianPd(CMatrix matrix, double floor);

    // Skips validation; caller guarantees the invariants hold.
    static HermitianPd trusted(CMatrix matrix, double floor);

    const CMatrix& matrix() const { return mat_; }
    double floor() const { return floor_; }
    Eigen::Index dim() const { return mat_.rows(); }

    // Scales matrix and floor by c > 0; positive definiteness is preserved.
    HermitianPd scaled(double c) const;

private:
    HermitianPd() = default;

    CMatrix mat_;
    double floor_ = 0.0;
};

double frobenius(const CMatrix& m);

// Relative Hermitian asymmetry ||M - M^H||_F / max(||M||_F, tiny).
double hermitian_asymmetry(const CMatrix& m);

bool is_hermitian(const CMatrix& m, double rel_tol = 1e-12);

// (M + M^H) / 2
CMatrix hermitian_part(const CMatrix& m);

// Re(x^H M x). The imaginary part is a numerical artifact for Hermitian M and
// is checked to be negligible in debug builds.
double quad_form(const CVector& x, const CMatrix& m);

// (D^H D)^{-1} rhs via eigendecomposition of the Gram matrix.
// Throws Error("singular Gram matrix") when the Gram condition number
// reaches kGramConditionLimit.
CMatrix gram_solve(const CMatrix& d, const CMatrix& rhs);

// P_D = D (D^H D)^{-1} D^H, orthogonal projector onto span(D).
CMatrix orthogonal_projector(const CMatrix& d);

// I - P_D
CMatrix complement_projector(const CMatrix& d);

// M^{-1/2} via eigendecomposition. Throws Error("not positive definite") if
// the recomputed spectrum dips below the declared floor.
CMatrix inv_sqrt(const HermitianPd& m);

// (1/K) sum_k x_k x_k^H. Throws on an empty sample set.
CMatrix sample_covariance(const std::vector<CVector>& samples);

// Symmetrize then clamp eigenvalues below `floor` up to `floor`. Total for
// floor > 0: any square input yields a valid HermitianPd.
HermitianPd pd_repair(const CMatrix& m, double floor);

// pd_repair with floor = rel * lambda_max (falls back to `rel` absolute when
// the symmetrized spectrum has no positive part).
HermitianPd pd_repair_rel(const CMatrix& m, double rel = kDefaultPdFloorRel);

}  // namespace linalg
}  // namespace heterodet
