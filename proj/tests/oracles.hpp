#pragma once

// Independent oracles used by the unit tests and the acceptance suite. These
// deliberately avoid the library's own solve paths: least squares is done by
// coordinate descent with a scalar line search, sigma^2 by golden section,
// gradients by central finite differences, AUC by direct pair enumeration.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace oracles {

using heterodet::CMatrix;
using heterodet::Complex;
using heterodet::CVector;

inline CVector random_cvector(heterodet::Rng& rng, int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = rng.complex_normal();
    }
    return v;
}

inline CMatrix random_cmatrix(heterodet::Rng& rng, int rows, int cols) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = rng.complex_normal();
        }
    }
    return m;
}

// Random Hermitian PD matrix with eigenvalues in [min_eig, max_eig].
inline CMatrix random_hpd(heterodet::Rng& rng, int n, double min_eig = 0.5,
                          double max_eig = 2.0) {
    const CMatrix a = random_cmatrix(rng, n, n);
    const Eigen::HouseholderQR<CMatrix> qr(a);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    Eigen::VectorXd vals(n);
    for (int i = 0; i < n; ++i) {
        vals(i) = min_eig + (max_eig - min_eig) * rng.uniform01();
    }
    return heterodet::linalg::hermitian_part(q * vals.cast<Complex>().asDiagonal() * q.adjoint());
}

// Golden-section minimum of a unimodal scalar function on [lo, hi], polished
// by a derivative-sign bisection. Value comparison alone cannot place an
// argmin below ~sqrt(eps) relative (the function is flat to roundoff there);
// the central-difference slope still carries a usable sign.
template <class F>
double golden_min(F f, double lo, double hi, int iters = 300) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = (a + b) / 2.0;
    const double span = std::max(std::abs(x), 1e-6 * (hi - lo));
    const double h = 1e-6 * span;
    const auto slope = [&](double s) { return f(s + h) - f(s - h); };
    double pa = std::max(lo + h, x - 1e-3 * span);
    double pb = std::min(hi - h, x + 1e-3 * span);
    if (pa < pb && slope(pa) < 0.0 && slope(pb) > 0.0) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (pa + pb);
            (slope(mid) < 0.0 ? pa : pb) = mid;
        }
        x = 0.5 * (pa + pb);
    }
    return x;
}

// min_x ||y - D x||^2 by cyclic coordinate descent over the real and
// imaginary parts of x. Slow and dumb on purpose: shares nothing with the
// Gram-based solver under test. Each 1-D slice is an exact parabola, so the
// coordinate minimum comes from a three-point vertex fit of sampled values.
inline CVector coordinate_descent_ls(const CMatrix& d, const CVector& y, int max_sweeps = 20000) {
    CVector x = CVector::Zero(d.cols());
    const auto objective = [&]() { return (y - d * x).squaredNorm(); };
    for (int s = 0; s < max_sweeps; ++s) {
        double moved = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            for (int part = 0; part < 2; ++part) {
                const Complex base = x(i);
                const auto f = [&](double v) {
                    x(i) = part == 0 ? Complex(v, base.imag()) : Complex(base.real(), v);
                    return objective();
                };
                const double cur = part == 0 ? base.real() : base.imag();
                const double h = std::max(1.0, std::abs(cur));
                const double fm = f(cur - h), f0 = f(cur), fp = f(cur + h);
                const double curv = fp - 2.0 * f0 + fm;
                const double best = curv > 0.0 ? cur - h * (fp - fm) / (2.0 * curv) : cur;
                x(i) = part == 0 ? Complex(best, base.imag()) : Complex(base.real(), best);
                moved = std::max(moved, std::abs(best - cur));
            }
        }
        if (moved < 1e-13 * (1.0 + x.norm())) {
            break;
        }
    }
    return x;
}

// Central finite differences over the real parameterization of Hermitian
// matrices: diagonal entries, and real/imag parts of each upper off-diagonal.
// Returns G in the convention dL = Re tr(G dR) for Hermitian dR.
template <class F>
CMatrix fd_hermitian_gradient(const CMatrix& at, F f, double step) {
    const Eigen::Index n = at.rows();
    CMatrix g = CMatrix::Zero(n, n);
    const auto probe = [&](const CMatrix& dir) {
        return (f(at + step * dir) - f(at - step * dir)) / (2.0 * step);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        CMatrix dir = CMatrix::Zero(n, n);
        dir(i, i) = 1.0;
        g(i, i) = probe(dir);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            CMatrix re_dir = CMatrix::Zero(n, n);
            re_dir(i, j) = 1.0;
            re_dir(j, i) = 1.0;
            CMatrix im_dir = CMatrix::Zero(n, n);
            im_dir(i, j) = Complex(0.0, 1.0);
            im_dir(j, i) = Complex(0.0, -1.0);
            // d/da = 2 Re G_ij, d/db = 2 Im G_ij
            const double da = probe(re_dir);
            const double db = probe(im_dir);
            g(i, j) = Complex(da / 2.0, db / 2.0);
            g(j, i) = std::conj(g(i, j));
        }
    }
    return g;
}

// P(h1 > h0) + P(h1 = h0) / 2 by direct enumeration.
inline double mann_whitney_auc(const std::vector<double>& h0, const std::vector<double>& h1) {
    double wins = 0.0;
    for (double a : h1) {
        for (double b : h0) {
            if (a > b) {
                wins += 1.0;
            } else if (a == b) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(h0.size()) * static_cast<double>(h1.size()));
}

// Minimal CSV reader: splits every line on commas, no quoting.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace oracles
