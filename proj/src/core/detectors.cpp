#include "core/detectors.hpp"

namespace heterodet {
namespace detectors {

namespace {

constexpr double kSpanTol = 1e-14;

struct Whitened {
    CVector y;
    CMatrix h;
    CMatrix b;
};

Whitened whiten(const CVector& y, const CMatrix& h, const CMatrix& b,
                const linalg::HermitianPd& cov) {
    if (y.size() != cov.dim() || h.rows() != cov.dim() || b.rows() != cov.dim()) {
        throw Error("dimensions disagree");
    }
    const CMatrix w = linalg::inv_sqrt(cov);
    return {w * y, w * h, w * b};
}

}  // namespace

std::string to_string(DetectorId id) {
    switch (id) {
        case DetectorId::Asd: return "asd";
        case DetectorId::Amf: return "amf";
        case DetectorId::AmfKnown: return "amf_known";
        case DetectorId::HeteroGlrt: return "hetero";
    }
    throw Error("unknown detector id");
}

DetectorId detector_from_string(const std::string& name) {
    if (name == "asd") return DetectorId::Asd;
    if (name == "amf") return DetectorId::Amf;
    if (name == "amf_known") return DetectorId::AmfKnown;
    if (name == "hetero") return DetectorId::HeteroGlrt;
    throw Error("unknown detector: " + name);
}

double asd_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                     const linalg::HermitianPd& cov) {
    const Whitened wh = whiten(y, h, b, cov);
    const CMatrix pb_perp = linalg::complement_projector(wh.b);
    const CVector z = pb_perp * wh.y;
    const double denom = z.squaredNorm();
    const double scale = wh.y.squaredNorm();
    if (!(scale > 0.0) || denom < kSpanTol * scale) {
        throw Error("test vector lies in interference subspace");
    }
    const CMatrix ph = linalg::orthogonal_projector(wh.h);
    const double num = (ph * z).squaredNorm();
    return num / denom;
}

double amf_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                     const linalg::HermitianPd& cov) {
    const Whitened wh = whiten(y, h, b, cov);
    CMatrix c(wh.h.rows(), wh.h.cols() + wh.b.cols());
    c << wh.h, wh.b;
    const double num = (linalg::complement_projector(wh.b) * wh.y).squaredNorm();
    const double denom = (linalg::complement_projector(c) * wh.y).squaredNorm();
    const double scale = wh.y.squaredNorm();
    if (!(scale > 0.0) || denom < kSpanTol * scale) {
        throw Error("test vector lies in span of C");
    }
    return num / denom;
}

double amf_known(const CVector& y, const CMatrix& h, const CMatrix& b,
                 const linalg::HermitianPd& true_cov) {
    return amf_statistic(y, h, b, true_cov);
}

}  // namespace detectors
}  // namespace heterodet
