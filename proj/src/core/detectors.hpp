#pragma once

#include <string>

#include "core/linalg.hpp"

namespace heterodet {
namespace detectors {

enum class DetectorId { Asd, Amf, AmfKnown, HeteroGlrt };

std::string to_string(DetectorId id);
DetectorId detector_from_string(const std::string& name);

// Subspace detection statistic after whitening by cov^{-1/2}:
// ||P_H~ z||^2 / ||z||^2 with z the whitened test vector deflated of the
// interference span. Lies in [0, 1].
double asd_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                     const linalg::HermitianPd& cov);

// Energy-ratio statistic after the same whitening:
// (y~^H P_B~perp y~) / (y~^H P_C~perp y~) with C = [H B]. Lies in [1, inf).
double amf_statistic(const CVector& y, const CMatrix& h, const CMatrix& b,
                     const linalg::HermitianPd& cov);

// amf_statistic evaluated with the exact test-cell covariance; clairvoyant
// reference bound.
double amf_known(const CVector& y, const CMatrix& h, const CMatrix& b,
                 const linalg::HermitianPd& true_cov);

}  // namespace detectors
}  // namespace heterodet
