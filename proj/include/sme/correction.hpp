#pragma once

#include <limits>
#include <vector>

#include "sme/geometry.hpp"

namespace sme {

enum class MeasurementKind { Strip, UpperHalfspace, LowerHalfspace, Hyperplane };

/// One scalar output constraint lower <= f^T x <= upper. One-sided bounds are
/// IEEE infinities and flow through the clipping min/max untouched.
struct Measurement {
    Vec direction;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    static Measurement make(Vec f, double lower, double upper);
    MeasurementKind kind() const;
};

/// Per-measurement fusion intermediates (support values, clipped bounds,
/// strip geometry). alpha == 0 encodes f orthogonal to range(P).
struct FusionGeometry {
    double alpha = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    Vec phi;
    double eta = 0.0;
    double rho_bar = 0.0;
    double rho_low = 0.0;
    double y_bar = 0.0;
    double y_low = 0.0;

    double case_eps(double eps_case) const { return eps_case * std::max(1.0, eta); }
    /// Clipped bounds collapsed to one value while the ellipsoid has extent
    /// in the f direction: the beta = 1 (hyperplane) fusion branch.
    bool hyperplane_branch(double eps_case) const {
        const double eps = case_eps(eps_case);
        return alpha > 0.0 && (y_bar - y_low) <= eps && 2.0 * eta > eps;
    }
};

enum class CorrectionVariant { SigmaMin, VolumeMin, SsalMin };

struct CorrectionCriterion {
    CorrectionVariant variant = CorrectionVariant::SigmaMin;
};

enum class InconsistencyPolicy { Skip, Abort };

enum class CaseKind { Empty, NoOp, Point, Fuse };

struct CaseLabel {
    CaseKind kind = CaseKind::NoOp;
    Vec point;  // set for CaseKind::Point

    char letter() const {
        switch (kind) {
            case CaseKind::Empty: return 'E';
            case CaseKind::NoOp: return 'N';
            case CaseKind::Point: return 'P';
            case CaseKind::Fuse: return 'F';
        }
        return '?';
    }
};

/// Data one fusion leaves behind, enough to maintain a threaded
/// pseudo-inverse of the shape across the correction batch.
struct FusionTrace {
    Vec phi;
    double alpha = 0.0;
    double beta = 0.0;
    bool hyperplane = false;
};

struct CorrectionResult {
    Ellipsoid ellipsoid;
    std::vector<CaseLabel> labels;
    std::vector<FusionTrace> fusions;
};

FusionGeometry fusion_geometry(const Ellipsoid& e, const Measurement& m,
                               const Tolerances& tol = {});

CaseLabel classify_case(const FusionGeometry& g, const Measurement& m, const Ellipsoid& e,
                        const Tolerances& tol = {});

/// beta minimizing the worst-case scale: 1 - gamma/|delta| past the
/// improvement threshold, else 0.
double beta_sigma(double gamma, double delta);

/// beta minimizing the pseudo-volume (root of the Thm 4.3.2 quadratic).
double beta_volume(int q, double alpha, double gamma, double delta, double sigma,
                   const Tolerances& tol = {});

/// beta minimizing the SSAL (positive root of the correction cubic).
double beta_ssal(double trP, double nu, double alpha, double gamma, double delta, double sigma,
                 const Tolerances& tol = {});

/// Applies one fusion: shape P - alpha beta phi phi^T, center + alpha beta
/// delta phi, scale per Eq type. sigma_min_form selects the algebraically
/// equivalent but exactly monotone scale update used on the hyperplane branch
/// and under the SigmaMin criterion.
Ellipsoid apply_fusion(const Ellipsoid& e, const FusionGeometry& g, double beta,
                       bool sigma_min_form = false, const Tolerances& tol = {});

CorrectionResult correct(const Ellipsoid& e, const std::vector<Measurement>& measurements,
                         CorrectionCriterion criterion, InconsistencyPolicy policy,
                         const Tolerances& tol = {});

}  // namespace sme
