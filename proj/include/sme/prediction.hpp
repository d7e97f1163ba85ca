#pragma once

#include <optional>
#include <vector>

#include "sme/geometry.hpp"

namespace sme {

/// One step of the LTV dynamics x+ = A x + B tau + R w, w in B_inf.
struct ProcessModel {
    Mat A;
    Mat B;        // n x l, l may be 0
    Vec tau;      // l
    Zonotope noise;  // centered at 0, generators R (n x m, m may be 0)
    int rank_A = -1;  // filled by validate()

    int dim() const { return static_cast<int>(A.rows()); }
    int generator_count() const { return noise.generator_count(); }
    void validate(double eps_rank = 1e-10);
};

enum class PredictionVariant { VolumeMin, TraceMin };

struct PredictionCriterion {
    PredictionVariant variant = PredictionVariant::VolumeMin;
    std::optional<Mat> weight;  // C for the weighted SSAL criterion
};

/// Recursion state for the pseudo-volume prediction: Theta tracks the
/// pseudo-inverse of the current shape, pdet its pseudo-determinant, rank the
/// kappa counter. Invalidated whenever the cheap update rules stop applying.
struct PredictionScratch {
    SymMatrix theta;
    double pdet = 1.0;
    int rank = 0;
    bool valid = false;
};

struct PredictionResult {
    Ellipsoid ellipsoid;
    PredictionScratch scratch;
    std::vector<double> mus;  // one per noise generator, for diagnostics
};

/// Outer ellipsoid of E + {t r : |t| <= 1}: same center, shape
/// (1+mu)(Q + r r^T / (mu sigma)). E must already be in post-map form.
Ellipsoid minkowski_segment(const Ellipsoid& e, const Vec& r, double mu);

/// Optimal mu for the pseudo-volume criterion. h = r^T u / sigma when the
/// generator lies in range(Q) (v = 0); otherwise the minimizer is 1/q.
double mu_volume(int q, double h, bool v_is_zero);

/// Optimal mu for the (weighted) SSAL criterion: sqrt(rCr / (sigma trQ)).
double mu_trace(double trQ, double rCr, double sigma);

/// Minimal pseudo-volume prediction (one full time update). The scratch input
/// is reused when it is valid and the shape/A are full rank; otherwise the
/// pseudo-inverse is rebuilt from a fresh decomposition.
PredictionResult predict_volume_min(const Ellipsoid& e, const ProcessModel& model,
                                    const PredictionScratch& scratch, const Tolerances& tol = {});

/// Minimal (weighted) SSAL prediction via the closed form.
PredictionResult predict_trace_min(const Ellipsoid& e, const ProcessModel& model,
                                   const std::optional<Mat>& weight, const Tolerances& tol = {});

}  // namespace sme
