#pragma once

#include <vector>

#include "sme/correction.hpp"
#include "sme/prediction.hpp"

namespace sme {

struct EstimatorConfig {
    PredictionCriterion pred;
    CorrectionCriterion corr;
    double sigma0 = 1.0;
    Tolerances tol;
    int theta_refresh_period = 50;
    InconsistencyPolicy inconsistency = InconsistencyPolicy::Skip;
    bool normalize = true;
    bool diagnostics = false;
};

/// Running upper-bound factors of Thm-5.4 type: vol(E_k) <= v_k vol(E_0) under
/// the volume criterion, ssal(E_k) <= s_k ssal(E_0) under the SSAL one.
struct Diagnostics {
    double v = 1.0;
    double s = 1.0;
};

struct EstimatorState {
    Ellipsoid ellipsoid;  // stored representation; scale stays at sigma0 while normalizing
    double sigma = 1.0;   // true worst-case scale, nonincreasing under SigmaMin
    long step = 0;
    PredictionScratch scratch;
    Diagnostics diag;
    std::vector<double> sigma_history;
    std::vector<CaseLabel> last_cases;
    std::vector<double> last_mus;
};

EstimatorState initial_state(const Ellipsoid& e0, const EstimatorConfig& config);

/// Classifies raw scalar bounds into a validated measurement (Eq-3 partition).
Measurement classify(double lower, double upper, const Vec& f);

/// One full predict / correct / renormalize cycle.
EstimatorState step(const EstimatorState& state, const ProcessModel& model,
                    const std::vector<Measurement>& measurements, const EstimatorConfig& config);

/// Re-charters the post-correction state so the stored shape matrix carries
/// the scale and the stored scale returns to sigma0; the represented set and
/// the true scale thread through unchanged.
EstimatorState normalize(EstimatorState state, double sigma0);

struct BoundFactorInput {
    const Mat& A;
    const SymMatrix& prior_shape;
    double sigma_used = 1.0;
    const Mat& R;
    const std::vector<double>& mus;
};

/// Multiplies the running v/s factors by this step's growth bounds.
Diagnostics bound_factors(const Diagnostics& diag, const BoundFactorInput& in,
                          const Tolerances& tol = {});

struct GramianResult {
    SymMatrix obs;
    SymMatrix ctrl;
    bool window_defined = false;
    int window = 0;  // the sporadic lookback s_k(h)
    double obs_eig_min = 0.0, obs_eig_max = 0.0;
    double ctrl_eig_min = 0.0, ctrl_eig_max = 0.0;
};

/// Observability gramian over the sporadic window containing h measurement
/// instants, and controllability gramian over a fixed length-h window, both
/// evaluated at the last time index. Every A must be invertible.
GramianResult gramians(const std::vector<ProcessModel>& models, const std::vector<Mat>& strip_dirs,
                       int h, const Tolerances& tol = {});

}  // namespace sme
