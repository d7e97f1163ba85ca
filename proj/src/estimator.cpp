#include "sme/estimator.hpp"

#include <cmath>

namespace sme {

EstimatorState initial_state(const Ellipsoid& e0, const EstimatorConfig& config) {
    if (std::abs(e0.scale - config.sigma0) > 1e-12 * std::max(1.0, config.sigma0))
        throw ValidationError("initial ellipsoid scale must equal sigma0");
    EstimatorState s;
    s.ellipsoid = e0;
    s.sigma = e0.scale;
    return s;
}

Measurement classify(double lower, double upper, const Vec& f) {
    return Measurement::make(f, lower, upper);
}

EstimatorState normalize(EstimatorState state, double sigma0) {
    const double sigma_raw = state.ellipsoid.scale;
    state.sigma *= sigma_raw / sigma0;
    if (sigma_raw > 1e-300) {
        const double c = sigma_raw / sigma0;
        state.ellipsoid.shape = SymMatrix(c * state.ellipsoid.shape.mat());
        state.ellipsoid.scale = sigma0;
        if (state.scratch.valid) {
            state.scratch.theta = SymMatrix(state.scratch.theta.mat() / c);
            state.scratch.pdet *= std::pow(c, state.scratch.rank);
        }
    }
    return state;
}

EstimatorState step(const EstimatorState& state, const ProcessModel& model,
                    const std::vector<Measurement>& measurements, const EstimatorConfig& config) {
    EstimatorState next = state;

    PredictionScratch scratch_in = state.scratch;
    if (config.theta_refresh_period > 0 && state.step > 0 &&
        state.step % config.theta_refresh_period == 0)
        scratch_in.valid = false;

    PredictionResult pred;
    if (config.pred.variant == PredictionVariant::VolumeMin) {
        pred = predict_volume_min(state.ellipsoid, model, scratch_in, config.tol);
    } else {
        pred = predict_trace_min(state.ellipsoid, model, config.pred.weight, config.tol);
    }

    if (config.diagnostics) {
        next.diag =
            bound_factors(state.diag,
                          BoundFactorInput{model.A, state.ellipsoid.shape, state.ellipsoid.scale,
                                           model.noise.generators, pred.mus},
                          config.tol);
    }

    CorrectionResult corr =
        correct(pred.ellipsoid, measurements, config.corr, config.inconsistency, config.tol);

    PredictionScratch scratch = pred.scratch;
    if (scratch.valid) {
        // Thread the shape pseudo-inverse and pdet through the strip fusions;
        // a hyperplane fusion drops rank and forces a rebuild next step.
        for (const FusionTrace& f : corr.fusions) {
            if (f.hyperplane) {
                scratch.valid = false;
                break;
            }
            if (f.beta <= 0.0) continue;
            const Vec g = scratch.theta.mat() * f.phi;
            scratch.theta = SymMatrix(scratch.theta.mat() +
                                      (f.alpha * f.beta / (1.0 - f.beta)) * (g * g.transpose()));
            scratch.pdet *= 1.0 - f.beta;
        }
        scratch.rank = corr.ellipsoid.rank;
    }

    next.ellipsoid = corr.ellipsoid;
    next.scratch = scratch;
    next.last_cases = corr.labels;
    next.last_mus = pred.mus;
    next.step = state.step + 1;

    if (config.normalize) {
        next = normalize(std::move(next), config.sigma0);
    } else {
        next.sigma = next.ellipsoid.scale;
    }
    next.sigma_history.push_back(next.sigma);
    return next;
}

Diagnostics bound_factors(const Diagnostics& diag, const BoundFactorInput& in,
                          const Tolerances& tol) {
    const int n = static_cast<int>(in.A.rows());
    const int m = static_cast<int>(in.mus.size());

    // chi_i = prod_{j=i..m} (1 + mu_j), as suffix products.
    std::vector<double> chi(m, 1.0);
    double suffix = 1.0;
    for (int i = m - 1; i >= 0; --i) {
        suffix *= 1.0 + in.mus[i];
        chi[i] = suffix;
    }
    const double chi1 = m == 0 ? 1.0 : chi[0];
    const Mat a_check = std::sqrt(chi1) * in.A;

    Mat w = Mat::Zero(n, n);
    for (int i = 0; i < m; ++i) {
        const Vec r = in.R.col(i);
        w += (chi[i] / (in.mus[i] * in.sigma_used)) * (r * r.transpose());
    }

    Spectral pspec(in.prior_shape);
    const Mat p_pinv = pspec.pinv(tol.eps_rank).mat();
    const Mat p_proj = in.prior_shape.mat() * p_pinv;

    const SymMatrix theta(a_check * in.prior_shape.mat() * a_check.transpose());
    Spectral tspec(theta);
    const Mat t_pinv = tspec.pinv(tol.eps_rank).mat();
    const Mat t_proj = t_pinv * theta.mat();

    const double f1 = pseudo_det_general(a_check * p_proj, tol.eps_rank);
    const Mat second = t_proj + (t_pinv + Mat::Identity(n, n) - t_proj) * w;
    const double f2 = pseudo_det_general(second, tol.eps_rank);

    Diagnostics out;
    out.v = diag.v * f1 * f1 * f2;
    const double tr_p = in.prior_shape.trace();
    const double noise_term = w.trace() > 0.0 && tr_p > 0.0 ? w.trace() / tr_p : 0.0;
    out.s = diag.s * ((a_check * a_check.transpose()).trace() + noise_term);
    return out;
}

GramianResult gramians(const std::vector<ProcessModel>& models,
                       const std::vector<Mat>& strip_dirs, int h, const Tolerances& tol) {
    if (h < 1) throw ValidationError("gramian window h must be >= 1");
    const int T = static_cast<int>(models.size());
    if (static_cast<int>(strip_dirs.size()) != T + 1)
        throw ValidationError("strip_dirs must have one entry per time index (models + 1)");
    if (T < 1) throw ValidationError("need at least one transition");
    const int n = models.front().dim();

    for (const ProcessModel& m : models)
        if (numeric_rank_general(m.A, tol.eps_rank) < n)
            throw SingularTransition("A is numerically singular");

    GramianResult out;
    out.obs = SymMatrix::Zero(n);
    out.ctrl = SymMatrix::Zero(n);

    // Sporadic window: smallest lookback from the last index containing h
    // measurement instants.
    int instants = 0, s = -1;
    for (int i = T; i >= 0; --i) {
        if (strip_dirs[i].cols() > 0) ++instants;
        if (instants == h) {
            s = T - i;
            break;
        }
    }
    out.window_defined = s >= 0;
    if (out.window_defined) {
        out.window = s;
        const int base = T - s;
        Mat phi = Mat::Identity(n, n);  // transition from base to i
        Mat obs = Mat::Zero(n, n);
        for (int i = base; i <= T; ++i) {
            if (i > base) phi = (models[i - 1].A * phi).eval();
            const Mat& dirs = strip_dirs[i];
            if (dirs.cols() > 0) obs += phi.transpose() * dirs * dirs.transpose() * phi;
        }
        out.obs = SymMatrix(std::move(obs));
        Eigen::SelfAdjointEigenSolver<Mat> es(out.obs.mat());
        out.obs_eig_min = es.eigenvalues().minCoeff();
        out.obs_eig_max = es.eigenvalues().maxCoeff();
    }

    // Controllability over fixed length h, backward transitions need inverses.
    if (h <= T) {
        const int base = T - h;
        Mat ctrl = Mat::Zero(n, n);
        Mat back = Mat::Identity(n, n);  // Phi_{base, i+1}
        for (int i = base; i < T; ++i) {
            back = (back * models[i].A.inverse()).eval();
            const Mat& r = models[i].noise.generators;
            if (r.cols() > 0) ctrl += back * r * r.transpose() * back.transpose();
        }
        out.ctrl = SymMatrix(std::move(ctrl));
        Eigen::SelfAdjointEigenSolver<Mat> es(out.ctrl.mat());
        out.ctrl_eig_min = es.eigenvalues().minCoeff();
        out.ctrl_eig_max = es.eigenvalues().maxCoeff();
    }
    return out;
}

}  // namespace sme
