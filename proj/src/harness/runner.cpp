#include "sme/harness/runner.hpp"

#include <chrono>
#include <cmath>

#include "sme/harness/montecarlo.hpp"
#include "sme/rng.hpp"

namespace sme::harness {

namespace {

std::string case_letters(const std::vector<CaseLabel>& labels) {
    std::string out;
    out.reserve(labels.size());
    for (const CaseLabel& l : labels) out.push_back(l.letter());
    return out;
}

bool center_acceptable(const Ellipsoid& e, const std::vector<Measurement>& batch,
                       const std::vector<CaseLabel>& labels) {
    for (size_t i = 0; i < batch.size(); ++i) {
        if (i < labels.size() && labels[i].kind == CaseKind::Empty) continue;
        const double y = batch[i].direction.dot(e.center);
        const double lo_tol = 1e-9 * (1.0 + std::abs(batch[i].lower));
        const double hi_tol = 1e-9 * (1.0 + std::abs(batch[i].upper));
        if (y < batch[i].lower - lo_tol || y > batch[i].upper + hi_tol) return false;
    }
    return true;
}

}  // namespace

RunResult run(const Scenario& s, const EstimatorConfig& config, std::uint64_t seed,
              const RunOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    RunResult out;
    const TruthData truth = simulate_truth(s, seed);
    const auto models = expand_models(s);

    EstimatorState state = initial_state(s.initial_ellipsoid(), config);
    double prev_sigma = state.sigma;

    for (int k = 0; k < s.horizon; ++k) {
        const ProcessModel& model = models[k % models.size()];
        const auto& batch = truth.measurements[k + 1];

        const auto t0 = clock::now();
        EstimatorState prev_state = state;
        state = step(state, model, batch, config);
        const auto t1 = clock::now();

        StepRecord rec;
        rec.k = k + 1;
        rec.xhat = state.ellipsoid.center;
        rec.sigma = state.sigma;
        rec.rank = state.ellipsoid.rank;
        rec.pvol = pseudo_volume(state.ellipsoid);
        rec.ssal_value = ssal(state.ellipsoid);
        rec.err = (truth.states[k + 1] - state.ellipsoid.center).norm();
        rec.contained = contains(state.ellipsoid, truth.states[k + 1], 1e-9);
        rec.cases = case_letters(state.last_cases);
        if (options.timing)
            rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (!rec.contained) {
            out.audit.containment_ok = false;
            ++out.audit.violations;
        }
        if (!center_acceptable(state.ellipsoid, batch, state.last_cases)) {
            out.audit.acceptability_ok = false;
            ++out.audit.violations;
        }
        if (config.corr.variant == CorrectionVariant::SigmaMin &&
            state.sigma > prev_sigma * (1.0 + 1e-12) + 1e-15) {
            out.audit.sigma_monotone_ok = false;
            ++out.audit.violations;
        }
        prev_sigma = state.sigma;

        if (options.mc_samples > 0) {
            // Reachable-set audit: points of the previous set pushed through
            // the dynamics and a noise draw must land in the prediction, so
            // they must also be covered before correction; check against the
            // prediction by re-running it.
            PredictionResult pred;
            if (config.pred.variant == PredictionVariant::VolumeMin)
                pred = predict_volume_min(prev_state.ellipsoid, model, prev_state.scratch,
                                          config.tol);
            else
                pred = predict_trace_min(prev_state.ellipsoid, model, config.pred.weight,
                                         config.tol);
            auto base = ellipsoid_sampler(prev_state.ellipsoid);
            const int m = model.generator_count();
            PointSource source = [&](std::uint64_t key) {
                Vec x = base(key);
                Rng rng(Rng::derive(key, 17));
                Vec w(m);
                for (int i = 0; i < m; ++i) w[i] = rng.uniform(-1.0, 1.0);
                Vec y = model.A * x;
                if (model.B.size() > 0) y += model.B * model.tau;
                if (m > 0) y += model.noise.generators * w;
                return y;
            };
            const double frac = containment_fraction(pred.ellipsoid, source, options.mc_samples,
                                                     Rng::derive(seed, 1000 + k));
            if (frac < 1.0) {
                out.audit.prediction_containment_ok = false;
                ++out.audit.violations;
            }
        }

        out.records.push_back(std::move(rec));
    }

    out.final_state = state;
    out.total_ms = std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
    return out;
}

}  // namespace sme::harness
