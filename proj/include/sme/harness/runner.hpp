#pragma once

#include <string>

#include "sme/estimator.hpp"
#include "sme/harness/simulate.hpp"

namespace sme::harness {

struct StepRecord {
    int k = 0;
    Vec xhat;
    double sigma = 0.0;
    int rank = 0;
    double pvol = 0.0;
    double ssal_value = 0.0;
    double err = 0.0;
    bool contained = false;
    std::string cases;
    double ms = 0.0;
};

struct AuditReport {
    bool containment_ok = true;
    bool acceptability_ok = true;
    bool sigma_monotone_ok = true;
    bool prediction_containment_ok = true;
    int violations = 0;

    bool ok() const {
        return containment_ok && acceptability_ok && sigma_monotone_ok &&
               prediction_containment_ok;
    }
};

struct RunResult {
    std::vector<StepRecord> records;
    AuditReport audit;
    EstimatorState final_state;
    double total_ms = 0.0;
};

struct RunOptions {
    /// Monte-Carlo points for the per-step reachable-set containment audit
    /// (0 disables it).
    int mc_samples = 0;
    /// Record measured per-step wall time into the records (nondeterministic;
    /// off by default so emitted CSVs are byte-reproducible).
    bool timing = false;
};

/// Full predict/correct loop over a scenario realization with inline audits:
/// truth containment, center acceptability, sigma monotonicity (SigmaMin),
/// and optionally Monte-Carlo prediction containment.
RunResult run(const Scenario& s, const EstimatorConfig& config, std::uint64_t seed,
              const RunOptions& options = {});

}  // namespace sme::harness
