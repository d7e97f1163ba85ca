#pragma once

#include "sme/correction.hpp"
#include "sme/harness/scenario.hpp"

namespace sme::harness {

/// Ground truth for one scenario realization: states x_0..x_N, the noise
/// draws, and the per-step measurement batches (batch k constrains x_k).
struct TruthData {
    std::vector<Vec> states;                            // horizon + 1
    std::vector<Vec> noise;                             // horizon
    std::vector<std::vector<Measurement>> measurements;  // horizon + 1; index 0 empty
};

/// Simulates Eq-(1) dynamics from a point sampled inside the initial
/// ellipsoid and builds the measurement batches around the true outputs
/// (consistent by construction unless adversarial_offset shifts them).
TruthData simulate_truth(const Scenario& s, std::uint64_t seed);

}  // namespace sme::harness
