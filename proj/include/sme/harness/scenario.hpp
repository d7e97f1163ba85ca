#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sme/prediction.hpp"

namespace sme::harness {

enum class NoisePolicy { Uniform, Vertex, Zero };

/// Per-step measurement generation recipe. Bounds are constructed around the
/// simulated true output, so generated measurements are consistent by
/// construction; adversarial_offset shifts them away from the truth to
/// exercise the Skip/Abort policies.
struct MeasurementSchedule {
    double presence_probability = 1.0;
    int per_step = 1;
    double strip_weight = 1.0;
    double upper_weight = 0.0;
    double lower_weight = 0.0;
    double equality_weight = 0.0;
    double width = 0.5;                 // max half-width of generated bounds
    std::string direction = "random";   // "random" | "axes"
    double adversarial_offset = 0.0;
};

struct ExplicitModels {
    std::vector<ProcessModel> steps;  // cycled when shorter than the horizon
};

struct GeneratedModels {
    std::string name;  // "random-stable" | "rotation" | "integrator"
    std::uint64_t seed = 0;
    int m = 1;  // noise generators
    int l = 0;  // control inputs
};

using ModelSource = std::variant<ExplicitModels, GeneratedModels>;

struct Scenario {
    int n = 0;
    int horizon = 0;
    ModelSource model;
    Vec x0_center;
    SymMatrix p0;
    double sigma0 = 1.0;
    NoisePolicy noise_policy = NoisePolicy::Uniform;
    MeasurementSchedule schedule;

    Ellipsoid initial_ellipsoid() const;
    /// Model for transition k -> k+1 (explicit lists cycle).
    ProcessModel model_at(int k) const;
    void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

/// Deterministic template scenarios ("stable" | "rotation" | "integrator").
Scenario generate_scenario(const std::string& tmpl, int n, int horizon, std::uint64_t seed,
                           int m = 2, int l = 1);

/// Expands a generator spec into concrete per-step models (deterministic in
/// the generator seed). Explicit sources come back as-is.
std::vector<ProcessModel> expand_models(const Scenario& s);

}  // namespace sme::harness
