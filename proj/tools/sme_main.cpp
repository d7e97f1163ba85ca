// Set-membership estimation harness CLI: runs scenarios, verifies the audit
// matrix, and generates scenario files. Exit codes: 0 success, 1 audit
// violation, 2 input error.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "sme/harness/emit.hpp"
#include "sme/harness/montecarlo.hpp"
#include "sme/harness/runner.hpp"

using namespace sme;
using namespace sme::harness;

namespace {

PredictionVariant parse_pred(const std::string& s) {
    if (s == "vol") return PredictionVariant::VolumeMin;
    if (s == "trace") return PredictionVariant::TraceMin;
    throw ValidationError("--pred must be vol|trace");
}

CorrectionVariant parse_corr(const std::string& s) {
    if (s == "sigma") return CorrectionVariant::SigmaMin;
    if (s == "vol") return CorrectionVariant::VolumeMin;
    if (s == "ssal") return CorrectionVariant::SsalMin;
    throw ValidationError("--corr must be sigma|vol|ssal");
}

int run_estimate(const std::string& scenario_path, const std::string& pred,
                 const std::string& corr, std::uint64_t seed, int samples,
                 const std::string& out_dir, const std::string& emit_format, bool diagnostics,
                 const std::string& policy, bool timing) {
    Scenario scenario = load_scenario(scenario_path);
    EstimatorConfig config;
    config.pred.variant = parse_pred(pred);
    config.corr.variant = parse_corr(corr);
    config.sigma0 = scenario.sigma0;
    config.diagnostics = diagnostics;
    if (policy == "skip")
        config.inconsistency = InconsistencyPolicy::Skip;
    else if (policy == "abort")
        config.inconsistency = InconsistencyPolicy::Abort;
    else
        throw ValidationError("--policy must be skip|abort");

    RunOptions options;
    options.mc_samples = samples;
    options.timing = timing;
    RunResult result = run(scenario, config, seed, options);

    std::filesystem::create_directories(out_dir);
    const std::string ext = emit_format == "json" ? ".json" : ".csv";
    const std::string records_path = out_dir + "/records" + ext;
    emit(result.records, emit_format == "json" ? EmitFormat::Json : EmitFormat::Csv,
         records_path);

    Manifest manifest;
    manifest.seed = seed;
    manifest.scenario = scenario_path;
    manifest.pred = pred;
    manifest.corr = corr;
    manifest.policy = policy;
    manifest.diagnostics = diagnostics;
    manifest.samples = samples;
    manifest.tool_version = kToolVersion;
    manifest.total_ms = result.total_ms;
    write_manifest(manifest, out_dir + "/manifest.json");

    std::cout << "wrote " << records_path << " (" << result.records.size() << " steps)\n";
    if (!result.audit.ok()) {
        std::cerr << "audit violations: " << result.audit.violations
                  << " (containment " << result.audit.containment_ok << ", acceptability "
                  << result.audit.acceptability_ok << ", sigma-monotone "
                  << result.audit.sigma_monotone_ok << ", prediction-mc "
                  << result.audit.prediction_containment_ok << ")\n";
        return 1;
    }
    return 0;
}

int run_verify(const std::string& scenario_path, bool all_criteria, std::uint64_t seed,
               int samples) {
    Scenario scenario = load_scenario(scenario_path);
    std::vector<std::pair<std::string, std::string>> combos;
    if (all_criteria) {
        for (const char* p : {"vol", "trace"})
            for (const char* c : {"sigma", "vol", "ssal"}) combos.emplace_back(p, c);
    } else {
        combos.emplace_back("vol", "sigma");
    }

    int failures = 0;
    std::vector<std::string> lines(combos.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
#endif
    for (int i = 0; i < static_cast<int>(combos.size()); ++i) {
        EstimatorConfig config;
        config.pred.variant = parse_pred(combos[i].first);
        config.corr.variant = parse_corr(combos[i].second);
        config.sigma0 = scenario.sigma0;
        RunOptions options;
        options.mc_samples = samples;
        bool ok = false;
        std::string detail;
        try {
            RunResult result = run(scenario, config, seed, options);
            ok = result.audit.ok();
            if (!ok) detail = " (" + std::to_string(result.audit.violations) + " violations)";
        } catch (const Error& e) {
            detail = std::string(" (") + e.what() + ")";
        }
        if (!ok) ++failures;
        lines[i] = std::string(ok ? "PASS" : "FAIL") + " pred=" + combos[i].first +
                   " corr=" + combos[i].second + detail;
    }
    for (const auto& line : lines) std::cout << line << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recursive ellipsoidal set-membership state estimation harness"};
    app.require_subcommand(1);

    auto* est = app.add_subcommand("estimate", "Run one scenario and emit step records");
    std::string scenario_path, pred = "vol", corr = "sigma", out_dir = "out",
                emit_format = "csv", policy = "skip";
    std::uint64_t seed = 0;
    int samples = 0;
    bool diagnostics = false, timing = false;
    est->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    est->add_option("--pred", pred, "Prediction criterion: vol|trace");
    est->add_option("--corr", corr, "Correction criterion: sigma|vol|ssal");
    est->add_option("--seed", seed, "RNG seed");
    est->add_option("--samples", samples, "Monte-Carlo points for the per-step prediction audit");
    est->add_option("--out", out_dir, "Output directory");
    est->add_option("--emit", emit_format, "Records format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    est->add_flag("--diagnostics", diagnostics, "Track the v/s bound factors");
    est->add_option("--policy", policy, "Inconsistency policy: skip|abort");
    est->add_flag("--timing", timing,
                  "Record measured per-step times in the ms column (breaks byte reproducibility)");

    auto* ver = app.add_subcommand("verify", "Run the audit matrix over criterion combinations");
    std::string v_scenario;
    std::uint64_t v_seed = 0;
    bool all_criteria = false;
    int v_samples = 2000;
    ver->add_option("--scenario", v_scenario, "Scenario JSON file")->required();
    ver->add_flag("--all-criteria", all_criteria, "All 6 prediction x correction combinations");
    ver->add_option("--seed", v_seed, "RNG seed");
    ver->add_option("--samples", v_samples, "Monte-Carlo points per audit");

    auto* gen = app.add_subcommand("gen-scenario", "Write a template scenario file");
    std::string tmpl = "stable", gen_out = "scenario.json";
    int n = 3, horizon = 100, gen_m = 2, gen_l = 1;
    std::uint64_t gen_seed = 0;
    gen->add_option("--template", tmpl, "stable|rotation|integrator")
        ->check(CLI::IsMember({"stable", "rotation", "integrator"}));
    gen->add_option("--n", n, "State dimension");
    gen->add_option("--horizon", horizon, "Number of steps");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output path");
    gen->add_option("--m", gen_m, "Noise generators per step");
    gen->add_option("--l", gen_l, "Control inputs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed())
            return run_estimate(scenario_path, pred, corr, seed, samples, out_dir, emit_format,
                                diagnostics, policy, timing);
        if (ver->parsed()) return run_verify(v_scenario, all_criteria, v_seed, v_samples);
        if (gen->parsed()) {
            save_scenario(generate_scenario(tmpl, n, horizon, gen_seed, gen_m, gen_l), gen_out);
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
