#pragma once

#include <string>

#include "sme/harness/runner.hpp"

namespace sme::harness {

enum class EmitFormat { Csv, Json };

/// Writes the step records to `path` (CSV columns: k, xhat0..xhat{n-1},
/// sigma, rank, pvol, ssal, err, contained, cases, ms; JSON mirrors the
/// field names). Number formatting is deterministic.
void emit(const std::vector<StepRecord>& records, EmitFormat format, const std::string& path);

/// Parses a JSON records file back (used by round-trip checks).
std::vector<StepRecord> read_records_json(const std::string& path);

/// Run manifest (seed, config, tool version) written alongside the records.
struct Manifest {
    std::uint64_t seed = 0;
    std::string scenario;
    std::string pred;
    std::string corr;
    std::string policy;
    bool diagnostics = false;
    int samples = 0;
    std::string tool_version;
    double total_ms = 0.0;
};

void write_manifest(const Manifest& m, const std::string& path);

extern const char* const kToolVersion;

}  // namespace sme::harness
