#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lab {

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 1;
    std::size_t gridM = 64;
    std::size_t samples = 2000;
    std::size_t restarts = 2;
    double delta = 0.3;
    double chi = 2.5;
    std::size_t dims = 4;      // matrix dimension d / sign-matrix n
    std::size_t nIndices = 4;  // system size N / chaos variable count
    std::string outPath;
};

struct CheckRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    ExperimentConfig config;
    std::vector<CheckRecord> checks;
    // named witness payloads (JSON fragments) for recomputing the checks
    std::vector<std::pair<std::string, std::string>> witnesses;
    double elapsedSeconds = 0.0;  // not serialized (reports are byte-deterministic)
    std::string version = "lab 1.0.0";
    bool all_pass() const;
};

const std::vector<std::string>& preset_names();

// Runs the named experiment pipeline. Failing checks are report content, not
// errors; unknown presets and out-of-range parameters throw invalid_argument.
Report run_preset(const ExperimentConfig& cfg);

std::string report_to_json(const Report& r);
std::string report_to_csv(const Report& r);

// Writes the report to cfg-style path in the requested format ("json" or
// "csv"); throws runtime_error on I/O failure.
void emit_report(const Report& r, const std::string& format, const std::string& path);

}  // namespace lab
