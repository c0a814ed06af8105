#pragma once

#include "zzsfem/analytic.hpp"
#include "zzsfem/config.hpp"
#include "zzsfem/error.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace zzsfem {

// One level of a benchmark: mesh, loading and the exact solution.
struct BenchmarkProblem {
    std::shared_ptr<const Mesh> mesh;
    Material material;
    std::shared_ptr<const BoundaryConditions> bcs;
    StressFunction exact_stress;
    std::function<Vec2(const Vec2&)> exact_displacement;
    std::optional<SingularSolution> singular;
    Vec2 singular_point = Vec2::Zero();
};

BenchmarkProblem make_benchmark(const StudyConfig& config, int level);

// Linear displacement field of the patch benchmark.
Vec2 patch_displacement(const Vec2& x);

RecoveryConfig recovery_config(const StudyConfig& config, const BenchmarkProblem& problem);

struct LevelReport {
    int level = 0;
    ErrorReport errors;
    int degree_fallbacks = 0;
    // GSIFs (K_I, K_II) used by the splitting and extracted from the solution
    // (singular benchmarks only).
    std::optional<std::array<double, 2>> gsif_used;
    std::optional<std::array<double, 2>> gsif_extracted;

    bool operator==(const LevelReport&) const = default;
};

// Builds, solves, recovers and measures one level. Failures are rethrown
// with the level and variant prepended.
LevelReport run_case(const StudyConfig& config, int level);

struct StudyReport {
    StudyConfig config;
    std::vector<LevelReport> levels;
    // Keyed by exact, estimated, recovered, theta, mD, sigmaD; a quantity
    // is missing when it is not positive on every level.
    std::map<std::string, ConvergenceRate> rates;
    bool complete = true;
    std::string failure;
    std::string version;

    bool operator==(const StudyReport&) const = default;
};

// Runs every configured level (at least two, no duplicates) in increasing
// order. A failing level stops the study; the partial report is returned
// with complete = false.
StudyReport run_convergence_study(const StudyConfig& config);

std::map<std::string, ConvergenceRate> study_rates(const std::vector<LevelReport>& levels);

std::string report_csv(const StudyReport& report);
nlohmann::ordered_json report_json(const StudyReport& report);
StudyReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { Csv, Json, Both };

// Writes <directory>/<config.name>.csv and/or .json. Returns the paths.
std::vector<std::string> emit_report(const StudyReport& report, const std::string& directory,
                                     ReportFormat format = ReportFormat::Both);

std::vector<std::string> preset_names();
// The studies behind a named experiment.
std::vector<StudyConfig> preset(const std::string& name);

std::string version_string();

} // namespace zzsfem
