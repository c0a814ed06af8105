#pragma once

#include "zzsfem/elasticity.hpp"
#include "zzsfem/recovery.hpp"
#include "zzsfem/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace zzsfem {

enum class Benchmark { Cylinder, LShape, Patch };

std::string to_string(Benchmark b);

struct StudyConfig {
    std::string name = "study";
    Benchmark benchmark = Benchmark::Cylinder;
    std::vector<int> levels{1, 2, 3, 4};
    std::string output = "results";

    Formulation formulation = Formulation::sfem(4);

    RecoveryVariant variant = RecoveryVariant::SPR_CX;
    int interior_degree = 1;
    int boundary_degree = 2;
    double splitting_radius = 0.5;

    GsifMode gsif_mode = GsifMode::Exact;
    double plateau_inner = 0.45;
    double plateau_outer = 0.9;

    Material material{3.0e7, 0.3, PlaneState::PlaneStrain};

    double inner_radius = 5.0;
    double outer_radius = 20.0;
    double pressure = 1.0;

    double grading = 2.0;
    double k_I = 1.0;
    double k_II = 0.0;
    double half_size = 1.0;
    int base_divisions = 4;

    int patch_divisions = 4;

    int regular_order = 4;
    int singular_order = 16;

    bool operator==(const StudyConfig&) const = default;
};

// Defaults of a benchmark: material and level sequence differ between them.
StudyConfig default_config(Benchmark b);

// Ordered (section.key, value) pairs. Parsing these back yields the same
// configuration, so reports embed them as the config echo.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues to_key_values(const StudyConfig& c);
std::string to_ini(const StudyConfig& c);

// Parses INI text: [section] headers, key = value lines, '#' or ';'
// comments. Unknown sections or keys throw ConfigError.
KeyValues parse_ini(const std::string& text);

// "section.key=value" command-line override.
std::pair<std::string, std::string> parse_override(const std::string& text);

// Builds a configuration from assignments. study.benchmark selects the
// defaults, the remaining keys are then applied in order.
StudyConfig build_config(const KeyValues& assignments);

StudyConfig load_config(const std::string& path, const KeyValues& overrides = {});

// Throws ConfigError for inconsistent or out-of-range settings.
void validate(const StudyConfig& c);

} // namespace zzsfem
