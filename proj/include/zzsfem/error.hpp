#pragma once

// Energy-norm error measures: the ZZ estimate ||sigma* - sigma^h||, the exact
// error ||sigma - sigma^h||, the recovered-field error ||sigma - sigma*||,
// effectivity indices and convergence rates.

#include "zzsfem/recovery.hpp"
#include "zzsfem/solver.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace zzsfem {

using StressFunction = std::function<Stress(const Vec2&)>;

struct QuadratureOptions {
    // Gauss order per direction on each subcell (SFEM) or element (FEM).
    int regular_order = 4;
    // Order used on elements having a node at the singular point.
    int singular_order = 16;
    std::optional<Vec2> singular_point;
};

// Whole mesh when element < 0, otherwise one element.
double estimated_error_norm(const DiscreteSolution& solution, const RecoveredStressField& field, int element = -1,
                            const QuadratureOptions& options = {});
double exact_error_norm(const DiscreteSolution& solution, const StressFunction& exact, int element = -1,
                        const QuadratureOptions& options = {});
double recovered_error_norm(const RecoveredStressField& field, const DiscreteSolution& solution,
                            const StressFunction& exact, int element = -1, const QuadratureOptions& options = {});

// Local effectivity: theta - 1 for theta >= 1, 1 - 1/theta otherwise.
double local_effectivity(double theta_e);

struct ElementError {
    int element = 0;
    double estimated = 0;
    double exact = 0;
    double recovered = 0;
    double theta = 0;
    double d = 0;
    bool included = true; // false when the exact element error is negligible

    bool operator==(const ElementError&) const = default;
};

struct EffectivityStats {
    double theta = 0;
    double mean_abs_d = 0;
    double sigma_d = 0; // population standard deviation
    int excluded = 0;
};

// Global theta and D statistics from per-element norms. Elements whose exact
// error is below 1e-14 of the global exact error are excluded from D stats.
EffectivityStats effectivity(std::vector<ElementError>& elements);

struct ErrorReport {
    int dofs = 0;
    double estimated = 0;
    double exact = 0;
    double recovered = 0;
    double theta = 0;
    double mean_abs_d = 0;
    double sigma_d = 0;
    int excluded = 0;
    std::vector<ElementError> elements;

    bool operator==(const ErrorReport&) const = default;
};

// When the exact error vanishes (patch tests) theta and the D statistics
// stay zero and every element is marked excluded.
ErrorReport compute_error_report(const DiscreteSolution& solution, const RecoveredStressField& field,
                                 const StressFunction& exact, const QuadratureOptions& options = {});

struct ConvergenceRate {
    double fitted = 0;  // least-squares slope of -log(value) vs log(dof)
    double average = 0; // mean of the pairwise rates
    std::vector<double> pairwise;

    bool operator==(const ConvergenceRate&) const = default;
};

// Requires >= 2 points, strictly increasing dofs and positive values.
ConvergenceRate convergence_rate(const std::vector<double>& dofs, const std::vector<double>& values);

} // namespace zzsfem
