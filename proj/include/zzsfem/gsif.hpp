#pragma once

// Generalised stress intensity factors from a discrete solution through a
// domain-form reciprocal-work interaction integral with dual (exponent
// -lambda) extraction fields and a plateau weight q.

#include "zzsfem/analytic.hpp"
#include "zzsfem/recovery.hpp"
#include "zzsfem/solver.hpp"

namespace zzsfem {

struct GsifEstimate {
    double k_I = 0;
    double k_II = 0;
    int ring_elements = 0;
};

// Reciprocal work of two fields over an arc of radius r spanning the wedge
// [-alpha/2, alpha/2]: int (sigma_a e_r) . u_b - (sigma_b e_r) . u_a ds.
// Independent of r when both fields are eigenfields of the same wedge.
double contour_interaction(const EigenField& a, const EigenField& b, double alpha, double radius = 1.0,
                           int points = 64);

// Domain form of the same integral with the discrete field as field a and
// an analytic auxiliary field b. q > 0 on the domain boundary is handled by
// adding the boundary term with the prescribed tractions.
double domain_interaction(const DiscreteSolution& solution, const EigenField& auxiliary,
                          const PlateauFunction& plateau, int* ring_elements = nullptr);

// K_mode = domain_interaction(u_h, dual) / contour_interaction(primal(K=1), dual).
// Throws NumericalError if no element intersects the plateau ramp.
double extract_gsif(const DiscreteSolution& solution, const SingularSolution& singular, Mode mode,
                    const PlateauFunction& plateau);

GsifEstimate extract_gsifs(const DiscreteSolution& solution, const SingularSolution& singular,
                           const PlateauFunction& plateau);

} // namespace zzsfem
