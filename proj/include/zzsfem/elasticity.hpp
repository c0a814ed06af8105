#pragma once

#include "zzsfem/types.hpp"

namespace zzsfem {

enum class PlaneState { PlaneStrain, PlaneStress };

struct Material {
    double young = 1.0;
    double poisson = 0.0;
    PlaneState state = PlaneState::PlaneStrain;

    bool operator==(const Material&) const = default;
};

// Throws std::invalid_argument unless E > 0 and 0 <= nu < 0.5.
void validate(const Material& m);

// sigma = D eps with eps = (eps_xx, eps_yy, gamma_xy).
Mat3 elasticity_matrix(const Material& m);
Mat3 compliance_matrix(const Material& m);

struct ElasticConstants {
    double shear_modulus;
    double kolosov;
};

ElasticConstants elastic_constants(const Material& m);

} // namespace zzsfem
