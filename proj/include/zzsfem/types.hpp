#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace zzsfem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Stress and strain components in Voigt order (xx, yy, xy); strains carry the
// engineering shear gamma_xy = 2 eps_xy.
using Stress = Eigen::Vector3d;
using Strain = Eigen::Vector3d;

using ElementMatrix = Eigen::Matrix<double, 8, 8>;
using ElementVector = Eigen::Matrix<double, 8, 1>;
using StrainMatrix = Eigen::Matrix<double, 3, 8>;

// Raised when a numerical procedure cannot produce a result (singular
// systems, non-converging inversions, degenerate angles).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for malformed configuration files and CLI arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace zzsfem
