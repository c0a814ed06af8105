#include "zzsfem/elasticity.hpp"

#include <Eigen/Dense>

namespace zzsfem {

void validate(const Material& m)
{
    if (!(m.young > 0))
        throw std::invalid_argument("Young's modulus must be positive");
    if (!(m.poisson >= 0 && m.poisson < 0.5))
        throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
}

Mat3 elasticity_matrix(const Material& m)
{
    validate(m);
    const double e = m.young;
    const double nu = m.poisson;
    Mat3 d = Mat3::Zero();
    if (m.state == PlaneState::PlaneStrain) {
        const double f = e / ((1 + nu) * (1 - 2 * nu));
        d(0, 0) = d(1, 1) = f * (1 - nu);
        d(0, 1) = d(1, 0) = f * nu;
        d(2, 2) = f * (1 - 2 * nu) / 2;
    } else {
        const double f = e / (1 - nu * nu);
        d(0, 0) = d(1, 1) = f;
        d(0, 1) = d(1, 0) = f * nu;
        d(2, 2) = f * (1 - nu) / 2;
    }
    return d;
}

Mat3 compliance_matrix(const Material& m)
{
    return elasticity_matrix(m).inverse();
}

ElasticConstants elastic_constants(const Material& m)
{
    validate(m);
    const double nu = m.poisson;
    return {m.young / (2 * (1 + nu)), m.state == PlaneState::PlaneStrain ? 3 - 4 * nu : (3 - nu) / (1 + nu)};
}

} // namespace zzsfem
