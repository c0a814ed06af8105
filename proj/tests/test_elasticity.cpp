#include "zzsfem/elasticity.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace zzsfem;

TEST_SUITE("elasticity")
{
    TEST_CASE("nu = 0 gives the identity-like matrix in both states")
    {
        for (PlaneState s : {PlaneState::PlaneStrain, PlaneState::PlaneStress}) {
            const Mat3 d = elasticity_matrix({1.0, 0.0, s});
            Mat3 expected = Mat3::Zero();
            expected.diagonal() << 1, 1, 0.5;
            CHECK((d - expected).norm() < 1e-15);
        }
    }

    TEST_CASE("plane strain D11 closed form")
    {
        const double e = 3e7, nu = 0.3;
        const Mat3 d = elasticity_matrix({e, nu, PlaneState::PlaneStrain});
        CHECK(d(0, 0) == doctest::Approx(e * (1 - nu) / ((1 + nu) * (1 - 2 * nu))).epsilon(1e-14));
        CHECK(d(0, 0) == doctest::Approx(4.0385e7).epsilon(1e-4));
        CHECK(d(2, 2) == doctest::Approx(e / (2 * (1 + nu))).epsilon(1e-14));
    }

    TEST_CASE("D symmetric positive definite and inverse of the compliance")
    {
        for (PlaneState s : {PlaneState::PlaneStrain, PlaneState::PlaneStress})
            for (double nu : {0.0, 0.2, 0.3, 0.49}) {
                const Material m{210e3, nu, s};
                const Mat3 d = elasticity_matrix(m);
                CHECK((d - d.transpose()).norm() < 1e-12 * d.norm());
                CHECK(Eigen::SelfAdjointEigenSolver<Mat3>(d).eigenvalues().minCoeff() > 0);
                CHECK((compliance_matrix(m) * d - Mat3::Identity()).norm() < 1e-12);
            }
    }

    TEST_CASE("shear modulus and Kolosov constant")
    {
        const ElasticConstants a = elastic_constants({3e7, 0.3, PlaneState::PlaneStrain});
        CHECK(a.shear_modulus == doctest::Approx(1.153846e7).epsilon(1e-6));
        CHECK(a.kolosov == doctest::Approx(1.8));
        CHECK(elastic_constants({1000, 0.3, PlaneState::PlaneStress}).kolosov == doctest::Approx(2.7 / 1.3));
        for (PlaneState s : {PlaneState::PlaneStrain, PlaneState::PlaneStress}) {
            const ElasticConstants c = elastic_constants({1, 0, s});
            CHECK(c.shear_modulus == doctest::Approx(0.5));
            CHECK(c.kolosov == doctest::Approx(3.0));
        }
        for (int i = 0; i < 10; ++i) {
            const double nu = 0.05 * i;
            const double ks = elastic_constants({1, nu, PlaneState::PlaneStrain}).kolosov;
            const double kp = elastic_constants({1, nu, PlaneState::PlaneStress}).kolosov;
            CHECK(ks > 1);
            CHECK(ks <= 3);
            CHECK(kp > 5.0 / 3);
            CHECK(kp <= 3);
        }
    }

    TEST_CASE("invalid materials are rejected")
    {
        CHECK_THROWS_AS(validate(Material{0, 0.3}), std::invalid_argument);
        CHECK_THROWS_AS(validate(Material{1, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(validate(Material{1, -0.1}), std::invalid_argument);
        CHECK_THROWS_AS(elasticity_matrix(Material{-1, 0.3}), std::invalid_argument);
    }
}
