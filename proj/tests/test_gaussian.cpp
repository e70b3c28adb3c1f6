#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsec/gaussian.hpp"
#include "qsec/rng.hpp"

#include <cmath>
#include <random>

using namespace qsec;
using optics::ComplexVec;
using optics::UnitaryMatrix;

namespace {

ComplexVec random_normalized(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVec x(n);
    for (int i = 0; i < n; ++i) x[i] = {gauss(rng), gauss(rng)};
    return optics::normalized(x);
}

// closed form for a two-mode covariance in block form [[A, C], [C^T, B]]:
// nu^2 = (Delta +- sqrt(Delta^2 - 4 det Sigma)) / 2, Delta = detA + detB + 2 detC
std::pair<double, double> two_mode_closed_form(const Eigen::MatrixXd& sigma) {
    const Eigen::Matrix2d a = sigma.topLeftCorner(2, 2);
    const Eigen::Matrix2d b = sigma.bottomRightCorner(2, 2);
    const Eigen::Matrix2d c = sigma.topRightCorner(2, 2);
    const double delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
    const double det = sigma.determinant();
    const double root = std::sqrt(std::max(delta * delta - 4.0 * det, 0.0));
    return {std::sqrt((delta + root) / 2.0), std::sqrt((delta - root) / 2.0)};
}

}  // namespace

TEST_CASE("build_unitary maps basis vectors to the identity") {
    ComplexVec e0 = ComplexVec::Zero(3);
    e0[0] = 1.0;
    const auto u = optics::build_unitary(e0);
    CHECK((u - UnitaryMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_unitary symmetric two-mode case") {
    ComplexVec x(2);
    x[0] = x[1] = 1.0 / std::sqrt(2.0);
    const auto u = optics::build_unitary(x);
    CHECK(u(0, 0).real() == doctest::Approx(0.70710678).epsilon(1e-7));
    CHECK(u(0, 1).real() == doctest::Approx(0.70710678).epsilon(1e-7));
    CHECK((u * u.adjoint() - UnitaryMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_unitary routes the inner product into the result mode") {
    auto rng = make_rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto x = random_normalized(rng, 8);
    ComplexVec w(8);
    for (int i = 0; i < 8; ++i) w[i] = {gauss(rng), gauss(rng)};
    const auto u = optics::build_unitary(x);

    std::complex<double> direct(0.0, 0.0);
    for (int i = 0; i < 8; ++i) direct += x[i] * w[i];  // direct-summation oracle
    const std::complex<double> routed = (u * w)[0];
    CHECK(std::abs(routed - direct) < 1e-12);
}

TEST_CASE("build_unitary rejects bad input") {
    CHECK_THROWS_AS(optics::build_unitary(ComplexVec::Zero(4)), std::invalid_argument);
    ComplexVec big(2);
    big[0] = 2.0;
    big[1] = 0.0;
    CHECK_THROWS_AS(optics::build_unitary(big), std::invalid_argument);
}

TEST_CASE("unitarity holds for 1000 random inputs") {
    auto rng = make_rng(11);
    std::uniform_int_distribution<int> dim(2, 64);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int n = dim(rng);
        const auto u = optics::build_unitary(random_normalized(rng, n));
        worst = std::max(worst,
                         (u * u.adjoint() - UnitaryMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("amplifier variance") {
    CHECK(optics::amplifier_variance(1.0) == doctest::Approx(1.0));
    CHECK(optics::amplifier_variance(3.0) == doctest::Approx(5.0));
    CHECK(optics::amplifier_variance(100.0) == doctest::Approx(199.0));
    CHECK_THROWS_AS(optics::amplifier_variance(0.5), std::invalid_argument);
}

TEST_CASE("amplify-and-split variances") {
    auto v1 = optics::amplify_split_variances(1.0);
    CHECK(v1.detector_var == doctest::Approx(1.0));
    CHECK(v1.reinjected_var == doctest::Approx(1.0));

    auto v3 = optics::amplify_split_variances(3.0);
    CHECK(v3.detector_var == doctest::Approx(11.0 / 3.0).epsilon(1e-12));
    CHECK(v3.reinjected_var == doctest::Approx(1.0 + 4.0 / 3.0).epsilon(1e-12));

    auto vff = optics::amplify_split_variances(optics::kInfiniteGain);
    CHECK(vff.reinjected_var == doctest::Approx(3.0));  // excess noise 2 in the feedforward limit
    CHECK(vff.detector_var == doctest::Approx(2.0));
    CHECK_THROWS_AS(optics::amplify_split_variances(0.0), std::invalid_argument);
}

TEST_CASE("verification covariance diagonal and trace") {
    SUBCASE("G = 1 is the identity") {
        auto rng = make_rng(3);
        const auto x = random_normalized(rng, 5);
        const auto cov = optics::verification_covariance(x, 1.0);
        CHECK((cov.matrix - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("basis-vector input concentrates the excess noise") {
        ComplexVec x = ComplexVec::Zero(2);
        x[0] = 1.0;
        const auto cov = optics::verification_covariance(x, 3.0);
        CHECK(cov.matrix(0, 0) == doctest::Approx(1.0 + 4.0 / 3.0).epsilon(1e-12));
        CHECK(cov.matrix(1, 1) == doctest::Approx(1.0 + 4.0 / 3.0).epsilon(1e-12));
        CHECK(cov.matrix(2, 2) == doctest::Approx(1.0));
        CHECK(cov.matrix(3, 3) == doctest::Approx(1.0));
    }
    SUBCASE("trace identity: 2N + 2(2 - 2/G) for any normalized input") {
        auto rng = make_rng(5);
        for (double g : {1.0, 1.7, 3.0, 50.0}) {
            const int n = 6;
            const auto x = random_normalized(rng, n);
            const auto cov = optics::verification_covariance(x, g);
            const double expected = 2.0 * n + 2.0 * (2.0 - 2.0 / g);
            CHECK(cov.matrix.trace() == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("noise isotropy: unitary congruence preserves the identity") {
    auto rng = make_rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto u = optics::build_unitary(random_normalized(rng, 7));
        const Eigen::MatrixXd s = optics::symplectic_embedding(u);
        CHECK((s * s.transpose() - Eigen::MatrixXd::Identity(14, 14)).cwiseAbs().maxCoeff() <
              1e-10);
    }
}

TEST_CASE("symplectic eigenvalues") {
    SUBCASE("vacuum saturates the uncertainty bound") {
        optics::QuadratureCovariance vac{Eigen::MatrixXd::Identity(6, 6)};
        const auto spec = optics::symplectic_eigenvalues(vac);
        REQUIRE(spec.size() == 3);
        for (double nu : spec) CHECK(nu == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("pure TMSVS has spectrum (1, 1)") {
        for (double v : {1.5, 9.0, 100.0}) {
            const double c = std::sqrt(v * v - 1.0);
            Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(4, 4);
            sigma.topLeftCorner(2, 2) = v * Eigen::Matrix2d::Identity();
            sigma.bottomRightCorner(2, 2) = v * Eigen::Matrix2d::Identity();
            Eigen::Matrix2d sz;
            sz << c, 0, 0, -c;
            sigma.topRightCorner(2, 2) = sz;
            sigma.bottomLeftCorner(2, 2) = sz;

            const auto spec = optics::symplectic_eigenvalues({sigma});
            CHECK(std::abs(spec[0] - 1.0) < 1e-9);
            CHECK(std::abs(spec[1] - 1.0) < 1e-9);

            const auto [hi, lo] = two_mode_closed_form(sigma);  // independent oracle
            CHECK(spec[0] == doctest::Approx(hi).epsilon(1e-9));
            CHECK(spec[1] == doctest::Approx(lo).epsilon(1e-9));
        }
    }
    SUBCASE("single thermal mode") {
        Eigen::MatrixXd sigma = 5.0 * Eigen::MatrixXd::Identity(2, 2);
        const auto spec = optics::symplectic_eigenvalues({sigma});
        REQUIRE(spec.size() == 1);
        CHECK(spec[0] == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("two-mode closed form agrees on random physical states") {
        auto rng = make_rng(23);
        std::uniform_real_distribution<double> uv(1.0, 20.0), uc(0.0, 1.0);
        for (int t = 0; t < 50; ++t) {
            const double va = uv(rng), vb = uv(rng);
            const double cmax = std::sqrt((va * va - 1.0) * (vb * vb - 1.0));
            const double c = uc(rng) * std::sqrt(std::max(cmax, 0.0));
            Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(4, 4);
            sigma.topLeftCorner(2, 2) = va * Eigen::Matrix2d::Identity();
            sigma.bottomRightCorner(2, 2) = vb * Eigen::Matrix2d::Identity();
            Eigen::Matrix2d sz;
            sz << c, 0, 0, -c;
            sigma.topRightCorner(2, 2) = sz;
            sigma.bottomLeftCorner(2, 2) = sz;
            const auto spec = optics::symplectic_eigenvalues({sigma});
            const auto [hi, lo] = two_mode_closed_form(sigma);
            CHECK(spec[0] == doctest::Approx(hi).epsilon(1e-8));
            CHECK(spec[1] == doctest::Approx(lo).epsilon(1e-8));
        }
    }
    SUBCASE("spectrum is invariant under mode permutation") {
        auto rng = make_rng(29);
        const auto x = random_normalized(rng, 4);
        const auto cov = optics::verification_covariance(x, 3.0);
        // swap modes 1 and 3 (rows/cols 2,3 <-> 6,7)
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(8, 8);
        p.row(2).swap(p.row(6));
        p.row(3).swap(p.row(7));
        optics::QuadratureCovariance permuted{p * cov.matrix * p.transpose()};
        const auto a = optics::symplectic_eigenvalues(cov);
        const auto b = optics::symplectic_eigenvalues(permuted);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
    SUBCASE("rejects malformed input") {
        Eigen::MatrixXd bad(4, 4);
        bad.setIdentity();
        bad(0, 1) = 0.5;  // asymmetric
        CHECK_THROWS_AS(optics::symplectic_eigenvalues({bad}), std::invalid_argument);
        Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(4, 4);
        CHECK_THROWS_AS(optics::symplectic_eigenvalues({neg}), std::invalid_argument);
    }
}

TEST_CASE("entropy g") {
    CHECK(optics::entropy_g(1.0) == 0.0);
    CHECK(optics::entropy_g(3.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(optics::entropy_g(5.0) == doctest::Approx(2.7548875021634685).epsilon(1e-14));
    CHECK_THROWS_AS(optics::entropy_g(0.9), std::domain_error);

    SUBCASE("strictly increasing with decreasing slope above 1") {
        // g'(nu) = 0.5 log2((nu+1)/(nu-1)) is positive and strictly
        // decreasing, matching the log2(e nu / 2) asymptote
        double prev = optics::entropy_g(1.0);
        double prev_step = 0.0;
        bool first = true;
        for (double nu = 1.05; nu < 30.0; nu += 0.05) {
            const double cur = optics::entropy_g(nu);
            CHECK(cur > prev);
            const double step = cur - prev;
            if (!first) CHECK(step < prev_step);
            first = false;
            prev_step = step;
            prev = cur;
        }
    }
    SUBCASE("log asymptote at large nu") {
        const double nu = 1000.0;
        const double asym = std::log2(std::exp(1.0) * nu / 2.0);
        CHECK(std::abs(optics::entropy_g(nu) - asym) < 1e-3);
    }
}
