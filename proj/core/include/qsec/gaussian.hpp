#pragma once
// Exact Gaussian-state algebra for the coherent linear-algebra engine:
// unitary construction, amplifier/beamsplitter variance propagation,
// verification-state covariance, symplectic spectra, and the bosonic
// entropy function g(nu).
//
// Conventions used throughout the library:
//   * quadratures X = a + a^dag, P = (a - a^dag)/i,
//   * shot-noise units (SNU): vacuum variance is 1 per quadrature,
//   * a coherent state is represented by a complex sample z with mean
//     equal to its amplitude and independent unit-variance Gaussian
//     noise on Re z and Im z,
//   * gain G = +infinity selects the measure-and-feedforward limit.

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <vector>

namespace qsec::optics {

using ComplexVec = Eigen::VectorXcd;
using UnitaryMatrix = Eigen::MatrixXcd;

inline constexpr double kInfiniteGain = std::numeric_limits<double>::infinity();

// 2N x 2N real symmetric covariance of quadratures in SNU.
// Mode i owns rows/columns 2i (X) and 2i+1 (P).
struct QuadratureCovariance {
    Eigen::MatrixXd matrix;

    int modes() const { return static_cast<int>(matrix.rows()) / 2; }
};

// Symplectic eigenvalues sorted descending; >= 1 for physical states.
using SymplecticSpectrum = std::vector<double>;

bool is_feedforward(double gain);

// Throws std::invalid_argument unless gain >= 1 (infinity allowed).
void check_gain(double gain);

// 2 - 2/G, the per-unit-|x_i|^2 excess noise of the verification state.
double excess_noise_coefficient(double gain);

// l2-normalizes v; throws std::invalid_argument on an all-zero vector.
ComplexVec normalized(const ComplexVec& v);

// Returns a unitary whose first row is exactly x_hat, so (U w)_0 equals
// sum_j x_hat_j w_j. The remaining rows complete an orthonormal basis via a
// deterministic Householder reflection, making the construction reproducible.
// Requires ||x_hat|| = 1 within 1e-9.
UnitaryMatrix build_unitary(const ComplexVec& x_hat);

// Quadrature variance 2G - 1 of a coherent state after phase-insensitive
// amplification with gain G.
double amplifier_variance(double gain);

struct SplitVariances {
    double detector_var;    // (2G^2 - 3G + 2)/G at the 1 - 1/G port
    double reinjected_var;  // 1 + (2 - 2/G) at the 1/G port
};

// Per-quadrature variances after amplifying the result mode by G and
// splitting with ratio 1-1/G : 1/G (vacuum at the dark port). At G = inf the
// detector variance is reported per unit of amplified signal power (value 2),
// the measure-and-feedforward heterodyne penalty.
SplitVariances amplify_split_variances(double gain);

// Quadrature covariance of the verification state,
//   Sigma = 1 + (2 - 2/G) x_hat^dag x_hat,
// realized by embedding each complex entry c as [[Re c, -Im c], [Im c, Re c]].
// Mode i's diagonal equals 1 + eta_i with eta_i = (2 - 2/G) |x_hat_i|^2.
QuadratureCovariance verification_covariance(const ComplexVec& x_hat, double gain);

// Real 2N x 2N embedding of a complex N x N matrix acting on quadratures.
// For unitary input the embedding is orthogonal and symplectic.
Eigen::MatrixXd symplectic_embedding(const Eigen::MatrixXcd& m);

// Moduli of the eigenvalues of i*Omega*Sigma, deduplicated to N values and
// sorted descending. Throws std::invalid_argument for non-symmetric and
// non-positive-definite input.
SymplecticSpectrum symplectic_eigenvalues(const QuadratureCovariance& cov);

// Bosonic entropy in bits:
//   g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2),
// continuous at nu = 1 with g(1) = 0. Accepts nu >= 1 - 1e-9 (numerical
// slack for physical spectra); throws std::domain_error below that.
double entropy_g(double nu);

}  // namespace qsec::optics
