#include "qsec/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsec::optics {

namespace {
constexpr double kNormTol = 1e-9;
constexpr double kNuSlack = 1e-9;
}  // namespace

bool is_feedforward(double gain) { return std::isinf(gain) && gain > 0; }

void check_gain(double gain) {
    if (std::isnan(gain) || gain < 1.0) {
        throw std::invalid_argument("gain must satisfy G >= 1 (got " + std::to_string(gain) + ")");
    }
}

double excess_noise_coefficient(double gain) {
    check_gain(gain);
    if (is_feedforward(gain)) return 2.0;
    return 2.0 - 2.0 / gain;
}

ComplexVec normalized(const ComplexVec& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return v / n;
}

UnitaryMatrix build_unitary(const ComplexVec& x_hat) {
    const auto n = x_hat.size();
    if (n < 1) throw std::invalid_argument("build_unitary: empty input");
    const double norm = x_hat.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("build_unitary: degenerate zero input");
    if (std::abs(norm - 1.0) > kNormTol) {
        throw std::invalid_argument("build_unitary: input is not l2-normalized");
    }

    // Householder reflection H mapping u = conj(x_hat) onto alpha*e0 with
    // |alpha| = 1; then U = diag(conj(alpha), 1, ..., 1) * H has first row
    // x_hat exactly. Sign convention alpha = -phase(u_0) keeps the reflection
    // well conditioned for u close to e0.
    const ComplexVec u = x_hat.conjugate();
    std::complex<double> alpha(-1.0, 0.0);
    if (std::abs(u[0]) > 0.0) alpha = -u[0] / std::abs(u[0]);

    ComplexVec v = u;
    v[0] -= alpha;
    const double v2 = v.squaredNorm();

    UnitaryMatrix U = UnitaryMatrix::Identity(n, n);
    if (v2 > 0.0) {
        U -= (2.0 / v2) * (v * v.adjoint());
    }
    U.row(0) *= std::conj(alpha);
    // pin the first row to the input exactly; rounding in the reflection is
    // below 1e-15 so orthonormality is unaffected
    U.row(0) = x_hat.transpose();
    return U;
}

double amplifier_variance(double gain) {
    check_gain(gain);
    return 2.0 * gain - 1.0;
}

SplitVariances amplify_split_variances(double gain) {
    check_gain(gain);
    if (is_feedforward(gain)) {
        return {2.0, 3.0};
    }
    return {(2.0 * gain * gain - 3.0 * gain + 2.0) / gain, 1.0 + (2.0 - 2.0 / gain)};
}

QuadratureCovariance verification_covariance(const ComplexVec& x_hat, double gain) {
    const double norm = x_hat.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
        throw std::invalid_argument("verification_covariance: input is not l2-normalized");
    }
    const double q = excess_noise_coefficient(gain);
    const auto n = x_hat.size();

    // Sigma_complex = I + q * conj(x) x^T, Hermitian with entries
    // q * conj(x_i) x_j off the diagonal.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::complex<double> c = q * std::conj(x_hat[i]) * x_hat[j];
            cov(2 * i, 2 * j) += c.real();
            cov(2 * i, 2 * j + 1) += -c.imag();
            cov(2 * i + 1, 2 * j) += c.imag();
            cov(2 * i + 1, 2 * j + 1) += c.real();
        }
    }
    return {std::move(cov)};
}

Eigen::MatrixXd symplectic_embedding(const Eigen::MatrixXcd& m) {
    const auto rows = m.rows(), cols = m.cols();
    Eigen::MatrixXd s(2 * rows, 2 * cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            s(2 * i, 2 * j) = m(i, j).real();
            s(2 * i, 2 * j + 1) = -m(i, j).imag();
            s(2 * i + 1, 2 * j) = m(i, j).imag();
            s(2 * i + 1, 2 * j + 1) = m(i, j).real();
        }
    }
    return s;
}

SymplecticSpectrum symplectic_eigenvalues(const QuadratureCovariance& cov) {
    const Eigen::MatrixXd& sigma = cov.matrix;
    const auto dim = sigma.rows();
    if (dim == 0 || dim % 2 != 0 || sigma.cols() != dim) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance must be 2N x 2N");
    }
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(sigma, Eigen::EigenvaluesOnly);
    if (sa.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance is not positive definite");
    }

    // Omega = direct sum of [[0,1],[-1,0]]; eigenvalues of Omega*Sigma come in
    // pairs +-(i nu), so the moduli list contains each nu twice.
    const auto n = dim / 2;
    Eigen::MatrixXd omega_sigma(dim, dim);
    for (Eigen::Index k = 0; k < n; ++k) {
        omega_sigma.row(2 * k) = sigma.row(2 * k + 1);
        omega_sigma.row(2 * k + 1) = -sigma.row(2 * k);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(omega_sigma, /*computeEigenvectors=*/false);

    std::vector<double> moduli(dim);
    for (Eigen::Index i = 0; i < dim; ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
    std::sort(moduli.begin(), moduli.end(), std::greater<>());

    SymplecticSpectrum spectrum(n);
    for (Eigen::Index k = 0; k < n; ++k) spectrum[k] = moduli[2 * k];  // dedup the +- pairs
    return spectrum;
}

double entropy_g(double nu) {
    if (std::isnan(nu) || nu < 1.0 - kNuSlack) {
        throw std::domain_error("entropy_g: symplectic eigenvalue below 1");
    }
    if (nu <= 1.0) return 0.0;
    const double a = (nu + 1.0) / 2.0;
    const double b = (nu - 1.0) / 2.0;
    double r = a * std::log2(a);
    if (b > 0.0) r -= b * std::log2(b);  // b log b -> 0 as b -> 0
    return r;
}

}  // namespace qsec::optics
