#pragma once
// The three-step protocol as an analytic noise channel (means + variances)
// and as a Monte Carlo sampling simulator. The simulator is deliberately
// independent of the closed-form covariance path so the two can cross-check
// each other.

#include "qsec/gaussian.hpp"

#include <cstdint>
#include <optional>

namespace qsec::engine {

using optics::ComplexVec;

// Hardware configuration. gain = optics::kInfiniteGain selects the
// measure-and-feedforward limit.
struct ProtocolParams {
    double mu = 4.0;                    // mean photon number per weight symbol
    double gain = 3.0;                  // amplifier gain G >= 1
    double forward_transmittance = 1.0; // server -> client path, T_f in (0, 1]
    double roundtrip_transmittance = 1.0; // full loop, T in (0, 1], T <= T_f
    int modes = 392;                    // N

    void validate() const;  // throws std::invalid_argument

    // Photon number arriving at the client: T_f * mu (coherent states under
    // pure loss stay coherent with scaled amplitude).
    double received_mu() const { return forward_transmittance * mu; }
};

// Physical weight amplitudes w_j = sqrt(mu) W_j / ||W||_RMS.
struct EncodedWeights {
    ComplexVec amplitudes;
    double rms = 0.0;  // ||W||_RMS of the source logical matrix
    double mu = 0.0;
};

// SNR prefactor G(G-1)/(2G^2-3G+2); 0 at G=1, 1/2 at G=inf.
double snr_coefficient(double gain);

// Physical scaling parameter F = sqrt(snr_coefficient(G) * mu). The received
// photon number T_f * mu is what enters.
double scaling_parameter(const ProtocolParams& params);

EncodedWeights encode_weights(const Eigen::VectorXd& w_row, double w_rms, double mu);
EncodedWeights encode_weights(const ComplexVec& w_row, double w_rms, double mu);

// SNR of the client's inner-product measurement for a given result-mode
// amplitude w.x_hat.
double snr(const ProtocolParams& params, std::complex<double> inner_amplitude);

// Digital factor (||x||/sqrt(G-1)) (||W||_RMS/sqrt(mu)) that makes the
// detector reading an unbiased estimate of W_i.x. Throws for G = 1 or mu = 0.
double rescale_factor(const ProtocolParams& params, double x_norm, double w_rms);

// One noisy inner product: W_row.x + eps, eps ~ N(0, s^2) with
// s = ||x|| ||W||_RMS / F. Deterministic for a given seed.
double inner_product_channel(const Eigen::VectorXd& w_row, const Eigen::VectorXd& x,
                             double w_rms, const ProtocolParams& params, std::uint64_t rng_seed);

// Batched wrapper: one matrix-vector product with independent per-row noise
// substreams derived from (seed, row).
Eigen::VectorXd matvec_channel(const Eigen::MatrixXd& w, const Eigen::VectorXd& x,
                               double w_rms, const ProtocolParams& params, std::uint64_t rng_seed);

// Empirical statistics of the simulated roundtrip.
struct VerificationStats {
    ComplexVec mean;                   // per-mode mean, -> w
    std::vector<double> variance;      // per-mode, X/P pooled, -> 1 + eta_i
    std::complex<double> detector_mean;  // -> sqrt(G-1) w.x_hat
    double detector_variance = 0.0;    // per quadrature
    std::int64_t sample_count = 0;
};

// Samples the full protocol: coherent noise about w, U_xhat, amplify-and-split
// on the result mode (or measure-and-feedforward at G = inf), U_xhat^dag.
// Requires ||x_hat|| = 1 and n_samples >= 1000.
VerificationStats simulate_roundtrip_mc(const ComplexVec& x_hat, const ComplexVec& w,
                                        const ProtocolParams& params, std::int64_t n_samples,
                                        std::uint64_t rng_seed);

}  // namespace qsec::engine
