#pragma once
// Closed-form leakage bounds and their independent estimation oracles:
// Holevo weight leakage, classical/quantum Cramer-Rao data leakage,
// loss/width/multiparty sweeps, and the multi-query permutation defense.

#include "qsec/dnn_model.hpp"
#include "qsec/engine.hpp"

#include <cstdint>
#include <vector>

namespace qsec::security {

// Which set of constants enters the Holevo bound. The two disagree in the
// source material: METHODS (c^2 = T(V^2-1), nu3 = b - c^2/(a+1)) satisfies
// chi = 0 for an undisturbed pure state and is the default; MAIN_TEXT
// (c^2 = 4mu^2+2mu+1, nu3 = a - c^2/(b+1)) reproduces the printed equation
// and yields chi > 0 even at eta = 0. MAIN_TEXT has no transmittance
// dependence; it is evaluated as printed (T = 1).
enum class HolevoFormulation { kMethods, kMainText };

struct HolevoInputs {
    double mu = 4.0;            // photon number per symbol
    double eta = 0.0;           // verification-state excess noise (SNU)
    double transmittance = 1.0; // channel T in (0, 1]
    double extra_excess = 0.0;  // xi_ch, channel excess noise beyond eta
    HolevoFormulation formulation = HolevoFormulation::kMethods;

    double total_excess() const { return eta + extra_excess; }
    void validate() const;
};

// Per-symbol leakage summary. All values are in bits.
struct LeakageReport {
    double weight_bits_per_symbol = 0.0;
    double data_bits_per_symbol_classical = 0.0;  // k = 1
    double data_bits_per_symbol_quantum = 0.0;    // k = 2
    double mu = 0.0;
    double gain = 1.0;
    double loss_db = 0.0;
    int modes = 0;
    std::int64_t measurement_count = 0;
    bool saturated = false;  // target F unreachable at this grid point
};

// chi = g(nu1) + g(nu2) - g(nu3), clamped at 0 (an accessible-information
// bound cannot be negative; tiny float negatives are truncated). Throws
// std::domain_error if (a+b)^2 < 4c^2.
double holevo_weight_leakage(const HolevoInputs& inputs);

// Classical Fisher information of the verification-state variance about a
// single normalized data element: 2 (2-2/G)^2 x^2 / sigma^4 with
// sigma^2 = 1 + (2-2/G) x^2.
double fisher_information(double x, double gain);

// Quantum Fisher information; exactly twice the classical value.
double quantum_fisher_information(double x, double gain);

// Eq.-(3)-style bound: 0.5 log2(1 + k 8 M (G-1)^2 |x|^4 / (G^2 sigma^4)).
// k = 1 classical adversary, k = 2 quantum adversary.
double data_leakage(double x, double gain, std::int64_t measurements, int k);

struct MleOracleResult {
    double empirical_variance = 0.0;
    double crb = 0.0;  // 1 / (M I(x))
    bool identifiable = true;
    double ratio() const { return empirical_variance / crb; }
};

// Independent Monte Carlo check of the Cramer-Rao bound: draws M samples of
// R ~ N(w, sigma^2(x_true)) per trial, maximum-likelihood-estimates x from the
// sample variance, and reports the estimator variance across trials.
// x_true = 0 is flagged non-identifiable (zero Fisher information).
MleOracleResult mle_variance_oracle(double x_true, double gain, std::int64_t measurements,
                                    std::int64_t trials, std::uint64_t rng_seed);

// Round-trip-loss sweep at a fixed accuracy target: for each loss L (dB),
// T = 10^(-L/10) and T_f = 10^(-L/20), mu is solved so that F computed with
// the received T_f*mu equals target_f, and the Holevo bound is evaluated at
// that mu and transmittance T. Data leakage depends only on G and stays
// constant across the sweep. Points whose required mu exceeds mu_cap are
// flagged saturated.
std::vector<LeakageReport> loss_sweep(const std::vector<double>& loss_db_range,
                                      const engine::ProtocolParams& base_params, double target_f,
                                      double mu_cap = 1e9);

// Uniform-data width sweep: |x_i|^2 = 1/N, eta = (2-2/G)/N, M = N.
std::vector<LeakageReport> width_sweep(const std::vector<int>& n_range,
                                       const engine::ProtocolParams& params);

enum class MultipartyTopology { kSymmetric, kAsymmetric };

struct MultipartyScales {
    double snr_scale = 1.0;
    double eta_scale = 1.0;
};

// Scaling of per-client SNR and of the accumulated verification-state excess
// noise when n clients share the protocol. n = 1 is the identity.
MultipartyScales multiparty_adjust(int n_clients, MultipartyTopology topology);

// Weight-space defense against multi-query accumulation: hidden units are
// permuted (and, for ReLU, positively rescaled) with the inverse applied to
// the next layer, preserving the network function exactly.
dnn::MlpModel permute_defense(const dnn::MlpModel& model, std::uint64_t rng_seed,
                              bool allow_scaling);

}  // namespace qsec::security
