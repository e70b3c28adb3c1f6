#pragma once
// MLP training on MNIST, complex packing, secure noisy inference through the
// engine's channel model, accuracy sweeps, the logistic accuracy-vs-F fit,
// and the accuracy/leakage tradeoff map.

#include "qsec/dataset.hpp"
#include "qsec/dnn_model.hpp"
#include "qsec/engine.hpp"
#include "qsec/security.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qsec::dnn {

struct TrainError : std::runtime_error {
    int epoch;
    TrainError(int ep, const std::string& msg) : std::runtime_error(msg), epoch(ep) {}
};

struct TrainConfig {
    int epochs = 14;
    double learning_rate = 0.1;  // stepped down to 0.5x/0.2x/0.1x late in training
    int batch_size = 64;
    double weight_decay = 1e-3;
    int hidden = 784;
    std::uint64_t seed = 1;
};

// Minibatch SGD with softmax cross-entropy, He initialization, no biases.
// Deterministic for a given config. Throws TrainError on divergence.
MlpModel train_mlp(const data::Dataset& train_set, const TrainConfig& config);

// Real -> complex packing: Wc[i,k] = W[i,2k] + i W[i,2k+1] and
// xc[k] = x[2k] - i x[2k+1] (0-based), so Re(Wc xc) = W x exactly.
// Odd N is zero-padded.
struct PackedLayer {
    Eigen::MatrixXcd wc;
};
std::pair<PackedLayer, engine::ComplexVec> complex_pack(const Eigen::MatrixXd& w_real,
                                                        const Eigen::VectorXd& x_real);
Eigen::MatrixXd complex_unpack(const PackedLayer& packed, Eigen::Index n_real_cols);

// Secure forward pass: per layer, l2-normalize the input, push every row's
// inner product through the noisy channel (noise std ||x|| ||W||_RMS / F),
// apply the activation. Logits are scale-free; argmax is the prediction.
Eigen::VectorXd secure_inference(const MlpModel& model, const Eigen::VectorXd& x,
                                 const engine::ProtocolParams& params, std::uint64_t rng_seed);

// Same noise model driven by the scaling parameter directly; used by sweeps
// to avoid the redundant (mu, G) product grid.
Eigen::VectorXd secure_inference_at_f(const MlpModel& model, const Eigen::VectorXd& x, double f,
                                      std::uint64_t rng_seed);

struct AccuracyPoint {
    double mu = 0.0;
    double gain = 1.0;
    double f = 0.0;
    double accuracy = 0.0;
    Eigen::Index n_test = 0;
    std::uint64_t rng_seed = 0;
};

double digital_accuracy(const MlpModel& model, const data::Dataset& test_set);

// Fraction of argmax-correct secure predictions; per-image noise substreams
// derive from (rng_seed, image index).
AccuracyPoint evaluate_accuracy(const MlpModel& model, const engine::ProtocolParams& params,
                                const data::Dataset& test_set, std::uint64_t rng_seed);

// F-direct variant. The recorded (mu, gain) echo the canonical
// measure-and-feedforward pair (G = inf, mu = 2 F^2) consistent with f.
AccuracyPoint evaluate_accuracy_at_f(const MlpModel& model, double f,
                                     const data::Dataset& test_set, std::uint64_t rng_seed);

std::vector<AccuracyPoint> accuracy_sweep(const MlpModel& model, const std::vector<double>& f_grid,
                                          const data::Dataset& test_set, std::uint64_t rng_seed);

struct LogisticFit {
    double l = 0.0;   // amplitude
    double k = 0.0;   // steepness
    double f0 = 0.0;  // transition midpoint
    double b = 0.0;   // floor
    double rmse = 0.0;

    double evaluate(double f) const;
    // F at which the fitted curve crosses `accuracy`; throws std::domain_error
    // outside (b, b + l).
    double invert(double accuracy) const;
};

struct FitError : std::runtime_error {
    LogisticFit best;
    FitError(LogisticFit candidate, const std::string& msg)
        : std::runtime_error(msg), best(candidate) {}
};

// Least-squares fit of Acc(F) = L/(1 + exp(-k(F - F0))) + B via a coarse
// (k, F0) grid with (L, B) solved linearly, refined by Nelder-Mead.
LogisticFit logistic_fit(const std::vector<AccuracyPoint>& points);

enum class EtaPolicy { kUniform, kEmpirical };

// Dataset-averaged |x_i|^2 per packed complex mode (empirical eta policy).
Eigen::VectorXd mean_packed_mode_weights(const data::Dataset& ds);

struct TradeoffPoint {
    double mu = 0.0;
    double gain = 1.0;
    double f = 0.0;
    double weight_bits = 0.0;
    double data_bits_classical = 0.0;
    double data_bits_quantum = 0.0;
    double accuracy = 0.0;
};

// The change-of-variables table behind the accuracy/leakage map: for each
// (mu, G), accuracy from direct evaluation (or the logistic surrogate when
// given), weight leakage from the Holevo bound with eta per policy, data
// leakage from the Cramer-Rao bound with M measurements.
std::vector<TradeoffPoint> tradeoff_map(const MlpModel& model, const std::vector<double>& mu_grid,
                                        const std::vector<double>& gain_grid, EtaPolicy eta_policy,
                                        std::int64_t measurements, const data::Dataset& test_set,
                                        std::uint64_t rng_seed,
                                        const std::optional<LogisticFit>& surrogate = std::nullopt);

// Per-symbol leakage pair under a policy: mean over modes of the per-mode
// bounds (uniform policy collapses to the single 1/N evaluation).
struct LeakagePair {
    double weight_bits = 0.0;
    double data_bits_classical = 0.0;
    double data_bits_quantum = 0.0;
};
LeakagePair leakage_at(double mu, double gain, EtaPolicy eta_policy, int modes,
                       std::int64_t measurements,
                       const std::optional<Eigen::VectorXd>& empirical_mode_weights);

}  // namespace qsec::dnn
