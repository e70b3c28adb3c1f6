#pragma once
// Two-layer perceptron weights (no biases) plus the noiseless digital
// forward pass. Kept separate from training/inference so the security module
// can manipulate models without depending on the rest of the DNN stack.

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace qsec::dnn {

enum class Activation { kRelu, kTanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpModel {
    Eigen::MatrixXd w1;  // hidden x inputs
    Eigen::MatrixXd w2;  // outputs x hidden
    Activation activation = Activation::kRelu;

    // cached ||W||_RMS per matrix; call refresh_rms() after editing weights
    double rms1 = 0.0;
    double rms2 = 0.0;

    void refresh_rms();
    int inputs() const { return static_cast<int>(w1.cols()); }
    int hidden() const { return static_cast<int>(w1.rows()); }
    int outputs() const { return static_cast<int>(w2.rows()); }

    // Noiseless digital forward pass (no inter-layer normalization; logits
    // are scale-free for classification).
    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    int predict(const Eigen::VectorXd& x) const;
};

double matrix_rms(const Eigen::MatrixXd& m);

// Versioned little-endian binary (magic, version, activation, dims, row-major
// f64) with a JSON metadata sidecar at path + ".json".
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace qsec::dnn
