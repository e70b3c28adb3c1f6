#include "qsec/engine.hpp"

#include "qsec/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qsec::engine {

using optics::is_feedforward;

void ProtocolParams::validate() const {
    if (std::isnan(mu) || mu < 0.0) throw std::invalid_argument("mu must be >= 0");
    optics::check_gain(gain);
    if (!(forward_transmittance > 0.0) || forward_transmittance > 1.0) {
        throw std::invalid_argument("forward transmittance must lie in (0, 1]");
    }
    if (!(roundtrip_transmittance > 0.0) || roundtrip_transmittance > 1.0) {
        throw std::invalid_argument("roundtrip transmittance must lie in (0, 1]");
    }
    if (roundtrip_transmittance > forward_transmittance + 1e-12) {
        throw std::invalid_argument("roundtrip transmittance cannot exceed the forward one");
    }
    if (modes < 1) throw std::invalid_argument("mode count must be positive");
}

double snr_coefficient(double gain) {
    optics::check_gain(gain);
    if (is_feedforward(gain)) return 0.5;
    return gain * (gain - 1.0) / (2.0 * gain * gain - 3.0 * gain + 2.0);
}

double scaling_parameter(const ProtocolParams& params) {
    params.validate();
    return std::sqrt(snr_coefficient(params.gain) * params.received_mu());
}

EncodedWeights encode_weights(const Eigen::VectorXd& w_row, double w_rms, double mu) {
    return encode_weights(ComplexVec(w_row.cast<std::complex<double>>()), w_rms, mu);
}

EncodedWeights encode_weights(const ComplexVec& w_row, double w_rms, double mu) {
    if (!(w_rms > 0.0)) throw std::invalid_argument("encode_weights: degenerate matrix, ||W||_RMS = 0");
    if (std::isnan(mu) || mu < 0.0) throw std::invalid_argument("encode_weights: mu must be >= 0");
    EncodedWeights enc;
    enc.amplitudes = std::sqrt(mu) / w_rms * w_row;
    enc.rms = w_rms;
    enc.mu = mu;
    return enc;
}

double snr(const ProtocolParams& params, std::complex<double> inner_amplitude) {
    params.validate();
    return snr_coefficient(params.gain) * std::norm(inner_amplitude);
}

double rescale_factor(const ProtocolParams& params, double x_norm, double w_rms) {
    params.validate();
    if (params.gain == 1.0) throw std::invalid_argument("rescale_factor: no signal at G = 1");
    if (!(params.mu > 0.0)) throw std::invalid_argument("rescale_factor: no signal at mu = 0");
    if (!(x_norm > 0.0) || !(w_rms > 0.0)) {
        throw std::invalid_argument("rescale_factor: norms must be positive");
    }
    if (is_feedforward(params.gain)) return 0.0;  // analytic limit of 1/sqrt(G-1)
    return x_norm / std::sqrt(params.gain - 1.0) * w_rms / std::sqrt(params.mu);
}

double inner_product_channel(const Eigen::VectorXd& w_row, const Eigen::VectorXd& x,
                             double w_rms, const ProtocolParams& params, std::uint64_t rng_seed) {
    params.validate();
    const double x_norm = x.norm();
    if (!(x_norm > 0.0)) throw std::invalid_argument("inner_product_channel: zero data vector");
    const double f = scaling_parameter(params);
    if (!(f > 0.0)) throw std::invalid_argument("inner_product_channel: F = 0, no signal");
    auto rng = make_rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = x_norm * w_rms / f;
    return w_row.dot(x) + s * gauss(rng);
}

Eigen::VectorXd matvec_channel(const Eigen::MatrixXd& w, const Eigen::VectorXd& x,
                               double w_rms, const ProtocolParams& params, std::uint64_t rng_seed) {
    params.validate();
    const double x_norm = x.norm();
    if (!(x_norm > 0.0)) throw std::invalid_argument("matvec_channel: zero data vector");
    const double f = scaling_parameter(params);
    if (!(f > 0.0)) throw std::invalid_argument("matvec_channel: F = 0, no signal");
    const double s = x_norm * w_rms / f;

    Eigen::VectorXd out = w * x;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        auto rng = make_rng(substream_seed(rng_seed, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> gauss(0.0, s);
        out[i] += gauss(rng);
    }
    return out;
}

VerificationStats simulate_roundtrip_mc(const ComplexVec& x_hat, const ComplexVec& w,
                                        const ProtocolParams& params, std::int64_t n_samples,
                                        std::uint64_t rng_seed) {
    params.validate();
    if (std::abs(x_hat.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("simulate_roundtrip_mc: x_hat is not l2-normalized");
    }
    if (x_hat.size() != w.size()) {
        throw std::invalid_argument("simulate_roundtrip_mc: dimension mismatch");
    }
    if (n_samples < 1000) throw std::invalid_argument("simulate_roundtrip_mc: n_samples too small");

    const auto n = x_hat.size();
    const double g = params.gain;
    const bool ff = is_feedforward(g);
    const optics::UnitaryMatrix u = optics::build_unitary(x_hat);
    const optics::UnitaryMatrix u_dag = u.adjoint();

    // raw-moment accumulation; values are O(1) in SNU so cancellation is benign
    Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(n), sum_p = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sum_x2 = Eigen::VectorXd::Zero(n), sum_p2 = Eigen::VectorXd::Zero(n);
    double det_x = 0, det_p = 0, det_x2 = 0, det_p2 = 0;

    auto rng = make_rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ComplexVec z(n), zu(n);
    for (std::int64_t s = 0; s < n_samples; ++s) {
        // step 1: coherent states about w, unit variance per quadrature
        for (Eigen::Index j = 0; j < n; ++j) {
            z[j] = w[j] + std::complex<double>(gauss(rng), gauss(rng));
        }
        // step 2(i): route the inner product into the result mode
        zu.noalias() = u * z;

        std::complex<double> detector;
        if (ff) {
            // measure both quadratures (heterodyne penalty: +1 SNU per
            // quadrature), reinject a fresh state with the measured amplitude
            detector = zu[0] + std::complex<double>(gauss(rng), gauss(rng));
            zu[0] = detector + std::complex<double>(gauss(rng), gauss(rng));
        } else {
            // phase-insensitive amplifier: z -> sqrt(G) z + sqrt(G-1) conj(v)
            const std::complex<double> vac_a(gauss(rng), gauss(rng));
            const std::complex<double> amp =
                std::sqrt(g) * zu[0] + std::sqrt(g - 1.0) * std::conj(vac_a);
            // weighted beamsplitter, vacuum at the dark port
            const std::complex<double> vac_b(gauss(rng), gauss(rng));
            const double t = 1.0 - 1.0 / g, r = 1.0 / g;
            detector = std::sqrt(t) * amp - std::sqrt(r) * vac_b;
            zu[0] = std::sqrt(r) * amp + std::sqrt(t) * vac_b;
        }
        // step 2(iii): return through U^dag
        z.noalias() = u_dag * zu;

        for (Eigen::Index j = 0; j < n; ++j) {
            sum_x[j] += z[j].real();
            sum_p[j] += z[j].imag();
            sum_x2[j] += z[j].real() * z[j].real();
            sum_p2[j] += z[j].imag() * z[j].imag();
        }
        det_x += detector.real();
        det_p += detector.imag();
        det_x2 += detector.real() * detector.real();
        det_p2 += detector.imag() * detector.imag();
    }

    const double inv = 1.0 / static_cast<double>(n_samples);
    VerificationStats stats;
    stats.mean.resize(n);
    stats.variance.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mx = sum_x[j] * inv, mp = sum_p[j] * inv;
        stats.mean[j] = {mx, mp};
        const double vx = sum_x2[j] * inv - mx * mx;
        const double vp = sum_p2[j] * inv - mp * mp;
        stats.variance[j] = 0.5 * (vx + vp);  // X/P pooled
    }
    const double dmx = det_x * inv, dmp = det_p * inv;
    stats.detector_mean = {dmx, dmp};
    stats.detector_variance =
        0.5 * (det_x2 * inv - dmx * dmx + det_p2 * inv - dmp * dmp);
    stats.sample_count = n_samples;
    return stats;
}

}  // namespace qsec::engine
