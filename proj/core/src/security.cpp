#include "qsec/security.hpp"

#include "qsec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qsec::security {

using optics::entropy_g;
using optics::excess_noise_coefficient;

void HolevoInputs::validate() const {
    if (std::isnan(mu) || mu < 0.0) throw std::invalid_argument("holevo: mu must be >= 0");
    if (std::isnan(eta) || eta < 0.0) throw std::invalid_argument("holevo: eta must be >= 0");
    if (!(transmittance > 0.0) || transmittance > 1.0) {
        throw std::invalid_argument("holevo: transmittance must lie in (0, 1]");
    }
    if (std::isnan(extra_excess) || extra_excess < 0.0) {
        throw std::invalid_argument("holevo: channel excess noise must be >= 0");
    }
}

double holevo_weight_leakage(const HolevoInputs& in) {
    in.validate();
    const double v = 2.0 * in.mu + 1.0;
    const double xi = in.total_excess();

    double a, b, c2, nu3;
    if (in.formulation == HolevoFormulation::kMethods) {
        const double t = in.transmittance;
        a = v;
        b = t * (v - 1.0) + 1.0 + xi;
        c2 = t * (v * v - 1.0);
        nu3 = b - c2 / (a + 1.0);
    } else {
        // constants as printed; no transmittance dependence
        a = 2.0 * in.mu + 1.0;
        b = 2.0 * in.mu + 1.0 + xi;
        c2 = 4.0 * in.mu * in.mu + 2.0 * in.mu + 1.0;
        nu3 = a - c2 / (b + 1.0);
    }

    const double disc = (a + b) * (a + b) - 4.0 * c2;
    if (disc < -1e-9 * (a + b) * (a + b)) {
        throw std::domain_error("holevo: non-physical covariance, (a+b)^2 < 4c^2");
    }
    const double z = std::sqrt(std::max(disc, 0.0));
    const double nu1 = 0.5 * (z + (b - a));
    const double nu2 = 0.5 * (z - (b - a));

    const double chi = entropy_g(nu1) + entropy_g(nu2) - entropy_g(nu3);
    return std::max(chi, 0.0);
}

double fisher_information(double x, double gain) {
    const double q = excess_noise_coefficient(gain);
    const double x2 = x * x;
    const double sigma2 = 1.0 + q * x2;
    return 2.0 * q * q * x2 / (sigma2 * sigma2);
}

double quantum_fisher_information(double x, double gain) {
    return 2.0 * fisher_information(x, gain);
}

double data_leakage(double x, double gain, std::int64_t measurements, int k) {
    if (k != 1 && k != 2) throw std::invalid_argument("data_leakage: k must be 1 or 2");
    if (measurements < 1) throw std::invalid_argument("data_leakage: M must be >= 1");
    // argument of the log: k * x^2 * M * I(x); 8M(G-1)^2 x^4 / (G^2 sigma^4)
    // equals 2 M q^2 x^4 / sigma^4, which this form reproduces exactly
    const double arg = static_cast<double>(k) * x * x * static_cast<double>(measurements) *
                       fisher_information(x, gain);
    return 0.5 * std::log2(1.0 + arg);
}

MleOracleResult mle_variance_oracle(double x_true, double gain, std::int64_t measurements,
                                    std::int64_t trials, std::uint64_t rng_seed) {
    if (measurements < 100) throw std::invalid_argument("mle oracle: M must be >= 100");
    if (trials < 1000) throw std::invalid_argument("mle oracle: trials must be >= 1000");
    const double fi = fisher_information(x_true, gain);
    MleOracleResult res;
    if (fi == 0.0) {
        res.identifiable = false;
        return res;
    }
    res.crb = 1.0 / (static_cast<double>(measurements) * fi);

    const double q = excess_noise_coefficient(gain);
    const double sigma2 = 1.0 + q * x_true * x_true;
    const double sigma = std::sqrt(sigma2);

    // one estimate per trial: x_hat = sqrt(max(S - 1, 0)/q), S the mean
    // squared deviation of M draws about the known mean
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        auto rng = make_rng(substream_seed(rng_seed, static_cast<std::uint64_t>(t)));
        std::normal_distribution<double> gauss(0.0, sigma);
        double s = 0.0;
        for (std::int64_t i = 0; i < measurements; ++i) {
            const double r = gauss(rng);
            s += r * r;
        }
        s /= static_cast<double>(measurements);
        const double x_hat = std::sqrt(std::max(s - 1.0, 0.0) / q);
        sum += x_hat;
        sum_sq += x_hat * x_hat;
    }
    const double mean = sum / static_cast<double>(trials);
    res.empirical_variance =
        (sum_sq - static_cast<double>(trials) * mean * mean) / static_cast<double>(trials - 1);
    return res;
}

std::vector<LeakageReport> loss_sweep(const std::vector<double>& loss_db_range,
                                      const engine::ProtocolParams& base_params, double target_f,
                                      double mu_cap) {
    base_params.validate();
    if (!(target_f > 0.0)) throw std::invalid_argument("loss_sweep: target F must be positive");
    const double kappa = engine::snr_coefficient(base_params.gain);
    if (!(kappa > 0.0)) throw std::invalid_argument("loss_sweep: G = 1 cannot reach any target F");

    const double eta =
        excess_noise_coefficient(base_params.gain) / static_cast<double>(base_params.modes);
    const double x2 = 1.0 / static_cast<double>(base_params.modes);
    const double x = std::sqrt(x2);
    // one verification-state observation per inner product; a square real
    // layer packed into `modes` complex modes has 2 * modes rows
    const auto m = static_cast<std::int64_t>(base_params.modes) * 2;

    std::vector<LeakageReport> out;
    out.reserve(loss_db_range.size());
    for (double loss_db : loss_db_range) {
        if (loss_db < 0.0) throw std::invalid_argument("loss_sweep: loss must be >= 0 dB");
        const double t_roundtrip = std::pow(10.0, -loss_db / 10.0);
        const double t_forward = std::pow(10.0, -loss_db / 20.0);  // symmetric fiber path
        const double mu_req = target_f * target_f / (kappa * t_forward);

        LeakageReport rep;
        rep.mu = mu_req;
        rep.gain = base_params.gain;
        rep.loss_db = loss_db;
        rep.modes = base_params.modes;
        rep.measurement_count = m;
        rep.saturated = mu_req > mu_cap;
        if (!rep.saturated) {
            HolevoInputs hin;
            hin.mu = mu_req;
            hin.eta = eta;
            hin.transmittance = t_roundtrip;
            rep.weight_bits_per_symbol = holevo_weight_leakage(hin);
            // the client's disturbance, hence the data leakage, does not see
            // the server-side loss
            rep.data_bits_per_symbol_classical = data_leakage(x, base_params.gain, m, 1);
            rep.data_bits_per_symbol_quantum = data_leakage(x, base_params.gain, m, 2);
        }
        out.push_back(rep);
    }
    return out;
}

std::vector<LeakageReport> width_sweep(const std::vector<int>& n_range,
                                       const engine::ProtocolParams& params) {
    params.validate();
    std::vector<LeakageReport> out;
    out.reserve(n_range.size());
    const double q = excess_noise_coefficient(params.gain);
    for (int n : n_range) {
        if (n < 2) throw std::invalid_argument("width_sweep: N must be >= 2");
        LeakageReport rep;
        rep.mu = params.mu;
        rep.gain = params.gain;
        rep.modes = n;
        rep.measurement_count = n;  // square layer: one measurement per row
        HolevoInputs hin;
        hin.mu = params.mu;
        hin.eta = q / static_cast<double>(n);
        rep.weight_bits_per_symbol = holevo_weight_leakage(hin);
        const double x = std::sqrt(1.0 / static_cast<double>(n));
        rep.data_bits_per_symbol_classical = data_leakage(x, params.gain, n, 1);
        rep.data_bits_per_symbol_quantum = data_leakage(x, params.gain, n, 2);
        out.push_back(rep);
    }
    return out;
}

MultipartyScales multiparty_adjust(int n_clients, MultipartyTopology topology) {
    if (n_clients < 1) throw std::invalid_argument("multiparty_adjust: need at least one client");
    if (n_clients == 1) return {1.0, 1.0};
    const double n = static_cast<double>(n_clients);
    switch (topology) {
        case MultipartyTopology::kSymmetric:
            // light split n ways: per-client SNR drops, disturbances add
            return {1.0 / n, n};
        case MultipartyTopology::kAsymmetric:
            // first client keeps the full beam; the verification state is
            // disturbed sequentially by every client
            return {1.0, n};
    }
    throw std::invalid_argument("multiparty_adjust: unknown topology");
}

dnn::MlpModel permute_defense(const dnn::MlpModel& model, std::uint64_t rng_seed,
                              bool allow_scaling) {
    if (model.w1.rows() != model.w2.cols()) {
        throw std::invalid_argument("permute_defense: layer shapes do not chain");
    }
    if (allow_scaling && model.activation != dnn::Activation::kRelu) {
        throw std::invalid_argument(
            "permute_defense: random scaling is only an invariance of ReLU networks");
    }
    const auto h = model.w1.rows();
    auto rng = make_rng(rng_seed);

    std::vector<Eigen::Index> perm(h);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    Eigen::VectorXd scale = Eigen::VectorXd::Ones(h);
    if (allow_scaling) {
        // log-uniform over [0.1, 10]
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (Eigen::Index i = 0; i < h; ++i) scale[i] = std::pow(10.0, u(rng));
    }

    dnn::MlpModel out = model;
    for (Eigen::Index i = 0; i < h; ++i) {
        const Eigen::Index src = perm[i];
        out.w1.row(i) = scale[src] * model.w1.row(src);
        out.w2.col(i) = model.w2.col(src) / scale[src];
    }
    out.refresh_rms();
    return out;
}

}  // namespace qsec::security
