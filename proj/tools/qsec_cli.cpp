// Command-line entry point: training, leakage evaluation, sweep generation,
// and self-verification. Every artifact embeds the resolved configuration and
// a schema version.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical or
// verification failure.

#include "qsec/dnn.hpp"
#include "qsec/engine.hpp"
#include "qsec/gaussian.hpp"
#include "qsec/idx.hpp"
#include "qsec/report.hpp"
#include "qsec/rng.hpp"
#include "qsec/security.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qsec;

namespace {

constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct RunConfig {
    std::string command;
    std::string dataset_dir;
    std::string model_path;
    std::string out_path;
    std::string summary_path;

    double mu = 4.0;
    double gain = 3.0;
    double loss_db = 0.0;
    int modes = 392;
    std::int64_t measurements = 784;
    std::string formulation = "methods";
    std::string eta_policy = "uniform";
    std::string adversary = "quantum";
    std::uint64_t seed = 1;

    // training
    int epochs = 14;
    double learning_rate = 0.1;
    int batch_size = 64;
    double weight_decay = 1e-3;

    // sweeps
    std::string sweep_type = "tradeoff";
    std::vector<double> mu_grid{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<double> gain_grid{1.2, 1.5, 2.0, 3.0, 5.0, 10.0};
    std::vector<double> loss_grid{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<int> width_grid{16, 64, 256, 1024, 4096};
    std::vector<double> f_grid{0.05, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0};
    int subset = 2000;

    // verify
    std::int64_t mc_samples = 100000;
    bool inject_eta_fault = false;
};

json to_json(const RunConfig& c) {
    json grid = {{"mu", c.mu_grid},   {"gain", c.gain_grid}, {"loss_db", c.loss_grid},
                 {"width", c.width_grid}, {"f", c.f_grid}};
    return json{{"command", c.command},
                {"dataset", c.dataset_dir},
                {"model", c.model_path},
                {"out", c.out_path},
                {"mu", c.mu},
                {"gain", std::isinf(c.gain) ? json("inf") : json(c.gain)},
                {"loss_db", c.loss_db},
                {"modes", c.modes},
                {"measurements", c.measurements},
                {"formulation", c.formulation},
                {"eta_policy", c.eta_policy},
                {"adversary", c.adversary},
                {"seed", c.seed},
                {"epochs", c.epochs},
                {"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"weight_decay", c.weight_decay},
                {"sweep_type", c.sweep_type},
                {"subset", c.subset},
                {"grids", grid},
                {"mc_samples", c.mc_samples},
                {"inject_eta_fault", c.inject_eta_fault}};
}

json with_schema(const RunConfig& c, json body) {
    body["schema_version"] = kSchemaVersion;
    body["config"] = to_json(c);
    return body;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

std::string find_idx(const fs::path& dir, const std::string& stem) {
    for (const char* ext : {".gz", ""}) {
        fs::path p = dir / (stem + ext);
        if (fs::exists(p)) return p.string();
    }
    throw data::IdxError(data::IdxErrorKind::kIo,
                         "missing dataset file " + (dir / stem).string() + "[.gz]");
}

data::Dataset load_split(const std::string& dir, bool train) {
    const fs::path d(dir);
    if (train) {
        return data::load_dataset(find_idx(d, "train-images-idx3-ubyte"),
                                  find_idx(d, "train-labels-idx1-ubyte"), "train");
    }
    return data::load_dataset(find_idx(d, "t10k-images-idx3-ubyte"),
                              find_idx(d, "t10k-labels-idx1-ubyte"), "test");
}

double transmittance_from_db(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

// ---------------------------------------------------------------------------

int cmd_train(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    data::Dataset train = load_split(cfg.dataset_dir, /*train=*/true);
    data::Dataset test = load_split(cfg.dataset_dir, /*train=*/false);

    dnn::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.learning_rate;
    tc.batch_size = cfg.batch_size;
    tc.weight_decay = cfg.weight_decay;
    tc.seed = cfg.seed;

    dnn::MlpModel model = dnn::train_mlp(train, tc);
    const double acc = dnn::digital_accuracy(model, test);
    dnn::save_model(model, cfg.model_path);

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json metrics = with_schema(cfg, {{"test_accuracy", acc},
                                     {"train_images", train.size()},
                                     {"test_images", test.size()},
                                     {"w1_rms", model.rms1},
                                     {"w2_rms", model.rms2},
                                     {"seconds", secs}});
    write_json(cfg.out_path, metrics);
    std::cout << "trained: test accuracy " << acc * 100.0 << "% in " << secs << " s\n";
    return kOk;
}

int cmd_leakage(const RunConfig& cfg) {
    std::optional<Eigen::VectorXd> mode_weights;
    dnn::EtaPolicy policy =
        cfg.eta_policy == "empirical" ? dnn::EtaPolicy::kEmpirical : dnn::EtaPolicy::kUniform;
    if (policy == dnn::EtaPolicy::kEmpirical) {
        data::Dataset test = load_split(cfg.dataset_dir, /*train=*/false);
        mode_weights = dnn::mean_packed_mode_weights(test);
    }

    const double q = optics::excess_noise_coefficient(cfg.gain);
    const double eta_uniform = q / static_cast<double>(cfg.modes);
    const double t = transmittance_from_db(cfg.loss_db);

    security::HolevoInputs methods{cfg.mu, eta_uniform, t, 0.0,
                                   security::HolevoFormulation::kMethods};
    security::HolevoInputs main_text{cfg.mu, eta_uniform, t, 0.0,
                                     security::HolevoFormulation::kMainText};

    const auto leak = dnn::leakage_at(cfg.mu, cfg.gain, policy, cfg.modes, cfg.measurements,
                                      mode_weights);

    security::LeakageReport rep;
    rep.mu = cfg.mu;
    rep.gain = cfg.gain;
    rep.loss_db = cfg.loss_db;
    rep.modes = cfg.modes;
    rep.measurement_count = cfg.measurements;
    rep.weight_bits_per_symbol = cfg.formulation == "main-text"
                                     ? security::holevo_weight_leakage(main_text)
                                     : leak.weight_bits;
    rep.data_bits_per_symbol_classical = leak.data_bits_classical;
    rep.data_bits_per_symbol_quantum = leak.data_bits_quantum;

    json body = {
        {"weight_bits_per_symbol", rep.weight_bits_per_symbol},
        {"weight_bits_per_symbol_methods", security::holevo_weight_leakage(methods)},
        {"weight_bits_per_symbol_main_text", security::holevo_weight_leakage(main_text)},
        {"data_bits_per_symbol_classical", rep.data_bits_per_symbol_classical},
        {"data_bits_per_symbol_quantum", rep.data_bits_per_symbol_quantum},
        {"data_bits_per_symbol",
         cfg.adversary == "classical" ? rep.data_bits_per_symbol_classical
                                      : rep.data_bits_per_symbol_quantum},
        {"eta_uniform", eta_uniform},
        {"transmittance", t},
        {"measurement_count", rep.measurement_count},
        {"modes", rep.modes},
    };
    const json out = with_schema(cfg, body);
    if (!cfg.out_path.empty()) write_json(cfg.out_path, out);
    std::cout << out.dump(2) << '\n';
    return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<report::SweepRow> rows;
    json summary;

    if (cfg.sweep_type == "loss") {
        engine::ProtocolParams base;
        base.mu = cfg.mu;
        base.gain = cfg.gain;
        base.modes = cfg.modes;
        const double target_f = engine::scaling_parameter(base);
        const auto reports = security::loss_sweep(cfg.loss_grid, base, target_f);
        for (const auto& r : reports) rows.push_back(report::to_row(r));
        summary["target_f"] = target_f;
    } else if (cfg.sweep_type == "width") {
        engine::ProtocolParams params;
        params.mu = cfg.mu;
        params.gain = cfg.gain;
        const auto reports = security::width_sweep(cfg.width_grid, params);
        for (const auto& r : reports) rows.push_back(report::to_row(r));
    } else if (cfg.sweep_type == "f" || cfg.sweep_type == "tradeoff") {
        dnn::MlpModel model = dnn::load_model(cfg.model_path);
        data::Dataset test = load_split(cfg.dataset_dir, /*train=*/false);
        if (cfg.subset > 0 && cfg.subset < test.size()) {
            test = data::head(test, cfg.subset);
        }
        if (cfg.sweep_type == "f") {
            const auto points = dnn::accuracy_sweep(model, cfg.f_grid, test, cfg.seed);
            for (const auto& p : points) rows.push_back(report::to_row(p));
            try {
                const auto fit = dnn::logistic_fit(points);
                summary["fit"] = {{"L", fit.l}, {"k", fit.k}, {"F0", fit.f0},
                                  {"B", fit.b}, {"rmse", fit.rmse}};
            } catch (const dnn::FitError& e) {
                summary["fit_error"] = e.what();
            }
        } else {
            dnn::EtaPolicy policy = cfg.eta_policy == "empirical" ? dnn::EtaPolicy::kEmpirical
                                                                  : dnn::EtaPolicy::kUniform;
            const auto points = dnn::tradeoff_map(model, cfg.mu_grid, cfg.gain_grid, policy,
                                                  cfg.measurements, test, cfg.seed);
            for (const auto& p : points) rows.push_back(report::to_row(p));
        }
    } else {
        throw CLI::ValidationError("--type must be one of tradeoff|loss|width|f");
    }

    std::ofstream csv(cfg.out_path);
    if (!csv) throw std::runtime_error("cannot open " + cfg.out_path + " for writing");
    report::write_csv(csv, rows);
    std::cout << "wrote " << rows.size() << " rows to " << cfg.out_path << '\n';

    if (!cfg.summary_path.empty()) {
        summary["rows"] = rows.size();
        summary["csv"] = cfg.out_path;
        write_json(cfg.summary_path, with_schema(cfg, summary));
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// verify: Monte Carlo oracles and invariant suites

struct CheckList {
    json checks = json::array();
    bool all_ok = true;

    void add(const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
        all_ok &= ok;
        std::cout << (ok ? "ok   " : "FAIL ") << name << ": " << detail << '\n';
    }
};

int cmd_verify(const RunConfig& cfg) {
    CheckList list;
    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // covariance oracle: MC roundtrip variances vs 1 + (2 - 2/G)|x_i|^2
    const double fault_scale = cfg.inject_eta_fault ? 1.5 : 1.0;
    const std::vector<double> gains{1.0, 1.5, 3.0, 100.0, optics::kInfiniteGain};
    bool cov_ok = true;
    double worst_pull = 0.0;
    for (std::size_t c = 0; c < gains.size(); ++c) {
        const int n = 8;
        optics::ComplexVec x(n), w(n);
        for (int i = 0; i < n; ++i) {
            x[i] = {gauss(rng), gauss(rng)};
            w[i] = {2.0 * gauss(rng), 2.0 * gauss(rng)};
        }
        x = optics::normalized(x);
        engine::ProtocolParams params;
        params.gain = gains[c];
        const auto stats = engine::simulate_roundtrip_mc(x, w, params, cfg.mc_samples,
                                                         substream_seed(cfg.seed, 100 + c));
        const double q = optics::excess_noise_coefficient(gains[c]);
        for (int i = 0; i < n; ++i) {
            const double pred = 1.0 + fault_scale * q * std::norm(x[i]);
            const double se = pred * std::sqrt(2.0 / static_cast<double>(cfg.mc_samples));
            const double pull = std::abs(stats.variance[i] - pred) / se;
            worst_pull = std::max(worst_pull, pull);
            cov_ok &= pull < 5.0;
            const double mean_se = std::sqrt(pred / static_cast<double>(cfg.mc_samples));
            cov_ok &= std::abs(stats.mean[i].real() - w[i].real()) < 5.0 * mean_se;
            cov_ok &= std::abs(stats.mean[i].imag() - w[i].imag()) < 5.0 * mean_se;
        }
    }
    list.add("covariance_oracle", cov_ok,
             "worst variance pull " + report::format_double(worst_pull) + " (limit 5 se)");

    // unitarity of the Householder completion
    bool uni_ok = true;
    double worst_resid = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> dim(2, 64);
        const int n = dim(rng);
        optics::ComplexVec x(n);
        for (int i = 0; i < n; ++i) x[i] = {gauss(rng), gauss(rng)};
        const auto u = optics::build_unitary(optics::normalized(x));
        const double resid =
            (u * u.adjoint() - optics::UnitaryMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        worst_resid = std::max(worst_resid, resid);
        uni_ok &= resid < 1e-10;
    }
    list.add("unitarity", uni_ok, "max |UU^dag - I| = " + report::format_double(worst_resid));

    // entropy exactness and pure TMSVS spectrum
    {
        bool ok = std::abs(optics::entropy_g(1.0)) < 1e-12 &&
                  std::abs(optics::entropy_g(3.0) - 2.0) < 1e-12;
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
            ok &= std::abs(spec[0] - 1.0) < 1e-9 && std::abs(spec[1] - 1.0) < 1e-9;
        }
        list.add("entropy_and_tmsvs", ok, "g(1)=0, g(3)=2, pure TMSVS spectrum (1,1)");
    }

    // Holevo dual path: closed form vs general eigensolver
    {
        security::HolevoInputs in;
        in.mu = 4.0;
        in.eta = 0.0034;
        const double closed = security::holevo_weight_leakage(in);

        const double v = 2.0 * in.mu + 1.0;
        const double b = v + in.eta, c = std::sqrt(v * v - 1.0);
        Eigen::MatrixXd sab = Eigen::MatrixXd::Zero(4, 4);
        sab.topLeftCorner(2, 2) = v * Eigen::Matrix2d::Identity();
        sab.bottomRightCorner(2, 2) = b * Eigen::Matrix2d::Identity();
        Eigen::Matrix2d sz;
        sz << c, 0, 0, -c;
        sab.topRightCorner(2, 2) = sz;
        sab.bottomLeftCorner(2, 2) = sz;
        const auto spec = optics::symplectic_eigenvalues({sab});
        Eigen::MatrixXd sba = (b - c * c / (v + 1.0)) * Eigen::Matrix2d::Identity();
        const auto spec3 = optics::symplectic_eigenvalues({sba});
        const double eig_path = optics::entropy_g(spec[0]) + optics::entropy_g(spec[1]) -
                                optics::entropy_g(spec3[0]);
        const bool ok = std::abs(closed - eig_path) < 1e-6;
        list.add("holevo_dual_path", ok,
                 "closed " + report::format_double(closed) + " vs eigen " +
                     report::format_double(eig_path));
    }

    // Fisher information vs finite-difference curvature of the expected
    // log-likelihood
    {
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            std::uniform_real_distribution<double> ux(0.05, 0.95), ug(1.1, 20.0);
            const double x = ux(rng), g = ug(rng);
            const double fi = security::fisher_information(x, g);
            const double q = optics::excess_noise_coefficient(g);
            const double s0 = 1.0 + q * x * x;
            auto ell = [&](double xx) {
                const double s = 1.0 + q * xx * xx;
                return -0.5 * std::log(2.0 * M_PI * s) - s0 / (2.0 * s);
            };
            const double h = 1e-3 * (1.0 + std::abs(x));
            const double fd = -(ell(x + h) - 2.0 * ell(x) + ell(x - h)) / (h * h);
            const double rel = std::abs(fd - fi) / fi;
            worst = std::max(worst, rel);
            ok &= rel < 1e-4;
        }
        list.add("fisher_consistency", ok, "worst relative error " + report::format_double(worst));
    }

    // determinism: identical seeds, identical outputs
    {
        optics::ComplexVec x(4), w(4);
        for (int i = 0; i < 4; ++i) {
            x[i] = {gauss(rng), gauss(rng)};
            w[i] = {gauss(rng), gauss(rng)};
        }
        x = optics::normalized(x);
        engine::ProtocolParams params;
        const auto a = engine::simulate_roundtrip_mc(x, w, params, 2000, 12345);
        const auto b = engine::simulate_roundtrip_mc(x, w, params, 2000, 12345);
        bool ok = (a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0;
        for (int i = 0; i < 4; ++i) ok &= a.variance[i] == b.variance[i];
        list.add("seed_determinism", ok, "bit-identical repeated run");
    }

    const json out = with_schema(cfg, {{"checks", list.checks}, {"all_ok", list.all_ok}});
    if (!cfg.out_path.empty()) write_json(cfg.out_path, out);
    return list.all_ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-secure multiparty linear algebra: simulation and leakage analysis"};
    app.require_subcommand(1);

    RunConfig cfg;
    double gain_arg = 3.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--mu", cfg.mu, "mean photon number per weight symbol");
        sub->add_option("--gain", gain_arg, "amplifier gain G >= 1 (inf for feedforward)");
        sub->add_option("--loss-db", cfg.loss_db, "round-trip channel loss in dB");
        sub->add_option("--modes", cfg.modes, "mode count N");
        sub->add_option("--measurements", cfg.measurements, "verification-state measurements M");
        sub->add_option("--formulation", cfg.formulation, "holevo constants")
            ->check(CLI::IsMember({"methods", "main-text"}));
        sub->add_option("--eta-policy", cfg.eta_policy, "eta statistics for DNN leakage")
            ->check(CLI::IsMember({"uniform", "empirical"}));
        sub->add_option("--adversary", cfg.adversary, "Cramer-Rao adversary class")
            ->check(CLI::IsMember({"classical", "quantum"}));
        sub->add_option("--seed", cfg.seed, "RNG seed");
    };

    auto* train = app.add_subcommand("train", "train the digital MLP and save the model");
    train->add_option("--dataset", cfg.dataset_dir, "directory with the MNIST IDX files")
        ->required();
    train->add_option("--model", cfg.model_path, "output model path")->required();
    train->add_option("--out", cfg.out_path, "metrics JSON path")->required();
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--lr", cfg.learning_rate, "base learning rate");
    train->add_option("--batch", cfg.batch_size, "minibatch size");
    train->add_option("--weight-decay", cfg.weight_decay, "L2 coefficient");
    train->add_option("--seed", cfg.seed, "RNG seed");

    auto* leakage = app.add_subcommand("leakage", "evaluate the leakage bounds at one point");
    add_common(leakage);
    leakage->add_option("--dataset", cfg.dataset_dir, "needed for --eta-policy empirical");
    leakage->add_option("--out", cfg.out_path, "report JSON path");

    auto* sweep = app.add_subcommand("sweep", "emit a CSV sweep");
    add_common(sweep);
    sweep->add_option("--type", cfg.sweep_type, "sweep kind")
        ->check(CLI::IsMember({"tradeoff", "loss", "width", "f"}));
    sweep->add_option("--dataset", cfg.dataset_dir, "dataset directory");
    sweep->add_option("--model", cfg.model_path, "trained model path");
    sweep->add_option("--out", cfg.out_path, "CSV output path")->required();
    sweep->add_option("--summary", cfg.summary_path, "summary JSON path");
    sweep->add_option("--subset", cfg.subset, "test-image subset size (0 = full)");
    sweep->add_option("--mu-grid", cfg.mu_grid, "tradeoff mu grid")->delimiter(',');
    sweep->add_option("--gain-grid", cfg.gain_grid, "tradeoff gain grid")->delimiter(',');
    sweep->add_option("--loss-grid", cfg.loss_grid, "loss sweep grid in dB")->delimiter(',');
    sweep->add_option("--width-grid", cfg.width_grid, "width sweep grid")->delimiter(',');
    sweep->add_option("--f-grid", cfg.f_grid, "F sweep grid")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run the Monte Carlo oracles and invariants");
    verify->add_option("--seed", cfg.seed, "RNG seed");
    verify->add_option("--samples", cfg.mc_samples, "MC samples per oracle configuration")
        ->check(CLI::Range(int64_t{1000}, int64_t{10000000}));
    verify->add_flag("--inject-eta-fault", cfg.inject_eta_fault,
                     "negative control: perturb the analytic excess-noise prediction");
    verify->add_option("--out", cfg.out_path, "report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    cfg.gain = gain_arg;

    try {
        if (train->parsed()) {
            cfg.command = "train";
            return cmd_train(cfg);
        }
        if (leakage->parsed()) {
            cfg.command = "leakage";
            return cmd_leakage(cfg);
        }
        if (sweep->parsed()) {
            cfg.command = "sweep";
            return cmd_sweep(cfg);
        }
        cfg.command = "verify";
        return cmd_verify(cfg);
    } catch (const data::IdxError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const dnn::TrainError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return kNumerical;
    } catch (const dnn::FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
