#include "qsec/dnn.hpp"

#include "binio.hpp"
#include "qsec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

namespace qsec::dnn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// model

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "tanh"; }

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::kRelu;
    if (s == "tanh") return Activation::kTanh;
    throw std::invalid_argument("unknown activation: " + s);
}

double matrix_rms(const Eigen::MatrixXd& m) {
    return std::sqrt(m.array().square().mean());
}

void MlpModel::refresh_rms() {
    rms1 = matrix_rms(w1);
    rms2 = matrix_rms(w2);
}

namespace {

Eigen::ArrayXd apply_activation(Activation act, const Eigen::ArrayXd& a) {
    if (act == Activation::kRelu) return a.max(0.0);
    return a.tanh();
}

void apply_activation_inplace(Activation act, Eigen::MatrixXd& a) {
    if (act == Activation::kRelu) {
        a = a.array().max(0.0).matrix();
    } else {
        a = a.array().tanh().matrix();
    }
}

}  // namespace

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const {
    Eigen::ArrayXd h = apply_activation(activation, (w1 * x).array());
    return w2 * h.matrix();
}

int MlpModel::predict(const Eigen::VectorXd& x) const {
    Eigen::Index best;
    forward(x).maxCoeff(&best);
    return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// persistence

namespace {
constexpr std::uint32_t kModelMagic = 0x514D4C50;  // "QMLP"
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    detail::write_le(f, kModelMagic);
    detail::write_le(f, kModelVersion);
    detail::write_le(f, static_cast<std::uint32_t>(model.activation));
    detail::write_le(f, std::uint32_t{2});
    for (const Eigen::MatrixXd* m : {&model.w1, &model.w2}) {
        detail::write_le(f, static_cast<std::uint64_t>(m->rows()));
        detail::write_le(f, static_cast<std::uint64_t>(m->cols()));
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            for (Eigen::Index c = 0; c < m->cols(); ++c) detail::write_le(f, (*m)(r, c));
        }
    }
    if (!f) throw std::runtime_error("write failed for " + path);

    json meta = {
        {"format", "qsec-mlp"},
        {"schema_version", kModelVersion},
        {"activation", to_string(model.activation)},
        {"layers",
         {{{"rows", model.w1.rows()}, {"cols", model.w1.cols()}, {"rms", model.rms1}},
          {{"rows", model.w2.rows()}, {"cols", model.w2.cols()}, {"rms", model.rms2}}}},
    };
    std::ofstream side(path + ".json");
    side << meta.dump(2) << '\n';
}

MlpModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    if (detail::read_le<std::uint32_t>(f) != kModelMagic) {
        throw std::runtime_error(path + ": not a model file");
    }
    if (detail::read_le<std::uint32_t>(f) != kModelVersion) {
        throw std::runtime_error(path + ": unsupported model version");
    }
    MlpModel model;
    model.activation = static_cast<Activation>(detail::read_le<std::uint32_t>(f));
    const auto n_layers = detail::read_le<std::uint32_t>(f);
    if (n_layers != 2) throw std::runtime_error(path + ": expected 2 layers");
    for (Eigen::MatrixXd* m : {&model.w1, &model.w2}) {
        const auto rows = detail::read_le<std::uint64_t>(f);
        const auto cols = detail::read_le<std::uint64_t>(f);
        m->resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = detail::read_le<double>(f);
        }
    }
    model.refresh_rms();
    return model;
}

// ---------------------------------------------------------------------------
// training

MlpModel train_mlp(const data::Dataset& train_set, const TrainConfig& cfg) {
    if (cfg.epochs < 0 || cfg.learning_rate <= 0.0 || cfg.batch_size < 1 || cfg.hidden < 1) {
        throw std::invalid_argument("train_mlp: hyperparameters must be positive");
    }
    if (train_set.size() == 0) throw std::invalid_argument("train_mlp: empty dataset");

    const auto n = train_set.size();
    const auto inputs = train_set.images.rows();
    const int hidden = cfg.hidden;

    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    MlpModel model;
    model.activation = Activation::kRelu;
    model.w1.resize(hidden, inputs);
    model.w2.resize(10, hidden);
    const double s1 = std::sqrt(2.0 / static_cast<double>(inputs));
    const double s2 = std::sqrt(2.0 / static_cast<double>(hidden));
    for (Eigen::Index r = 0; r < model.w1.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.w1.cols(); ++c) model.w1(r, c) = s1 * gauss(rng);
    }
    for (Eigen::Index r = 0; r < model.w2.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.w2.cols(); ++c) model.w2(r, c) = s2 * gauss(rng);
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    Eigen::MatrixXd xb, a1, h, z, d2, d1;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // step schedule: full rate for the first ~43% of epochs, then 0.5x,
        // 0.2x, and 0.1x for the final stretch
        const double frac = (epoch + 0.5) / cfg.epochs;
        const double lr = cfg.learning_rate *
                          (frac < 0.43 ? 1.0 : frac < 0.72 ? 0.5 : frac < 0.93 ? 0.2 : 0.1);

        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        Eigen::Index seen = 0;

        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const auto b = std::min<Eigen::Index>(cfg.batch_size, n - start);
            xb.resize(inputs, b);
            for (Eigen::Index j = 0; j < b; ++j) xb.col(j) = train_set.images.col(order[start + j]);

            a1.noalias() = model.w1 * xb;
            h = a1.array().max(0.0).matrix();
            z.noalias() = model.w2 * h;

            // softmax cross-entropy
            d2.resize(10, b);
            for (Eigen::Index j = 0; j < b; ++j) {
                const auto zc = z.col(j);
                const double zmax = zc.maxCoeff();
                Eigen::ArrayXd e = (zc.array() - zmax).exp();
                const double denom = e.sum();
                const int label = train_set.labels[order[start + j]];
                loss_sum += std::log(denom) + zmax - zc[label];
                d2.col(j) = (e / denom).matrix();
                d2(label, j) -= 1.0;
            }
            d2 /= static_cast<double>(b);
            seen += b;

            d1.noalias() = model.w2.transpose() * d2;
            d1 = (a1.array() > 0.0).select(d1, 0.0);

            model.w2 -= lr * (d2 * h.transpose() + cfg.weight_decay * model.w2);
            model.w1 -= lr * (d1 * xb.transpose() + cfg.weight_decay * model.w1);
        }

        if (!std::isfinite(loss_sum)) {
            throw TrainError(epoch, "training diverged at epoch " + std::to_string(epoch));
        }
        (void)seen;
    }

    model.refresh_rms();
    return model;
}

// ---------------------------------------------------------------------------
// complex packing

std::pair<PackedLayer, engine::ComplexVec> complex_pack(const Eigen::MatrixXd& w_real,
                                                        const Eigen::VectorXd& x_real) {
    if (w_real.cols() != x_real.size()) {
        throw std::invalid_argument("complex_pack: dimension mismatch");
    }
    const Eigen::Index n = x_real.size();
    const Eigen::Index half = (n + 1) / 2;  // odd N zero-pads the last mode

    PackedLayer packed;
    packed.wc.resize(w_real.rows(), half);
    engine::ComplexVec xc(half);
    for (Eigen::Index k = 0; k < half; ++k) {
        const Eigen::Index re = 2 * k, im = 2 * k + 1;
        const double xi = im < n ? x_real[im] : 0.0;
        xc[k] = {x_real[re], -xi};
        for (Eigen::Index i = 0; i < w_real.rows(); ++i) {
            const double wi = im < n ? w_real(i, im) : 0.0;
            packed.wc(i, k) = {w_real(i, re), wi};
        }
    }
    return {std::move(packed), std::move(xc)};
}

Eigen::MatrixXd complex_unpack(const PackedLayer& packed, Eigen::Index n_real_cols) {
    Eigen::MatrixXd w(packed.wc.rows(), n_real_cols);
    for (Eigen::Index k = 0; k < packed.wc.cols(); ++k) {
        const Eigen::Index re = 2 * k, im = 2 * k + 1;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            w(i, re) = packed.wc(i, k).real();
            if (im < n_real_cols) w(i, im) = packed.wc(i, k).imag();
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// secure inference

namespace {

constexpr double kTinyNorm = 1e-300;

// Noisy forward pass at scaling parameter f. f == 0 is the zero-SNR limit:
// every reading is pure noise and the prediction is a fair guess.
Eigen::VectorXd noisy_forward(const MlpModel& model, const Eigen::VectorXd& x, double f,
                              std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double xn = x.norm();
    if (!(xn > 0.0)) throw std::invalid_argument("secure_inference: zero input vector");

    Eigen::VectorXd a1;
    if (f > 0.0) {
        a1 = model.w1 * (x / xn);
        const double s = model.rms1 / f;
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1[i] += s * gauss(rng);
    } else {
        a1.resize(model.hidden());
        for (Eigen::Index i = 0; i < a1.size(); ++i) a1[i] = gauss(rng);
    }
    Eigen::VectorXd h = apply_activation(model.activation, a1.array()).matrix();

    Eigen::VectorXd logits;
    if (f > 0.0) {
        const double hn = std::max(h.norm(), kTinyNorm);
        logits = model.w2 * (h / hn);
        const double s = model.rms2 / f;
        for (Eigen::Index i = 0; i < logits.size(); ++i) logits[i] += s * gauss(rng);
    } else {
        logits.resize(model.outputs());
        for (Eigen::Index i = 0; i < logits.size(); ++i) logits[i] = gauss(rng);
    }
    return logits;
}

}  // namespace

Eigen::VectorXd secure_inference(const MlpModel& model, const Eigen::VectorXd& x,
                                 const engine::ProtocolParams& params, std::uint64_t rng_seed) {
    const double f = engine::scaling_parameter(params);
    if (!(f > 0.0)) throw std::invalid_argument("secure_inference: F = 0, no signal");
    auto rng = make_rng(rng_seed);
    return noisy_forward(model, x, f, rng);
}

Eigen::VectorXd secure_inference_at_f(const MlpModel& model, const Eigen::VectorXd& x, double f,
                                      std::uint64_t rng_seed) {
    if (!(f > 0.0)) throw std::invalid_argument("secure_inference_at_f: F must be positive");
    auto rng = make_rng(rng_seed);
    return noisy_forward(model, x, f, rng);
}

double digital_accuracy(const MlpModel& model, const data::Dataset& test_set) {
    if (test_set.size() == 0) throw std::invalid_argument("empty test set");
    Eigen::MatrixXd a1 = model.w1 * test_set.images;
    apply_activation_inplace(model.activation, a1);
    const Eigen::MatrixXd z = model.w2 * a1;
    Eigen::Index correct = 0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        Eigen::Index best;
        z.col(j).maxCoeff(&best);
        if (best == test_set.labels[j]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(z.cols());
}

namespace {

// Blocked noisy evaluation; per-image substreams make the result independent
// of the block partition.
double noisy_accuracy(const MlpModel& model, double f, const data::Dataset& test_set,
                      std::uint64_t rng_seed) {
    const Eigen::Index n = test_set.size();
    if (n == 0) throw std::invalid_argument("empty test set");
    const Eigen::Index block = 256;
    const double s1 = f > 0.0 ? model.rms1 / f : 1.0;
    const double s2 = f > 0.0 ? model.rms2 / f : 1.0;

    Eigen::Index correct = 0;
    Eigen::MatrixXd xn, a1, z;
    std::vector<std::mt19937_64> rngs;
    for (Eigen::Index start = 0; start < n; start += block) {
        const Eigen::Index b = std::min(block, n - start);
        rngs.clear();
        for (Eigen::Index j = 0; j < b; ++j) {
            rngs.push_back(make_rng(substream_seed(rng_seed, static_cast<std::uint64_t>(start + j))));
        }
        std::normal_distribution<double> gauss(0.0, 1.0);

        xn.resize(test_set.images.rows(), b);
        for (Eigen::Index j = 0; j < b; ++j) {
            const auto col = test_set.images.col(start + j);
            const double norm = col.norm();
            if (!(norm > 0.0)) throw std::invalid_argument("zero test image");
            xn.col(j) = col / norm;
        }

        if (f > 0.0) {
            a1.noalias() = model.w1 * xn;
            for (Eigen::Index j = 0; j < b; ++j) {
                for (Eigen::Index i = 0; i < a1.rows(); ++i) a1(i, j) += s1 * gauss(rngs[j]);
            }
        } else {
            a1.resize(model.hidden(), b);
            for (Eigen::Index j = 0; j < b; ++j) {
                for (Eigen::Index i = 0; i < a1.rows(); ++i) a1(i, j) = gauss(rngs[j]);
            }
        }
        apply_activation_inplace(model.activation, a1);

        if (f > 0.0) {
            for (Eigen::Index j = 0; j < b; ++j) {
                a1.col(j) /= std::max(a1.col(j).norm(), kTinyNorm);
            }
            z.noalias() = model.w2 * a1;
            for (Eigen::Index j = 0; j < b; ++j) {
                for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) += s2 * gauss(rngs[j]);
            }
        } else {
            z.resize(model.outputs(), b);
            for (Eigen::Index j = 0; j < b; ++j) {
                for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = gauss(rngs[j]);
            }
        }

        for (Eigen::Index j = 0; j < b; ++j) {
            Eigen::Index best;
            z.col(j).maxCoeff(&best);
            if (best == test_set.labels[start + j]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace

AccuracyPoint evaluate_accuracy(const MlpModel& model, const engine::ProtocolParams& params,
                                const data::Dataset& test_set, std::uint64_t rng_seed) {
    const double f = engine::scaling_parameter(params);
    AccuracyPoint pt;
    pt.mu = params.mu;
    pt.gain = params.gain;
    pt.f = f;
    pt.n_test = test_set.size();
    pt.rng_seed = rng_seed;
    pt.accuracy = noisy_accuracy(model, f, test_set, rng_seed);
    return pt;
}

AccuracyPoint evaluate_accuracy_at_f(const MlpModel& model, double f,
                                     const data::Dataset& test_set, std::uint64_t rng_seed) {
    if (f < 0.0) throw std::invalid_argument("F must be >= 0");
    AccuracyPoint pt;
    // canonical (mu, G) consistent with f: the measure-and-feedforward pair
    pt.mu = 2.0 * f * f;
    pt.gain = optics::kInfiniteGain;
    pt.f = f;
    pt.n_test = test_set.size();
    pt.rng_seed = rng_seed;
    pt.accuracy = noisy_accuracy(model, f, test_set, rng_seed);
    return pt;
}

std::vector<AccuracyPoint> accuracy_sweep(const MlpModel& model, const std::vector<double>& f_grid,
                                          const data::Dataset& test_set, std::uint64_t rng_seed) {
    if (f_grid.empty()) throw std::invalid_argument("accuracy_sweep: empty grid");
    std::vector<AccuracyPoint> points;
    points.reserve(f_grid.size());
    for (std::size_t i = 0; i < f_grid.size(); ++i) {
        points.push_back(evaluate_accuracy_at_f(model, f_grid[i], test_set,
                                                substream_seed(rng_seed, i)));
    }
    return points;
}

// ---------------------------------------------------------------------------
// logistic fit

double LogisticFit::evaluate(double f) const {
    return l / (1.0 + std::exp(-k * (f - f0))) + b;
}

double LogisticFit::invert(double accuracy) const {
    if (!(accuracy > b) || !(accuracy < b + l)) {
        throw std::domain_error("logistic invert: accuracy outside the fitted range");
    }
    return f0 - std::log(l / (accuracy - b) - 1.0) / k;
}

namespace {

struct ProfiledFit {
    double l = 0.0, b = 0.0, sse = std::numeric_limits<double>::infinity();
};

// Given (k, f0), L and B enter linearly; solve the 2x2 normal equations.
ProfiledFit profile_lb(const std::vector<AccuracyPoint>& pts, double k, double f0) {
    double su = 0, suu = 0, sy = 0, suy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
        const double u = 1.0 / (1.0 + std::exp(-k * (p.f - f0)));
        su += u;
        suu += u * u;
        sy += p.accuracy;
        suy += u * p.accuracy;
    }
    const double det = suu * n - su * su;
    ProfiledFit out;
    if (std::abs(det) < 1e-12 * n * n) return out;  // u effectively constant
    out.l = (suy * n - su * sy) / det;
    out.b = (suu * sy - su * suy) / det;
    double sse = 0;
    for (const auto& p : pts) {
        const double u = 1.0 / (1.0 + std::exp(-k * (p.f - f0)));
        const double r = out.l * u + out.b - p.accuracy;
        sse += r * r;
    }
    out.sse = sse;
    return out;
}

}  // namespace

LogisticFit logistic_fit(const std::vector<AccuracyPoint>& points) {
    if (points.size() < 8) {
        throw std::invalid_argument("logistic_fit: need at least 8 points across the transition");
    }
    double acc_min = 1.0, acc_max = 0.0, f_min = 1e300, f_max = -1e300;
    for (const auto& p : points) {
        acc_min = std::min(acc_min, p.accuracy);
        acc_max = std::max(acc_max, p.accuracy);
        f_min = std::min(f_min, p.f);
        f_max = std::max(f_max, p.f);
    }
    if (acc_max - acc_min < 1e-9) {
        LogisticFit flat{0.0, 0.0, 0.5 * (f_min + f_max), acc_min, 0.0};
        throw FitError(flat, "logistic_fit: flat accuracy data, transition not identifiable");
    }

    // coarse grid over (k, f0) with (L, B) profiled out
    double best_k = 1.0, best_f0 = 0.5 * (f_min + f_max);
    double best_sse = std::numeric_limits<double>::infinity();
    const double span = std::max(f_max - f_min, 1e-9);
    for (int ik = 0; ik < 40; ++ik) {
        const double k = 0.05 * std::pow(100.0 / 0.05, ik / 39.0);
        for (int jf = 0; jf < 60; ++jf) {
            const double f0 = f_min - 0.2 * span + (1.4 * span) * jf / 59.0;
            const auto pf = profile_lb(points, k, f0);
            if (pf.sse < best_sse) {
                best_sse = pf.sse;
                best_k = k;
                best_f0 = f0;
            }
        }
    }

    // Nelder-Mead refinement on (log k, f0)
    auto objective = [&](double logk, double f0) { return profile_lb(points, std::exp(logk), f0).sse; };
    struct Vertex {
        double lk, f0, val;
    };
    std::array<Vertex, 3> simplex{
        Vertex{std::log(best_k), best_f0, 0.0},
        Vertex{std::log(best_k) + 0.2, best_f0, 0.0},
        Vertex{std::log(best_k), best_f0 + 0.05 * span, 0.0},
    };
    for (auto& v : simplex) v.val = objective(v.lk, v.f0);
    for (int iter = 0; iter < 600; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.val < b.val; });
        if (simplex[2].val - simplex[0].val < 1e-16 * (1.0 + simplex[0].val)) break;
        const double clk = 0.5 * (simplex[0].lk + simplex[1].lk);
        const double cf0 = 0.5 * (simplex[0].f0 + simplex[1].f0);
        Vertex refl{clk + (clk - simplex[2].lk), cf0 + (cf0 - simplex[2].f0), 0.0};
        refl.val = objective(refl.lk, refl.f0);
        if (refl.val < simplex[0].val) {
            Vertex exp_{clk + 2.0 * (clk - simplex[2].lk), cf0 + 2.0 * (cf0 - simplex[2].f0), 0.0};
            exp_.val = objective(exp_.lk, exp_.f0);
            simplex[2] = exp_.val < refl.val ? exp_ : refl;
        } else if (refl.val < simplex[1].val) {
            simplex[2] = refl;
        } else {
            Vertex contr{clk + 0.5 * (simplex[2].lk - clk), cf0 + 0.5 * (simplex[2].f0 - cf0), 0.0};
            contr.val = objective(contr.lk, contr.f0);
            if (contr.val < simplex[2].val) {
                simplex[2] = contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].lk = 0.5 * (simplex[i].lk + simplex[0].lk);
                    simplex[i].f0 = 0.5 * (simplex[i].f0 + simplex[0].f0);
                    simplex[i].val = objective(simplex[i].lk, simplex[i].f0);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.val < b.val; });

    LogisticFit fit;
    fit.k = std::exp(simplex[0].lk);
    fit.f0 = simplex[0].f0;
    const auto pf = profile_lb(points, fit.k, fit.f0);
    if (!std::isfinite(pf.sse)) {
        throw FitError(fit, "logistic_fit: refinement produced a degenerate profile");
    }
    fit.l = pf.l;
    fit.b = pf.b;
    fit.rmse = std::sqrt(pf.sse / static_cast<double>(points.size()));
    return fit;
}

// ---------------------------------------------------------------------------
// leakage policies and the tradeoff map

Eigen::VectorXd mean_packed_mode_weights(const data::Dataset& ds) {
    if (ds.size() == 0) throw std::invalid_argument("empty dataset");
    const Eigen::Index pixels = ds.images.rows();
    const Eigen::Index half = (pixels + 1) / 2;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(half);
    for (Eigen::Index j = 0; j < ds.size(); ++j) {
        const auto col = ds.images.col(j);
        const double n2 = col.squaredNorm();
        if (!(n2 > 0.0)) continue;
        for (Eigen::Index k = 0; k < half; ++k) {
            const double re = col[2 * k];
            const double im = 2 * k + 1 < pixels ? col[2 * k + 1] : 0.0;
            acc[k] += (re * re + im * im) / n2;
        }
    }
    return acc / static_cast<double>(ds.size());
}

LeakagePair leakage_at(double mu, double gain, EtaPolicy eta_policy, int modes,
                       std::int64_t measurements,
                       const std::optional<Eigen::VectorXd>& empirical_mode_weights) {
    const double q = optics::excess_noise_coefficient(gain);
    LeakagePair out;
    if (eta_policy == EtaPolicy::kUniform) {
        const double x2 = 1.0 / static_cast<double>(modes);
        security::HolevoInputs hin;
        hin.mu = mu;
        hin.eta = q * x2;
        out.weight_bits = security::holevo_weight_leakage(hin);
        out.data_bits_classical = security::data_leakage(std::sqrt(x2), gain, measurements, 1);
        out.data_bits_quantum = security::data_leakage(std::sqrt(x2), gain, measurements, 2);
        return out;
    }
    if (!empirical_mode_weights || empirical_mode_weights->size() == 0) {
        throw std::invalid_argument("empirical eta policy requires mode weights");
    }
    const auto& w = *empirical_mode_weights;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        security::HolevoInputs hin;
        hin.mu = mu;
        hin.eta = q * w[i];
        out.weight_bits += security::holevo_weight_leakage(hin);
        out.data_bits_classical += security::data_leakage(std::sqrt(w[i]), gain, measurements, 1);
        out.data_bits_quantum += security::data_leakage(std::sqrt(w[i]), gain, measurements, 2);
    }
    const double inv = 1.0 / static_cast<double>(w.size());
    out.weight_bits *= inv;
    out.data_bits_classical *= inv;
    out.data_bits_quantum *= inv;
    return out;
}

std::vector<TradeoffPoint> tradeoff_map(const MlpModel& model, const std::vector<double>& mu_grid,
                                        const std::vector<double>& gain_grid, EtaPolicy eta_policy,
                                        std::int64_t measurements, const data::Dataset& test_set,
                                        std::uint64_t rng_seed,
                                        const std::optional<LogisticFit>& surrogate) {
    const int modes = static_cast<int>((test_set.images.rows() + 1) / 2);
    std::optional<Eigen::VectorXd> mode_weights;
    if (eta_policy == EtaPolicy::kEmpirical) mode_weights = mean_packed_mode_weights(test_set);

    std::vector<TradeoffPoint> out;
    out.reserve(mu_grid.size() * gain_grid.size());
    std::size_t idx = 0;
    for (double gain : gain_grid) {
        for (double mu : mu_grid) {
            TradeoffPoint pt;
            pt.mu = mu;
            pt.gain = gain;
            pt.f = std::sqrt(engine::snr_coefficient(gain) * mu);
            const auto leak = leakage_at(mu, gain, eta_policy, modes, measurements, mode_weights);
            pt.weight_bits = leak.weight_bits;
            pt.data_bits_classical = leak.data_bits_classical;
            pt.data_bits_quantum = leak.data_bits_quantum;
            if (surrogate) {
                pt.accuracy = surrogate->evaluate(pt.f);
            } else {
                pt.accuracy =
                    noisy_accuracy(model, pt.f, test_set, substream_seed(rng_seed, idx));
            }
            ++idx;
            out.push_back(pt);
        }
    }
    return out;
}

}  // namespace qsec::dnn
