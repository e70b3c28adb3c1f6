#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsec/engine.hpp"
#include "qsec/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace qsec;
using engine::ComplexVec;
using engine::ProtocolParams;

namespace {

ComplexVec random_normalized(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVec x(n);
    for (int i = 0; i < n; ++i) x[i] = {gauss(rng), gauss(rng)};
    return optics::normalized(x);
}

// two-sample Kolmogorov-Smirnov statistic
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

}  // namespace

TEST_CASE("parameter validation") {
    ProtocolParams p;
    CHECK_NOTHROW(p.validate());
    p.mu = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.mu = 4.0;
    p.gain = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.gain = 3.0;
    p.roundtrip_transmittance = 0.9;
    p.forward_transmittance = 0.8;  // roundtrip cannot exceed forward
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("encode_weights") {
    SUBCASE("zero row stays zero") {
        const auto enc = engine::encode_weights(Eigen::VectorXd::Zero(4), 1.0, 4.0);
        CHECK(enc.amplitudes.norm() == 0.0);
    }
    SUBCASE("arithmetic example") {
        Eigen::VectorXd row(2);
        row << 1.0, -1.0;
        const auto enc = engine::encode_weights(row, 1.0, 4.0);
        CHECK(enc.amplitudes[0].real() == doctest::Approx(2.0));
        CHECK(enc.amplitudes[1].real() == doctest::Approx(-2.0));
    }
    SUBCASE("full +-1 matrix has mean photon number mu") {
        // direct averaging oracle over all rows of a +-1 matrix with rms 1
        auto rng = make_rng(5);
        std::bernoulli_distribution flip(0.5);
        double acc = 0.0;
        int count = 0;
        for (int r = 0; r < 16; ++r) {
            Eigen::VectorXd row(32);
            for (int i = 0; i < 32; ++i) row[i] = flip(rng) ? 1.0 : -1.0;
            const auto enc = engine::encode_weights(row, 1.0, 4.0);
            acc += enc.amplitudes.squaredNorm();
            count += 32;
        }
        CHECK(acc / count == doctest::Approx(4.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(engine::encode_weights(Eigen::VectorXd::Ones(2), 0.0, 4.0),
                    std::invalid_argument);
}

TEST_CASE("snr") {
    ProtocolParams p;
    p.gain = 1.0;
    CHECK(engine::snr(p, {1.0, 0.0}) == doctest::Approx(0.0));
    p.gain = optics::kInfiniteGain;
    CHECK(engine::snr(p, {1.0, 0.0}) == doctest::Approx(0.5));
    p.gain = 3.0;
    CHECK(engine::snr(p, {1.0, 0.0}) == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("scaling parameter uses the received photon number") {
    ProtocolParams p;  // mu = 4, G = 3
    CHECK(engine::scaling_parameter(p) == doctest::Approx(std::sqrt(24.0 / 11.0)).epsilon(1e-12));
    p.forward_transmittance = 0.25;
    p.roundtrip_transmittance = 0.0625;
    CHECK(engine::scaling_parameter(p) ==
          doctest::Approx(std::sqrt(6.0 / 11.0)).epsilon(1e-12));
}

TEST_CASE("rescale factor") {
    ProtocolParams p;
    p.gain = 2.0;
    p.mu = 1.0;
    CHECK(engine::rescale_factor(p, 1.0, 1.0) == doctest::Approx(1.0));
    p.gain = 3.0;
    p.mu = 4.0;
    CHECK(engine::rescale_factor(p, 2.0, 0.5) ==
          doctest::Approx(2.0 / std::sqrt(2.0) * 0.25).epsilon(1e-12));
    p.gain = 1.0;
    CHECK_THROWS_AS(engine::rescale_factor(p, 1.0, 1.0), std::invalid_argument);
    p.gain = 3.0;
    p.mu = 0.0;
    CHECK_THROWS_AS(engine::rescale_factor(p, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("inner product channel") {
    auto rng = make_rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd w(16), x(16);
    for (int i = 0; i < 16; ++i) {
        w[i] = gauss(rng);
        x[i] = gauss(rng);
    }
    const double w_rms = std::sqrt(w.squaredNorm() / w.size());

    SUBCASE("noiseless limit at huge mu") {
        ProtocolParams p;
        p.mu = 1e18;
        const double out = engine::inner_product_channel(w, x, w_rms, p, 9);
        CHECK(out == doctest::Approx(w.dot(x)).epsilon(1e-7));
    }
    SUBCASE("F matches the definition") {
        ProtocolParams p;  // mu 4, G 3
        CHECK(engine::scaling_parameter(p) == doctest::Approx(1.4770978917519928).epsilon(1e-12));
    }
    SUBCASE("empirical noise variance matches s^2") {
        ProtocolParams p;
        const double f = engine::scaling_parameter(p);
        const double s = x.norm() * w_rms / f;
        const int n = 100000;
        double acc = 0.0, acc2 = 0.0;
        for (int t = 0; t < n; ++t) {
            const double r = engine::inner_product_channel(w, x, w_rms, p, substream_seed(77, t));
            const double eps = r - w.dot(x);
            acc += eps;
            acc2 += eps * eps;
        }
        const double var = acc2 / n - (acc / n) * (acc / n);
        const double se = s * s * std::sqrt(2.0 / n);
        CHECK(std::abs(var - s * s) < 5.0 * se);
    }
    SUBCASE("zero data vector is rejected") {
        ProtocolParams p;
        CHECK_THROWS_AS(engine::inner_product_channel(w, Eigen::VectorXd::Zero(16), w_rms, p, 1),
                        std::invalid_argument);
    }
    SUBCASE("G = 1 has no signal") {
        ProtocolParams p;
        p.gain = 1.0;
        CHECK_THROWS_AS(engine::inner_product_channel(w, x, w_rms, p, 1), std::invalid_argument);
    }
}

TEST_CASE("roundtrip Monte Carlo") {
    auto rng = make_rng(41);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SUBCASE("G = 1 is the identity channel") {
        const auto x = random_normalized(rng, 4);
        ComplexVec w(4);
        for (int i = 0; i < 4; ++i) w[i] = {gauss(rng), gauss(rng)};
        ProtocolParams p;
        p.gain = 1.0;
        const auto stats = engine::simulate_roundtrip_mc(x, w, p, 100000, 55);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(stats.variance[i] - 1.0) < 5.0 * std::sqrt(2.0 / 100000.0));
        }
    }
    SUBCASE("G = 3 with x = e0 concentrates 7/3 in mode 0") {
        ComplexVec x = ComplexVec::Zero(3);
        x[0] = 1.0;
        ComplexVec w(3);
        for (int i = 0; i < 3; ++i) w[i] = {gauss(rng), gauss(rng)};
        ProtocolParams p;  // G = 3
        const int n = 100000;
        const auto stats = engine::simulate_roundtrip_mc(x, w, p, n, 77);
        const double se0 = (7.0 / 3.0) * std::sqrt(2.0 / n);
        CHECK(std::abs(stats.variance[0] - 7.0 / 3.0) < 5.0 * se0);
        CHECK(std::abs(stats.variance[1] - 1.0) < 5.0 * std::sqrt(2.0 / n));
        CHECK(std::abs(stats.variance[2] - 1.0) < 5.0 * std::sqrt(2.0 / n));
    }
    SUBCASE("verification state keeps the weight means") {
        const auto x = random_normalized(rng, 6);
        ComplexVec w(6);
        for (int i = 0; i < 6; ++i) w[i] = {2.0 * gauss(rng), 2.0 * gauss(rng)};
        ProtocolParams p;
        const int n = 100000;
        const auto stats = engine::simulate_roundtrip_mc(x, w, p, n, 99);
        for (int i = 0; i < 6; ++i) {
            const double se = std::sqrt(stats.variance[i] / n);
            CHECK(std::abs(stats.mean[i].real() - w[i].real()) < 5.0 * se);
            CHECK(std::abs(stats.mean[i].imag() - w[i].imag()) < 5.0 * se);
        }
    }
    SUBCASE("analytic covariance diagonal agrees across configurations") {
        // oracle agreement: covariance formula vs simulation
        for (double g : {1.5, 3.0, 100.0, optics::kInfiniteGain}) {
            const auto x = random_normalized(rng, 8);
            ComplexVec w(8);
            for (int i = 0; i < 8; ++i) w[i] = {gauss(rng), gauss(rng)};
            ProtocolParams p;
            p.gain = g;
            const int n = 50000;
            const auto stats = engine::simulate_roundtrip_mc(x, w, p, n, 123);
            const auto cov = optics::verification_covariance(x, g);
            for (int i = 0; i < 8; ++i) {
                const double pred = cov.matrix(2 * i, 2 * i);
                CHECK(std::abs(stats.variance[i] - pred) < 5.0 * pred * std::sqrt(2.0 / n));
            }
        }
    }
    SUBCASE("detector mean and rescale give an unbiased estimate") {
        const auto x = random_normalized(rng, 5);
        Eigen::VectorXd w_row(5);
        for (int i = 0; i < 5; ++i) w_row[i] = gauss(rng);
        const double w_rms = std::sqrt(w_row.squaredNorm() / w_row.size());
        ProtocolParams p;  // mu 4, G 3
        const auto enc = engine::encode_weights(w_row, w_rms, p.mu);
        const int n = 100000;
        const auto stats = engine::simulate_roundtrip_mc(x, enc.amplitudes, p, n, 321);

        // x real here, so W.x = Re(w.x_hat) * ||x|| rescaled
        const double rescale = engine::rescale_factor(p, 1.0, w_rms);
        const double estimate = stats.detector_mean.real() * rescale;
        double direct = 0.0;
        for (int i = 0; i < 5; ++i) direct += w_row[i] * x[i].real();
        const double se = rescale * std::sqrt(stats.detector_variance / n);
        CHECK(std::abs(estimate - direct) < 5.0 * se);
    }
    SUBCASE("energy bookkeeping on the means") {
        // detector power (G-1)|w.x|^2 plus reinjected power |w.x|^2 equals
        // G |w.x|^2; checked through the simulated first moments
        const auto x = random_normalized(rng, 4);
        ComplexVec w = 3.0 * x.conjugate();  // w.x = 3
        ProtocolParams p;
        const int n = 200000;
        const auto stats = engine::simulate_roundtrip_mc(x, w, p, n, 17);
        const double det_power = std::norm(stats.detector_mean);
        std::complex<double> reinj(0, 0);
        for (int i = 0; i < 4; ++i) reinj += x[i] * stats.mean[i];
        CHECK(det_power == doctest::Approx((p.gain - 1.0) * 9.0).epsilon(0.05));
        CHECK(std::norm(reinj) == doctest::Approx(9.0).epsilon(0.05));
    }
    SUBCASE("sample-size precondition") {
        const auto x = random_normalized(rng, 2);
        ComplexVec w = ComplexVec::Zero(2);
        ProtocolParams p;
        CHECK_THROWS_AS(engine::simulate_roundtrip_mc(x, w, p, 10, 1), std::invalid_argument);
    }
}

TEST_CASE("F-sufficiency: equal F, indistinguishable channel noise") {
    Eigen::VectorXd w(8), x(8);
    auto rng = make_rng(61);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        w[i] = gauss(rng);
        x[i] = gauss(rng);
    }
    const double w_rms = std::sqrt(w.squaredNorm() / w.size());

    ProtocolParams a;  // mu 4, G 3 -> F = sqrt(24/11)
    ProtocolParams b;
    b.gain = 2.0;
    b.mu = 24.0 / 11.0 * 2.0;  // kappa(2) = 1/2 -> same F
    CHECK(engine::scaling_parameter(a) == doctest::Approx(engine::scaling_parameter(b)));

    const int n = 10000;
    std::vector<double> ra(n), rb(n);
    const double base = w.dot(x);
    for (int t = 0; t < n; ++t) {
        ra[t] = engine::inner_product_channel(w, x, w_rms, a, substream_seed(1000, t)) - base;
        rb[t] = engine::inner_product_channel(w, x, w_rms, b, substream_seed(2000, t)) - base;
    }
    const double d = ks_statistic(ra, rb);
    // alpha = 0.01 critical value: 1.6276 sqrt((n+m)/(nm))
    const double crit = 1.6276 * std::sqrt(2.0 / n);
    CHECK(d < crit);
}

TEST_CASE("seed determinism") {
    auto rng = make_rng(71);
    const auto x = random_normalized(rng, 3);
    ComplexVec w(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 3; ++i) w[i] = {gauss(rng), gauss(rng)};
    ProtocolParams p;
    const auto a = engine::simulate_roundtrip_mc(x, w, p, 2000, 5150);
    const auto b = engine::simulate_roundtrip_mc(x, w, p, 2000, 5150);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(a.variance[i] == b.variance[i]);
    CHECK(a.detector_mean == b.detector_mean);

    Eigen::VectorXd wr(4), xr(4);
    for (int i = 0; i < 4; ++i) {
        wr[i] = gauss(rng);
        xr[i] = gauss(rng);
    }
    CHECK(engine::inner_product_channel(wr, xr, 1.0, p, 42) ==
          engine::inner_product_channel(wr, xr, 1.0, p, 42));
}
