#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmf/core.hpp"
#include "qmf/rng.hpp"
#include "qmf/stats.hpp"

using namespace qmf;

namespace {

TimeSeries make(std::vector<double> v) {
    TimeSeries ts;
    ts.samples = std::move(v);
    return ts;
}

// Exact joint probability mass at one lag from the product distribution of
// two encoded segments; the independent route checked against corrected_snr.
double exact_joint_prob(const EncodedSegment& x, const EncodedSegment& y,
                        std::size_t lag) {
    double sum = 0.0;
    for (std::size_t b = 0; b < x.raw.size(); ++b)
        if (lag + b < y.padded_len) sum += x.probs[b] * y.probs[lag + b];
    return sum;
}

} // namespace

TEST_CASE("oracle matches hand-computed convolutions") {
    auto rho = oracle_snr(make({2, -1}), make({1, 2, 3, 4}));
    REQUIRE(rho.estimates.size() == 3);
    CHECK(rho.estimates[0].value == doctest::Approx(0.0));
    CHECK(rho.estimates[1].value == doctest::Approx(1.0));
    CHECK(rho.estimates[2].value == doctest::Approx(2.0));
    CHECK(!rho.estimates[0].sigma.has_value());

    auto ident = oracle_snr(make({1}), make({5, -3, 7}));
    CHECK(ident.estimates[0].value == doctest::Approx(5.0));
    CHECK(ident.estimates[1].value == doctest::Approx(-3.0));
    CHECK(ident.estimates[2].value == doctest::Approx(7.0));

    auto self = oracle_snr(make({2, -1}), make({2, -1}));
    REQUIRE(self.estimates.size() == 1);
    CHECK(self.estimates[0].value == doctest::Approx(5.0));
}

TEST_CASE("oracle rejects bad inputs") {
    CHECK_THROWS_AS(oracle_snr(make({1, 2, 3}), make({1, 2})),
                    std::invalid_argument);
    TimeSeries a = make({1, 2});
    TimeSeries b = make({1, 2, 3});
    b.sample_rate = 2.0;
    CHECK_THROWS_AS(oracle_snr(a, b), std::invalid_argument);
}

TEST_CASE("oracle linearity and shift properties") {
    rng::SplitMix64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + gen.below(5);
        std::size_t len = n + gen.below(10);
        TimeSeries x, y;
        for (std::size_t i = 0; i < n; ++i) x.samples.push_back(gen.gaussian());
        for (std::size_t i = 0; i < len; ++i)
            y.samples.push_back(gen.gaussian());
        double alpha = gen.gaussian();

        TimeSeries ax = x;
        for (double& v : ax.samples) v *= alpha;
        auto base = oracle_snr(x, y);
        auto scaled = oracle_snr(ax, y);
        for (std::size_t j = 0; j < base.estimates.size(); ++j)
            CHECK(scaled.estimates[j].value ==
                  doctest::Approx(alpha * base.estimates[j].value).epsilon(1e-12));

        TimeSeries longer = y;
        longer.samples.push_back(gen.gaussian());
        auto extended = oracle_snr(x, longer);
        REQUIRE(extended.estimates.size() == base.estimates.size() + 1);
        for (std::size_t j = 0; j < base.estimates.size(); ++j)
            CHECK(extended.estimates[j].value ==
                  doctest::Approx(base.estimates[j].value).epsilon(1e-14));
    }
}

TEST_CASE("preprocess frozen examples") {
    auto seg = preprocess(std::vector<double>{2, -1}, 0.1);
    CHECK(seg.offset == doctest::Approx(1.1));
    CHECK(seg.norm == doctest::Approx(3.2));
    REQUIRE(seg.padded_len == 2);
    CHECK(seg.probs[0] == doctest::Approx(3.1 / 3.2));
    CHECK(seg.probs[1] == doctest::Approx(0.1 / 3.2));

    auto unit = preprocess(std::vector<double>{1, 0, 0, 0}, 0.0);
    CHECK(unit.offset == doctest::Approx(0.0));
    CHECK(unit.norm == doctest::Approx(1.0));
    CHECK(unit.probs == std::vector<double>{1, 0, 0, 0});

    auto padded = preprocess(std::vector<double>{1, 2, 3}, 0.0);
    CHECK(padded.offset == doctest::Approx(-1.0));
    CHECK(padded.norm == doctest::Approx(3.0));
    REQUIRE(padded.padded_len == 4);
    CHECK(padded.probs[0] == doctest::Approx(0.0));
    CHECK(padded.probs[1] == doctest::Approx(1.0 / 3.0));
    CHECK(padded.probs[2] == doctest::Approx(2.0 / 3.0));
    CHECK(padded.probs[3] == doctest::Approx(0.0));
}

TEST_CASE("preprocess error paths") {
    CHECK_THROWS_AS(preprocess(std::vector<double>{3, 3, 3}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(preprocess(std::vector<double>{1, std::nan("")}, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(preprocess(std::vector<double>{}, 0.1),
                    std::invalid_argument);
}

TEST_CASE("preprocess always yields a distribution") {
    rng::SplitMix64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + gen.below(9));
        for (double& x : v) x = 10.0 * gen.gaussian();
        auto seg = preprocess(v, 0.05 + gen.uniform());
        double total = 0.0;
        for (double p : seg.probs) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(seg.offset >= -*std::min_element(v.begin(), v.end()));
    }
}

TEST_CASE("corrected_snr with exact probabilities reproduces the oracle") {
    // Frozen instance: x=[2,-1] margin 0.1, y=[1,2,3,4] margin 0.1, lag 0.
    auto x = preprocess(std::vector<double>{2, -1}, 0.1);
    auto y = preprocess(std::vector<double>{1, 2, 3, 4}, 0.1);
    CHECK(y.offset == doctest::Approx(-0.9));
    CHECK(y.norm == doctest::Approx(6.4));
    double p0 = (3.1 * 0.1 + 0.1 * 1.1) / (3.2 * 6.4);
    CHECK(exact_joint_prob(x, y, 0) == doctest::Approx(p0));
    CHECK(corrected_snr(p0, x, y, 0) == doctest::Approx(0.0));

    // Corrections vanish when both offsets are zero.
    auto x0 = preprocess(std::vector<double>{0, 1}, 0.0);
    auto y0 = preprocess(std::vector<double>{0, 2, 1, 0}, 0.0);
    for (std::size_t lag = 0; lag < 3; ++lag) {
        double expect = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            expect += x0.raw[i] * y0.raw[lag + i];
        CHECK(corrected_snr(exact_joint_prob(x0, y0, lag), x0, y0, lag) ==
              doctest::Approx(expect).epsilon(1e-12));
    }

    // All-zero template with margin: zero estimate from corrections alone.
    auto xz = preprocess(std::vector<double>{0, 0}, 0.5);
    auto yz = preprocess(std::vector<double>{0, 0}, 0.5);
    CHECK(corrected_snr(exact_joint_prob(xz, yz, 0), xz, yz, 0) ==
          doctest::Approx(0.0));
}

TEST_CASE("corrected_snr equals oracle for random inputs and any margin") {
    rng::SplitMix64 gen(23);
    const std::size_t n_choices[] = {1, 2, 4};
    const std::size_t l_choices[] = {2, 4, 8};
    const double margins[] = {0.0, 0.1, 1.0};
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = n_choices[gen.below(3)];
        std::size_t len = l_choices[gen.below(3)];
        if (n > len) continue;
        TimeSeries x, y;
        for (std::size_t i = 0; i < n; ++i) x.samples.push_back(gen.gaussian());
        for (std::size_t i = 0; i < len; ++i)
            y.samples.push_back(gen.gaussian());
        double margin = margins[gen.below(3)];
        // A single-sample template is constant; margin 0 would zero the norm.
        if (n == 1 && margin == 0.0) margin = 0.1;

        auto truth = oracle_snr(x, y);
        auto xs = preprocess(x.samples, margin);
        auto ys = preprocess(y.samples, margin);
        for (std::size_t j = 0; j + n <= len; ++j) {
            double est = corrected_snr(exact_joint_prob(xs, ys, j), xs, ys, j);
            CHECK(est == doctest::Approx(truth.estimates[j].value)
                             .epsilon(1e-9)
                             .scale(1.0));
        }
    }
}

TEST_CASE("corrected_snr validates arguments") {
    auto x = preprocess(std::vector<double>{2, -1}, 0.1);
    auto y = preprocess(std::vector<double>{1, 2, 3, 4}, 0.1);
    CHECK_THROWS_AS(corrected_snr(0.5, x, y, 4), std::invalid_argument);
    CHECK_THROWS_AS(corrected_snr(1.5, x, y, 0), std::invalid_argument);
}

TEST_CASE("predict_precision reduces to the plain binomial form") {
    // Equal SNRs, no corrections: relative precision sqrt((L-1)/(s L)).
    std::vector<double> rho(5, 2.0);
    std::vector<double> zero(5, 0.0);
    double s = 400.0;
    auto sigma = predict_precision(rho, s, zero);
    double expect_rel = std::sqrt(4.0 / (s * 5.0));
    for (double sg : sigma)
        CHECK(sg / 2.0 == doctest::Approx(expect_rel).epsilon(1e-12));
}

TEST_CASE("predict_precision scales as inverse square root of shots") {
    std::vector<double> rho{1.0, 3.0, 0.5};
    std::vector<double> corr{0.4, 0.2, 0.9};
    auto s1 = predict_precision(rho, 100.0, corr);
    auto s4 = predict_precision(rho, 400.0, corr);
    for (std::size_t j = 0; j < rho.size(); ++j)
        CHECK(s1[j] / s4[j] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("predict_precision handles zero SNR and bad shots") {
    std::vector<double> rho{0.0, 1.0};
    std::vector<double> corr{0.5, 0.5};
    auto sigma = predict_precision(rho, 50.0, corr);
    CHECK(sigma[0] > 0.0);
    CHECK(std::isfinite(sigma[0]));
    CHECK_THROWS_AS(predict_precision(rho, 0.0, corr), std::invalid_argument);
}

TEST_CASE("predict_precision finite for the three-lag benchmark setup") {
    // 2-point template vs a 4-point dataset: 3 lags, 2e4 shots total.
    TimeSeries x = make({2, -1});
    TimeSeries y = make({0.3, -1.2, 0.7, 0.4});
    auto truth = oracle_snr(x, y);
    auto xs = preprocess(x.samples, 0.1);
    auto ys = preprocess(y.samples, 0.1);
    std::vector<double> rho, corr;
    for (std::size_t j = 0; j < 3; ++j) {
        rho.push_back(truth.estimates[j].value);
        corr.push_back(correction_total(xs, ys, j));
    }
    auto sigma = predict_precision(rho, 2.0e4 / 3.0, corr);
    for (double sg : sigma) {
        CHECK(sg > 0.0);
        CHECK(std::isfinite(sg));
    }
}
