#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmf/encoding.hpp"
#include "qmf/rng.hpp"
#include "qmf/simulator.hpp"
#include "test_util.hpp"

using namespace qmf;

namespace {

Gate ry(int q, double theta) {
    Gate g;
    g.kind = Gate::Kind::RY;
    g.q0 = q;
    g.theta = theta;
    return g;
}

Gate gx(int q) {
    Gate g;
    g.kind = Gate::Kind::X;
    g.q0 = q;
    return g;
}

Gate cnot(int c, int t) {
    Gate g;
    g.kind = Gate::Kind::CNOT;
    g.q0 = c;
    g.q1 = t;
    return g;
}

Gate cswap(int c, int a, int b) {
    Gate g;
    g.kind = Gate::Kind::CSWAP;
    g.q0 = c;
    g.q1 = a;
    g.q2 = b;
    return g;
}

double norm2(const StateVector& s) {
    double n = 0.0;
    for (const auto& a : s.amps) n += std::norm(a);
    return n;
}

EncodedSegment seg_from(std::vector<double> values, double margin) {
    return preprocess(values, margin);
}

} // namespace

TEST_CASE("single-qubit gates on frozen states") {
    auto s = make_zero_state(1);
    REQUIRE(s.amps.size() == 2);
    CHECK(s.amps[0].real() == doctest::Approx(1.0));

    apply_gate(s, ry(0, M_PI / 2.0));
    CHECK(s.amps[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(s.amps[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    auto flip = make_zero_state(1);
    apply_gate(flip, gx(0));
    CHECK(std::abs(flip.amps[0]) == doctest::Approx(0.0));
    CHECK(std::abs(flip.amps[1]) == doctest::Approx(1.0));

    auto pi = make_zero_state(1);
    apply_gate(pi, ry(0, M_PI));
    CHECK(std::abs(pi.amps[1]) == doctest::Approx(1.0));
}

TEST_CASE("qubit 0 is the most significant bit") {
    auto s = make_zero_state(2);
    apply_gate(s, gx(0));
    // |10> -> amplitude index 2.
    CHECK(std::abs(s.amps[2]) == doctest::Approx(1.0));

    auto t = make_zero_state(2);
    apply_gate(t, gx(1));
    CHECK(std::abs(t.amps[1]) == doctest::Approx(1.0));
}

TEST_CASE("CNOT and CSWAP truth tables") {
    auto s = make_zero_state(2);
    apply_gate(s, gx(0));
    apply_gate(s, cnot(0, 1));
    CHECK(std::abs(s.amps[3]) == doctest::Approx(1.0)); // |11>

    auto t = make_zero_state(3);
    apply_gate(t, gx(0));
    apply_gate(t, gx(1));
    apply_gate(t, cswap(0, 1, 2));
    CHECK(std::abs(t.amps[0b101]) == doctest::Approx(1.0));

    // Control off: no swap.
    auto u = make_zero_state(3);
    apply_gate(u, gx(1));
    apply_gate(u, cswap(0, 1, 2));
    CHECK(std::abs(u.amps[0b010]) == doctest::Approx(1.0));
}

TEST_CASE("combine on a superposed control swaps the branches") {
    // (a|0> + b|1>) |1>|0> -> a|0>|1>|0> + b|1>|0>|1>
    double theta = 2.0 * std::atan2(std::sqrt(0.4), std::sqrt(0.6));
    auto s = make_zero_state(3);
    apply_gate(s, ry(0, theta));
    apply_gate(s, gx(1));
    apply_gate(s, cswap(0, 1, 2));
    CHECK(std::norm(s.amps[0b010]) == doctest::Approx(0.6));
    CHECK(std::norm(s.amps[0b101]) == doctest::Approx(0.4));
    CHECK(norm2(s) == doctest::Approx(1.0));

    // Applying the same CSWAP twice restores the pre-swap state.
    apply_gate(s, cswap(0, 1, 2));
    CHECK(std::norm(s.amps[0b010]) == doctest::Approx(0.6));
    CHECK(std::norm(s.amps[0b110]) == doctest::Approx(0.4));
}

TEST_CASE("gates preserve the norm on random states") {
    rng::SplitMix64 gen(41);
    StateVector s = make_zero_state(4);
    for (auto& a : s.amps)
        a = std::complex<double>(gen.gaussian(), gen.gaussian());
    double n0 = norm2(s);
    for (int step = 0; step < 50; ++step) {
        switch (gen.below(4)) {
        case 0: apply_gate(s, ry(static_cast<int>(gen.below(4)), gen.gaussian())); break;
        case 1: apply_gate(s, gx(static_cast<int>(gen.below(4)))); break;
        case 2: {
            int c = static_cast<int>(gen.below(4));
            int t = static_cast<int>((c + 1 + gen.below(3)) % 4);
            apply_gate(s, cnot(c, t));
            break;
        }
        default: {
            int c = static_cast<int>(gen.below(4));
            int a = static_cast<int>((c + 1) % 4);
            int b = static_cast<int>((c + 2) % 4);
            apply_gate(s, cswap(c, a, b));
            break;
        }
        }
        CHECK(norm2(s) == doctest::Approx(n0).epsilon(1e-12));
    }
}

TEST_CASE("simulated loader marginal for a frozen distribution") {
    // values {0.1,0.2,0.3,0.4}, margin 0: offset -0.1, norm 0.6.
    auto seg = seg_from({0.1, 0.2, 0.3, 0.4}, 0.0);
    auto circ = build_loader(angle_tree(seg));
    auto state = simulate(circ);
    auto marginal = output_marginal(state, circ.output_register);
    REQUIRE(marginal.size() == 4);
    CHECK(marginal[0] == doctest::Approx(0.0));
    CHECK(marginal[1] == doctest::Approx(0.1 / 0.6));
    CHECK(marginal[2] == doctest::Approx(0.2 / 0.6));
    CHECK(marginal[3] == doctest::Approx(0.3 / 0.6));
}

TEST_CASE("simulate enforces the qubit cap") {
    CircuitDescription big;
    big.num_qubits = 30;
    CHECK_THROWS_AS(simulate(big), std::invalid_argument);
}

TEST_CASE("sampling is deterministic and unbiased") {
    auto seg = seg_from({1.0, 2.0, 3.0, 4.0}, 0.1);
    auto circ = build_loader(angle_tree(seg));
    auto state = simulate(circ);

    auto h1 = sample(state, 20000, 99);
    auto h2 = sample(state, 20000, 99);
    CHECK(h1.counts == h2.counts);
    CHECK(h1.total_shots == 20000);

    auto h3 = sample(state, 20000, 100);
    CHECK(h1.counts != h3.counts);

    // Marginal frequencies within 5 sigma of the target probabilities.
    auto marg = marginalize(h1, circ.output_register);
    for (std::size_t i = 0; i < seg.probs.size(); ++i) {
        double p = seg.probs[i];
        auto it = marg.counts.find(i);
        double freq =
            it == marg.counts.end() ? 0.0 : it->second / 20000.0;
        double sigma = std::sqrt(p * (1.0 - p) / 20000.0);
        CHECK(std::abs(freq - p) <= 5.0 * sigma + 1e-12);
    }
}

TEST_CASE("zero-probability bins are never sampled") {
    auto seg = seg_from({1.0, 2.0, 3.0}, 0.0); // padded to 4; bins 0 and 3 empty
    auto circ = build_loader(angle_tree(seg));
    auto state = simulate(circ);
    auto marg = marginalize(sample(state, 5000, 7), circ.output_register);
    CHECK(marg.counts.count(0) == 0);
    CHECK(marg.counts.count(3) == 0);
}

TEST_CASE("ideal path and circuit path agree in distribution") {
    auto tmpl = seg_from({2.0, -1.0}, 0.1);
    auto data = seg_from({1.0, 2.0, 3.0, 4.0}, 0.1);

    auto joined = join_circuits(build_loader(angle_tree(tmpl)),
                                build_loader(angle_tree(data)));
    auto state = simulate(joined);
    auto circuit_hist =
        marginalize(sample(state, 40000, 3), joined.output_register);
    auto ideal_hist = sample_ideal(tmpl, data, 40000, 4);
    CHECK(circuit_hist.num_bits == ideal_hist.num_bits);

    double p = test_util::chi2_two_sample_p(circuit_hist, ideal_hist);
    CHECK(p > 1e-4);

    // And both match the exact product distribution within 5 sigma.
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t d = 0; d < 4; ++d) {
            double prob = tmpl.probs[b] * data.probs[d];
            std::uint64_t key = (b << 2) | d;
            auto it = ideal_hist.counts.find(key);
            double freq =
                it == ideal_hist.counts.end() ? 0.0 : it->second / 40000.0;
            double sigma = std::sqrt(prob * (1.0 - prob) / 40000.0);
            CHECK(std::abs(freq - prob) <= 5.0 * sigma + 1e-12);
        }
}

TEST_CASE("noise model weights") {
    NoiseModel nm;
    nm.p_two_qubit = 0.01;
    CHECK(nm.gate_weight(Gate::Kind::CNOT) == doctest::Approx(1.0));
    CHECK(nm.gate_weight(Gate::Kind::CSWAP) == doctest::Approx(8.0));
    CHECK(nm.gate_weight(Gate::Kind::RY) == doctest::Approx(0.0));
    CHECK(nm.gate_weight(Gate::Kind::X) == doctest::Approx(0.0));
}

TEST_CASE("zero noise reproduces the clean sampler") {
    auto seg = seg_from({1.0, 2.0, 3.0, 4.0}, 0.1);
    auto circ = build_loader(angle_tree(seg));
    NoiseModel clean; // all probabilities zero
    auto noisy = apply_noise(circ, clean, 10000, 55);
    auto ref = sample(simulate(circ), 10000, 55);
    CHECK(noisy.counts == ref.counts);
}

TEST_CASE("noisy sampling is deterministic and visibly different") {
    auto seg = seg_from({1.0, 2.0, 3.0, 4.0}, 0.1);
    auto circ = build_loader(angle_tree(seg));
    NoiseModel nm;
    nm.p_two_qubit = 0.02;
    nm.p_readout = 0.02;
    auto a = apply_noise(circ, nm, 20000, 9);
    auto b = apply_noise(circ, nm, 20000, 9);
    CHECK(a.counts == b.counts);

    auto clean = sample(simulate(circ), 20000, 9);
    double p = test_util::chi2_two_sample_p(a, clean);
    CHECK(p < 1e-3); // depolarizing + readout shifts the distribution
}

TEST_CASE("full readout scrambling flattens any distribution") {
    auto seg = seg_from({4.0, 1.0}, 0.0);
    auto circ = build_loader(angle_tree(seg));
    NoiseModel nm;
    nm.p_readout = 0.5;
    auto hist = apply_noise(circ, nm, 40000, 21);
    for (std::uint64_t k = 0; k < 2; ++k) {
        double freq = hist.counts.at(k) / 40000.0;
        CHECK(freq == doctest::Approx(0.5).epsilon(0.05));
    }
}

TEST_CASE("marginalize reorders and collapses keys") {
    ShotHistogram h;
    h.num_bits = 3;
    h.total_shots = 10;
    h.counts[0b110] = 4; // q0=1 q1=1 q2=0
    h.counts[0b011] = 6; // q0=0 q1=1 q2=1
    std::vector<int> keep{2, 0};
    auto m = marginalize(h, keep);
    CHECK(m.num_bits == 2);
    CHECK(m.counts.at(0b01) == 4); // q2=0,q0=1
    CHECK(m.counts.at(0b10) == 6); // q2=1,q0=0
    CHECK(m.total_shots == 10);
}

TEST_CASE("join_circuits offsets the data register") {
    auto t = build_loader(angle_tree(seg_from({2.0, -1.0}, 0.1)));
    auto d = build_loader(angle_tree(seg_from({1.0, 2.0, 3.0, 4.0}, 0.1)));
    auto joined = join_circuits(t, d);
    CHECK(joined.num_qubits == t.num_qubits + d.num_qubits);
    REQUIRE(joined.output_register.size() == 3);
    CHECK(joined.output_register[0] == 0);
    CHECK(joined.output_register[1] == t.num_qubits + d.output_register[0]);
    CHECK(joined.output_register[2] == t.num_qubits + d.output_register[1]);
    CHECK(joined.gates.size() == t.gates.size() + d.gates.size());
}
