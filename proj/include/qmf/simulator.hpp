#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qmf/core.hpp"
#include "qmf/encoding.hpp"

namespace qmf {

// Dense statevector. Qubit 0 is the most significant bit of the amplitude
// index, matching the bitstring text convention everywhere else.
struct StateVector {
    std::vector<std::complex<double>> amps;
    int num_qubits = 0;
};

// Counts per measured bitstring. Keys are amplitude indices (qubit 0 = MSB);
// num_bits gives the bitstring width for text output.
struct ShotHistogram {
    std::map<std::uint64_t, std::uint64_t> counts;
    int num_bits = 0;
    std::uint64_t total_shots = 0;
};

struct NoiseModel {
    double p_two_qubit = 0.0; // depolarizing probability per CNOT-equivalent
    double p_readout = 0.0;   // independent bit flip per measured qubit
    double weight_cnot = 1.0; // CNOT-equivalents per gate kind
    double weight_cswap = 8.0;

    double gate_weight(Gate::Kind kind) const;
};

constexpr int kDefaultQubitCap = 24;

void apply_gate(StateVector& state, const Gate& gate);

// 0 = I, 1 = X, 2 = Y, 3 = Z.
void apply_pauli(StateVector& state, int qubit, int pauli);

StateVector make_zero_state(int num_qubits);

// Exact statevector of the circuit applied to |0...0>.
StateVector simulate(const CircuitDescription& circuit,
                     int qubit_cap = kDefaultQubitCap);

// Multinomial draw from |amps|^2; bit-identical across runs for a fixed seed.
ShotHistogram sample(const StateVector& state, std::uint64_t shots,
                     std::uint64_t seed);

// Fast path: joint outcomes (template index, data index) drawn directly from
// the product distribution, laid out as the circuit path produces them
// (template output bits above data output bits).
ShotHistogram sample_ideal(const EncodedSegment& tmpl_seg,
                           const EncodedSegment& data_seg, std::uint64_t shots,
                           std::uint64_t seed);

// Pauli-trajectory noise: after each multi-qubit gate, with probability
// p_two_qubit * gate_weight a uniformly random non-identity Pauli hits the
// gate's qubits; every measured bit then flips independently with p_readout.
ShotHistogram apply_noise(const CircuitDescription& circuit,
                          const NoiseModel& model, std::uint64_t shots,
                          std::uint64_t seed,
                          int qubit_cap = kDefaultQubitCap);

// Restrict a full-register histogram to the listed qubits (first listed
// becomes the MSB of the reduced key).
ShotHistogram marginalize(const ShotHistogram& hist,
                          std::span<const int> qubits);

// Probability marginal of a statevector over the listed qubits.
std::vector<double> output_marginal(const StateVector& state,
                                    std::span<const int> qubits);

// Two independent loaders side by side: template loader on qubits
// [0, t.num_qubits), data loader shifted above it. Output register is the
// template output followed by the shifted data output.
CircuitDescription join_circuits(const CircuitDescription& tmpl,
                                 const CircuitDescription& data);

} // namespace qmf
