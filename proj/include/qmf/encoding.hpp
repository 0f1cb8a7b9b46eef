#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qmf/core.hpp"
#include "qmf/plan.hpp"

namespace qmf {

// Binary tree of RY angles for divide-and-conquer amplitude loading.
// levels[l] holds the 2^l angles of tree level l (root at level 0); node
// (l, i) covers probs[i * 2^(depth-l) .. (i+1) * 2^(depth-l)).
struct AngleTree {
    std::size_t depth = 0; // log2(padded_len)
    std::vector<std::vector<double>> levels;

    std::size_t node_count() const { return (std::size_t{1} << depth) - 1; }
};

struct Gate {
    enum class Kind { RY, CNOT, CSWAP, X };
    Kind kind = Kind::RY;
    // RY/X: q0 target. CNOT: q0 control, q1 target. CSWAP: q0 control,
    // q1 and q2 swapped.
    int q0 = 0, q1 = 0, q2 = 0;
    double theta = 0.0;

    int arity() const;
};

struct CircuitDescription {
    int num_qubits = 0;
    std::vector<Gate> gates;
    std::vector<int> output_register; // most significant bit first
    int depth = 0;                    // layered depth count
};

// Angle at each node: theta = 2 atan2(sqrt(P_right), sqrt(P_left)); zero-total
// subtrees get theta = 0. Requires padded_len = 2^n with n >= 1.
AngleTree angle_tree(const EncodedSegment& seg);

// Controlled exchange of two equal-size registers: one CSWAP per qubit pair,
// all sharing `control`. Maps (a|0> + b|1>)|psi>|phi> to
// a|0>|psi>|phi> + b|1>|phi>|psi>.
std::vector<Gate> combine(int control, std::span<const int> left,
                          std::span<const int> right);

// Bottom-up loader: one RY per tree node on its own qubit (heap order, root
// is qubit 0), then one combine per internal node, smallest registers first.
// Output register is the left spine from the root (root = MSB).
CircuitDescription build_loader(const AngleTree& tree);

// CSWAPs of a full loader over 2^depth amplitudes:
// sum over combine sizes m of m * 2^(depth-1-m).
std::size_t loader_cswap_count(std::size_t depth);

struct ResourceReport {
    std::size_t data_qubits_per_segment = 0;   // padded k_d minus 1
    std::size_t template_qubits_per_chunk = 0; // padded k_t minus 1
    std::size_t lags_per_segment = 0;
    std::size_t num_segments = 0;
    std::size_t num_chunks = 0;
    std::size_t total_runs = 0;
    std::size_t data_loader_cswaps = 0;
    std::size_t template_loader_cswaps = 0;
    std::size_t combine_depth = 0; // layered depth of the joint loader
    std::uint64_t total_shots = 0;
    // Asymptotic classical decoder sizes evaluated with unit constants;
    // estimates, not gate-exact synthesis results.
    double or_gate_estimate = 0.0;       // ~ N*L
    double and_inverter_estimate = 0.0;  // ~ N*L*log2(N*L)
};

ResourceReport resource_report(std::size_t template_len, std::size_t data_len,
                               const SegmentPlan& plan);

// Plain-text dump: header lines `qubits <n>` and `output <i,j,...>`, then one
// gate per line (`RY q<i> <theta>`, `CSWAP q<c> q<a> q<b>`, ...).
std::string dump_circuit(const CircuitDescription& circuit);
CircuitDescription parse_circuit(std::istream& in);

} // namespace qmf
