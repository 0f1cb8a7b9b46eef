#include "qmf/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmf/stats.hpp"

namespace qmf {

int Gate::arity() const {
    switch (kind) {
        case Kind::RY:
        case Kind::X: return 1;
        case Kind::CNOT: return 2;
        case Kind::CSWAP: return 3;
    }
    return 0;
}

AngleTree angle_tree(const EncodedSegment& seg) {
    const std::size_t n = seg.padded_len;
    if (n < 2 || !std::has_single_bit(n))
        throw std::invalid_argument("angle_tree: padded_len must be 2^n, n >= 1");

    AngleTree tree;
    tree.depth = static_cast<std::size_t>(std::countr_zero(n));
    tree.levels.resize(tree.depth);

    // Subtree sums bottom-up, then angles from the two halves of each node.
    std::vector<double> sums(seg.probs.begin(), seg.probs.end());
    for (std::size_t level = tree.depth; level-- > 0;) {
        const std::size_t nodes = std::size_t{1} << level;
        std::vector<double> parent(nodes);
        tree.levels[level].resize(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            double left = sums[2 * i];
            double right = sums[2 * i + 1];
            parent[i] = left + right;
            tree.levels[level][i] =
                (left + right > 0.0)
                    ? 2.0 * std::atan2(std::sqrt(right), std::sqrt(left))
                    : 0.0;
        }
        sums.swap(parent);
    }
    return tree;
}

std::vector<Gate> combine(int control, std::span<const int> left,
                          std::span<const int> right) {
    if (left.size() != right.size())
        throw std::invalid_argument("combine: register size mismatch");
    std::set<int> seen{control};
    for (int q : left) seen.insert(q);
    for (int q : right) seen.insert(q);
    if (seen.size() != 2 * left.size() + 1)
        throw std::invalid_argument("combine: overlapping registers");

    std::vector<Gate> gates;
    gates.reserve(left.size());
    for (std::size_t i = 0; i < left.size(); ++i)
        gates.push_back({Gate::Kind::CSWAP, control, left[i], right[i], 0.0});
    return gates;
}

namespace {

// Left spine of the subtree rooted at heap node `h`: the qubits that carry
// that subtree's output state after its combines have run.
std::vector<int> left_spine(std::size_t h, std::size_t len) {
    std::vector<int> out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(static_cast<int>(h));
        h = 2 * h + 1;
    }
    return out;
}

} // namespace

CircuitDescription build_loader(const AngleTree& tree) {
    const std::size_t d = tree.depth;
    if (d == 0 || tree.levels.size() != d)
        throw std::invalid_argument("build_loader: invalid angle tree");

    CircuitDescription circ;
    circ.num_qubits = static_cast<int>((std::size_t{1} << d) - 1);

    // One RY per node; qubit index = heap index.
    for (std::size_t level = 0; level < d; ++level) {
        if (tree.levels[level].size() != (std::size_t{1} << level))
            throw std::invalid_argument("build_loader: malformed level");
        for (std::size_t i = 0; i < tree.levels[level].size(); ++i) {
            int q = static_cast<int>((std::size_t{1} << level) - 1 + i);
            circ.gates.push_back({Gate::Kind::RY, q, 0, 0, tree.levels[level][i]});
        }
    }

    // Combine registers of size m for m = 1 .. d-1; parents live at tree
    // level d-1-m. Every internal node is combined, zero-angle subtrees
    // included, so the circuit shape depends only on padded_len.
    int depth = 1;
    for (std::size_t m = 1; m < d; ++m) {
        const std::size_t level = d - 1 - m;
        const std::size_t first = (std::size_t{1} << level) - 1;
        const std::size_t count = std::size_t{1} << level;
        for (std::size_t p = first; p < first + count; ++p) {
            auto left = left_spine(2 * p + 1, m);
            auto right = left_spine(2 * p + 2, m);
            auto gates = combine(static_cast<int>(p), left, right);
            circ.gates.insert(circ.gates.end(), gates.begin(), gates.end());
        }
        depth += static_cast<int>(m);
    }

    circ.depth = depth;
    auto out = left_spine(0, d);
    circ.output_register.assign(out.begin(), out.end());
    return circ;
}

std::size_t loader_cswap_count(std::size_t depth) {
    std::size_t total = 0;
    for (std::size_t m = 1; m < depth; ++m)
        total += m * (std::size_t{1} << (depth - 1 - m));
    return total;
}

ResourceReport resource_report(std::size_t template_len, std::size_t data_len,
                               const SegmentPlan& plan) {
    if (template_len > data_len)
        throw std::invalid_argument("resource_report: template longer than data");
    if (plan.k_t > plan.k_d || plan.k_t == 0 || plan.data_starts.empty())
        throw std::invalid_argument("resource_report: invalid plan");

    const std::size_t kd_pad = std::bit_ceil(plan.k_d);
    const std::size_t kt_pad = std::bit_ceil(plan.k_t);
    const std::size_t d_depth = static_cast<std::size_t>(std::countr_zero(kd_pad));
    const std::size_t t_depth =
        kt_pad > 1 ? static_cast<std::size_t>(std::countr_zero(kt_pad)) : 0;

    ResourceReport rep;
    rep.data_qubits_per_segment = kd_pad - 1;
    rep.template_qubits_per_chunk = kt_pad > 1 ? kt_pad - 1 : 0;
    rep.lags_per_segment = plan.lags_per_segment;
    rep.num_segments = plan.data_starts.size();
    rep.num_chunks = plan.num_chunks;
    rep.total_runs = rep.num_segments * rep.num_chunks;
    rep.data_loader_cswaps = loader_cswap_count(d_depth);
    rep.template_loader_cswaps = t_depth ? loader_cswap_count(t_depth) : 0;
    // Loaders run side by side; layered depth is set by the deeper one.
    std::size_t deeper = std::max(d_depth, t_depth);
    rep.combine_depth = 1 + deeper * (deeper - 1) / 2;
    rep.total_shots = plan.shots_per_segment * rep.total_runs;

    const double nl = static_cast<double>(template_len) *
                      static_cast<double>(data_len);
    rep.or_gate_estimate = nl;
    rep.and_inverter_estimate = nl * std::log2(std::max(nl, 2.0));
    return rep;
}

std::string dump_circuit(const CircuitDescription& circuit) {
    std::ostringstream out;
    out << "qubits " << circuit.num_qubits << "\n";
    out << "output ";
    for (std::size_t i = 0; i < circuit.output_register.size(); ++i) {
        if (i) out << ",";
        out << circuit.output_register[i];
    }
    out << "\n";
    char buf[64];
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case Gate::Kind::RY:
                std::snprintf(buf, sizeof buf, "%.17g", g.theta);
                out << "RY q" << g.q0 << " " << buf << "\n";
                break;
            case Gate::Kind::X:
                out << "X q" << g.q0 << "\n";
                break;
            case Gate::Kind::CNOT:
                out << "CNOT q" << g.q0 << " q" << g.q1 << "\n";
                break;
            case Gate::Kind::CSWAP:
                out << "CSWAP q" << g.q0 << " q" << g.q1 << " q" << g.q2 << "\n";
                break;
        }
    }
    return out.str();
}

namespace {

int parse_qubit(const std::string& tok) {
    if (tok.size() < 2 || tok[0] != 'q')
        throw std::invalid_argument("parse_circuit: bad qubit token: " + tok);
    return std::stoi(tok.substr(1));
}

} // namespace

CircuitDescription parse_circuit(std::istream& in) {
    CircuitDescription circ;
    std::string line;
    bool have_qubits = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "qubits") {
            ls >> circ.num_qubits;
            have_qubits = true;
        } else if (head == "output") {
            std::string rest;
            ls >> rest;
            std::istringstream rs(rest);
            std::string tok;
            while (std::getline(rs, tok, ','))
                circ.output_register.push_back(std::stoi(tok));
        } else if (head == "RY") {
            std::string q;
            double theta;
            ls >> q >> theta;
            circ.gates.push_back({Gate::Kind::RY, parse_qubit(q), 0, 0, theta});
        } else if (head == "X") {
            std::string q;
            ls >> q;
            circ.gates.push_back({Gate::Kind::X, parse_qubit(q), 0, 0, 0.0});
        } else if (head == "CNOT") {
            std::string a, b;
            ls >> a >> b;
            circ.gates.push_back(
                {Gate::Kind::CNOT, parse_qubit(a), parse_qubit(b), 0, 0.0});
        } else if (head == "CSWAP") {
            std::string a, b, c;
            ls >> a >> b >> c;
            circ.gates.push_back({Gate::Kind::CSWAP, parse_qubit(a),
                                  parse_qubit(b), parse_qubit(c), 0.0});
        } else {
            throw std::invalid_argument("parse_circuit: unknown line: " + line);
        }
    }
    if (!have_qubits)
        throw std::invalid_argument("parse_circuit: missing qubits header");
    return circ;
}

} // namespace qmf
