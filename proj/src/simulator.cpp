#include "qmf/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qmf/rng.hpp"

namespace qmf {

double NoiseModel::gate_weight(Gate::Kind kind) const {
    switch (kind) {
        case Gate::Kind::CNOT: return weight_cnot;
        case Gate::Kind::CSWAP: return weight_cswap;
        case Gate::Kind::RY:
        case Gate::Kind::X: return 0.0;
    }
    return 0.0;
}

namespace {

inline std::uint64_t qubit_mask(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits)
        throw std::invalid_argument("qubit index out of range");
    return std::uint64_t{1} << (state.num_qubits - 1 - qubit);
}

} // namespace

StateVector make_zero_state(int num_qubits) {
    if (num_qubits < 1)
        throw std::invalid_argument("make_zero_state: need >= 1 qubit");
    StateVector state;
    state.num_qubits = num_qubits;
    state.amps.assign(std::uint64_t{1} << num_qubits, {0.0, 0.0});
    state.amps[0] = {1.0, 0.0};
    return state;
}

void apply_gate(StateVector& state, const Gate& gate) {
    const std::uint64_t dim = state.amps.size();
    switch (gate.kind) {
        case Gate::Kind::RY: {
            const std::uint64_t m = qubit_mask(state, gate.q0);
            const double c = std::cos(gate.theta / 2.0);
            const double s = std::sin(gate.theta / 2.0);
            for (std::uint64_t i = 0; i < dim; ++i) {
                if (i & m) continue;
                auto a0 = state.amps[i];
                auto a1 = state.amps[i | m];
                state.amps[i] = c * a0 - s * a1;
                state.amps[i | m] = s * a0 + c * a1;
            }
            break;
        }
        case Gate::Kind::X: {
            const std::uint64_t m = qubit_mask(state, gate.q0);
            for (std::uint64_t i = 0; i < dim; ++i)
                if (!(i & m)) std::swap(state.amps[i], state.amps[i | m]);
            break;
        }
        case Gate::Kind::CNOT: {
            const std::uint64_t mc = qubit_mask(state, gate.q0);
            const std::uint64_t mt = qubit_mask(state, gate.q1);
            if (gate.q0 == gate.q1)
                throw std::invalid_argument("CNOT: duplicate qubit");
            for (std::uint64_t i = 0; i < dim; ++i)
                if ((i & mc) && !(i & mt))
                    std::swap(state.amps[i], state.amps[i | mt]);
            break;
        }
        case Gate::Kind::CSWAP: {
            const std::uint64_t mc = qubit_mask(state, gate.q0);
            const std::uint64_t ma = qubit_mask(state, gate.q1);
            const std::uint64_t mb = qubit_mask(state, gate.q2);
            if (gate.q0 == gate.q1 || gate.q0 == gate.q2 || gate.q1 == gate.q2)
                throw std::invalid_argument("CSWAP: duplicate qubit");
            for (std::uint64_t i = 0; i < dim; ++i)
                if ((i & mc) && (i & ma) && !(i & mb))
                    std::swap(state.amps[i], state.amps[(i ^ ma) | mb]);
            break;
        }
    }
}

void apply_pauli(StateVector& state, int qubit, int pauli) {
    const std::uint64_t m = qubit_mask(state, qubit);
    const std::uint64_t dim = state.amps.size();
    switch (pauli) {
        case 0: break;
        case 1: // X
            for (std::uint64_t i = 0; i < dim; ++i)
                if (!(i & m)) std::swap(state.amps[i], state.amps[i | m]);
            break;
        case 2: // Y
            for (std::uint64_t i = 0; i < dim; ++i)
                if (!(i & m)) {
                    auto a0 = state.amps[i];
                    auto a1 = state.amps[i | m];
                    state.amps[i] = std::complex<double>(0, -1) * a1;
                    state.amps[i | m] = std::complex<double>(0, 1) * a0;
                }
            break;
        case 3: // Z
            for (std::uint64_t i = 0; i < dim; ++i)
                if (i & m) state.amps[i] = -state.amps[i];
            break;
        default:
            throw std::invalid_argument("apply_pauli: bad Pauli index");
    }
}

StateVector simulate(const CircuitDescription& circuit, int qubit_cap) {
    if (circuit.num_qubits > qubit_cap)
        throw std::invalid_argument("simulate: qubit cap exceeded");
    StateVector state = make_zero_state(circuit.num_qubits);
    for (const Gate& g : circuit.gates) apply_gate(state, g);
    return state;
}

namespace {

// CDF-inversion sampler shared by every sampling path.
class CdfSampler {
public:
    explicit CdfSampler(std::span<const double> probs) : cdf_(probs.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += std::max(probs[i], 0.0);
            cdf_[i] = acc;
        }
        total_ = acc;
    }

    std::uint64_t draw(rng::SplitMix64& gen) const {
        double u = gen.uniform() * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return static_cast<std::uint64_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> p(state.amps.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state.amps[i]);
    return p;
}

} // namespace

ShotHistogram sample(const StateVector& state, std::uint64_t shots,
                     std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("sample: shots must be > 0");
    auto probs = probabilities(state);
    CdfSampler sampler(probs);
    rng::SplitMix64 gen(seed);
    ShotHistogram hist;
    hist.num_bits = state.num_qubits;
    hist.total_shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) ++hist.counts[sampler.draw(gen)];
    return hist;
}

ShotHistogram sample_ideal(const EncodedSegment& tmpl_seg,
                           const EncodedSegment& data_seg, std::uint64_t shots,
                           std::uint64_t seed) {
    if (shots == 0)
        throw std::invalid_argument("sample_ideal: shots must be > 0");
    const int t_bits = std::countr_zero(tmpl_seg.padded_len);
    const int d_bits = std::countr_zero(data_seg.padded_len);

    std::vector<double> joint(tmpl_seg.padded_len * data_seg.padded_len);
    for (std::size_t b = 0; b < tmpl_seg.padded_len; ++b)
        for (std::size_t d = 0; d < data_seg.padded_len; ++d)
            joint[(b << d_bits) | d] = tmpl_seg.probs[b] * data_seg.probs[d];

    CdfSampler sampler(joint);
    rng::SplitMix64 gen(seed);
    ShotHistogram hist;
    hist.num_bits = t_bits + d_bits;
    hist.total_shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) ++hist.counts[sampler.draw(gen)];
    return hist;
}

ShotHistogram apply_noise(const CircuitDescription& circuit,
                          const NoiseModel& model, std::uint64_t shots,
                          std::uint64_t seed, int qubit_cap) {
    if (shots == 0)
        throw std::invalid_argument("apply_noise: shots must be > 0");
    if (!(model.p_two_qubit >= 0.0 && model.p_two_qubit <= 1.0) ||
        !(model.p_readout >= 0.0 && model.p_readout <= 1.0))
        throw std::invalid_argument("apply_noise: probabilities outside [0,1]");

    StateVector clean = simulate(circuit, qubit_cap);
    auto clean_probs = probabilities(clean);
    CdfSampler clean_sampler(clean_probs);

    rng::SplitMix64 gen(seed);
    ShotHistogram hist;
    hist.num_bits = circuit.num_qubits;
    hist.total_shots = shots;

    struct Fault {
        std::size_t gate_index;
        std::uint64_t pauli_code; // base-4 digits over the gate's qubits, != 0
    };
    std::vector<Fault> faults;

    for (std::uint64_t s = 0; s < shots; ++s) {
        faults.clear();
        for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
            const Gate& g = circuit.gates[gi];
            double w = model.gate_weight(g.kind);
            if (w <= 0.0) continue;
            double p = std::min(1.0, model.p_two_qubit * w);
            if (p <= 0.0) continue;
            if (gen.uniform() < p) {
                std::uint64_t options =
                    (std::uint64_t{1} << (2 * g.arity())) - 1;
                faults.push_back({gi, gen.below(options) + 1});
            }
        }

        std::uint64_t outcome;
        if (faults.empty()) {
            outcome = clean_sampler.draw(gen);
        } else {
            StateVector state = make_zero_state(circuit.num_qubits);
            std::size_t next = 0;
            for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
                const Gate& g = circuit.gates[gi];
                apply_gate(state, g);
                while (next < faults.size() && faults[next].gate_index == gi) {
                    std::uint64_t code = faults[next].pauli_code;
                    const int qubits[3] = {g.q0, g.q1, g.q2};
                    for (int k = 0; k < g.arity(); ++k) {
                        apply_pauli(state, qubits[k],
                                    static_cast<int>((code >> (2 * k)) & 3));
                    }
                    ++next;
                }
            }
            CdfSampler noisy_sampler(probabilities(state));
            outcome = noisy_sampler.draw(gen);
        }

        if (model.p_readout > 0.0) {
            for (int q = 0; q < circuit.num_qubits; ++q)
                if (gen.uniform() < model.p_readout)
                    outcome ^= std::uint64_t{1}
                               << (circuit.num_qubits - 1 - q);
        }
        ++hist.counts[outcome];
    }
    return hist;
}

ShotHistogram marginalize(const ShotHistogram& hist,
                          std::span<const int> qubits) {
    ShotHistogram out;
    out.num_bits = static_cast<int>(qubits.size());
    out.total_shots = hist.total_shots;
    for (const auto& [key, count] : hist.counts) {
        std::uint64_t reduced = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j) {
            if (qubits[j] < 0 || qubits[j] >= hist.num_bits)
                throw std::invalid_argument("marginalize: qubit out of range");
            std::uint64_t bit =
                (key >> (hist.num_bits - 1 - qubits[j])) & 1;
            reduced |= bit << (qubits.size() - 1 - j);
        }
        out.counts[reduced] += count;
    }
    return out;
}

std::vector<double> output_marginal(const StateVector& state,
                                    std::span<const int> qubits) {
    std::vector<double> marg(std::size_t{1} << qubits.size(), 0.0);
    for (std::size_t i = 0; i < state.amps.size(); ++i) {
        std::uint64_t reduced = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j) {
            std::uint64_t bit = (i >> (state.num_qubits - 1 - qubits[j])) & 1;
            reduced |= bit << (qubits.size() - 1 - j);
        }
        marg[reduced] += std::norm(state.amps[i]);
    }
    return marg;
}

CircuitDescription join_circuits(const CircuitDescription& tmpl,
                                 const CircuitDescription& data) {
    CircuitDescription joint;
    joint.num_qubits = tmpl.num_qubits + data.num_qubits;
    joint.gates = tmpl.gates;
    for (Gate g : data.gates) {
        g.q0 += tmpl.num_qubits;
        if (g.arity() > 1) g.q1 += tmpl.num_qubits;
        if (g.arity() > 2) g.q2 += tmpl.num_qubits;
        joint.gates.push_back(g);
    }
    joint.output_register = tmpl.output_register;
    for (int q : data.output_register)
        joint.output_register.push_back(q + tmpl.num_qubits);
    joint.depth = std::max(tmpl.depth, data.depth);
    return joint;
}

} // namespace qmf
