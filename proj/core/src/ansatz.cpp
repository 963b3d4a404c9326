#include "svqnhe/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "svqnhe/pauli.hpp"

namespace svqnhe {

namespace {

void check_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop edge");
    }
}

}  // namespace

SignAnsatz build_sign_ansatz(int n_qubits, const std::vector<std::pair<int, int>>& edges,
                             int n_layers) {
    if (n_layers < 1) throw std::invalid_argument("sign ansatz needs at least one layer");
    check_edges(n_qubits, edges);
    SignAnsatz a;
    a.n_qubits = n_qubits;
    a.n_layers = n_layers;
    a.edges = edges;
    a.circuit.n_qubits = n_qubits;
    for (int q = 0; q < n_qubits; ++q) a.circuit.add_fixed(GateKind::H, q);
    for (int l = 1; l <= n_layers; ++l) {
        std::vector<std::string> w_names;
        std::vector<std::string> ry_names;
        for (int q = 0; q < n_qubits; ++q) {
            std::string name = "w" + std::to_string(l) + ":rz:" + std::to_string(q);
            a.circuit.add_param(GateKind::Rz, q, -1, name);
            w_names.push_back(std::move(name));
        }
        for (const auto& [x, y] : edges) {
            std::string name = "w" + std::to_string(l) + ":zz:" + std::to_string(x) + ":" +
                               std::to_string(y);
            a.circuit.add_param(GateKind::Rzz, x, y, name);
            w_names.push_back(std::move(name));
        }
        for (int q = 0; q < n_qubits; ++q) {
            std::string name = "e" + std::to_string(l) + ":ry:" + std::to_string(q);
            a.circuit.add_param(GateKind::Ry, q, -1, name);
            ry_names.push_back(std::move(name));
        }
        a.w_param_names.push_back(std::move(w_names));
        a.ry_param_names.push_back(std::move(ry_names));
    }
    a.validate();
    return a;
}

std::vector<WParamInfo> SignAnsatz::w_params(int layer) const {
    if (layer < 1 || layer > n_layers) throw std::out_of_range("layer index out of range");
    std::vector<WParamInfo> out;
    const int l = layer - 1;
    std::size_t k = 0;
    for (int q = 0; q < n_qubits; ++q, ++k)
        out.push_back({w_param_names[l][k], qubit_mask(q, n_qubits)});
    for (const auto& [x, y] : edges) {
        out.push_back({w_param_names[l][k++],
                       qubit_mask(x, n_qubits) | qubit_mask(y, n_qubits)});
    }
    return out;
}

void SignAnsatz::validate() const {
    const std::size_t per_layer = static_cast<std::size_t>(2 * n_qubits) + edges.size();
    if (circuit.gates.size() != static_cast<std::size_t>(n_qubits) + per_layer * n_layers)
        throw std::runtime_error("sign ansatz gate count does not match its layout");
    std::size_t g = 0;
    for (int q = 0; q < n_qubits; ++q, ++g)
        if (circuit.gates[g].kind != GateKind::H || circuit.gates[g].q0 != q)
            throw std::runtime_error("sign ansatz must start with H on every qubit");
    for (int l = 0; l < n_layers; ++l) {
        for (int q = 0; q < n_qubits; ++q, ++g)
            if (circuit.gates[g].kind != GateKind::Rz)
                throw std::runtime_error("sign ansatz diagonal block may only hold Rz/Rzz");
        for (std::size_t e = 0; e < edges.size(); ++e, ++g)
            if (circuit.gates[g].kind != GateKind::Rzz)
                throw std::runtime_error("sign ansatz diagonal block may only hold Rz/Rzz");
        for (int q = 0; q < n_qubits; ++q, ++g)
            if (circuit.gates[g].kind != GateKind::Ry)
                throw std::runtime_error("sign ansatz entangler block may only hold Ry");
    }
    if (circuit.params.size() != per_layer * n_layers)
        throw std::runtime_error("sign ansatz parameter count does not match its layout");
}

HeaAnsatz build_hea(int n_qubits, int reps) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
    if (reps < 0) throw std::invalid_argument("reps must be non-negative");
    HeaAnsatz a;
    a.n_qubits = n_qubits;
    a.reps = reps;
    a.circuit.n_qubits = n_qubits;
    for (int r = 0; r <= reps; ++r) {
        for (int q = 0; q < n_qubits; ++q)
            a.circuit.add_param(GateKind::Ry, q, -1,
                                "b" + std::to_string(r) + ":ry:" + std::to_string(q));
        for (int q = 0; q < n_qubits; ++q)
            a.circuit.add_param(GateKind::Rz, q, -1,
                                "b" + std::to_string(r) + ":rz:" + std::to_string(q));
        if (r < reps)
            for (int q = 0; q + 1 < n_qubits; ++q)
                a.circuit.add_fixed(GateKind::CNOT, q, q + 1);
    }
    return a;
}

BrickworkAnsatz build_brickwork(int n_qubits, int depth) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    BrickworkAnsatz a;
    a.n_qubits = n_qubits;
    a.depth = depth;
    a.circuit.n_qubits = n_qubits;
    for (int t = 0; t < depth; ++t) {
        for (int q = 0; q < n_qubits; ++q)
            a.circuit.add_param(GateKind::Ry, q, -1,
                                "t" + std::to_string(t) + ":ry:" + std::to_string(q));
        const int start = (t % 2 == 0) ? 0 : 1;
        for (int q = start; q + 1 < n_qubits; q += 2) a.circuit.add_fixed(GateKind::CZ, q, q + 1);
    }
    return a;
}

QaoaAnsatz build_qaoa(const Hamiltonian& cost, int rounds) {
    if (rounds < 1) throw std::invalid_argument("need at least one round");
    if (!cost.is_diagonal())
        throw std::invalid_argument("QAOA cost operator must be diagonal");
    const int n = cost.n_qubits();
    QaoaAnsatz a;
    a.n_qubits = n;
    a.rounds = rounds;
    a.circuit.n_qubits = n;
    for (int q = 0; q < n; ++q) a.circuit.add_fixed(GateKind::H, q);
    for (int r = 0; r < rounds; ++r) {
        const std::string gamma = "gamma" + std::to_string(r);
        const std::string beta = "beta" + std::to_string(r);
        for (const PauliTerm& t : cost.terms()) {
            std::vector<int> support;
            for (int q = 0; q < n; ++q)
                if (t.string.op(q) == PauliOp::Z) support.push_back(q);
            if (support.empty()) continue;  // constant offset, no gate
            if (support.size() == 1)
                a.circuit.add_param(GateKind::Rz, support[0], -1, gamma, 2.0 * t.coeff);
            else if (support.size() == 2)
                a.circuit.add_param(GateKind::Rzz, support[0], support[1], gamma, 2.0 * t.coeff);
            else
                throw std::invalid_argument("QAOA cost terms must act on at most two qubits");
        }
        for (int q = 0; q < n; ++q) a.circuit.add_param(GateKind::Rx, q, -1, beta, 2.0);
        a.gamma_names.push_back(gamma);
        a.beta_names.push_back(beta);
    }
    return a;
}

void randomize_parameters(Circuit& circuit, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    for (auto& [name, value] : circuit.params) value = unif(gen);
}

}  // namespace svqnhe
