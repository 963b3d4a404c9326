// ansatz.hpp: parameterized circuit families.
//
// Sign ansatz layout (n qubits, edge set E, L layers):
//   H on all qubits, then per layer l = 1..L a diagonal block W_l (one Rz per
//   qubit, one Rzz per edge) followed by a per-qubit Ry block. Total parameter
//   count L * (2n + |E|). The Ry block after W_l acts as the entangler fitted
//   by amplitude transfer when layer l+1 is grown; the block after W_L stays
//   at zero unless a run chooses to train it.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svqnhe/qsim.hpp"

namespace svqnhe {

// Diagonal rotation parameter and the basis-index mask of its Z support.
struct WParamInfo {
    std::string name;
    std::uint64_t z_support = 0;
};

struct SignAnsatz {
    int n_qubits = 0;
    int n_layers = 0;
    std::vector<std::pair<int, int>> edges;
    Circuit circuit;
    // per layer: names of the diagonal-block parameters, then of the Ry block
    // that follows it (ry_param_names[l] for the last layer is the trailing block)
    std::vector<std::vector<std::string>> w_param_names;
    std::vector<std::vector<std::string>> ry_param_names;

    std::size_t param_count() const { return circuit.params.size(); }
    std::vector<WParamInfo> w_params(int layer) const;  // layer is 1-based
    // throws std::runtime_error if the circuit no longer matches the layout
    void validate() const;
};

SignAnsatz build_sign_ansatz(int n_qubits, const std::vector<std::pair<int, int>>& edges,
                             int n_layers);

// Hardware-efficient ansatz: (reps+1) blocks of per-qubit Ry then Rz, with a
// CNOT chain (q -> q+1) between consecutive blocks. 2n(reps+1) parameters.
struct HeaAnsatz {
    int n_qubits = 0;
    int reps = 0;
    Circuit circuit;
};

HeaAnsatz build_hea(int n_qubits, int reps);

// Brickwork: depth layers, each a per-qubit Ry block followed by CZ on
// (0,1),(2,3),... for even layer index and (1,2),(3,4),... for odd.
struct BrickworkAnsatz {
    int n_qubits = 0;
    int depth = 0;
    Circuit circuit;
};

BrickworkAnsatz build_brickwork(int n_qubits, int depth);

// QAOA over a diagonal cost operator: H layer, then per round r the cost
// rotations (angle 2*coeff*gamma_r, shared parameter "gamma{r}") and the
// Rx mixer (angle 2*beta_r, shared parameter "beta{r}").
struct QaoaAnsatz {
    int n_qubits = 0;
    int rounds = 0;
    Circuit circuit;
    std::vector<std::string> gamma_names;
    std::vector<std::string> beta_names;
};

class Hamiltonian;
QaoaAnsatz build_qaoa(const Hamiltonian& cost, int rounds);

// Binds every parameter of the circuit to U(-2pi, 2pi), deterministically in
// the seed.
void randomize_parameters(Circuit& circuit, std::uint64_t seed);

}  // namespace svqnhe
