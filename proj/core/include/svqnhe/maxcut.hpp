// maxcut.hpp: MaxCut on compressed qubit registers.
//
// Each vertex u is assigned one observable P_u: a single Pauli letter (Z, X
// or Y) repeated over a k-subset of the n qubits, in letter-major then
// lexicographic subset order, giving a capacity of 3 * C(n, k) vertices.
// The relaxed objective sum over edges of tanh(alpha <P_u>) tanh(alpha <P_v>)
// is minimized; rounding the correlation signs yields the cut.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svqnhe/neural.hpp"
#include "svqnhe/pauli.hpp"

namespace svqnhe {

struct Graph {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges;

    std::string to_json() const;
    static Graph from_json(const std::string& text);
};

Graph erdos_renyi(int n_vertices, double edge_prob, std::uint64_t seed);

// Edge-list text format, one "u v" pair per line, 0-indexed. The first line
// "p <n>" pins the vertex count so isolated tail vertices survive a round trip.
void save_edge_list(const Graph& g, const std::string& path);
Graph load_edge_list(const std::string& path);

long cut_value(const Graph& g, const std::vector<int>& assignment);  // entries ±1

struct BruteForceCut {
    long best_cut = 0;
    std::vector<int> assignment;
};

BruteForceCut maxcut_bruteforce(const Graph& g);  // up to 20 vertices

// ---- vertex observables -----------------------------------------------------

long maxcut_capacity(int n_qubits, int k);

// P_u for u = 0..n_vertices-1; throws if the capacity is exceeded
std::vector<PauliString> maxcut_observables(int n_vertices, int n_qubits, int k);

double relaxed_cut_objective(const std::vector<double>& correlations, const Graph& g,
                             double alpha);

std::vector<int> round_assignment(const std::vector<double>& correlations);

// ---- optimization drivers ---------------------------------------------------

struct MaxCutConfig {
    int n_qubits = 3;
    int k = 2;
    double alpha = 2.0;
    int iters_per_stage = 300;
    double nn_lr = 1e-2;
    double w_lr = 0.05;
    std::vector<int> hidden;  // empty = [n, n]
    int sign_layers = 2;
    int brickwork_depth = 0;  // 0 = ceil(sqrt(n_vertices))
    std::uint64_t seed = 1;
};

struct MaxCutRunResult {
    std::string method;
    std::vector<double> correlations;
    std::vector<int> assignment;
    long cut = 0;
    long best_cut = 0;
    double ratio = 0.0;      // cut / best_cut
    double objective = 0.0;  // final relaxed objective
    int circuits_per_iteration = 0;
    int iterations = 0;
};

// Two-stage sign ansatz with the neural factor; diagonal parameters only, so
// one measurement plan serves values and gradients.
MaxCutRunResult run_maxcut_svqnhe(const Graph& g, const MaxCutConfig& cfg);

enum class MaxCutBaseline { Brickwork, SignCircuit };

// Plain variational baseline on the same observables, parameter-shift
// gradients, product-basis measurement accounting.
MaxCutRunResult run_maxcut_vqe(const Graph& g, MaxCutBaseline kind, const MaxCutConfig& cfg);

}  // namespace svqnhe
