// qsim.hpp: dense statevector simulator and circuit representation.
//
// Gate conventions (fixed):
//   Rz(t) = diag(e^{-it/2}, e^{+it/2})
//   Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
//   Rx(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]
//   Rzz(t) = exp(-i t/2 Z (x) Z)
//   XP = Rx(+pi/2), XM = Rx(-pi/2), YP = Ry(+pi/2), YM = Ry(-pi/2)
// The fixed-angle gates satisfy, up to global phase:
//   YM CZ YP            == CNOT        (applied left to right)
//   YM CZ YP Rz YM CZ YP == Rzz
//   XP Rz XM            == Ry
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "svqnhe/pauli.hpp"

namespace svqnhe {

inline constexpr int kMaxQubits = 14;

struct Statevector {
    int n_qubits = 0;
    std::vector<cdouble> amps;

    static Statevector zero(int n_qubits);  // |0...0>
    double norm() const;
    void normalize();
    std::vector<double> probabilities() const;
};

enum class GateKind : std::uint8_t {
    H, X, Y, Z, S, Sdg, Rx, Ry, Rz, Rzz, CNOT, CZ, XP, XM, YP, YM
};

bool gate_is_two_qubit(GateKind k);
bool gate_takes_angle(GateKind k);   // Rx, Ry, Rz, Rzz
bool gate_is_diagonal(GateKind k);   // Z, S, Sdg, Rz, Rzz, CZ
std::string gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

struct Gate {
    GateKind kind = GateKind::H;
    int q0 = 0;
    int q1 = -1;          // second qubit for two-qubit kinds
    double angle = 0.0;   // fixed angle when param is empty
    std::string param;    // if set, effective angle = scale * params.at(param)
    double scale = 1.0;
};

// Gate list plus a named-parameter table. Binding order is irrelevant;
// simulating with an unbound parameter reference is an error.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::map<std::string, double> params;

    explicit Circuit(int n = 0) : n_qubits(n) {}

    void add(Gate g);
    void add_fixed(GateKind kind, int q0, int q1 = -1, double angle = 0.0);
    // declares the parameter if new (initial value 0)
    void add_param(GateKind kind, int q0, int q1, const std::string& param, double scale = 1.0);

    bool has_param(const std::string& name) const;
    void bind(const std::string& name, double value);
    void bind_all(const std::map<std::string, double>& values);
    std::vector<std::string> param_names() const;  // sorted (map order)

    double resolved_angle(const Gate& g) const;

    void apply_to(Statevector& psi) const;
    Statevector simulate() const;  // from |0...0>

    std::string to_json() const;
    static Circuit from_json(const std::string& text);
};

// Applies one resolved gate in place. Throws std::out_of_range for bad qubit
// indices and std::invalid_argument for non-finite angles.
void apply_gate(Statevector& psi, GateKind kind, int q0, int q1 = -1, double angle = 0.0);

// Per-gate depolarizing noise strengths. p1 applies to single-qubit gates,
// p2 per involved qubit of two-qubit gates. Probability p means the qubit is
// replaced by the maximally mixed state, realized per trajectory as a Pauli
// drawn uniformly from {I, X, Y, Z}.
struct NoiseSpec {
    double p1 = 0.0;
    double p2 = 0.0;
    bool enabled() const { return p1 > 0.0 || p2 > 0.0; }
};

Statevector run_noisy_trajectory(const Circuit& c, const NoiseSpec& noise, std::uint64_t seed);

// Computational-basis sampling. Bitstring text uses the qubit-0-first order,
// matching to_bitstring().
std::vector<std::uint64_t> sample_indices(const Statevector& psi, int n_samples,
                                          std::mt19937_64& gen);
std::vector<std::string> sample_bitstrings(const Statevector& psi, int n_samples,
                                           std::uint64_t seed);

cdouble state_overlap(const Statevector& a, const Statevector& b);  // <a|b>

}  // namespace svqnhe
