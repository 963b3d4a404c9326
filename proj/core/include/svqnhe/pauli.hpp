// pauli.hpp: Pauli-string algebra, Hamiltonian assembly, exact ground states.
//
// Conventions used across the library:
//   - qubit 0 is the MOST significant bit of a basis index,
//     so |q0 q1 ... q_{n-1}> has index (q0 << (n-1)) | ... | q_{n-1}.
//   - a PauliString carries an explicit phase in {+1, -1, +i, -i}; products
//     stay inside the Pauli group with the phase tracked exactly.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace svqnhe {

using cdouble = std::complex<double>;

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_op_char(PauliOp op);
PauliOp pauli_op_from_char(char c);

// a * b = i^{pauli_phase_pow(a, b)} * (a xor b) for single-qubit letters
int pauli_phase_pow(PauliOp a, PauliOp b);

// Bit of qubit q inside basis index s (qubit 0 = most significant).
inline int bit_of(std::uint64_t s, int q, int n_qubits) {
    return static_cast<int>((s >> (n_qubits - 1 - q)) & 1u);
}

inline std::uint64_t qubit_mask(int q, int n_qubits) {
    return std::uint64_t{1} << (n_qubits - 1 - q);
}

std::string to_bitstring(std::uint64_t s, int n_qubits);
std::uint64_t from_bitstring(std::string_view bits);

struct PauliString {
    int n_qubits = 0;
    std::vector<PauliOp> ops;  // ops[q], q = 0..n_qubits-1
    cdouble phase = {1.0, 0.0};

    static PauliString identity(int n_qubits);
    // label is one char per qubit, e.g. "XZIIY"; throws on bad characters.
    static PauliString from_label(std::string_view label, cdouble phase = {1.0, 0.0});

    std::string label() const;

    PauliOp op(int q) const { return ops[static_cast<std::size_t>(q)]; }
    bool is_identity() const;
    bool is_diagonal() const;  // no X or Y anywhere
    int weight() const;        // number of non-identity positions

    std::uint64_t flip_mask() const;    // X and Y positions (basis-index bits)
    std::uint64_t z_mask() const;       // Z and Y positions
    std::uint64_t x_only_mask() const;  // X positions
    std::uint64_t y_mask() const;       // Y positions

    // P |s> = basis_phase(s) |s ^ flip_mask()>
    cdouble basis_phase(std::uint64_t s) const;

    // Group product this * rhs with exact phase bookkeeping.
    PauliString multiplied_by(const PauliString& rhs) const;
    bool commutes_with(const PauliString& rhs) const;

    bool same_letters(const PauliString& rhs) const;  // ignores phase
    bool operator==(const PauliString& rhs) const;
};

struct PauliTerm {
    double coeff = 0.0;
    PauliString string;  // canonical: string.phase == +1 (phases folded into coeff)
};

class Hamiltonian {
public:
    Hamiltonian() = default;
    explicit Hamiltonian(int n_qubits) : n_qubits_(n_qubits) {}

    int n_qubits() const { return n_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    // Folds the string phase into the coefficient, merges duplicate strings,
    // drops terms with zero coefficient. Throws on real-coefficient violation
    // (a +-i phase with a real coefficient would make H non-Hermitian).
    void add_term(double coeff, PauliString string);

    bool is_diagonal() const;
    double norm_bound() const;  // sum of |coeff|, an upper bound on ||H||

    // out = H * in over the full 2^n-dimensional space (matrix-free).
    void apply(std::span<const cdouble> in, std::span<cdouble> out) const;

    // <state| H |state> / <state|state>
    double expectation(std::span<const cdouble> state) const;

    std::string to_json() const;
    static Hamiltonian from_json(const std::string& text);

private:
    int n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

// <state| P |state> with the state taken as-is (not renormalized).
cdouble pauli_expectation(const PauliString& p, std::span<const cdouble> state);

// Model builders. All chains/grids are open (non-periodic).
// Zero-coefficient terms are dropped.
Hamiltonian build_j1j2_1d(int n, double j1, double j2, double delta1 = 1.0,
                          double delta2 = 1.0, double b_field = 0.0);
Hamiltonian build_heisenberg_2d(int rows, int cols, double h, double j);
Hamiltonian build_tfim_1d(int n, double j, double g);
Hamiltonian build_ising_1d(int n, double j, double h = 0.0);

// Nearest-neighbour + next-nearest-neighbour bond lists for open chains,
// also used as the Rzz edge set of the sign ansatz.
std::vector<std::pair<int, int>> chain_edges(int n);          // (i, i+1)
std::vector<std::pair<int, int>> chain_edges_nnn(int n);      // (i, i+2)
std::vector<std::pair<int, int>> grid_edges(int rows, int cols);
std::vector<std::pair<int, int>> complete_graph_edges(int n);

struct GroundStateResult {
    double energy = 0.0;
    std::vector<cdouble> state;
    int iterations = 0;
    std::string method;  // "dense" or "lanczos"
};

// Dispatches: dense diagonalization for n <= 10, matrix-free Lanczos for 11..12.
GroundStateResult ground_state(const Hamiltonian& h);
// Dense path, usable up to n = 12 when every term has an even number of Y ops
// (real symmetric matrix); otherwise limited to n <= 10.
GroundStateResult ground_state_dense(const Hamiltonian& h);
// Matrix-free Lanczos with full reorthogonalization; residual checked internally.
GroundStateResult ground_state_lanczos(const Hamiltonian& h, int max_krylov = 300,
                                       double tol = 1e-12);

}  // namespace svqnhe
