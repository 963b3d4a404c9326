// liealg.hpp: dynamical-Lie-algebra dimension of circuit generator sets.
//
// Elements are anti-Hermitian operators i * sum_P c_P P with real c_P over
// the 4^n phase-free Pauli strings; the commutator of two such elements is
// again of this form. Dimensions come from a queue closure with incremental
// Gaussian elimination over the string coefficients.
#pragma once

#include <cstdint>
#include <vector>

#include "svqnhe/pauli.hpp"

namespace svqnhe {

// coeff has size 4^n, indexed by the base-4 string code (2 bits per qubit,
// qubit 0 in the lowest bits; letters I=0, X=1, Y=2, Z=3)
struct LieElement {
    int n_qubits = 0;
    std::vector<double> coeff;

    static LieElement zero(int n_qubits);
    static LieElement single(const PauliString& p, double c = 1.0);
};

std::uint64_t pauli_code(const PauliString& p);

// [a, b] for a = i*A, b = i*B; the result is again i * (real combination)
LieElement lie_bracket(const LieElement& a, const LieElement& b);

int lie_closure_dim(const std::vector<LieElement>& generators, double tol = 1e-9);

// Generator families behind the two sign-ansatz variants on n qubits with
// diagonal blocks touching at most m qubits at a time:
//   individual: every Z string on a 2j-subset (j <= m/2) and every single Y
//   summed:     one element per subset size (sum of the Z strings) plus sum Y
std::vector<LieElement> generators_individual(int n_qubits, int m);
std::vector<LieElement> generators_summed(int n_qubits, int m);

struct GeneratorComparison {
    int dim_individual = 0;
    int dim_summed = 0;
};

GeneratorComparison compare_generator_sets(int n_qubits, int m);

}  // namespace svqnhe
