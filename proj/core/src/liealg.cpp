#include "svqnhe/liealg.hpp"

#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace svqnhe {

namespace {

std::size_t coeff_dim(int n_qubits) { return std::size_t{1} << (2 * n_qubits); }

PauliOp letter_at(std::uint64_t code, int q) {
    return static_cast<PauliOp>((code >> (2 * q)) & 3u);
}

}  // namespace

LieElement LieElement::zero(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 8)
        throw std::invalid_argument("Lie elements supported for 1..8 qubits");
    LieElement e;
    e.n_qubits = n_qubits;
    e.coeff.assign(coeff_dim(n_qubits), 0.0);
    return e;
}

LieElement LieElement::single(const PauliString& p, double c) {
    if (std::abs(p.phase.imag()) > 1e-12)
        throw std::invalid_argument("Lie element strings need a real phase");
    LieElement e = zero(p.n_qubits);
    e.coeff[pauli_code(p)] = c * p.phase.real();
    return e;
}

std::uint64_t pauli_code(const PauliString& p) {
    std::uint64_t code = 0;
    for (int q = 0; q < p.n_qubits; ++q)
        code |= static_cast<std::uint64_t>(p.ops[q]) << (2 * q);
    return code;
}

LieElement lie_bracket(const LieElement& a, const LieElement& b) {
    if (a.n_qubits != b.n_qubits)
        throw std::invalid_argument("Lie bracket size mismatch");
    const int n = a.n_qubits;
    LieElement out = LieElement::zero(n);
    for (std::size_t p = 0; p < a.coeff.size(); ++p) {
        const double ap = a.coeff[p];
        if (ap == 0.0) continue;
        for (std::size_t q = 0; q < b.coeff.size(); ++q) {
            const double bq = b.coeff[q];
            if (bq == 0.0) continue;
            int pow = 0;
            for (int k = 0; k < n; ++k)
                pow += pauli_phase_pow(letter_at(p, k), letter_at(q, k));
            if ((pow & 1) == 0) continue;  // commuting pair, no contribution
            // [iA, iB] = i * C with C_R = -2 a_p b_q i^{pow-1}
            const double factor = (pow % 4 == 1) ? -2.0 : 2.0;
            out.coeff[p ^ q] += factor * ap * bq;
        }
    }
    return out;
}

namespace {

// reduced basis with unit pivots; reduce() returns the residual of x
struct EchelonBasis {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> pivots;
    double tol;

    explicit EchelonBasis(double tol) : tol(tol) {}

    // reduces x in place; returns true (and absorbs x) when independent
    bool absorb(std::vector<double>& x) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double c = x[pivots[r]];
            if (c == 0.0) continue;
            const std::vector<double>& row = rows[r];
            for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * row[i];
        }
        std::size_t piv = 0;
        double best = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::abs(x[i]) > best) {
                best = std::abs(x[i]);
                piv = i;
            }
        }
        if (best < tol) return false;
        const double inv = 1.0 / x[piv];
        for (double& v : x) v *= inv;
        // keep earlier rows clean at the new pivot
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double c = rows[r][piv];
            if (c == 0.0) continue;
            for (std::size_t i = 0; i < x.size(); ++i) rows[r][i] -= c * x[i];
        }
        rows.push_back(x);
        pivots.push_back(piv);
        return true;
    }
};

}  // namespace

int lie_closure_dim(const std::vector<LieElement>& generators, double tol) {
    if (generators.empty()) return 0;
    const int n = generators.front().n_qubits;
    EchelonBasis basis(tol);
    std::vector<LieElement> members;  // reduced representatives
    std::deque<LieElement> queue(generators.begin(), generators.end());
    while (!queue.empty()) {
        LieElement e = std::move(queue.front());
        queue.pop_front();
        if (e.n_qubits != n) throw std::invalid_argument("mixed qubit counts in closure");
        std::vector<double> x = e.coeff;
        if (!basis.absorb(x)) continue;
        LieElement reduced;
        reduced.n_qubits = n;
        reduced.coeff = std::move(x);
        for (const LieElement& other : members) queue.push_back(lie_bracket(other, reduced));
        members.push_back(std::move(reduced));
    }
    return static_cast<int>(basis.rows.size());
}

namespace {

PauliString z_subset(int n, std::uint64_t qubit_set) {
    PauliString p = PauliString::identity(n);
    for (int q = 0; q < n; ++q)
        if (qubit_set & (std::uint64_t{1} << q)) p.ops[q] = PauliOp::Z;
    return p;
}

PauliString y_single(int n, int q) {
    PauliString p = PauliString::identity(n);
    p.ops[q] = PauliOp::Y;
    return p;
}

}  // namespace

std::vector<LieElement> generators_individual(int n_qubits, int m) {
    if (m < 2 || m > n_qubits)
        throw std::invalid_argument("diagonal locality m must lie in [2, n]");
    std::vector<LieElement> gens;
    for (int j = 1; 2 * j <= m; ++j) {
        for (std::uint64_t set = 0; set < (std::uint64_t{1} << n_qubits); ++set)
            if (std::popcount(set) == 2 * j)
                gens.push_back(LieElement::single(z_subset(n_qubits, set)));
    }
    for (int q = 0; q < n_qubits; ++q)
        gens.push_back(LieElement::single(y_single(n_qubits, q)));
    return gens;
}

std::vector<LieElement> generators_summed(int n_qubits, int m) {
    if (m < 2 || m > n_qubits)
        throw std::invalid_argument("diagonal locality m must lie in [2, n]");
    std::vector<LieElement> gens;
    for (int j = 1; 2 * j <= m; ++j) {
        LieElement sum = LieElement::zero(n_qubits);
        for (std::uint64_t set = 0; set < (std::uint64_t{1} << n_qubits); ++set)
            if (std::popcount(set) == 2 * j)
                sum.coeff[pauli_code(z_subset(n_qubits, set))] += 1.0;
        gens.push_back(std::move(sum));
    }
    LieElement ysum = LieElement::zero(n_qubits);
    for (int q = 0; q < n_qubits; ++q)
        ysum.coeff[pauli_code(y_single(n_qubits, q))] += 1.0;
    gens.push_back(std::move(ysum));
    return gens;
}

GeneratorComparison compare_generator_sets(int n_qubits, int m) {
    if (n_qubits > 5)
        throw std::invalid_argument("generator comparison supported up to 5 qubits");
    GeneratorComparison cmp;
    cmp.dim_individual = lie_closure_dim(generators_individual(n_qubits, m));
    cmp.dim_summed = lie_closure_dim(generators_summed(n_qubits, m));
    return cmp;
}

}  // namespace svqnhe
