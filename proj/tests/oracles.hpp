// Self-contained dense linear algebra for cross-checking the library.
// Every matrix here is written straight from the documented gate and Pauli
// definitions; nothing routes through the simulator's update loops, so a
// match is a genuine two-path agreement.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;

struct CMat {
    int n = 0;
    std::vector<cdouble> a;  // row-major n x n

    static CMat zero(int n) {
        CMat m;
        m.n = n;
        m.a.assign(static_cast<std::size_t>(n) * n, cdouble{0.0, 0.0});
        return m;
    }
    static CMat identity(int n) {
        CMat m = zero(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
    cdouble& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    const cdouble& at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

inline CMat matmul(const CMat& x, const CMat& y) {
    if (x.n != y.n) throw std::invalid_argument("matmul: size mismatch");
    CMat out = CMat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            const cdouble xi = x.at(i, k);
            if (xi == cdouble{0.0, 0.0}) continue;
            for (int j = 0; j < x.n; ++j) out.at(i, j) += xi * y.at(k, j);
        }
    return out;
}

inline CVec matvec(const CMat& m, const CVec& v) {
    if (static_cast<int>(v.size()) != m.n) throw std::invalid_argument("matvec: size mismatch");
    CVec out(v.size(), cdouble{0.0, 0.0});
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out[static_cast<std::size_t>(i)] += m.at(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

inline CMat kron(const CMat& x, const CMat& y) {
    CMat out = CMat::zero(x.n * y.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j)
            for (int p = 0; p < y.n; ++p)
                for (int q = 0; q < y.n; ++q)
                    out.at(i * y.n + p, j * y.n + q) = x.at(i, j) * y.at(p, q);
    return out;
}

inline CMat dagger(const CMat& m) {
    CMat out = CMat::zero(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out.at(i, j) = std::conj(m.at(j, i));
    return out;
}

inline CMat add(const CMat& x, const CMat& y, cdouble wy = {1.0, 0.0}) {
    if (x.n != y.n) throw std::invalid_argument("add: size mismatch");
    CMat out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += wy * y.a[i];
    return out;
}

inline double max_abs_diff(const CMat& x, const CMat& y) {
    if (x.n != y.n) throw std::invalid_argument("diff: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
    return d;
}

inline double max_abs_diff(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("diff: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

inline cdouble vdot(const CVec& x, const CVec& y) {
    cdouble s{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline CMat pauli_matrix(char letter) {
    CMat m = CMat::zero(2);
    const cdouble i1{0.0, 1.0};
    switch (letter) {
        case 'I': m.at(0, 0) = 1.0; m.at(1, 1) = 1.0; break;
        case 'X': m.at(0, 1) = 1.0; m.at(1, 0) = 1.0; break;
        case 'Y': m.at(0, 1) = -i1; m.at(1, 0) = i1; break;
        case 'Z': m.at(0, 0) = 1.0; m.at(1, 1) = -1.0; break;
        default: throw std::invalid_argument("pauli_matrix: bad letter");
    }
    return m;
}

// qubit 0 = most significant basis bit, so it is the leftmost kron factor
inline CMat pauli_dense(const std::string& label, cdouble phase = {1.0, 0.0}) {
    CMat m = pauli_matrix(label.at(0));
    for (std::size_t q = 1; q < label.size(); ++q) m = kron(m, pauli_matrix(label[q]));
    for (cdouble& v : m.a) v *= phase;
    return m;
}

inline CMat gate_matrix(const std::string& name, double angle = 0.0) {
    const cdouble i1{0.0, 1.0};
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const double r = 1.0 / std::numbers::sqrt2;
    const double hp = std::numbers::pi / 2.0;
    CMat m;
    if (name == "H") {
        m = CMat::zero(2);
        m.at(0, 0) = r; m.at(0, 1) = r; m.at(1, 0) = r; m.at(1, 1) = -r;
    } else if (name == "X" || name == "Y" || name == "Z") {
        m = pauli_matrix(name[0]);
    } else if (name == "S") {
        m = CMat::zero(2);
        m.at(0, 0) = 1.0; m.at(1, 1) = i1;
    } else if (name == "Sdg") {
        m = CMat::zero(2);
        m.at(0, 0) = 1.0; m.at(1, 1) = -i1;
    } else if (name == "Rz") {
        m = CMat::zero(2);
        m.at(0, 0) = std::exp(-i1 * (angle / 2.0));
        m.at(1, 1) = std::exp(i1 * (angle / 2.0));
    } else if (name == "Ry") {
        m = CMat::zero(2);
        m.at(0, 0) = c; m.at(0, 1) = -s; m.at(1, 0) = s; m.at(1, 1) = c;
    } else if (name == "Rx") {
        m = CMat::zero(2);
        m.at(0, 0) = c; m.at(0, 1) = -i1 * s; m.at(1, 0) = -i1 * s; m.at(1, 1) = c;
    } else if (name == "XP") {
        m = gate_matrix("Rx", hp);
    } else if (name == "XM") {
        m = gate_matrix("Rx", -hp);
    } else if (name == "YP") {
        m = gate_matrix("Ry", hp);
    } else if (name == "YM") {
        m = gate_matrix("Ry", -hp);
    } else if (name == "CNOT") {
        m = CMat::zero(4);
        m.at(0, 0) = 1.0; m.at(1, 1) = 1.0; m.at(2, 3) = 1.0; m.at(3, 2) = 1.0;
    } else if (name == "CZ") {
        m = CMat::identity(4);
        m.at(3, 3) = -1.0;
    } else if (name == "Rzz") {
        m = CMat::zero(4);
        const cdouble em = std::exp(-i1 * (angle / 2.0)), ep = std::exp(i1 * (angle / 2.0));
        m.at(0, 0) = em; m.at(1, 1) = ep; m.at(2, 2) = ep; m.at(3, 3) = em;
    } else {
        throw std::invalid_argument("gate_matrix: unknown gate " + name);
    }
    return m;
}

// Embeds a 2^k-dimensional operator acting on the listed qubits (qubits[0] is
// the most significant sub-index bit) into the full 2^n space.
inline CMat embed(const CMat& u, const std::vector<int>& qubits, int n) {
    const int k = static_cast<int>(qubits.size());
    if (u.n != (1 << k)) throw std::invalid_argument("embed: operator size mismatch");
    const int dim = 1 << n;
    auto sub_index = [&](int full) {
        int sub = 0;
        for (int j = 0; j < k; ++j) {
            const int bit = (full >> (n - 1 - qubits[static_cast<std::size_t>(j)])) & 1;
            sub |= bit << (k - 1 - j);
        }
        return sub;
    };
    int rest_mask = dim - 1;
    for (int q : qubits) rest_mask &= ~(1 << (n - 1 - q));
    CMat out = CMat::zero(dim);
    for (int row = 0; row < dim; ++row)
        for (int col = 0; col < dim; ++col) {
            if ((row & rest_mask) != (col & rest_mask)) continue;
            out.at(row, col) = u.at(sub_index(row), sub_index(col));
        }
    return out;
}

// Max entry deviation after aligning the global phase on the largest entry.
inline double phase_aligned_distance(const CMat& x, const CMat& y) {
    std::size_t imax = 0;
    double amax = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        if (std::abs(x.a[i]) > amax) {
            amax = std::abs(x.a[i]);
            imax = i;
        }
    if (amax < 1e-14) return max_abs_diff(x, y);
    cdouble lambda = y.a[imax] / x.a[imax];
    const double norm = std::abs(lambda);
    if (norm < 1e-14) return max_abs_diff(x, y);
    lambda /= norm;
    double d = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) d = std::max(d, std::abs(lambda * x.a[i] - y.a[i]));
    return d;
}

inline CVec random_state(int n_qubits, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec v(std::size_t{1} << n_qubits);
    double norm2 = 0.0;
    for (cdouble& a : v) {
        a = cdouble{normal(gen), normal(gen)};
        norm2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (cdouble& a : v) a *= inv;
    return v;
}

// Expands a dense operator in the Pauli basis: coefficient of the label string
// is tr(P^dag M) / 2^n.
inline cdouble pauli_coefficient(const CMat& m, const std::string& label) {
    const CMat p = pauli_dense(label);
    cdouble tr{0.0, 0.0};
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) tr += std::conj(p.at(i, j)) * m.at(i, j);
    return tr / static_cast<double>(m.n);
}

inline std::vector<std::string> all_labels(int n_qubits) {
    std::vector<std::string> out;
    const char letters[4] = {'I', 'X', 'Y', 'Z'};
    const std::size_t total = std::size_t{1} << (2 * n_qubits);
    for (std::size_t code = 0; code < total; ++code) {
        std::string label(static_cast<std::size_t>(n_qubits), 'I');
        std::size_t rem = code;
        for (int q = n_qubits - 1; q >= 0; --q) {
            label[static_cast<std::size_t>(q)] = letters[rem & 3];
            rem >>= 2;
        }
        out.push_back(label);
    }
    return out;
}

}  // namespace oracle
