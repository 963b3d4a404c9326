#include "svqnhe/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include <lapacke.h>

#include "json.hpp"

namespace svqnhe {

namespace {

constexpr double kPhaseEps = 1e-12;

// i^k for k in 0..3
cdouble ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Single-qubit products: a*b = phase_table * (a xor b), with I=0,X=1,Y=2,Z=3.
// Encoded as the power of i in the product phase.
constexpr int kPhasePow[4][4] = {
    // I  X  Y  Z          (rhs)
    {0, 0, 0, 0},  // I
    {0, 0, 1, 3},  // X   X*Y=iZ, X*Z=-iY
    {0, 3, 0, 1},  // Y   Y*X=-iZ, Y*Z=iX
    {0, 1, 3, 0},  // Z   Z*X=iY, Z*Y=-iX
};

}  // namespace

int pauli_phase_pow(PauliOp a, PauliOp b) {
    return kPhasePow[static_cast<int>(a)][static_cast<int>(b)];
}

char pauli_op_char(PauliOp op) {
    switch (op) {
        case PauliOp::I: return 'I';
        case PauliOp::X: return 'X';
        case PauliOp::Y: return 'Y';
        default: return 'Z';
    }
}

PauliOp pauli_op_from_char(char c) {
    switch (c) {
        case 'I': return PauliOp::I;
        case 'X': return PauliOp::X;
        case 'Y': return PauliOp::Y;
        case 'Z': return PauliOp::Z;
        default: throw std::invalid_argument(std::string("bad Pauli character '") + c + "'");
    }
}

std::string to_bitstring(std::uint64_t s, int n_qubits) {
    std::string out(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q)
        if (bit_of(s, q, n_qubits)) out[static_cast<std::size_t>(q)] = '1';
    return out;
}

std::uint64_t from_bitstring(std::string_view bits) {
    std::uint64_t s = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be 0/1");
        s = (s << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return s;
}

PauliString PauliString::identity(int n_qubits) {
    PauliString p;
    p.n_qubits = n_qubits;
    p.ops.assign(static_cast<std::size_t>(n_qubits), PauliOp::I);
    return p;
}

PauliString PauliString::from_label(std::string_view label, cdouble phase) {
    PauliString p;
    p.n_qubits = static_cast<int>(label.size());
    p.ops.reserve(label.size());
    for (char c : label) p.ops.push_back(pauli_op_from_char(c));
    p.phase = phase;
    return p;
}

std::string PauliString::label() const {
    std::string out;
    out.reserve(ops.size());
    for (PauliOp op : ops) out.push_back(pauli_op_char(op));
    return out;
}

bool PauliString::is_identity() const {
    return std::all_of(ops.begin(), ops.end(), [](PauliOp o) { return o == PauliOp::I; });
}

bool PauliString::is_diagonal() const {
    return std::none_of(ops.begin(), ops.end(),
                        [](PauliOp o) { return o == PauliOp::X || o == PauliOp::Y; });
}

int PauliString::weight() const {
    return static_cast<int>(
        std::count_if(ops.begin(), ops.end(), [](PauliOp o) { return o != PauliOp::I; }));
}

std::uint64_t PauliString::flip_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n_qubits; ++q)
        if (ops[static_cast<std::size_t>(q)] == PauliOp::X ||
            ops[static_cast<std::size_t>(q)] == PauliOp::Y)
            m |= qubit_mask(q, n_qubits);
    return m;
}

std::uint64_t PauliString::z_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n_qubits; ++q)
        if (ops[static_cast<std::size_t>(q)] == PauliOp::Z ||
            ops[static_cast<std::size_t>(q)] == PauliOp::Y)
            m |= qubit_mask(q, n_qubits);
    return m;
}

std::uint64_t PauliString::x_only_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n_qubits; ++q)
        if (ops[static_cast<std::size_t>(q)] == PauliOp::X) m |= qubit_mask(q, n_qubits);
    return m;
}

std::uint64_t PauliString::y_mask() const {
    std::uint64_t m = 0;
    for (int q = 0; q < n_qubits; ++q)
        if (ops[static_cast<std::size_t>(q)] == PauliOp::Y) m |= qubit_mask(q, n_qubits);
    return m;
}

cdouble PauliString::basis_phase(std::uint64_t s) const {
    // product over qubits of: Z|b> = (-1)^b |b>, Y|b> = i(-1)^b |1-b>, X|b> = |1-b>
    int y_count = static_cast<int>(std::popcount(y_mask()));
    int sign_flips = static_cast<int>(std::popcount(s & z_mask()));
    cdouble value = ipow(y_count);
    if (sign_flips & 1) value = -value;
    return phase * value;
}

PauliString PauliString::multiplied_by(const PauliString& rhs) const {
    if (n_qubits != rhs.n_qubits)
        throw std::invalid_argument("PauliString size mismatch in product");
    PauliString out;
    out.n_qubits = n_qubits;
    out.ops.resize(ops.size());
    int phase_pow = 0;
    for (std::size_t q = 0; q < ops.size(); ++q) {
        int a = static_cast<int>(ops[q]);
        int b = static_cast<int>(rhs.ops[q]);
        out.ops[q] = static_cast<PauliOp>(a ^ b);
        phase_pow += kPhasePow[a][b];
    }
    out.phase = phase * rhs.phase * ipow(phase_pow);
    return out;
}

bool PauliString::commutes_with(const PauliString& rhs) const {
    if (n_qubits != rhs.n_qubits)
        throw std::invalid_argument("PauliString size mismatch in commutator");
    int anti = 0;
    for (std::size_t q = 0; q < ops.size(); ++q) {
        PauliOp a = ops[q], b = rhs.ops[q];
        if (a != PauliOp::I && b != PauliOp::I && a != b) ++anti;
    }
    return (anti % 2) == 0;
}

bool PauliString::same_letters(const PauliString& rhs) const {
    return n_qubits == rhs.n_qubits && ops == rhs.ops;
}

bool PauliString::operator==(const PauliString& rhs) const {
    return same_letters(rhs) && std::abs(phase - rhs.phase) < kPhaseEps;
}

void Hamiltonian::add_term(double coeff, PauliString string) {
    if (n_qubits_ == 0) n_qubits_ = string.n_qubits;
    if (string.n_qubits != n_qubits_)
        throw std::invalid_argument("term size does not match Hamiltonian");
    // canonicalize: phase folded into the coefficient, which must stay real
    if (std::abs(string.phase.imag()) > kPhaseEps)
        throw std::invalid_argument("imaginary term phase would make H non-Hermitian");
    coeff *= string.phase.real();
    string.phase = {1.0, 0.0};
    if (coeff == 0.0) return;
    for (auto& t : terms_) {
        if (t.string.same_letters(string)) {
            t.coeff += coeff;
            if (t.coeff == 0.0) {
                terms_.erase(terms_.begin() + (&t - terms_.data()));
            }
            return;
        }
    }
    terms_.push_back({coeff, std::move(string)});
}

bool Hamiltonian::is_diagonal() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.string.is_diagonal(); });
}

double Hamiltonian::norm_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coeff);
    return s;
}

void Hamiltonian::apply(std::span<const cdouble> in, std::span<cdouble> out) const {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits_;
    if (in.size() != dim || out.size() != dim)
        throw std::invalid_argument("apply: vector size does not match 2^n");
    std::fill(out.begin(), out.end(), cdouble{0.0, 0.0});
    for (const auto& t : terms_) {
        const std::uint64_t flip = t.string.flip_mask();
        const std::uint64_t zm = t.string.z_mask();
        const int y_count = static_cast<int>(std::popcount(t.string.y_mask()));
        const cdouble base = t.coeff * ipow(y_count);
        for (std::uint64_t s = 0; s < dim; ++s) {
            cdouble v = base * in[s];
            if (std::popcount(s & zm) & 1) v = -v;
            out[s ^ flip] += v;
        }
    }
}

double Hamiltonian::expectation(std::span<const cdouble> state) const {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits_;
    if (state.size() != dim) throw std::invalid_argument("expectation: bad state size");
    std::vector<cdouble> hs(dim);
    apply(state, hs);
    cdouble num = 0.0;
    double den = 0.0;
    for (std::uint64_t s = 0; s < dim; ++s) {
        num += std::conj(state[s]) * hs[s];
        den += std::norm(state[s]);
    }
    if (den < 1e-300) throw std::runtime_error("expectation of a zero state");
    return num.real() / den;
}

std::string Hamiltonian::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits_;
    auto& arr = j["terms"] = nlohmann::json::array();
    for (const auto& t : terms_) arr.push_back({{"coeff", t.coeff}, {"string", t.string.label()}});
    return j.dump(2);
}

Hamiltonian Hamiltonian::from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        Hamiltonian h(j.at("n_qubits").get<int>());
        for (const auto& t : j.at("terms"))
            h.add_term(t.at("coeff").get<double>(),
                       PauliString::from_label(t.at("string").get<std::string>()));
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("operator JSON: ") + e.what());
    }
}

cdouble pauli_expectation(const PauliString& p, std::span<const cdouble> state) {
    const std::uint64_t dim = std::uint64_t{1} << p.n_qubits;
    if (state.size() != dim) throw std::invalid_argument("pauli_expectation: bad state size");
    const std::uint64_t flip = p.flip_mask();
    cdouble acc = 0.0;
    for (std::uint64_t s = 0; s < dim; ++s)
        acc += std::conj(state[s ^ flip]) * p.basis_phase(s) * state[s];
    return acc;
}

namespace {

PauliString two_site(int n, int a, PauliOp op_a, int b, PauliOp op_b) {
    PauliString p = PauliString::identity(n);
    p.ops[static_cast<std::size_t>(a)] = op_a;
    p.ops[static_cast<std::size_t>(b)] = op_b;
    return p;
}

PauliString one_site(int n, int a, PauliOp op_a) {
    PauliString p = PauliString::identity(n);
    p.ops[static_cast<std::size_t>(a)] = op_a;
    return p;
}

}  // namespace

std::vector<std::pair<int, int>> chain_edges(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return e;
}

std::vector<std::pair<int, int>> chain_edges_nnn(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 2 < n; ++i) e.emplace_back(i, i + 2);
    return e;
}

std::vector<std::pair<int, int>> grid_edges(int rows, int cols) {
    std::vector<std::pair<int, int>> e;
    auto idx = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) e.emplace_back(idx(r, c), idx(r, c + 1));
            if (r + 1 < rows) e.emplace_back(idx(r, c), idx(r + 1, c));
        }
    return e;
}

std::vector<std::pair<int, int>> complete_graph_edges(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return e;
}

Hamiltonian build_j1j2_1d(int n, double j1, double j2, double delta1, double delta2,
                          double b_field) {
    if (n < 2) throw std::invalid_argument("j1j2 chain needs n >= 2");
    Hamiltonian h(n);
    for (auto [a, b] : chain_edges(n)) {
        h.add_term(j1, two_site(n, a, PauliOp::X, b, PauliOp::X));
        h.add_term(j1, two_site(n, a, PauliOp::Y, b, PauliOp::Y));
        h.add_term(j1 * delta1, two_site(n, a, PauliOp::Z, b, PauliOp::Z));
    }
    for (auto [a, b] : chain_edges_nnn(n)) {
        h.add_term(j2, two_site(n, a, PauliOp::X, b, PauliOp::X));
        h.add_term(j2, two_site(n, a, PauliOp::Y, b, PauliOp::Y));
        h.add_term(j2 * delta2, two_site(n, a, PauliOp::Z, b, PauliOp::Z));
    }
    for (int i = 0; i < n; ++i) h.add_term(b_field, one_site(n, i, PauliOp::Z));
    return h;
}

Hamiltonian build_heisenberg_2d(int rows, int cols, double h_field, double j) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw std::invalid_argument("heisenberg grid needs at least 2 sites");
    const int n = rows * cols;
    Hamiltonian h(n);
    for (int i = 0; i < n; ++i) h.add_term(h_field, one_site(n, i, PauliOp::Z));
    for (auto [a, b] : grid_edges(rows, cols)) {
        h.add_term(j, two_site(n, a, PauliOp::X, b, PauliOp::X));
        h.add_term(j, two_site(n, a, PauliOp::Y, b, PauliOp::Y));
        h.add_term(j, two_site(n, a, PauliOp::Z, b, PauliOp::Z));
    }
    return h;
}

Hamiltonian build_tfim_1d(int n, double j, double g) {
    if (n < 1) throw std::invalid_argument("tfim chain needs n >= 1");
    Hamiltonian h(n);
    for (auto [a, b] : chain_edges(n)) h.add_term(-j, two_site(n, a, PauliOp::Z, b, PauliOp::Z));
    for (int i = 0; i < n; ++i) h.add_term(-g, one_site(n, i, PauliOp::X));
    return h;
}

Hamiltonian build_ising_1d(int n, double j, double h_field) {
    if (n < 2) throw std::invalid_argument("ising chain needs n >= 2");
    Hamiltonian h(n);
    for (auto [a, b] : chain_edges(n)) h.add_term(-j, two_site(n, a, PauliOp::Z, b, PauliOp::Z));
    for (int i = 0; i < n; ++i) h.add_term(-h_field, one_site(n, i, PauliOp::Z));
    return h;
}

namespace {

bool all_terms_real(const Hamiltonian& h) {
    for (const auto& t : h.terms())
        if (std::popcount(t.string.y_mask()) & 1) return false;
    return true;
}

GroundStateResult dense_real_symmetric(const Hamiltonian& h) {
    const int n = h.n_qubits();
    const std::int64_t dim = std::int64_t{1} << n;
    // column-major dense assembly: M[row + dim*col]
    std::vector<double> m(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
    for (const auto& t : h.terms()) {
        const std::uint64_t flip = t.string.flip_mask();
        for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s) {
            cdouble v = t.coeff * t.string.basis_phase(s);
            m[(s ^ flip) + static_cast<std::uint64_t>(dim) * s] += v.real();
        }
    }
    std::vector<double> w(static_cast<std::size_t>(dim));
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(dim), m.data(),
                              static_cast<lapack_int>(dim), w.data());
    if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    GroundStateResult r;
    r.energy = w[0];
    r.state.resize(static_cast<std::size_t>(dim));
    for (std::int64_t i = 0; i < dim; ++i)
        r.state[static_cast<std::size_t>(i)] = m[static_cast<std::uint64_t>(i)];
    r.method = "dense";
    return r;
}

GroundStateResult dense_complex(const Hamiltonian& h) {
    const int n = h.n_qubits();
    if (n > 10) throw std::invalid_argument("complex dense path limited to n <= 10");
    const std::int64_t dim = std::int64_t{1} << n;
    std::vector<cdouble> m(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
                           cdouble{0.0, 0.0});
    for (const auto& t : h.terms()) {
        const std::uint64_t flip = t.string.flip_mask();
        for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s)
            m[(s ^ flip) + static_cast<std::uint64_t>(dim) * s] += t.coeff * t.string.basis_phase(s);
    }
    std::vector<double> w(static_cast<std::size_t>(dim));
    int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(dim),
                              reinterpret_cast<lapack_complex_double*>(m.data()),
                              static_cast<lapack_int>(dim), w.data());
    if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    GroundStateResult r;
    r.energy = w[0];
    r.state.assign(m.begin(), m.begin() + dim);
    r.method = "dense";
    return r;
}

}  // namespace

GroundStateResult ground_state_dense(const Hamiltonian& h) {
    if (h.n_qubits() > 12) throw std::invalid_argument("dense path limited to n <= 12");
    if (h.terms().empty()) throw std::invalid_argument("empty Hamiltonian");
    if (all_terms_real(h)) return dense_real_symmetric(h);
    return dense_complex(h);
}

GroundStateResult ground_state_lanczos(const Hamiltonian& h, int max_krylov, double tol) {
    const int n = h.n_qubits();
    if (n > 24) throw std::invalid_argument("lanczos path limited to n <= 24");
    if (h.terms().empty()) throw std::invalid_argument("empty Hamiltonian");
    const std::uint64_t dim = std::uint64_t{1} << n;
    const int m_max = static_cast<int>(std::min<std::uint64_t>(
        dim, static_cast<std::uint64_t>(std::max(2, max_krylov))));

    // deterministic start vector; a fixed seed keeps ground_state reproducible
    std::mt19937_64 gen(0x5ba7c0de12345ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<cdouble>> basis;
    std::vector<cdouble> v(dim), w(dim);
    for (auto& a : v) a = {gauss(gen), gauss(gen)};
    double nv = 0.0;
    for (auto& a : v) nv += std::norm(a);
    nv = std::sqrt(nv);
    for (auto& a : v) a /= nv;

    std::vector<double> alpha, beta;
    GroundStateResult best;
    best.method = "lanczos";
    double prev_energy = 1e300;

    for (int k = 0; k < m_max; ++k) {
        basis.push_back(v);
        h.apply(v, w);
        cdouble a = 0.0;
        for (std::uint64_t s = 0; s < dim; ++s) a += std::conj(v[s]) * w[s];
        alpha.push_back(a.real());
        // full reorthogonalization keeps the basis numerically orthonormal
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                cdouble ov = 0.0;
                for (std::uint64_t s = 0; s < dim; ++s) ov += std::conj(b[s]) * w[s];
                for (std::uint64_t s = 0; s < dim; ++s) w[s] -= ov * b[s];
            }
        }
        double nb = 0.0;
        for (auto& c : w) nb += std::norm(c);
        nb = std::sqrt(nb);

        // smallest eigenvalue of the current tridiagonal T
        std::vector<double> d = alpha;
        std::vector<double> e = beta;
        e.resize(d.size(), 0.0);
        std::vector<double> zmat(d.size() * d.size());
        int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(d.size()),
                                  d.data(), e.data(), zmat.data(),
                                  static_cast<lapack_int>(d.size()));
        if (info != 0) throw std::runtime_error("dstevd failed, info=" + std::to_string(info));
        const double energy = d[0];
        best.energy = energy;
        best.iterations = k + 1;

        const bool converged = std::abs(energy - prev_energy) < tol && k >= 2;
        prev_energy = energy;
        if (converged || nb < 1e-13 || k + 1 == m_max) {
            // assemble the Ritz vector from the first tridiagonal eigencolumn
            best.state.assign(dim, cdouble{0.0, 0.0});
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const double c = zmat[j];  // column 0
                for (std::uint64_t s = 0; s < dim; ++s) best.state[s] += c * basis[j][s];
            }
            double norm2 = 0.0;
            for (auto& c : best.state) norm2 += std::norm(c);
            norm2 = std::sqrt(norm2);
            for (auto& c : best.state) c /= norm2;
            return best;
        }
        beta.push_back(nb);
        for (std::uint64_t s = 0; s < dim; ++s) v[s] = w[s] / nb;
    }
    return best;
}

GroundStateResult ground_state(const Hamiltonian& h) {
    const int n = h.n_qubits();
    if (n > 12) throw std::invalid_argument("ground_state limited to n <= 12");
    if (n <= 10) return ground_state_dense(h);
    return ground_state_lanczos(h);
}

}  // namespace svqnhe
