#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "svqnhe/pauli.hpp"

using namespace svqnhe;

namespace {

oracle::CMat dense_of(const PauliString& p) { return oracle::pauli_dense(p.label(), p.phase); }

oracle::CMat dense_of(const Hamiltonian& h) {
    oracle::CMat m = oracle::CMat::zero(1 << h.n_qubits());
    for (const PauliTerm& t : h.terms())
        m = oracle::add(m, oracle::pauli_dense(t.string.label()), cdouble{t.coeff, 0.0});
    return m;
}

std::string random_label(int n, std::mt19937_64& gen) {
    const char letters[4] = {'I', 'X', 'Y', 'Z'};
    std::string label;
    for (int q = 0; q < n; ++q) label += letters[gen() % 4];
    return label;
}

// Ground energy by shifted power iteration on the dense oracle matrix; an
// eigensolver-free second route.
double power_iteration_ground(const oracle::CMat& h, double shift, int iters,
                              std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    oracle::CVec v(static_cast<std::size_t>(h.n));
    for (auto& a : v) a = cdouble{normal(gen), normal(gen)};
    oracle::CMat shifted = h;
    for (cdouble& a : shifted.a) a = -a;
    for (int i = 0; i < shifted.n; ++i) shifted.at(i, i) += shift;
    for (int it = 0; it < iters; ++it) {
        v = oracle::matvec(shifted, v);
        double norm = 0.0;
        for (const cdouble& a : v) norm += std::norm(a);
        norm = std::sqrt(norm);
        for (cdouble& a : v) a /= norm;
    }
    const oracle::CVec hv = oracle::matvec(h, v);
    return oracle::vdot(v, hv).real();
}

}  // namespace

TEST_CASE("single-letter products match two-by-two matrix algebra") {
    const PauliOp letters[4] = {PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z};
    const cdouble i1{0.0, 1.0};
    for (PauliOp a : letters)
        for (PauliOp b : letters) {
            PauliString pa = PauliString::from_label(std::string(1, pauli_op_char(a)));
            PauliString pb = PauliString::from_label(std::string(1, pauli_op_char(b)));
            const PauliString prod = pa.multiplied_by(pb);

            const oracle::CMat want =
                oracle::matmul(oracle::pauli_matrix(pauli_op_char(a)),
                               oracle::pauli_matrix(pauli_op_char(b)));
            INFO(pauli_op_char(a) << " * " << pauli_op_char(b));
            CHECK(oracle::max_abs_diff(dense_of(prod).a, want.a) < 1e-14);

            // phase-power identity: a*b = i^pow * (a xor b)
            const int pow = pauli_phase_pow(a, b);
            const auto xor_op = static_cast<PauliOp>(static_cast<int>(a) ^ static_cast<int>(b));
            CHECK(prod.op(0) == xor_op);
            CHECK(std::abs(prod.phase - std::pow(i1, pow)) < 1e-14);
        }
}

TEST_CASE("multi-qubit products and commutation match dense kron algebra") {
    std::mt19937_64 gen(17);
    const int n = 3;
    for (int rep = 0; rep < 30; ++rep) {
        const PauliString p = PauliString::from_label(random_label(n, gen));
        const PauliString q = PauliString::from_label(random_label(n, gen));
        const oracle::CMat dp = dense_of(p), dq = dense_of(q);

        CHECK(oracle::max_abs_diff(dense_of(p.multiplied_by(q)).a, oracle::matmul(dp, dq).a) <
              1e-13);

        const oracle::CMat comm =
            oracle::add(oracle::matmul(dp, dq), oracle::matmul(dq, dp), cdouble{-1.0, 0.0});
        double cnorm = 0.0;
        for (const cdouble& v : comm.a) cnorm = std::max(cnorm, std::abs(v));
        CHECK(p.commutes_with(q) == (cnorm < 1e-12));
    }
}

TEST_CASE("basis phase reproduces the dense action on basis states") {
    std::mt19937_64 gen(19);
    const int n = 4;
    for (int rep = 0; rep < 25; ++rep) {
        const PauliString p = PauliString::from_label(random_label(n, gen));
        const oracle::CMat dp = dense_of(p);
        const std::uint64_t s = gen() % (1u << n);
        const std::uint64_t target = s ^ p.flip_mask();

        // P|s> should be basis_phase(s) |s ^ flip>
        for (std::uint64_t row = 0; row < (1u << n); ++row) {
            const cdouble entry = dp.at(static_cast<int>(row), static_cast<int>(s));
            if (row == target)
                CHECK(std::abs(entry - p.basis_phase(s)) < 1e-14);
            else
                CHECK(std::abs(entry) < 1e-14);
        }
    }
}

TEST_CASE("labels, masks and weight agree") {
    const PauliString p = PauliString::from_label("XZIY");
    CHECK(p.label() == "XZIY");
    CHECK(p.weight() == 3);
    CHECK_FALSE(p.is_diagonal());
    CHECK_FALSE(p.is_identity());
    // qubit 0 is the most significant basis bit of four
    CHECK(p.flip_mask() == ((1u << 3) | 1u));       // X on qubit 0, Y on qubit 3
    CHECK(p.z_mask() == ((1u << 2) | 1u));          // Z on qubit 1, Y on qubit 3
    CHECK(p.x_only_mask() == (1u << 3));
    CHECK(p.y_mask() == 1u);

    CHECK(PauliString::identity(3).is_identity());
    CHECK(PauliString::from_label("ZIZ").is_diagonal());
    CHECK_THROWS_AS(PauliString::from_label("XA"), std::invalid_argument);
}

TEST_CASE("bitstring order puts qubit 0 first") {
    CHECK(to_bitstring(6, 3) == "110");
    CHECK(from_bitstring("110") == 6);
    CHECK(to_bitstring(1, 3) == "001");
    for (std::uint64_t s = 0; s < 16; ++s) CHECK(from_bitstring(to_bitstring(s, 4)) == s);
    CHECK(bit_of(6, 0, 3) == 1);
    CHECK(bit_of(6, 2, 3) == 0);
    CHECK(qubit_mask(0, 3) == 4u);
    CHECK(qubit_mask(2, 3) == 1u);
    CHECK_THROWS_AS(from_bitstring("10x"), std::invalid_argument);
}

TEST_CASE("term accumulation folds phases, merges letters and drops zeros") {
    Hamiltonian h(2);
    h.add_term(2.0, PauliString::from_label("XY", cdouble{-1.0, 0.0}));
    h.add_term(1.0, PauliString::from_label("XY"));
    REQUIRE(h.term_count() == 1);
    CHECK(h.terms()[0].coeff == Catch::Approx(-1.0));
    CHECK(h.terms()[0].string.phase == cdouble{1.0, 0.0});

    h.add_term(1.0, PauliString::from_label("XY"));
    CHECK(h.term_count() == 0);  // merged to zero and dropped

    h.add_term(0.0, PauliString::from_label("ZZ"));
    CHECK(h.term_count() == 0);

    CHECK_THROWS_AS(h.add_term(1.0, PauliString::from_label("XY", cdouble{0.0, 1.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(h.add_term(1.0, PauliString::from_label("XYZ")), std::invalid_argument);
}

TEST_CASE("builders assemble Hermitian operators that match dense sums") {
    std::mt19937_64 gen(23);
    const std::vector<Hamiltonian> models = {
        build_j1j2_1d(4, 1.0, 0.6),
        build_heisenberg_2d(2, 2, 0.7, 1.1),
        build_tfim_1d(3, 1.0, 0.9),
        build_ising_1d(3, 1.2, 0.4),
    };
    for (const Hamiltonian& h : models) {
        const oracle::CMat dense = dense_of(h);
        INFO("n = " << h.n_qubits() << ", terms = " << h.term_count());
        CHECK(oracle::max_abs_diff(dense.a, oracle::dagger(dense).a) < 1e-12);

        const oracle::CVec v = oracle::random_state(h.n_qubits(), gen);
        std::vector<cdouble> out(v.size());
        h.apply(v, out);
        CHECK(oracle::max_abs_diff(out, oracle::matvec(dense, v)) < 1e-12);

        const double want = oracle::vdot(v, oracle::matvec(dense, v)).real();
        CHECK(h.expectation(v) == Catch::Approx(want).margin(1e-12));

        double bound = 0.0;
        for (const PauliTerm& t : h.terms()) bound += std::abs(t.coeff);
        CHECK(h.norm_bound() == Catch::Approx(bound));
    }
}

TEST_CASE("builder structure matches the couplings") {
    CHECK(build_j1j2_1d(3, 1.0, 0.0).term_count() == 6);
    CHECK(build_j1j2_1d(6, 1.0, 0.6).term_count() == 27);
    CHECK(build_heisenberg_2d(1, 3, 1.0, 1.0).term_count() == 9);
    CHECK(build_tfim_1d(2, 1.0, 1.0).term_count() == 3);
    CHECK(build_ising_1d(3, 1.0, 0.0).term_count() == 2);
    CHECK(build_ising_1d(3, 1.0, 0.0).is_diagonal());
    CHECK_FALSE(build_tfim_1d(2, 1.0, 1.0).is_diagonal());

    CHECK_THROWS_AS(build_j1j2_1d(1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_ising_1d(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_heisenberg_2d(1, 1, 1.0, 1.0), std::invalid_argument);

    CHECK(chain_edges(6).size() == 5);
    CHECK(chain_edges_nnn(6).size() == 4);
    CHECK(grid_edges(3, 3).size() == 12);
    CHECK(complete_graph_edges(5).size() == 10);
    CHECK(chain_edges(6)[0] == std::make_pair(0, 1));
    CHECK(chain_edges_nnn(6)[0] == std::make_pair(0, 2));
}

TEST_CASE("ground energies match pinned reference values") {
    // two-site Heisenberg singlet
    CHECK(ground_state(build_heisenberg_2d(1, 2, 0.0, 1.0)).energy ==
          Catch::Approx(-3.0).margin(1e-10));
    // two-site transverse-field Ising at the self-dual point
    CHECK(ground_state(build_tfim_1d(2, 1.0, 1.0)).energy ==
          Catch::Approx(-std::sqrt(5.0)).margin(1e-10));
    // aligned classical chain
    CHECK(ground_state(build_ising_1d(3, 1.0, 0.0)).energy == Catch::Approx(-2.0).margin(1e-12));
    // frozen references computed once from the dense spectrum
    CHECK(ground_state(build_heisenberg_2d(1, 3, 1.0, 1.0)).energy ==
          Catch::Approx(-5.0).margin(1e-8));
    CHECK(ground_state(build_j1j2_1d(6, 1.0, 0.6)).energy ==
          Catch::Approx(-9.07676541834).margin(5e-9));
    CHECK(ground_state(build_heisenberg_2d(3, 3, 1.0, 0.4)).energy ==
          Catch::Approx(-9.01385016386).margin(5e-9));
    CHECK(ground_state(build_tfim_1d(9, 1.0, 1.0)).energy ==
          Catch::Approx(-11.1095655854).margin(5e-9));
}

TEST_CASE("ground-state eigenvector attains its eigenvalue") {
    const Hamiltonian h = build_j1j2_1d(5, 1.0, 0.4);
    const GroundStateResult gs = ground_state(h);
    CHECK(gs.method == "dense");
    CHECK(h.expectation(gs.state) == Catch::Approx(gs.energy).margin(1e-10));

    // H|gs> = E0 |gs>
    std::vector<cdouble> out(gs.state.size());
    h.apply(gs.state, out);
    double resid = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        resid = std::max(resid, std::abs(out[i] - gs.energy * gs.state[i]));
    CHECK(resid < 1e-8);
}

TEST_CASE("dense, Lanczos and power iteration agree") {
    SECTION("dense versus Lanczos on ten qubits") {
        const Hamiltonian h = build_tfim_1d(10, 1.0, 1.0);
        const GroundStateResult dense = ground_state_dense(h);
        const GroundStateResult lanczos = ground_state_lanczos(h);
        CHECK(lanczos.method == "lanczos");
        CHECK(std::abs(dense.energy - lanczos.energy) < 1e-8);
    }

    SECTION("power iteration on the dense oracle matrix") {
        std::mt19937_64 gen(31);
        const Hamiltonian h = build_j1j2_1d(5, 1.0, 0.6);
        const oracle::CMat dense = dense_of(h);
        const double e_power = power_iteration_ground(dense, h.norm_bound(), 6000, gen);
        CHECK(std::abs(e_power - ground_state(h).energy) < 1e-8);
    }

    SECTION("lanczos handles an eleven-qubit model") {
        const Hamiltonian h = build_tfim_1d(11, 1.0, 1.0);
        const GroundStateResult gs = ground_state(h);
        CHECK(gs.method == "lanczos");
        CHECK(h.expectation(gs.state) == Catch::Approx(gs.energy).margin(1e-8));
    }
}

TEST_CASE("pauli expectation matches the dense quadratic form") {
    std::mt19937_64 gen(41);
    const int n = 3;
    for (int rep = 0; rep < 15; ++rep) {
        const PauliString p = PauliString::from_label(random_label(n, gen));
        const oracle::CVec v = oracle::random_state(n, gen);
        const cdouble want = oracle::vdot(v, oracle::matvec(dense_of(p), v));
        CHECK(std::abs(pauli_expectation(p, v) - want) < 1e-13);
    }
}

TEST_CASE("hamiltonians survive a JSON round trip") {
    const Hamiltonian h = build_j1j2_1d(4, 1.0, 0.6, 0.9, 1.1, 0.05);
    const Hamiltonian back = Hamiltonian::from_json(h.to_json());
    REQUIRE(back.term_count() == h.term_count());
    CHECK(back.n_qubits() == h.n_qubits());
    for (std::size_t i = 0; i < h.term_count(); ++i) {
        CHECK(back.terms()[i].coeff == h.terms()[i].coeff);
        CHECK(back.terms()[i].string == h.terms()[i].string);
    }
    std::mt19937_64 gen(43);
    const oracle::CVec v = oracle::random_state(4, gen);
    CHECK(back.expectation(v) == Catch::Approx(h.expectation(v)).margin(1e-14));

    CHECK_THROWS_AS(Hamiltonian::from_json("{"), std::invalid_argument);
}

TEST_CASE("errors: mismatched sizes and degenerate inputs") {
    Hamiltonian h = build_tfim_1d(3, 1.0, 1.0);
    std::vector<cdouble> wrong(4);
    std::vector<cdouble> out(8);
    CHECK_THROWS_AS(h.apply(wrong, out), std::invalid_argument);
    CHECK_THROWS_AS(h.expectation(wrong), std::invalid_argument);
    std::vector<cdouble> zeros(8, cdouble{0.0, 0.0});
    CHECK_THROWS_AS(h.expectation(zeros), std::runtime_error);

    const PauliString p2 = PauliString::from_label("XX");
    const PauliString p3 = PauliString::from_label("XXX");
    CHECK_THROWS_AS(p2.multiplied_by(p3), std::invalid_argument);
    CHECK_THROWS_AS(Hamiltonian().apply(wrong, out), std::invalid_argument);
    CHECK_THROWS_AS(ground_state_dense(Hamiltonian(2)), std::invalid_argument);
}
