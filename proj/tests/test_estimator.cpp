#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "svqnhe/ansatz.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/neural.hpp"
#include "svqnhe/pauli.hpp"
#include "svqnhe/qsim.hpp"

using namespace svqnhe;

namespace {

Statevector make_state(int n_qubits, const oracle::CVec& amps) {
    Statevector psi;
    psi.n_qubits = n_qubits;
    psi.amps = amps;
    return psi;
}

oracle::CMat dense_of(const Hamiltonian& h) {
    oracle::CMat m = oracle::CMat::zero(1 << h.n_qubits());
    for (const PauliTerm& t : h.terms())
        m = oracle::add(m, oracle::pauli_dense(t.string.label()), cdouble{t.coeff, 0.0});
    return m;
}

// Rayleigh quotient of the reweighted state b_s = f(s) psi_s on the dense matrix.
double dense_hybrid_energy(const oracle::CVec& psi, const std::vector<cdouble>& fvals,
                           const Hamiltonian& h) {
    oracle::CVec b(psi.size());
    for (std::size_t s = 0; s < psi.size(); ++s) b[s] = fvals[s] * psi[s];
    const oracle::CVec hb = oracle::matvec(dense_of(h), b);
    return (oracle::vdot(b, hb) / oracle::vdot(b, b)).real();
}

Hamiltonian random_hamiltonian(int n, int n_terms, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> coeff(-1.5, 1.5);
    const char letters[4] = {'I', 'X', 'Y', 'Z'};
    Hamiltonian h(n);
    while (static_cast<int>(h.term_count()) < n_terms) {
        std::string label;
        for (int q = 0; q < n; ++q) label += letters[gen() % 4];
        h.add_term(coeff(gen), PauliString::from_label(label));
    }
    return h;
}

std::vector<PauliString> term_strings(const Hamiltonian& h) {
    std::vector<PauliString> out;
    for (const PauliTerm& t : h.terms()) out.push_back(t.string);
    return out;
}

// six-qubit frustrated chain shared by the plan tests
Hamiltonian j1j2_6() { return build_j1j2_1d(6, 1.0, 0.6); }

SignAnsatz j1j2_ansatz(int layers) {
    std::vector<std::pair<int, int>> edges = chain_edges(6);
    const auto nnn = chain_edges_nnn(6);
    edges.insert(edges.end(), nnn.begin(), nnn.end());
    return build_sign_ansatz(6, edges, layers);
}

// random but reproducible three-qubit test fixture
struct Fixture3 {
    Hamiltonian h = build_heisenberg_2d(1, 3, 1.0, 1.0);
    SignAnsatz ansatz = build_sign_ansatz(3, chain_edges(3), 1);
    AmplitudeModel model = AmplitudeModel::create(3, {3, 3}, OutputMode::NonNegative, 17);
    Statevector psi{};

    explicit Fixture3(std::uint64_t seed = 404) {
        randomize_parameters(ansatz.circuit, seed);
        for (const std::string& name : ansatz.ry_param_names[0]) ansatz.circuit.bind(name, 0.0);
        psi = ansatz.circuit.simulate();
    }
};

double plain_shot_ratio(const ShotEstimates& est, const Hamiltonian& h) {
    double num = 0.0;
    for (std::size_t i = 0; i < h.terms().size(); ++i)
        num += h.terms()[i].coeff * est.string_means[i];
    return num / est.denom_mean;
}

}  // namespace

TEST_CASE("exact hybrid energy equals the dense Rayleigh quotient") {
    std::mt19937_64 gen(2);
    const OutputMode modes[3] = {OutputMode::NonNegative, OutputMode::ComplexPhase,
                                 OutputMode::SignedReal};
    for (int rep = 0; rep < 12; ++rep) {
        const int n = 3;
        const Hamiltonian h = random_hamiltonian(n, 5, gen);
        const Statevector psi = make_state(n, oracle::random_state(n, gen));
        const AmplitudeModel model =
            AmplitudeModel::create(n, {3}, modes[rep % 3], 300 + rep);
        const std::vector<cdouble> fvals = model.evaluate_all();

        const double want = dense_hybrid_energy(psi.amps, fvals, h);
        const EnergyEstimate est = hybrid_energy_exact(psi, model, h);
        INFO("rep " << rep);
        CHECK(std::abs(est.value - want) < 1e-10);
        CHECK(est.std_error == 0.0);
        CHECK(est.mode == "exact");
        CHECK(std::abs(hybrid_energy_value(psi, fvals, h) - want) < 1e-10);
    }
}

TEST_CASE("a constant model leaves the bare expectation unchanged") {
    std::mt19937_64 gen(3);
    const Hamiltonian h = build_heisenberg_2d(1, 3, 0.7, 1.0);
    const Statevector psi = make_state(3, oracle::random_state(3, gen));

    AmplitudeModel flat = AmplitudeModel::create(3, {3}, OutputMode::NonNegative, 5);
    flat.unflatten(std::vector<double>(flat.param_count(), 0.0));
    CHECK(std::abs(hybrid_energy_exact(psi, flat, h).value - h.expectation(psi.amps)) < 1e-12);

    // global rescaling of f cancels in the ratio
    std::vector<cdouble> fvals =
        AmplitudeModel::create(3, {3}, OutputMode::NonNegative, 6).evaluate_all();
    const double base = hybrid_energy_value(psi, fvals, h);
    for (cdouble& v : fvals) v *= 3.25;
    CHECK(std::abs(hybrid_energy_value(psi, fvals, h) - base) < 1e-10);
}

TEST_CASE("exact mode never undercuts the ground energy") {
    std::mt19937_64 gen(7);
    const Hamiltonian h = build_j1j2_1d(4, 1.0, 0.5);
    const double e0 = ground_state(h).energy;
    for (int rep = 0; rep < 20; ++rep) {
        const Statevector psi = make_state(4, oracle::random_state(4, gen));
        const AmplitudeModel model =
            AmplitudeModel::create(4, {4}, OutputMode::NonNegative, 500 + rep);
        CHECK(hybrid_energy_exact(psi, model, h).value >= e0 - 1e-8);
    }
}

TEST_CASE("exact neural gradient matches finite differences") {
    std::mt19937_64 gen(9);
    const OutputMode modes[3] = {OutputMode::NonNegative, OutputMode::ComplexPhase,
                                 OutputMode::SignedReal};
    auto reweighted_norm = [](const AmplitudeModel& m, const Statevector& psi) {
        double den = 0.0;
        for (std::uint64_t s = 0; s < psi.amps.size(); ++s)
            den += std::norm(m.evaluate(s) * psi.amps[s]);
        return den;
    };
    for (int rep = 0; rep < 21; ++rep) {
        const int n = 3;
        const Hamiltonian h = random_hamiltonian(n, 4, gen);
        const Statevector psi = make_state(n, oracle::random_state(n, gen));
        AmplitudeModel model = AmplitudeModel::create(n, {3, 2}, modes[rep % 3], 700 + rep);
        // a model that nearly annihilates the state has curvature far beyond
        // what a fixed finite-difference step resolves; re-draw those
        for (std::uint64_t bump = 1; reweighted_norm(model, psi) < 1e-3 && bump <= 50; ++bump)
            model = AmplitudeModel::create(n, {3, 2}, modes[rep % 3], 1700 + rep + bump);

        const std::vector<double> analytic =
            nn_energy_gradient_exact(psi, model, h).flatten();
        const std::vector<double> at = model.flatten();
        const std::vector<double> fd = finite_difference_gradient(
            [&](const std::vector<double>& p) {
                AmplitudeModel probe = model;
                probe.unflatten(p);
                return hybrid_energy_exact(psi, probe, h).value;
            },
            at);
        REQUIRE(analytic.size() == fd.size());
        for (std::size_t k = 0; k < fd.size(); ++k) {
            const double tol =
                1e-5 * std::max({1.0, std::abs(fd[k]), std::abs(analytic[k])});
            INFO("rep " << rep << " param " << k);
            REQUIRE(std::abs(analytic[k] - fd[k]) < tol);
        }
    }
}

TEST_CASE("the gradient vanishes on an eigenstate with a constant model") {
    const Hamiltonian h = build_ising_1d(3, 1.0, 0.0);
    Statevector psi = Statevector::zero(3);  // |000>, an eigenstate of a diagonal H
    AmplitudeModel model = AmplitudeModel::create(3, {3}, OutputMode::NonNegative, 11);
    model.unflatten(std::vector<double>(model.param_count(), 0.0));
    CHECK(nn_energy_gradient_exact(psi, model, h).norm() < 1e-12);
}

TEST_CASE("sampled estimates agree with exact values and their own error bars") {
    const Fixture3 fx;
    const double exact = hybrid_energy_exact(fx.psi, fx.model, fx.h).value;

    SECTION("large sample agreement") {
        const EnergyEstimate est = hybrid_energy_sampled(fx.psi, fx.model, fx.h, 100000, 12);
        CHECK(est.mode == "sampled");
        CHECK(est.shots_used == 100000);
        CHECK(est.std_error > 0.0);
        CHECK(std::abs(est.value - exact) < 5.0 * est.std_error);
    }

    SECTION("seed determinism") {
        const EnergyEstimate a = hybrid_energy_sampled(fx.psi, fx.model, fx.h, 5000, 77);
        const EnergyEstimate b = hybrid_energy_sampled(fx.psi, fx.model, fx.h, 5000, 77);
        CHECK(a.value == b.value);
        CHECK(a.std_error == b.std_error);
        const EnergyEstimate c = hybrid_energy_sampled(fx.psi, fx.model, fx.h, 5000, 78);
        CHECK(a.value != c.value);
    }

    SECTION("error bars shrink like one over root samples") {
        auto avg_se = [&](int n_samples) {
            double acc = 0.0;
            for (std::uint64_t seed = 1; seed <= 5; ++seed)
                acc += hybrid_energy_sampled(fx.psi, fx.model, fx.h, n_samples, seed).std_error;
            return acc / 5.0;
        };
        const double s3 = avg_se(1000), s4 = avg_se(10000), s5 = avg_se(100000);
        const double root10 = std::sqrt(10.0);
        CHECK(s3 / s4 > root10 / 1.5);
        CHECK(s3 / s4 < root10 * 1.5);
        CHECK(s4 / s5 > root10 / 1.5);
        CHECK(s4 / s5 < root10 * 1.5);
    }

    SECTION("undersized batches are rejected") {
        CHECK_THROWS_AS(hybrid_energy_sampled(fx.psi, fx.model, fx.h, 99, 1),
                        std::invalid_argument);
    }

    SECTION("a degenerate model is reported, not divided by") {
        AmplitudeModel dead = AmplitudeModel::create(3, {3}, OutputMode::SignedReal, 1);
        dead.unflatten(std::vector<double>(dead.param_count(), 0.0));  // f identically zero
        CHECK_THROWS_AS(hybrid_energy_sampled(fx.psi, dead, fx.h, 1000, 1),
                        std::runtime_error);
    }

    SECTION("complex-output models are conjugated correctly") {
        const AmplitudeModel cp = AmplitudeModel::create(3, {3}, OutputMode::ComplexPhase, 2);
        const double want = hybrid_energy_exact(fx.psi, cp, fx.h).value;
        const EnergyEstimate est = hybrid_energy_sampled(fx.psi, cp, fx.h, 50000, 19);
        CHECK(std::abs(est.value - want) < 5.0 * est.std_error + 1e-3);
    }
}

TEST_CASE("sample batches expose their parts") {
    const Fixture3 fx;
    const SampleBatch batch = draw_sample_batch(fx.psi, fx.model, 2000, 33);
    CHECK(batch.psi == &fx.psi);
    CHECK(batch.samples.size() == 2000);
    CHECK(batch.fvals.size() == 8);

    double want = 0.0;
    for (std::uint64_t s : batch.samples) want += std::norm(batch.fvals[s]);
    want /= static_cast<double>(batch.samples.size());
    CHECK(sampled_denominator(batch) == Catch::Approx(want).margin(1e-14));

    SampleBatch empty;
    CHECK_THROWS_AS(sampled_denominator(empty), std::invalid_argument);
}

TEST_CASE("inverse-denominator spread follows the delta method") {
    // uniform state, f depending on one bit: Var(1/g_hat) ~ Var(f^2)/(n g^4)
    Circuit c(3);
    for (int q = 0; q < 3; ++q) c.add_fixed(GateKind::H, q);
    const Statevector psi = c.simulate();

    const double a = 1.3, b = 0.7;
    std::vector<cdouble> fvals(8);
    for (std::uint64_t s = 0; s < 8; ++s) fvals[s] = (s & 4u) ? b : a;

    const double g = (a * a + b * b) / 2.0;
    const double var_f2 = (std::pow(a, 4) + std::pow(b, 4)) / 2.0 - g * g;
    const int n_samples = 10000;
    const double predicted = var_f2 / (n_samples * std::pow(g, 4));

    const int reps = 400;
    std::vector<double> inv(reps);
    for (int k = 0; k < reps; ++k) {
        std::mt19937_64 gen(9000 + k);
        SampleBatch batch;
        batch.psi = &psi;
        batch.fvals = fvals;
        batch.samples = sample_indices(psi, n_samples, gen);
        inv[static_cast<std::size_t>(k)] = 1.0 / sampled_denominator(batch);
    }
    const double got = variance_of(inv);
    CHECK(got > predicted * 0.8);
    CHECK(got < predicted * 1.2);

    // a constant f has exactly zero spread
    SampleBatch flat;
    flat.psi = &psi;
    flat.fvals.assign(8, cdouble{0.9, 0.0});
    std::mt19937_64 gen(1);
    flat.samples = sample_indices(psi, 500, gen);
    CHECK(1.0 / sampled_denominator(flat) == Catch::Approx(1.0 / 0.81).margin(1e-12));
}

TEST_CASE("measurement plan partitions the frustrated-chain workload") {
    const Hamiltonian h = j1j2_6();
    const SignAnsatz ansatz = j1j2_ansatz(1);
    const MeasurementPlan plan = build_measurement_plan(h, ansatz.w_params(1));

    CHECK(plan.n_qubits == 6);
    CHECK(plan.circuit_count() == 28);
    CHECK(plan.n_hamiltonian_strings == 27);
    REQUIRE(plan.bases.size() == 28);
    CHECK(plan.bases[0].kind == BasisKind::Computational);

    int even = 0, odd = 0;
    for (const MeasurementBasis& basis : plan.bases) {
        if (basis.kind == BasisKind::PairEven) ++even;
        if (basis.kind == BasisKind::PairOdd) ++odd;
    }
    CHECK(even == 18);
    CHECK(odd == 9);

    SECTION("every string is covered exactly once") {
        std::vector<int> covered(plan.strings.size(), 0);
        for (const MeasurementBasis& basis : plan.bases)
            for (int idx : basis.covered) {
                REQUIRE(idx >= 0);
                REQUIRE(idx < static_cast<int>(plan.strings.size()));
                ++covered[static_cast<std::size_t>(idx)];
            }
        for (int count : covered) CHECK(count == 1);
    }

    SECTION("hamiltonian strings come first and in order") {
        for (std::size_t i = 0; i < h.terms().size(); ++i)
            CHECK(plan.strings[i].string.same_letters(h.terms()[i].string));
    }

    SECTION("pivots sit on the lowest flip qubit") {
        for (const MeasurementBasis& basis : plan.bases) {
            if (basis.kind == BasisKind::Computational) continue;
            int lowest = -1;
            for (int q = 0; q < 6 && lowest < 0; ++q)
                if (basis.flip_mask & qubit_mask(q, 6)) lowest = q;
            CHECK(basis.pivot == lowest);
        }
    }

    SECTION("gradient components reference valid strings") {
        REQUIRE(plan.gradient_terms.size() == ansatz.w_params(1).size());
        for (const auto& terms : plan.gradient_terms)
            for (const auto& [idx, weight] : terms) {
                CHECK(idx >= static_cast<int>(plan.n_hamiltonian_strings));
                CHECK(idx < static_cast<int>(plan.strings.size()));
                CHECK(std::abs(weight) > 0.0);
            }
    }

    SECTION("extra diagonal rotations reuse the same bases") {
        std::vector<WParamInfo> extended = ansatz.w_params(1);
        extended.push_back({"extra:zz:0:3", qubit_mask(0, 6) | qubit_mask(3, 6)});
        extended.push_back({"extra:zz:1:4", qubit_mask(1, 6) | qubit_mask(4, 6)});
        extended.push_back({"extra:zz:2:5", qubit_mask(2, 6) | qubit_mask(5, 6)});
        const MeasurementPlan more = build_measurement_plan(h, extended);
        CHECK(more.circuit_count() == 28);
        CHECK(more.gradient_terms.size() == extended.size());
    }

    SECTION("to_json emits the basis inventory") {
        const std::string js = plan.to_json();
        CHECK(js.find("\"bases\"") != std::string::npos);
    }
}

TEST_CASE("diagonal operators need only the computational basis") {
    const Hamiltonian h = build_ising_1d(3, 1.0, 0.4);
    CHECK(build_measurement_plan(h).circuit_count() == 1);

    const SignAnsatz ansatz = build_sign_ansatz(3, chain_edges(3), 1);
    const MeasurementPlan plan = build_measurement_plan(h, ansatz.w_params(1));
    CHECK(plan.circuit_count() == 1);  // diagonal terms commute with every Z rotation
    for (const auto& terms : plan.gradient_terms) CHECK(terms.empty());
}

TEST_CASE("gradient strings obey the Pauli-product identity") {
    // single term X0X1, single Rz on qubit 0: the shift operator must be
    // -i (X0X1)(Z0) as a dense matrix
    Hamiltonian h(2);
    h.add_term(1.0, PauliString::from_label("XX"));
    const std::vector<WParamInfo> w = {{"rz0", qubit_mask(0, 2)}};
    const MeasurementPlan plan = build_measurement_plan(h, w);

    CHECK(plan.circuit_count() == 3);  // computational, XX pair, one odd pair
    REQUIRE(plan.gradient_terms.size() == 1);
    REQUIRE(plan.gradient_terms[0].size() == 1);

    const auto& [idx, weight] = plan.gradient_terms[0][0];
    const oracle::CMat got = [&] {
        oracle::CMat m = oracle::pauli_dense(plan.strings[static_cast<std::size_t>(idx)].string.label());
        for (cdouble& v : m.a) v *= weight;
        return m;
    }();
    oracle::CMat want =
        oracle::matmul(oracle::pauli_dense("XX"), oracle::pauli_dense("ZI"));
    for (cdouble& v : want.a) v *= cdouble{0.0, -1.0};
    CHECK(oracle::max_abs_diff(got.a, want.a) < 1e-14);

    // a rotation that commutes with the term contributes nothing
    const std::vector<WParamInfo> commuting = {{"zz01", qubit_mask(0, 2) | qubit_mask(1, 2)}};
    const MeasurementPlan quiet = build_measurement_plan(h, commuting);
    CHECK(quiet.circuit_count() == 2);
    CHECK(quiet.gradient_terms[0].empty());
}

TEST_CASE("diagonal-parameter gradients agree across three routes") {
    const Fixture3 fx;
    const std::vector<std::string>& w_names = fx.ansatz.w_param_names[0];
    const std::vector<WParamInfo> w_infos = fx.ansatz.w_params(1);

    // route A: parameter-shift evaluations of the exact hybrid energy
    const std::vector<double> shift =
        param_shift_gradient(fx.ansatz.circuit, fx.h, &fx.model, w_names);

    // route B: the measurement plan's shift strings on exact expectations
    const MeasurementPlan plan = build_measurement_plan(fx.h, w_infos);
    const std::vector<cdouble> fvals = fx.model.evaluate_all();
    oracle::CVec hybrid(fx.psi.amps.size());
    double den = 0.0;
    for (std::size_t s = 0; s < hybrid.size(); ++s) {
        hybrid[s] = fvals[s] * fx.psi.amps[s];
        den += std::norm(hybrid[s]);
    }
    std::vector<double> identity_route(w_infos.size(), 0.0);
    for (std::size_t k = 0; k < w_infos.size(); ++k) {
        double g = 0.0;
        for (const auto& [idx, weight] : plan.gradient_terms[k])
            g += weight *
                 pauli_expectation(plan.strings[static_cast<std::size_t>(idx)].string, hybrid)
                     .real();
        identity_route[k] = g / den;
    }

    // route C: central finite differences over the bound values
    std::vector<double> at(w_names.size());
    for (std::size_t i = 0; i < w_names.size(); ++i)
        at[i] = fx.ansatz.circuit.params.at(w_names[i]);
    const std::vector<double> fd = finite_difference_gradient(
        [&](const std::vector<double>& vals) {
            Circuit c = fx.ansatz.circuit;
            for (std::size_t i = 0; i < w_names.size(); ++i) c.bind(w_names[i], vals[i]);
            return hybrid_energy_exact(c.simulate(), fx.model, fx.h).value;
        },
        at);

    REQUIRE(shift.size() == w_infos.size());
    for (std::size_t k = 0; k < shift.size(); ++k) {
        INFO("parameter " << w_names[k]);
        CHECK(std::abs(shift[k] - identity_route[k]) < 1e-10);
        CHECK(std::abs(shift[k] - fd[k]) < 1e-6 * std::max(1.0, std::abs(fd[k])));
    }
}

TEST_CASE("sampled diagonal gradients are unbiased for the identity route") {
    const Fixture3 fx;
    const std::vector<WParamInfo> w_infos = fx.ansatz.w_params(1);
    const std::vector<double> exact =
        param_shift_gradient(fx.ansatz.circuit, fx.h, &fx.model, fx.ansatz.w_param_names[0]);

    const int reps = 30, n_samples = 20000;
    std::vector<std::vector<double>> draws(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const SampleBatch batch =
            draw_sample_batch(fx.psi, fx.model, n_samples, 4000 + static_cast<std::uint64_t>(r));
        draws[static_cast<std::size_t>(r)] = w_gradient_sampled(batch, fx.h, w_infos);
    }
    for (std::size_t k = 0; k < w_infos.size(); ++k) {
        std::vector<double> comp(static_cast<std::size_t>(reps));
        for (int r = 0; r < reps; ++r) comp[static_cast<std::size_t>(r)] = draws[static_cast<std::size_t>(r)][k];
        const double mean = mean_of(comp);
        const double se = std::sqrt(variance_of(comp) / (reps - 1.0));
        INFO("component " << k);
        CHECK(std::abs(mean - exact[k]) < 5.0 * se + 1e-4);
    }
}

TEST_CASE("sampled neural gradient is unbiased along a random direction") {
    const Fixture3 fx;
    const std::vector<double> exact =
        nn_energy_gradient_exact(fx.psi, fx.model, fx.h).flatten();
    std::mt19937_64 gen(55);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> dir(exact.size());
    for (double& d : dir) d = normal(gen);

    auto project = [&](const std::vector<double>& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) acc += dir[i] * v[i];
        return acc;
    };
    const double target = project(exact);

    const int reps = 50;
    std::vector<double> proj(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const SampleBatch batch =
            draw_sample_batch(fx.psi, fx.model, 20000, 6000 + static_cast<std::uint64_t>(r));
        proj[static_cast<std::size_t>(r)] =
            project(nn_energy_gradient_sampled(batch, fx.model, fx.h).flatten());
    }
    const double mean = mean_of(proj);
    const double se = std::sqrt(variance_of(proj) / (reps - 1.0));
    CHECK(std::abs(mean - target) < 5.0 * se + 1e-4);
}

TEST_CASE("parameter shift is exact on analytic circuits") {
    SECTION("cosine curve from a single rotation") {
        Hamiltonian h(1);
        h.add_term(1.0, PauliString::from_label("X"));
        for (double t0 : {0.3, -1.2, 2.7}) {
            Circuit c(1);
            c.add_fixed(GateKind::H, 0);
            c.add_param(GateKind::Rz, 0, -1, "t");
            c.bind("t", t0);
            const auto g = param_shift_gradient(c, h, nullptr, {"t"});
            REQUIRE(g.size() == 1);
            CHECK(g[0] == Catch::Approx(-std::sin(t0)).margin(1e-12));
        }
    }

    SECTION("a commuting parameter has zero gradient") {
        Hamiltonian h(1);
        h.add_term(1.0, PauliString::from_label("Z"));
        Circuit c(1);
        c.add_fixed(GateKind::H, 0);
        c.add_param(GateKind::Rz, 0, -1, "t");
        c.bind("t", 0.9);
        CHECK(std::abs(param_shift_gradient(c, h, nullptr, {"t"})[0]) < 1e-14);
    }

    SECTION("shared or scaled parameters are rejected") {
        Hamiltonian cost(2);
        cost.add_term(1.0, PauliString::from_label("ZZ"));
        QaoaAnsatz qaoa = build_qaoa(cost, 1);
        CHECK_THROWS_AS(param_shift_gradient(qaoa.circuit, cost, nullptr, {"beta0"}),
                        std::invalid_argument);

        Circuit scaled(1);
        scaled.add_param(GateKind::Rz, 0, -1, "s", 2.0);
        Hamiltonian h(1);
        h.add_term(1.0, PauliString::from_label("X"));
        CHECK_THROWS_AS(param_shift_gradient(scaled, h, nullptr, {"s"}),
                        std::invalid_argument);
        CHECK_THROWS_AS(param_shift_gradient(scaled, h, nullptr, {"nope"}),
                        std::invalid_argument);
    }
}

TEST_CASE("appending a shifted diagonal gate equals shifting in place") {
    const Fixture3 fx;
    const std::string target = "w1:zz:1:2";
    const double before = fx.ansatz.circuit.params.at(target);
    const double half_pi = std::numbers::pi / 2.0;

    Circuit in_place = fx.ansatz.circuit;
    in_place.bind(target, before + half_pi);

    Circuit appended = fx.ansatz.circuit;
    appended.add_fixed(GateKind::Rzz, 1, 2, half_pi);

    CHECK(oracle::max_abs_diff(in_place.simulate().amps, appended.simulate().amps) < 1e-12);
}

TEST_CASE("shot protocol handles its boundary cases exactly") {
    SECTION("single X on the plus state is certain") {
        Hamiltonian h(1);
        h.add_term(1.0, PauliString::from_label("X"));
        Circuit c(1);
        c.add_fixed(GateKind::H, 0);
        AmplitudeModel flat = AmplitudeModel::create(1, {2}, OutputMode::NonNegative, 1);
        flat.unflatten(std::vector<double>(flat.param_count(), 0.0));
        const EnergyEstimate est = hybrid_energy_shots(c, flat, h, 400, NoiseSpec{}, 3);
        CHECK(est.value == Catch::Approx(1.0).margin(1e-12));
        CHECK(est.mode == "shots");
    }

    SECTION("a diagonal operator needs one basis and converges") {
        const Hamiltonian h = build_ising_1d(3, 1.0, 0.4);
        const Fixture3 fx;
        const double exact = hybrid_energy_exact(fx.psi, fx.model, h).value;
        const EnergyEstimate est =
            hybrid_energy_shots(fx.ansatz.circuit, fx.model, h, 20000, NoiseSpec{}, 5);
        CHECK(est.shots_used == 20000);  // exactly one basis
        CHECK(std::abs(est.value - exact) < 5.0 * est.std_error + 1e-3);
    }

    SECTION("full three-qubit agreement at large shot counts") {
        const Fixture3 fx;
        const double exact = hybrid_energy_exact(fx.psi, fx.model, fx.h).value;
        const EnergyEstimate est =
            hybrid_energy_shots(fx.ansatz.circuit, fx.model, fx.h, 100000, NoiseSpec{}, 7);
        CHECK(std::abs(est.value - exact) < 5.0 * est.std_error);
        CHECK(est.std_error > 0.0);
        CHECK(est.shots_used == 100000L * 5L);  // five bases without diagonal parameters
    }

    SECTION("determinism in the seed") {
        const Fixture3 fx;
        const EnergyEstimate a =
            hybrid_energy_shots(fx.ansatz.circuit, fx.model, fx.h, 500, NoiseSpec{}, 11);
        const EnergyEstimate b =
            hybrid_energy_shots(fx.ansatz.circuit, fx.model, fx.h, 500, NoiseSpec{}, 11);
        CHECK(a.value == b.value);
        CHECK(a.std_error == b.std_error);
    }

    SECTION("bad shot counts and mismatched plans are rejected") {
        const Fixture3 fx;
        const MeasurementPlan plan = build_measurement_plan(fx.h);
        CHECK_THROWS_AS(collect_shots(fx.ansatz.circuit, plan, 0, NoiseSpec{}, 1),
                        std::invalid_argument);
        const Hamiltonian other = build_ising_1d(3, 1.0, 0.0);
        const ShotCollection shots = collect_shots(fx.ansatz.circuit, plan, 50, NoiseSpec{}, 1);
        const ShotEstimates est = reduce_shots(shots, fx.model);
        CHECK_THROWS_AS(hybrid_energy_shots(est, other, plan), std::invalid_argument);

        const AmplitudeModel cp = AmplitudeModel::create(3, {3}, OutputMode::ComplexPhase, 2);
        CHECK_THROWS_AS(reduce_shots(shots, cp), std::invalid_argument);
        CHECK_THROWS_AS(nn_energy_gradient_shots(shots, cp, fx.h), std::invalid_argument);
    }
}

TEST_CASE("shot-mode neural gradient differentiates the collected ratio") {
    const Fixture3 fx;
    const MeasurementPlan plan = build_measurement_plan(fx.h);
    const ShotCollection shots = collect_shots(fx.ansatz.circuit, plan, 600, NoiseSpec{}, 21);

    const std::vector<double> analytic =
        nn_energy_gradient_shots(shots, fx.model, fx.h).flatten();

    const std::vector<double> at = fx.model.flatten();
    const std::vector<double> fd = finite_difference_gradient(
        [&](const std::vector<double>& p) {
            AmplitudeModel probe = fx.model;
            probe.unflatten(p);
            return plain_shot_ratio(reduce_shots(shots, probe), fx.h);
        },
        at);
    REQUIRE(analytic.size() == fd.size());
    for (std::size_t k = 0; k < fd.size(); ++k) {
        const double tol = 1e-6 * std::max({1.0, std::abs(fd[k]), std::abs(analytic[k])});
        INFO("param " << k);
        REQUIRE(std::abs(analytic[k] - fd[k]) < tol);
    }
}

TEST_CASE("shot-mode diagonal gradients match the exact identity route on average") {
    const Fixture3 fx;
    const std::vector<WParamInfo> w_infos = fx.ansatz.w_params(1);
    const MeasurementPlan plan = build_measurement_plan(fx.h, w_infos);
    const std::vector<double> exact =
        param_shift_gradient(fx.ansatz.circuit, fx.h, &fx.model, fx.ansatz.w_param_names[0]);

    const int reps = 12;
    std::vector<std::vector<double>> draws(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const ShotCollection shots = collect_shots(fx.ansatz.circuit, plan, 4000, NoiseSpec{},
                                                   8000 + static_cast<std::uint64_t>(r));
        draws[static_cast<std::size_t>(r)] = w_gradient_shots(reduce_shots(shots, fx.model), plan);
    }
    for (std::size_t k = 0; k < exact.size(); ++k) {
        std::vector<double> comp(static_cast<std::size_t>(reps));
        for (int r = 0; r < reps; ++r) comp[static_cast<std::size_t>(r)] = draws[static_cast<std::size_t>(r)][k];
        const double mean = mean_of(comp);
        const double se = std::sqrt(variance_of(comp) / (reps - 1.0));
        INFO("component " << k);
        CHECK(std::abs(mean - exact[k]) < 5.0 * se + 2e-3);
    }
}

TEST_CASE("descriptive statistics behave") {
    const std::vector<double> pair = {1.0, 3.0};
    CHECK(cv_statistic(pair) == Catch::Approx(0.5));  // sd 1 around mean 2
    const std::vector<double> flat = {2.0, 2.0, 2.0};
    CHECK(cv_statistic(flat) == 0.0);
    CHECK_THROWS_AS(cv_statistic(std::vector<double>{}), std::invalid_argument);
    const std::vector<double> balanced = {1.0, -1.0};
    CHECK_THROWS_AS(cv_statistic(balanced), std::invalid_argument);

    CHECK(mean_of(pair) == Catch::Approx(2.0));
    CHECK(variance_of(pair) == Catch::Approx(1.0));
    CHECK(variance_of(flat) == 0.0);
}

TEST_CASE("model spread statistics have closed forms on one qubit") {
    // single linear layer solved so that f(0) = a, f(1) = b
    const double a = 1.4, b = 0.5;
    auto inv_sp = [](double y) { return std::log(std::expm1(y)); };
    AmplitudeModel m = AmplitudeModel::create(1, {}, OutputMode::NonNegative, 1);
    REQUIRE(m.param_count() == 2);
    const double w = (inv_sp(a) - inv_sp(b)) / 2.0, c = (inv_sp(a) + inv_sp(b)) / 2.0;
    m.unflatten(std::vector<double>{w, c});
    REQUIRE(m.evaluate(0).real() == Catch::Approx(a).margin(1e-12));
    REQUIRE(m.evaluate(1).real() == Catch::Approx(b).margin(1e-12));

    const double mean = (a * a + b * b) / 2.0;
    const double var = std::pow(a * a - b * b, 2) / 4.0;
    CHECK(model_f2_relative_variance(m) == Catch::Approx(var / (mean * mean)).margin(1e-12));

    // point-mass distribution sees no spread; the uniform one sees the full spread
    Statevector basis = Statevector::zero(1);
    CHECK(f2_distribution_variance(m, basis) == Catch::Approx(0.0).margin(1e-15));
    Circuit hc(1);
    hc.add_fixed(GateKind::H, 0);
    const Statevector plus = hc.simulate();
    CHECK(f2_distribution_variance(m, plus) ==
          Catch::Approx(model_f2_relative_variance(m)).margin(1e-12));

    AmplitudeModel wide = AmplitudeModel::create(2, {2}, OutputMode::NonNegative, 3);
    CHECK_THROWS_AS(f2_distribution_variance(wide, plus), std::invalid_argument);

    AmplitudeModel dead = AmplitudeModel::create(3, {3}, OutputMode::NonNegative, 4);
    dead.unflatten(std::vector<double>(dead.param_count(), 0.0));
    CHECK(model_f2_relative_variance(dead) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("qubit-wise-commuting grouping counts product bases") {
    CHECK(qwc_group_count(term_strings(build_heisenberg_2d(1, 3, 1.0, 1.0))) == 3);
    CHECK(qwc_group_count(term_strings(j1j2_6())) == 3);
    CHECK(qwc_group_count({PauliString::from_label("X"), PauliString::from_label("Z")}) == 2);
    CHECK(qwc_group_count({PauliString::from_label("XI"), PauliString::from_label("IX"),
                           PauliString::from_label("XX")}) == 1);
    CHECK(qwc_group_count({}) == 0);
}
