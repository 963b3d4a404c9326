#include "svqnhe/transfer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "svqnhe/ansatz.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/pauli.hpp"
#include "svqnhe/rng.hpp"

namespace svqnhe {

Statevector haar_random_state(int n_qubits, std::uint64_t seed) {
    Statevector psi = Statevector::zero(n_qubits);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (cdouble& a : psi.amps) a = cdouble(gauss(gen), gauss(gen));
    psi.normalize();
    return psi;
}

namespace {

constexpr double kProbFloor = 1e-15;

struct ProbeState {
    Statevector psi;
    std::vector<double> p_target;  // normalized |f|^2 |psi|^2
    double weight;
};

// applies the product-Ry layer to a copy of psi
Statevector rotate(const Statevector& psi, const std::vector<double>& angles) {
    Statevector out = psi;
    for (std::size_t q = 0; q < angles.size(); ++q)
        apply_gate(out, GateKind::Ry, static_cast<int>(q), -1, angles[q]);
    return out;
}

double divergence(const std::vector<double>& p_f, const std::vector<double>& p_g,
                  TransferConfig::Direction dir) {
    double j = 0;
    if (dir == TransferConfig::Direction::ForwardKL) {
        for (std::size_t s = 0; s < p_f.size(); ++s) {
            if (p_f[s] <= 0) continue;
            j += p_f[s] * std::log(p_f[s] / std::max(p_g[s], kProbFloor));
        }
    } else {
        for (std::size_t s = 0; s < p_g.size(); ++s) {
            if (p_g[s] <= 0) continue;
            j += p_g[s] * std::log(p_g[s] / std::max(p_f[s], kProbFloor));
        }
    }
    return j;
}

}  // namespace

TransferResult fit_g_to_f(const AmplitudeModel& model, const Statevector& prev_state,
                          std::uint64_t seed, const TransferConfig& cfg) {
    const int n = prev_state.n_qubits;
    if (model.n_qubits() != n)
        throw std::invalid_argument("model and state qubit counts differ");
    if (cfg.n_test_states < 1) throw std::invalid_argument("need at least one probe state");

    const std::vector<cdouble> fvals = model.evaluate_all();
    const SeedSequence seq(seed);

    std::vector<ProbeState> probes;
    const int k_total = cfg.n_test_states;
    const double w_prev = (k_total == 1) ? 1.0 : cfg.weight_prev;
    const double w_rest = (k_total == 1) ? 0.0 : (1.0 - w_prev) / (k_total - 1);
    for (int k = 0; k < k_total; ++k) {
        ProbeState probe;
        probe.psi = (k == 0) ? prev_state : haar_random_state(n, seq.derive("transfer-probe", k));
        probe.weight = (k == 0) ? w_prev : w_rest;
        probe.p_target.resize(probe.psi.amps.size());
        double z = 0;
        for (std::size_t s = 0; s < probe.p_target.size(); ++s) {
            probe.p_target[s] = std::norm(fvals[s]) * std::norm(probe.psi.amps[s]);
            z += probe.p_target[s];
        }
        if (z <= 0) throw std::runtime_error("neural factor annihilates a probe state");
        for (double& p : probe.p_target) p /= z;
        probes.push_back(std::move(probe));
    }

    auto objective = [&](const std::vector<double>& angles) {
        double j = 0;
        for (const ProbeState& probe : probes) {
            const Statevector rotated = rotate(probe.psi, angles);
            const std::vector<double> p_g = rotated.probabilities();
            j += probe.weight * divergence(probe.p_target, p_g, cfg.direction);
        }
        return j;
    };

    // d P_G(s) / d theta_q = Im[conj(phi_s) (Y_q phi)_s] for phi the rotated state
    auto gradient = [&](const std::vector<double>& angles) {
        std::vector<double> g(n, 0.0);
        for (const ProbeState& probe : probes) {
            const Statevector phi = rotate(probe.psi, angles);
            const std::vector<double> p_g = phi.probabilities();
            for (int q = 0; q < n; ++q) {
                Statevector yphi = phi;
                apply_gate(yphi, GateKind::Y, q);
                double acc = 0;
                for (std::size_t s = 0; s < phi.amps.size(); ++s) {
                    const double dp = (std::conj(phi.amps[s]) * yphi.amps[s]).imag();
                    if (cfg.direction == TransferConfig::Direction::ForwardKL) {
                        acc -= probe.p_target[s] / std::max(p_g[s], kProbFloor) * dp;
                    } else {
                        acc += dp * (std::log(std::max(p_g[s], kProbFloor) /
                                              std::max(probe.p_target[s], kProbFloor)) +
                                     1.0);
                    }
                }
                g[q] += probe.weight * acc;
            }
        }
        return g;
    };

    TransferResult res;
    std::vector<double> theta(n, 0.0);
    double j_cur = objective(theta);
    res.objective_trace.push_back(j_cur);

    // Adam direction with backtracking: a step is only accepted when it does
    // not increase the objective, so the trace is monotone
    std::vector<double> m(n, 0.0), v(n, 0.0);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        const std::vector<double> g = gradient(theta);
        const double bc1 = 1.0 - std::pow(b1, iter + 1);
        const double bc2 = 1.0 - std::pow(b2, iter + 1);
        std::vector<double> dir(n);
        for (int q = 0; q < n; ++q) {
            m[q] = b1 * m[q] + (1 - b1) * g[q];
            v[q] = b2 * v[q] + (1 - b2) * g[q] * g[q];
            dir[q] = (m[q] / bc1) / (std::sqrt(v[q] / bc2) + eps);
        }
        double scale = 1.0;
        bool accepted = false;
        std::vector<double> trial(n);
        double j_trial = 0;
        for (int back = 0; back < 30; ++back) {
            for (int q = 0; q < n; ++q) trial[q] = theta[q] - cfg.lr * scale * dir[q];
            j_trial = objective(trial);
            if (j_trial <= j_cur) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            res.converged = true;
            break;
        }
        const double gain = j_cur - j_trial;
        theta = trial;
        j_cur = j_trial;
        res.objective_trace.push_back(j_cur);
        if (gain < cfg.tol) {
            res.converged = true;
            ++iter;
            break;
        }
    }
    res.angles = std::move(theta);
    res.residual = j_cur;
    res.iterations = iter;
    res.n_test_states = k_total;
    return res;
}

TransferStepReport transfer_step(SignAnsatz& ansatz, AmplitudeModel& model, int layer_index,
                                 const Hamiltonian& h, std::uint64_t seed,
                                 const TransferConfig& cfg, double energy_tolerance) {
    if (layer_index < 2 || layer_index > ansatz.n_layers)
        throw std::invalid_argument("transfer happens when a second or later layer starts");
    if (model.n_qubits() != ansatz.n_qubits)
        throw std::invalid_argument("model and ansatz qubit counts differ");

    TransferStepReport rep;
    // Untrained layers hold zero angles, so the full circuit reproduces the
    // state the previous layer finished with.
    const Statevector before = ansatz.circuit.simulate();
    rep.energy_before = hybrid_energy_exact(before, model, h).value;
    rep.f2_variance_before = f2_distribution_variance(model, before);

    rep.fit = fit_g_to_f(model, before, seed, cfg);

    const std::vector<std::string>& names = ansatz.ry_param_names[layer_index - 2];
    for (std::size_t q = 0; q < names.size(); ++q)
        ansatz.circuit.bind(names[q], rep.fit.angles[q]);
    model.reset_to_identity(SeedSequence(seed).derive("transfer-reset"));

    const Statevector after = ansatz.circuit.simulate();
    rep.energy_after = hybrid_energy_exact(after, model, h).value;
    rep.f2_variance_after = f2_distribution_variance(model, after);

    if (rep.energy_after - rep.energy_before >
        energy_tolerance * std::abs(rep.energy_before))
        throw std::runtime_error("amplitude transfer degraded the energy beyond tolerance");
    return rep;
}

}  // namespace svqnhe
