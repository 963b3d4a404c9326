#include "svqnhe/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "svqnhe/rng.hpp"

namespace svqnhe {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> hidden_or_default(const std::vector<int>& hidden, int n) {
    return hidden.empty() ? std::vector<int>{n, n} : hidden;
}

// dispersion of the trailing `window` energies; NaN when undefined
double window_cv(const std::vector<double>& energies, int window) {
    if (energies.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), energies.size());
    const std::span<const double> tail(energies.data() + (energies.size() - w), w);
    try {
        return cv_statistic(tail);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double oracle_energy(const Hamiltonian& h) {
    if (h.n_qubits() > 12) return std::numeric_limits<double>::quiet_NaN();
    return ground_state(h).energy;
}

RunTrace start_trace(const RunConfig& cfg) {
    RunTrace trace;
    trace.run_id = cfg.id;
    trace.method = method_name(cfg.method);
    trace.model = model_label(cfg.model);
    trace.mode = mode_name(cfg.mode);
    trace.seed = cfg.seed;
    return trace;
}

void finish_trace(RunTrace& trace) {
    if (trace.iterations.empty()) throw std::logic_error("run produced no iterations");
    trace.final_energy = trace.iterations.back().energy;
    trace.shots_total = 0;
    for (const IterationRecord& rec : trace.iterations) trace.shots_total += rec.shots;
}

std::vector<PauliString> term_strings(const Hamiltonian& h) {
    std::vector<PauliString> out;
    out.reserve(h.term_count());
    for (const PauliTerm& t : h.terms()) out.push_back(t.string);
    return out;
}

[[noreturn]] void rethrow_with_context(const RunConfig& cfg, int layer, int iteration,
                                       const std::exception& e) {
    throw std::runtime_error("run '" + cfg.id + "' layer " + std::to_string(layer) +
                             " iteration " + std::to_string(iteration) + ": " + e.what());
}

}  // namespace

// ---- model selection -------------------------------------------------------

std::string normalize_model_name(const std::string& name) {
    std::string key;
    for (char c : name) {
        if (c == '_' || c == '-' || c == ' ') continue;
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key == "j1j2" || key == "j1j21d") return "j1j2_1d";
    if (key == "heisenberg" || key == "heisenberg2d") return "heisenberg_2d";
    if (key == "tfim" || key == "tfim1d") return "tfim_1d";
    if (key == "ising" || key == "ising1d") return "ising_1d";
    throw std::invalid_argument("unknown model '" + name + "'");
}

Hamiltonian build_model(const ModelSpec& spec) {
    const std::string name = normalize_model_name(spec.name);
    if (name == "j1j2_1d")
        return build_j1j2_1d(spec.n, spec.j1, spec.j2, spec.delta1, spec.delta2, spec.field);
    if (name == "heisenberg_2d") return build_heisenberg_2d(spec.rows, spec.cols, spec.h, spec.j);
    if (name == "tfim_1d") return build_tfim_1d(spec.n, spec.j, spec.g);
    return build_ising_1d(spec.n, spec.j, spec.h);
}

int model_qubit_count(const ModelSpec& spec) {
    if (normalize_model_name(spec.name) == "heisenberg_2d") return spec.rows * spec.cols;
    return spec.n;
}

std::vector<std::pair<int, int>> model_edges(const ModelSpec& spec) {
    const std::string name = normalize_model_name(spec.name);
    if (name == "j1j2_1d") {
        std::vector<std::pair<int, int>> edges = chain_edges(spec.n);
        for (const auto& e : chain_edges_nnn(spec.n)) edges.push_back(e);
        return edges;
    }
    if (name == "heisenberg_2d") return grid_edges(spec.rows, spec.cols);
    return chain_edges(spec.n);
}

std::string model_label(const ModelSpec& spec) {
    return normalize_model_name(spec.name) + "-n" + std::to_string(model_qubit_count(spec));
}

// ---- run configuration -----------------------------------------------------

std::string method_name(Method m) {
    switch (m) {
        case Method::Svqnhe: return "svqnhe";
        case Method::Vqe: return "vqe";
        case Method::LayeredVqe: return "layered_vqe";
        case Method::NnBaseline: return "nn_baseline";
    }
    throw std::logic_error("bad method enum");
}

Method method_from_name(const std::string& name) {
    if (name == "svqnhe") return Method::Svqnhe;
    if (name == "vqe") return Method::Vqe;
    if (name == "layered_vqe") return Method::LayeredVqe;
    if (name == "nn_baseline" || name == "nn") return Method::NnBaseline;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string mode_name(EstimationMode m) {
    switch (m) {
        case EstimationMode::Exact: return "exact";
        case EstimationMode::SampledAmplitude: return "sampled_amplitude";
        case EstimationMode::ShotProtocol: return "shot_protocol";
    }
    throw std::logic_error("bad mode enum");
}

EstimationMode mode_from_name(const std::string& name) {
    if (name == "exact") return EstimationMode::Exact;
    if (name == "sampled_amplitude" || name == "sampled") return EstimationMode::SampledAmplitude;
    if (name == "shot_protocol" || name == "shots") return EstimationMode::ShotProtocol;
    throw std::invalid_argument("unknown estimation mode '" + name + "'");
}

double RunConfig::effective_eps() const {
    if (eps_conv > 0) return eps_conv;
    return mode == EstimationMode::Exact ? 1e-6 : 1e-3;
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    normalize_model_name(model.name);  // throws on an unknown model
    if (layers < 1) fail("layers must be positive");
    if (max_iters_per_layer < 1) fail("max_iters_per_layer must be positive");
    if (n_samples < 100) fail("n_samples must be at least 100");
    if (noise_trajectories < 1) fail("noise_trajectories must be positive");
    if (shots_per_basis < 1) fail("shots_per_basis must be positive");
    if (cv_window < 1) fail("cv_window must be positive");
    if (transfer_probes < 1) fail("transfer_probes must be positive");
    if (!(nn_lr > 0)) fail("nn_lr must be positive");
    if (!(w_lr > 0)) fail("w_lr must be positive");
    if (!(transfer_tolerance > 0)) fail("transfer_tolerance must be positive");
    if (noise.p1 < 0 || noise.p1 > 1 || noise.p2 < 0 || noise.p2 > 1)
        fail("noise probabilities must lie in [0, 1]");
    for (int w : nn_hidden)
        if (w < 1) fail("nn_hidden widths must be positive");
    const int qubits = model_qubit_count(model);
    if (qubits < 1 || qubits > kMaxQubits) fail("model size out of simulator range");
    if (mode == EstimationMode::Exact && noise.enabled())
        fail("exact mode cannot represent gate noise; use sampled or shot mode");
    if (method != Method::Svqnhe && mode != EstimationMode::Exact)
        fail(method_name(method) + " supports exact mode only");
    if (method != Method::Svqnhe && noise.enabled())
        fail(method_name(method) + " does not model gate noise");
    if (method == Method::Svqnhe && ansatz != "sign")
        fail("the hybrid loop requires the sign ansatz");
    if (method == Method::LayeredVqe && ansatz != "sign")
        fail("layered optimization is defined for the sign ansatz");
    if (final_layer_complex && mode == EstimationMode::ShotProtocol)
        fail("a complex amplitude head cannot be read out from the pair-basis shots");
    if (mode == EstimationMode::SampledAmplitude && noise.enabled() &&
        n_samples / noise_trajectories < 100)
        fail("noisy sampled mode needs at least 100 samples per trajectory");
}

int RunTrace::steps_to(double target) const {
    for (std::size_t i = 0; i < iterations.size(); ++i)
        if (iterations[i].energy <= target) return static_cast<int>(i) + 1;
    return -1;
}

// ---- hybrid loop -----------------------------------------------------------

RunTrace run_svqnhe(const RunConfig& cfg) {
    cfg.validate();
    const Hamiltonian h = build_model(cfg.model);
    const int n = h.n_qubits();
    const double eps = cfg.effective_eps();
    const SeedSequence seq(cfg.seed);

    SignAnsatz ansatz = build_sign_ansatz(n, model_edges(cfg.model), cfg.layers);
    {
        std::mt19937_64 gen(seq.derive("circuit-init"));
        std::uniform_real_distribution<double> unif(-2 * std::numbers::pi, 2 * std::numbers::pi);
        for (const std::string& name : ansatz.w_param_names[0]) ansatz.circuit.bind(name, unif(gen));
    }
    AmplitudeModel model = AmplitudeModel::create(n, hidden_or_default(cfg.nn_hidden, n),
                                                  OutputMode::NonNegative, seq.derive("nn-init"));

    RunTrace trace = start_trace(cfg);
    trace.e0 = oracle_energy(h);

    long gidx = 0;
    for (int layer = 1; layer <= cfg.layers; ++layer) {
        if (layer >= 2) {
            TransferConfig tc;
            tc.n_test_states = cfg.transfer_probes;
            const TransferStepReport rep =
                transfer_step(ansatz, model, layer, h, seq.derive("transfer", layer), tc,
                              cfg.transfer_tolerance);
            TransferRecord tr;
            tr.layer = layer;
            tr.residual = rep.fit.residual;
            tr.fit_iterations = rep.fit.iterations;
            tr.energy_before = rep.energy_before;
            tr.energy_after = rep.energy_after;
            tr.f2_variance_before = rep.f2_variance_before;
            tr.f2_variance_after = rep.f2_variance_after;
            trace.transfers.push_back(tr);
        }
        if (layer == cfg.layers && cfg.final_layer_complex)
            model.switch_to_complex(seq.derive("nn-complex"));

        const std::vector<std::string>& w_names = ansatz.w_param_names[layer - 1];
        const std::vector<WParamInfo> w_infos = ansatz.w_params(layer);
        const MeasurementPlan plan = build_measurement_plan(h, w_infos);
        // Sampled mode draws from one (computational) circuit; the plan's basis
        // count only prices the shot protocol.
        trace.circuits_per_iteration =
            cfg.mode == EstimationMode::SampledAmplitude ? 1 : plan.circuit_count();

        Adam nn_adam(cfg.nn_lr);
        Adam w_adam(cfg.w_lr);
        std::vector<double> w_vals(w_names.size());
        for (std::size_t i = 0; i < w_names.size(); ++i)
            w_vals[i] = ansatz.circuit.params.at(w_names[i]);

        std::vector<double> energies;
        double prev_e = 0;
        for (int it = 1; it <= cfg.max_iters_per_layer; ++it, ++gidx) {
            const auto t0 = std::chrono::steady_clock::now();
            IterationRecord rec;
            rec.layer = layer;
            rec.iteration = it;
            bool converged = false;
            try {
                // Holders for sampled mode; batches keep pointers into states.
                std::vector<Statevector> states;
                std::vector<SampleBatch> batches;
                ShotCollection shot_col;
                ShotEstimates shot_est;
                Statevector psi;

                switch (cfg.mode) {
                    case EstimationMode::Exact: {
                        psi = ansatz.circuit.simulate();
                        const EnergyEstimate est = hybrid_energy_exact(psi, model, h);
                        rec.energy = est.value;
                        rec.circuits = plan.circuit_count();
                        break;
                    }
                    case EstimationMode::SampledAmplitude: {
                        if (!cfg.noise.enabled()) {
                            states.reserve(1);
                            states.push_back(ansatz.circuit.simulate());
                            batches.push_back(draw_sample_batch(states[0], model, cfg.n_samples,
                                                                seq.derive("sampling", gidx)));
                        } else {
                            const int nt = cfg.noise_trajectories;
                            const int each = cfg.n_samples / nt;
                            states.reserve(nt);
                            for (int t = 0; t < nt; ++t)
                                states.push_back(run_noisy_trajectory(
                                    ansatz.circuit, cfg.noise,
                                    seq.derive("noise", gidx * nt + t)));
                            for (int t = 0; t < nt; ++t)
                                batches.push_back(draw_sample_batch(
                                    states[t], model, each, seq.derive("sampling", gidx * nt + t)));
                        }
                        double e_mean = 0, var_sum = 0;
                        for (const SampleBatch& b : batches) {
                            const EnergyEstimate est = hybrid_energy_sampled(b, h);
                            e_mean += est.value;
                            var_sum += est.std_error * est.std_error;
                            rec.shots += est.shots_used;
                        }
                        const double nb = static_cast<double>(batches.size());
                        rec.energy = e_mean / nb;
                        rec.std_error = std::sqrt(var_sum) / nb;
                        rec.circuits = 1;  // computational-basis sampling only
                        break;
                    }
                    case EstimationMode::ShotProtocol: {
                        shot_col = collect_shots(ansatz.circuit, plan, cfg.shots_per_basis,
                                                 cfg.noise, seq.derive("sampling", gidx));
                        shot_est = reduce_shots(shot_col, model);
                        const EnergyEstimate est = hybrid_energy_shots(shot_est, h, plan);
                        rec.energy = est.value;
                        rec.std_error = est.std_error;
                        rec.shots = est.shots_used;
                        rec.circuits = plan.circuit_count();
                        break;
                    }
                }

                converged = it > 1 && std::abs(rec.energy - prev_e) < eps;
                prev_e = rec.energy;

                if (!converged) {
                    // neural step first, then the diagonal rotations against
                    // the updated amplitude factor
                    ModelGradient gm = ModelGradient::zeros_like(model);
                    switch (cfg.mode) {
                        case EstimationMode::Exact:
                            gm = nn_energy_gradient_exact(psi, model, h);
                            break;
                        case EstimationMode::SampledAmplitude:
                            for (const SampleBatch& b : batches)
                                gm.add(nn_energy_gradient_sampled(b, model, h),
                                       1.0 / static_cast<double>(batches.size()));
                            break;
                        case EstimationMode::ShotProtocol:
                            gm = nn_energy_gradient_shots(shot_col, model, h);
                            break;
                    }
                    std::vector<double> nn_params = model.flatten();
                    nn_adam.step(nn_params, gm.flatten());
                    model.unflatten(nn_params);

                    std::vector<double> gw(w_names.size(), 0.0);
                    switch (cfg.mode) {
                        case EstimationMode::Exact:
                            gw = param_shift_gradient(ansatz.circuit, h, &model, w_names);
                            break;
                        case EstimationMode::SampledAmplitude: {
                            for (SampleBatch& b : batches) b.fvals = model.evaluate_all();
                            for (const SampleBatch& b : batches) {
                                const std::vector<double> g1 = w_gradient_sampled(b, h, w_infos);
                                for (std::size_t i = 0; i < gw.size(); ++i)
                                    gw[i] += g1[i] / static_cast<double>(batches.size());
                            }
                            break;
                        }
                        case EstimationMode::ShotProtocol: {
                            shot_est = reduce_shots(shot_col, model);
                            gw = w_gradient_shots(shot_est, plan);
                            break;
                        }
                    }
                    w_adam.step(w_vals, gw);
                    for (std::size_t i = 0; i < w_names.size(); ++i)
                        ansatz.circuit.bind(w_names[i], w_vals[i]);
                }
            } catch (const std::exception& e) {
                rethrow_with_context(cfg, layer, it, e);
            }
            rec.wall_seconds = elapsed_since(t0);
            trace.iterations.push_back(rec);
            energies.push_back(rec.energy);
            if (converged) break;
        }
        trace.cv_per_layer.push_back(window_cv(energies, cfg.cv_window));
        trace.layer_final_energies.push_back(energies.back());
    }
    finish_trace(trace);
    return trace;
}

// ---- circuit-only baselines --------------------------------------------------

namespace {

Circuit build_vqe_circuit(const RunConfig& cfg, const Hamiltonian& h) {
    const int n = h.n_qubits();
    if (cfg.ansatz == "sign")
        return build_sign_ansatz(n, model_edges(cfg.model), cfg.layers).circuit;
    if (cfg.ansatz == "hea") return build_hea(n, cfg.ansatz_reps).circuit;
    if (cfg.ansatz == "brickwork") return build_brickwork(n, cfg.ansatz_reps).circuit;
    if (cfg.ansatz == "qaoa") return build_qaoa(h, cfg.ansatz_reps).circuit;
    throw std::invalid_argument("unknown ansatz '" + cfg.ansatz + "'");
}

}  // namespace

RunTrace run_vqe(const RunConfig& cfg) {
    cfg.validate();
    const Hamiltonian h = build_model(cfg.model);
    const double eps = cfg.effective_eps();
    const SeedSequence seq(cfg.seed);

    Circuit circuit = build_vqe_circuit(cfg, h);
    randomize_parameters(circuit, seq.derive("circuit-init"));
    const std::vector<std::string> names = circuit.param_names();
    std::vector<double> vals(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) vals[i] = circuit.params.at(names[i]);
    // QAOA shares one parameter across a whole rotation block, which the
    // shift rule does not cover; those gradients fall back to differences.
    const bool use_shift = cfg.ansatz != "qaoa";

    RunTrace trace = start_trace(cfg);
    trace.e0 = oracle_energy(h);
    const int qwc = qwc_group_count(term_strings(h));
    const int circuits = qwc * (1 + 2 * static_cast<int>(names.size()));
    trace.circuits_per_iteration = circuits;

    Adam adam(cfg.w_lr);
    std::vector<double> energies;
    double prev_e = 0;
    const int budget = cfg.layers * cfg.max_iters_per_layer;
    for (int it = 1; it <= budget; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.layer = 1;
        rec.iteration = it;
        rec.circuits = circuits;
        bool converged = false;
        try {
            const Statevector psi = circuit.simulate();
            rec.energy = h.expectation(psi.amps);
            converged = it > 1 && std::abs(rec.energy - prev_e) < eps;
            prev_e = rec.energy;
            if (!converged) {
                std::vector<double> g;
                if (use_shift) {
                    g = param_shift_gradient(circuit, h, nullptr, names);
                } else {
                    auto fn = [&](const std::vector<double>& vs) {
                        Circuit c2 = circuit;
                        for (std::size_t i = 0; i < names.size(); ++i) c2.bind(names[i], vs[i]);
                        return h.expectation(c2.simulate().amps);
                    };
                    g = finite_difference_gradient(fn, vals);
                }
                adam.step(vals, g);
                for (std::size_t i = 0; i < names.size(); ++i) circuit.bind(names[i], vals[i]);
            }
        } catch (const std::exception& e) {
            rethrow_with_context(cfg, 1, it, e);
        }
        rec.wall_seconds = elapsed_since(t0);
        trace.iterations.push_back(rec);
        energies.push_back(rec.energy);
        if (converged) break;
    }
    trace.cv_per_layer.push_back(window_cv(energies, cfg.cv_window));
    trace.layer_final_energies.push_back(energies.back());
    finish_trace(trace);
    return trace;
}

RunTrace run_layered_vqe(const RunConfig& cfg) {
    cfg.validate();
    const Hamiltonian h = build_model(cfg.model);
    const int n = h.n_qubits();
    const double eps = cfg.effective_eps();
    const SeedSequence seq(cfg.seed);

    SignAnsatz ansatz = build_sign_ansatz(n, model_edges(cfg.model), cfg.layers);

    RunTrace trace = start_trace(cfg);
    trace.e0 = oracle_energy(h);
    const int qwc = qwc_group_count(term_strings(h));

    for (int layer = 1; layer <= cfg.layers; ++layer) {
        std::vector<std::string> names = ansatz.w_param_names[layer - 1];
        for (const std::string& s : ansatz.ry_param_names[layer - 1]) names.push_back(s);
        {
            std::mt19937_64 gen(seq.derive("circuit-init", layer));
            std::uniform_real_distribution<double> unif(-2 * std::numbers::pi,
                                                        2 * std::numbers::pi);
            for (const std::string& name : names) ansatz.circuit.bind(name, unif(gen));
        }
        std::vector<double> vals(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) vals[i] = ansatz.circuit.params.at(names[i]);
        const int circuits = qwc * (1 + 2 * static_cast<int>(names.size()));
        trace.circuits_per_iteration = circuits;

        Adam adam(cfg.w_lr);
        std::vector<double> energies;
        double prev_e = 0;
        for (int it = 1; it <= cfg.max_iters_per_layer; ++it) {
            const auto t0 = std::chrono::steady_clock::now();
            IterationRecord rec;
            rec.layer = layer;
            rec.iteration = it;
            rec.circuits = circuits;
            bool converged = false;
            try {
                const Statevector psi = ansatz.circuit.simulate();
                rec.energy = h.expectation(psi.amps);
                converged = it > 1 && std::abs(rec.energy - prev_e) < eps;
                prev_e = rec.energy;
                if (!converged) {
                    std::vector<double> g = param_shift_gradient(ansatz.circuit, h, nullptr, names);
                    adam.step(vals, g);
                    for (std::size_t i = 0; i < names.size(); ++i)
                        ansatz.circuit.bind(names[i], vals[i]);
                }
            } catch (const std::exception& e) {
                rethrow_with_context(cfg, layer, it, e);
            }
            rec.wall_seconds = elapsed_since(t0);
            trace.iterations.push_back(rec);
            energies.push_back(rec.energy);
            if (converged) break;
        }
        trace.cv_per_layer.push_back(window_cv(energies, cfg.cv_window));
        trace.layer_final_energies.push_back(energies.back());
    }
    finish_trace(trace);
    return trace;
}

RunTrace run_nn_baseline(const RunConfig& cfg) {
    cfg.validate();
    const Hamiltonian h = build_model(cfg.model);
    const int n = h.n_qubits();
    const double eps = cfg.effective_eps();
    const SeedSequence seq(cfg.seed);

    AmplitudeModel model = AmplitudeModel::create(n, hidden_or_default(cfg.nn_hidden, n),
                                                  OutputMode::SignedReal, seq.derive("nn-init"));
    // Rayleigh quotient over the uniform superposition: the network alone is
    // the wavefunction.
    Statevector psi = Statevector::zero(n);
    const double amp = 1.0 / std::sqrt(static_cast<double>(psi.amps.size()));
    for (cdouble& a : psi.amps) a = amp;

    RunTrace trace = start_trace(cfg);
    trace.e0 = oracle_energy(h);
    trace.circuits_per_iteration = 0;

    Adam adam(cfg.nn_lr);
    std::vector<double> energies;
    double prev_e = 0;
    const int budget = cfg.layers * cfg.max_iters_per_layer;
    for (int it = 1; it <= budget; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.layer = 1;
        rec.iteration = it;
        bool converged = false;
        try {
            const EnergyEstimate est = hybrid_energy_exact(psi, model, h);
            rec.energy = est.value;
            converged = it > 1 && std::abs(rec.energy - prev_e) < eps;
            prev_e = rec.energy;
            if (!converged) {
                const ModelGradient gm = nn_energy_gradient_exact(psi, model, h);
                std::vector<double> params = model.flatten();
                adam.step(params, gm.flatten());
                model.unflatten(params);
            }
        } catch (const std::exception& e) {
            rethrow_with_context(cfg, 1, it, e);
        }
        rec.wall_seconds = elapsed_since(t0);
        trace.iterations.push_back(rec);
        energies.push_back(rec.energy);
        if (converged) break;
    }
    trace.cv_per_layer.push_back(window_cv(energies, cfg.cv_window));
    trace.layer_final_energies.push_back(energies.back());
    finish_trace(trace);
    return trace;
}

RunTrace run_config(const RunConfig& cfg) {
    switch (cfg.method) {
        case Method::Svqnhe: return run_svqnhe(cfg);
        case Method::Vqe: return run_vqe(cfg);
        case Method::LayeredVqe: return run_layered_vqe(cfg);
        case Method::NnBaseline: return run_nn_baseline(cfg);
    }
    throw std::logic_error("bad method enum");
}

// ---- metrics ---------------------------------------------------------------

MetricsReport compute_metrics(const std::vector<RunTrace>& candidate,
                              const std::vector<RunTrace>& baseline, double e0,
                              double target_fraction) {
    if (candidate.empty() || baseline.empty())
        throw std::invalid_argument("metrics need at least one trace on each side");

    const auto finals = [](const std::vector<RunTrace>& ts) {
        std::vector<double> out;
        out.reserve(ts.size());
        for (const RunTrace& t : ts) out.push_back(t.final_energy);
        return out;
    };
    const auto mae = [e0](const std::vector<double>& xs) {
        double s = 0;
        for (double x : xs) s += std::abs(x - e0);
        return s / static_cast<double>(xs.size());
    };

    const std::vector<double> fc = finals(candidate);
    const std::vector<double> fb = finals(baseline);

    MetricsReport rep;
    rep.mae_candidate = mae(fc);
    rep.mae_baseline = mae(fb);
    rep.var_candidate = variance_of(fc);
    rep.var_baseline = variance_of(fb);
    if (rep.mae_baseline == 0) throw std::invalid_argument("baseline MAE is zero");
    if (rep.var_baseline == 0) throw std::invalid_argument("baseline variance is zero");
    rep.r_mae = (rep.mae_candidate - rep.mae_baseline) / rep.mae_baseline;
    rep.r_var = (rep.var_candidate - rep.var_baseline) / rep.var_baseline;

    const double target = e0 + (1.0 - target_fraction) * std::abs(e0);
    const auto success = [target](const std::vector<RunTrace>& ts) {
        int hits = 0;
        for (const RunTrace& t : ts)
            if (t.steps_to(target) > 0) ++hits;
        return static_cast<double>(hits) / static_cast<double>(ts.size());
    };
    rep.success_candidate = success(candidate);
    rep.success_baseline = success(baseline);
    return rep;
}

// ---- combinatorial pipeline --------------------------------------------------

MaxCutComparison run_maxcut(const Graph& g, const MaxCutConfig& cfg) {
    MaxCutComparison out;
    out.results.push_back(run_maxcut_svqnhe(g, cfg));
    out.results.push_back(run_maxcut_vqe(g, MaxCutBaseline::Brickwork, cfg));
    out.results.push_back(run_maxcut_vqe(g, MaxCutBaseline::SignCircuit, cfg));

    long best = 0;
    if (g.n_vertices <= 20) best = maxcut_bruteforce(g).best_cut;
    for (const MaxCutRunResult& r : out.results) best = std::max(best, r.cut);
    out.best_cut = best;
    for (const MaxCutRunResult& r : out.results)
        out.r_e.push_back(best > 0 ? static_cast<double>(r.cut) / static_cast<double>(best) : 1.0);
    return out;
}

// ---- shared worker pool ------------------------------------------------------

int worker_count() {
    if (const char* env = std::getenv("SVQNHE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(int n_tasks, const std::function<void(int)>& fn) {
    if (n_tasks <= 0) return;
    const int workers = std::min(worker_count(), n_tasks);
    if (workers <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(body);
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace svqnhe
