#include "svqnhe/maxcut.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "svqnhe/ansatz.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/rng.hpp"
#include "svqnhe/transfer.hpp"

namespace svqnhe {

using json = nlohmann::json;

std::string Graph::to_json() const {
    json j;
    j["n_vertices"] = n_vertices;
    json je = json::array();
    for (const auto& [a, b] : edges) je.push_back({a, b});
    j["edges"] = je;
    return j.dump();
}

Graph Graph::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("graph JSON: ") + e.what());
    }
    Graph g;
    try {
        g.n_vertices = j.at("n_vertices").get<int>();
        for (const auto& e : j.at("edges"))
            g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("graph JSON: ") + e.what());
    }
    for (const auto& [a, b] : g.edges)
        if (a < 0 || b < 0 || a >= g.n_vertices || b >= g.n_vertices || a == b)
            throw std::invalid_argument("graph JSON has a bad edge");
    return g;
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "p " << g.n_vertices << "\n";
    for (const auto& [a, b] : g.edges) out << a << " " << b << "\n";
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Graph g;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!saw_header && line[0] == 'p') {
            char tag;
            ls >> tag >> g.n_vertices;
            saw_header = true;
            continue;
        }
        int a, b;
        if (!(ls >> a >> b)) throw std::runtime_error("bad edge line in " + path);
        if (a < 0 || b < 0 || a == b) throw std::runtime_error("bad edge in " + path);
        g.edges.emplace_back(a, b);
        g.n_vertices = std::max({g.n_vertices, a + 1, b + 1});
    }
    return g;
}

Graph erdos_renyi(int n_vertices, double edge_prob, std::uint64_t seed) {
    if (n_vertices < 1) throw std::invalid_argument("need at least one vertex");
    if (edge_prob < 0 || edge_prob > 1) throw std::invalid_argument("edge probability in [0,1]");
    Graph g;
    g.n_vertices = n_vertices;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n_vertices; ++i)
        for (int j = i + 1; j < n_vertices; ++j)
            if (unif(gen) < edge_prob) g.edges.emplace_back(i, j);
    return g;
}

long cut_value(const Graph& g, const std::vector<int>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(g.n_vertices))
        throw std::invalid_argument("assignment size mismatch");
    long cut = 0;
    for (const auto& [a, b] : g.edges)
        if (assignment[a] != assignment[b]) ++cut;
    return cut;
}

BruteForceCut maxcut_bruteforce(const Graph& g) {
    if (g.n_vertices > 20)
        throw std::invalid_argument("brute force supported up to 20 vertices");
    BruteForceCut best;
    best.assignment.assign(g.n_vertices, 1);
    std::vector<int> a(g.n_vertices, 1);
    const std::uint64_t half = std::uint64_t{1} << (g.n_vertices - 1);
    for (std::uint64_t mask = 0; mask < half; ++mask) {
        for (int v = 1; v < g.n_vertices; ++v)
            a[v] = (mask >> (v - 1)) & 1 ? -1 : 1;
        const long cut = cut_value(g, a);
        if (cut > best.best_cut) {
            best.best_cut = cut;
            best.assignment = a;
        }
    }
    return best;
}

namespace {

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

long maxcut_capacity(int n_qubits, int k) {
    if (k < 1 || k > n_qubits) throw std::invalid_argument("subset size k must lie in [1, n]");
    return 3 * binomial(n_qubits, k);
}

std::vector<PauliString> maxcut_observables(int n_vertices, int n_qubits, int k) {
    if (n_vertices > maxcut_capacity(n_qubits, k))
        throw std::invalid_argument("register capacity exceeded; raise n_qubits or k");
    const PauliOp letters[3] = {PauliOp::Z, PauliOp::X, PauliOp::Y};
    std::vector<PauliString> obs;
    for (const PauliOp letter : letters) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            PauliString p = PauliString::identity(n_qubits);
            for (int q : idx) p.ops[q] = letter;
            obs.push_back(std::move(p));
            if (static_cast<int>(obs.size()) == n_vertices) return obs;
            // advance to the next k-subset in lexicographic order
            int i = k - 1;
            while (i >= 0 && idx[i] == n_qubits - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return obs;
}

double relaxed_cut_objective(const std::vector<double>& correlations, const Graph& g,
                             double alpha) {
    double obj = 0;
    for (const auto& [a, b] : g.edges)
        obj += std::tanh(alpha * correlations[a]) * std::tanh(alpha * correlations[b]);
    return obj;
}

std::vector<int> round_assignment(const std::vector<double>& correlations) {
    std::vector<int> a(correlations.size());
    for (std::size_t u = 0; u < correlations.size(); ++u) a[u] = correlations[u] < 0 ? -1 : 1;
    return a;
}

namespace {

std::vector<double> hybrid_correlations(const Statevector& psi, const std::vector<cdouble>& fvals,
                                        const std::vector<PauliString>& obs) {
    std::vector<cdouble> b(psi.amps.size());
    double den = 0;
    for (std::size_t s = 0; s < b.size(); ++s) {
        b[s] = fvals[s] * psi.amps[s];
        den += std::norm(b[s]);
    }
    if (den <= 0) throw std::runtime_error("hybrid state has zero norm");
    std::vector<double> m(obs.size());
    for (std::size_t u = 0; u < obs.size(); ++u)
        m[u] = pauli_expectation(obs[u], b).real() / den;
    return m;
}

std::vector<double> plain_correlations(const Statevector& psi,
                                       const std::vector<PauliString>& obs) {
    std::vector<double> m(obs.size());
    for (std::size_t u = 0; u < obs.size(); ++u)
        m[u] = pauli_expectation(obs[u], psi.amps).real();
    return m;
}

// d(objective)/d(m_u) with the other factor frozen
std::vector<double> objective_weights(const std::vector<double>& m, const Graph& g,
                                      double alpha) {
    std::vector<double> w(m.size(), 0.0);
    for (const auto& [a, b] : g.edges) {
        const double ta = std::tanh(alpha * m[a]);
        const double tb = std::tanh(alpha * m[b]);
        w[a] += alpha * (1.0 - ta * ta) * tb;
        w[b] += alpha * (1.0 - tb * tb) * ta;
    }
    return w;
}

Hamiltonian weighted_observable_sum(const std::vector<double>& w,
                                    const std::vector<PauliString>& obs, int n_qubits) {
    Hamiltonian h(n_qubits);
    for (std::size_t u = 0; u < w.size(); ++u)
        if (w[u] != 0.0) h.add_term(w[u], obs[u]);
    return h;
}

void finish_result(MaxCutRunResult& res, const Graph& g, const std::vector<double>& m,
                   double alpha) {
    res.correlations = m;
    res.assignment = round_assignment(m);
    res.cut = cut_value(g, res.assignment);
    const BruteForceCut bf = maxcut_bruteforce(g);
    res.best_cut = bf.best_cut;
    res.ratio = bf.best_cut > 0 ? static_cast<double>(res.cut) / bf.best_cut : 1.0;
    res.objective = relaxed_cut_objective(m, g, alpha);
}

}  // namespace

MaxCutRunResult run_maxcut_svqnhe(const Graph& g, const MaxCutConfig& cfg) {
    const int n = cfg.n_qubits;
    const std::vector<PauliString> obs = maxcut_observables(g.n_vertices, n, cfg.k);
    const SeedSequence seq(cfg.seed);
    SignAnsatz ansatz = build_sign_ansatz(n, complete_graph_edges(n), cfg.sign_layers);
    Circuit& circuit = ansatz.circuit;

    std::vector<int> hidden = cfg.hidden.empty() ? std::vector<int>{n, n} : cfg.hidden;
    AmplitudeModel model =
        AmplitudeModel::create(n, hidden, OutputMode::NonNegative, seq.derive("nn-init"));

    int iterations = 0;
    for (int stage = 1; stage <= cfg.sign_layers; ++stage) {
        if (stage == 1) {
            std::mt19937_64 gen(seq.derive("circuit-init"));
            std::uniform_real_distribution<double> unif(-2.0 * std::numbers::pi,
                                                        2.0 * std::numbers::pi);
            for (const std::string& name : ansatz.w_param_names[0]) circuit.bind(name, unif(gen));
        } else {
            const Statevector prev = circuit.simulate();
            TransferConfig tcfg;
            const TransferResult fit =
                fit_g_to_f(model, prev, seq.derive("transfer", stage), tcfg);
            const auto& ry_names = ansatz.ry_param_names[stage - 2];
            for (int q = 0; q < n; ++q) circuit.bind(ry_names[q], fit.angles[q]);
            model.reset_to_identity(seq.derive("nn-reset", stage));
        }

        const std::vector<std::string>& w_names = ansatz.w_param_names[stage - 1];
        Adam adam_nn(cfg.nn_lr);
        Adam adam_w(cfg.w_lr);
        for (int it = 0; it < cfg.iters_per_stage; ++it, ++iterations) {
            const Statevector psi = circuit.simulate();
            const std::vector<double> m = hybrid_correlations(psi, model.evaluate_all(), obs);
            const Hamiltonian hw =
                weighted_observable_sum(objective_weights(m, g, cfg.alpha), obs, n);
            if (hw.term_count() > 0) {
                const ModelGradient nn_grad = nn_energy_gradient_exact(psi, model, hw);
                std::vector<double> flat = model.flatten();
                const std::vector<double> gflat = nn_grad.flatten();
                adam_nn.step(flat, gflat);
                model.unflatten(flat);

                const std::vector<double> w_grad =
                    param_shift_gradient(circuit, hw, &model, w_names);
                std::vector<double> w_vals(w_names.size());
                for (std::size_t i = 0; i < w_names.size(); ++i)
                    w_vals[i] = circuit.params.at(w_names[i]);
                adam_w.step(w_vals, w_grad);
                for (std::size_t i = 0; i < w_names.size(); ++i)
                    circuit.bind(w_names[i], w_vals[i]);
            }
        }
    }

    MaxCutRunResult res;
    res.method = "svqnhe";
    const Statevector psi = circuit.simulate();
    const std::vector<double> m = hybrid_correlations(psi, model.evaluate_all(), obs);
    finish_result(res, g, m, cfg.alpha);
    Hamiltonian pseudo(n);
    for (const PauliString& p : obs) pseudo.add_term(1.0, p);
    res.circuits_per_iteration =
        build_measurement_plan(pseudo, ansatz.w_params(cfg.sign_layers)).circuit_count();
    res.iterations = iterations;
    return res;
}

MaxCutRunResult run_maxcut_vqe(const Graph& g, MaxCutBaseline kind, const MaxCutConfig& cfg) {
    const int n = cfg.n_qubits;
    const std::vector<PauliString> obs = maxcut_observables(g.n_vertices, n, cfg.k);
    const SeedSequence seq(cfg.seed);

    Circuit circuit;
    std::string method;
    if (kind == MaxCutBaseline::Brickwork) {
        int depth = cfg.brickwork_depth;
        if (depth == 0)
            depth = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(g.n_vertices))));
        circuit = build_brickwork(n, depth).circuit;
        method = "brickwork_vqe";
    } else {
        circuit = build_sign_ansatz(n, complete_graph_edges(n), cfg.sign_layers).circuit;
        method = "sign_vqe";
    }
    randomize_parameters(circuit, seq.derive("circuit-init"));
    std::vector<std::string> names = circuit.param_names();

    Adam adam(cfg.w_lr);
    // same total iteration budget as the staged run
    const int total_iters = cfg.iters_per_stage * cfg.sign_layers;
    for (int it = 0; it < total_iters; ++it) {
        const Statevector psi = circuit.simulate();
        const std::vector<double> m = plain_correlations(psi, obs);
        const Hamiltonian hw = weighted_observable_sum(objective_weights(m, g, cfg.alpha), obs, n);
        if (hw.term_count() == 0) continue;
        const std::vector<double> grad = param_shift_gradient(circuit, hw, nullptr, names);
        std::vector<double> vals(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) vals[i] = circuit.params.at(names[i]);
        adam.step(vals, grad);
        for (std::size_t i = 0; i < names.size(); ++i) circuit.bind(names[i], vals[i]);
    }

    MaxCutRunResult res;
    res.method = method;
    const Statevector psi = circuit.simulate();
    finish_result(res, g, plain_correlations(psi, obs), cfg.alpha);
    res.circuits_per_iteration =
        qwc_group_count(obs) * (1 + 2 * static_cast<int>(names.size()));
    res.iterations = total_iters;
    return res;
}

}  // namespace svqnhe
