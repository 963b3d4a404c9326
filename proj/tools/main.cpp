// svqnhe: batch entry point.
//
// Subcommands:
//   run <suite.json>            execute a suite, write traces/CSV/metrics
//   gs --model <name> ...       print the oracle ground energy of a model
//   plan <config.json>          print measurement-plan sizes and cost tables
//   dla --n <n> --m <m>         print generator-set algebra dimensions
//   maxcut <graph> <config>     run the cut pipeline on one graph
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.
#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "svqnhe/config.hpp"
#include "svqnhe/driver.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/liealg.hpp"
#include "svqnhe/maxcut.hpp"
#include "svqnhe/reports.hpp"

namespace {

using svqnhe::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& config_path) {
    const svqnhe::ExperimentSuite suite = svqnhe::parse_suite(read_file(config_path));
    std::printf("suite '%s': %zu run(s), output to %s\n", suite.name.c_str(), suite.runs.size(),
                suite.output_dir.c_str());
    const svqnhe::SuiteResult result = svqnhe::run_suite(suite);
    svqnhe::write_reports(result);
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        const svqnhe::RunTrace& t = result.traces[i];
        std::printf("%-28s %-12s final %.10g (E0 %.10g) in %zu iterations\n", t.run_id.c_str(),
                    t.method.c_str(), t.final_energy, t.e0, t.iterations.size());
    }
    std::fputs(svqnhe::metrics_table(suite, result.traces).c_str(), stdout);
    return kExitOk;
}

int cmd_gs(const svqnhe::ModelSpec& spec) {
    const svqnhe::Hamiltonian h = svqnhe::build_model(spec);
    if (h.n_qubits() > 12)
        throw std::invalid_argument("ground-state oracle covers up to 12 qubits");
    const svqnhe::GroundStateResult gs = svqnhe::ground_state(h);
    std::printf("model %s  terms %zu\n", svqnhe::model_label(spec).c_str(), h.term_count());
    std::printf("E0 %.12g\n", gs.energy);
    return kExitOk;
}

void print_plan_for(const RunConfig& cfg) {
    const svqnhe::Hamiltonian h = svqnhe::build_model(cfg.model);
    const svqnhe::SignAnsatz ansatz =
        svqnhe::build_sign_ansatz(h.n_qubits(), svqnhe::model_edges(cfg.model), cfg.layers);
    const std::vector<svqnhe::WParamInfo> w_infos = ansatz.w_params(cfg.layers);
    const svqnhe::MeasurementPlan plan = svqnhe::build_measurement_plan(h, w_infos);

    int even = 0, odd = 0;
    for (const svqnhe::MeasurementBasis& b : plan.bases) {
        if (b.kind == svqnhe::BasisKind::PairEven) ++even;
        if (b.kind == svqnhe::BasisKind::PairOdd) ++odd;
    }
    std::vector<svqnhe::PauliString> strings;
    for (const svqnhe::PauliTerm& t : h.terms()) strings.push_back(t.string);
    const int qwc = svqnhe::qwc_group_count(strings);
    const int d = static_cast<int>(w_infos.size());

    std::printf("run %s: model %s, %d qubit(s), %zu Hamiltonian term(s)\n", cfg.id.c_str(),
                svqnhe::model_label(cfg.model).c_str(), h.n_qubits(), h.term_count());
    std::printf("  plan circuits %d (computational 1, even-pair %d, odd-pair %d)\n",
                plan.circuit_count(), even, odd);
    std::printf("  plan strings %zu (%zu Hamiltonian + %zu gradient)\n", plan.strings.size(),
                plan.n_hamiltonian_strings, plan.strings.size() - plan.n_hamiltonian_strings);
    std::printf("  circuits per iteration: hybrid %d, product-basis baseline %d (= %d x (1 + 2*%d))\n",
                plan.circuit_count(), qwc * (1 + 2 * d), qwc, d);
}

int cmd_plan(const std::string& config_path) {
    const std::string text = read_file(config_path);
    nlohmann::json probe;
    try {
        probe = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<RunConfig> runs;
    if (probe.is_object() && probe.contains("runs")) {
        const svqnhe::ExperimentSuite suite = svqnhe::parse_suite(text);
        runs = suite.runs;
    } else {
        runs.push_back(svqnhe::run_config_from_json(text));
    }
    if (runs.empty()) throw std::invalid_argument("suite has no runs to plan for");
    for (const RunConfig& cfg : runs) print_plan_for(cfg);

    std::printf("variable capacity 3*C(n,k):\n");
    for (const auto& [n, k] : {std::pair{17, 2}, {30, 2}, {17, 3}, {30, 3}})
        std::printf("  n=%-3d k=%d  -> %ld\n", n, k, svqnhe::maxcut_capacity(n, k));
    return kExitOk;
}

int cmd_dla(int n, int m) {
    const svqnhe::GeneratorComparison cmp = svqnhe::compare_generator_sets(n, m);
    std::printf("n %d  m %d\n", n, m);
    std::printf("dim individual-generator algebra %d\n", cmp.dim_individual);
    std::printf("dim summed-generator algebra     %d\n", cmp.dim_summed);
    std::printf("summed smaller: %s\n", cmp.dim_summed < cmp.dim_individual ? "yes" : "no");
    return kExitOk;
}

svqnhe::MaxCutConfig maxcut_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("maxcut config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("maxcut config must be a JSON object");
    svqnhe::MaxCutConfig cfg;
    const auto get = [&](const char* key, auto& out) {
        if (j.contains(key)) {
            try {
                out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
            } catch (const nlohmann::json::exception& e) {
                throw std::invalid_argument(std::string("maxcut config field '") + key +
                                            "': " + e.what());
            }
        }
    };
    for (const auto& [key, value] : j.items()) {
        static const std::vector<std::string> known = {
            "n_qubits", "k",           "alpha",           "iters_per_stage", "nn_lr",
            "w_lr",     "hidden",      "sign_layers",     "brickwork_depth", "seed"};
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("maxcut config field '" + key + "': unknown key");
    }
    get("n_qubits", cfg.n_qubits);
    get("k", cfg.k);
    get("alpha", cfg.alpha);
    get("iters_per_stage", cfg.iters_per_stage);
    get("nn_lr", cfg.nn_lr);
    get("w_lr", cfg.w_lr);
    get("hidden", cfg.hidden);
    get("sign_layers", cfg.sign_layers);
    get("brickwork_depth", cfg.brickwork_depth);
    get("seed", cfg.seed);
    return cfg;
}

int cmd_maxcut(const std::string& graph_path, const std::string& config_path) {
    const svqnhe::Graph g = [&] {
        try {
            return svqnhe::load_edge_list(graph_path);
        } catch (const std::runtime_error& e) {
            throw std::invalid_argument(e.what());  // missing/bad input file
        }
    }();
    const svqnhe::MaxCutConfig cfg = maxcut_config_from_json(read_file(config_path));
    const svqnhe::MaxCutComparison cmp = svqnhe::run_maxcut(g, cfg);
    std::printf("graph: %d vertices, %zu edges; best cut %ld\n", g.n_vertices, g.edges.size(),
                cmp.best_cut);
    std::printf("%-12s %6s %8s %14s %10s\n", "method", "cut", "R_e", "circuits/iter", "iters");
    for (std::size_t i = 0; i < cmp.results.size(); ++i) {
        const svqnhe::MaxCutRunResult& r = cmp.results[i];
        std::printf("%-12s %6ld %8.4f %14d %10d\n", r.method.c_str(), r.cut, cmp.r_e[i],
                    r.circuits_per_iteration, r.iterations);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sign-structure variational quantum-neural eigensolver"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "execute an experiment suite");
    run->add_option("config", config_path, "suite JSON file")->required();

    svqnhe::ModelSpec gs_spec;
    auto* gs = app.add_subcommand("gs", "print a model's oracle ground energy");
    gs->set_help_flag("--help", "print help");  // frees -h/--h for the field strength
    gs->add_option("--model", gs_spec.name, "model name")->required();
    gs->add_option("--n", gs_spec.n, "chain length");
    gs->add_option("--rows", gs_spec.rows, "grid rows");
    gs->add_option("--cols", gs_spec.cols, "grid cols");
    gs->add_option("--J1", gs_spec.j1, "nearest-neighbor coupling");
    gs->add_option("--J2", gs_spec.j2, "next-nearest coupling");
    gs->add_option("--delta1", gs_spec.delta1, "nearest-neighbor anisotropy");
    gs->add_option("--delta2", gs_spec.delta2, "next-nearest anisotropy");
    gs->add_option("--field", gs_spec.field, "longitudinal field");
    gs->add_option("--J", gs_spec.j, "coupling");
    gs->add_option("--h", gs_spec.h, "field");
    gs->add_option("--g", gs_spec.g, "transverse field");

    std::string plan_path;
    auto* plan = app.add_subcommand("plan", "print measurement-plan sizes and cost tables");
    plan->add_option("config", plan_path, "run or suite JSON file")->required();

    int dla_n = 3, dla_m = 2;
    auto* dla = app.add_subcommand("dla", "print generator-set algebra dimensions");
    dla->add_option("--n", dla_n, "qubit count")->required();
    dla->add_option("--m", dla_m, "largest Z-subset family, in pairs")->required();

    std::string graph_path, maxcut_config_path;
    auto* maxcut = app.add_subcommand("maxcut", "run the cut pipeline on a graph file");
    maxcut->add_option("graph", graph_path, "edge-list file, 'u v' per line")->required();
    maxcut->add_option("config", maxcut_config_path, "maxcut JSON config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(config_path);
        if (*gs) return cmd_gs(gs_spec);
        if (*plan) return cmd_plan(plan_path);
        if (*dla) return cmd_dla(dla_n, dla_m);
        if (*maxcut) return cmd_maxcut(graph_path, maxcut_config_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return kExitRuntime;
    }
    std::fprintf(stderr, "configuration error: no subcommand selected\n");
    return kExitConfig;
}
