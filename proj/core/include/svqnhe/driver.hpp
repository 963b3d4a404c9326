// driver.hpp: optimization loops and run-level bookkeeping.
//
// run_svqnhe grows the sign ansatz layer by layer: each layer alternates a
// neural-parameter step with a diagonal-rotation step until the energy change
// falls under eps_conv, and every layer after the first starts by transferring
// the learned amplitude profile into the preceding Ry block. The plain VQE,
// layerwise VQE and neural-only loops exist as baselines, and share the trace
// format so metrics compare like with like.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "svqnhe/ansatz.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/maxcut.hpp"
#include "svqnhe/neural.hpp"
#include "svqnhe/pauli.hpp"
#include "svqnhe/qsim.hpp"
#include "svqnhe/transfer.hpp"

namespace svqnhe {

// ---- model selection -------------------------------------------------------

// Names a benchmark Hamiltonian and its couplings. Fields that a model does
// not use are ignored by the builder.
struct ModelSpec {
    std::string name = "heisenberg_2d";  // j1j2_1d | heisenberg_2d | tfim_1d | ising_1d
    int n = 3;                           // chain length (1d models)
    int rows = 1, cols = 3;              // heisenberg_2d extent
    double j1 = 1.0, j2 = 0.0;           // j1j2_1d couplings
    double delta1 = 1.0, delta2 = 1.0;   // j1j2_1d anisotropies
    double field = 0.0;                  // j1j2_1d longitudinal field
    double j = 1.0;  // heisenberg_2d / tfim / ising coupling
    double h = 0.0;  // heisenberg_2d / ising field
    double g = 1.0;  // tfim transverse field
};

// "ising1d", "Ising-1D" and "ising_1d" all name the same model.
std::string normalize_model_name(const std::string& name);

Hamiltonian build_model(const ModelSpec& spec);
int model_qubit_count(const ModelSpec& spec);
// Rzz placement for the sign ansatz: the model's interaction graph.
std::vector<std::pair<int, int>> model_edges(const ModelSpec& spec);
std::string model_label(const ModelSpec& spec);  // csv-safe, e.g. "j1j2_1d-n6"

// ---- run configuration -----------------------------------------------------

enum class Method { Svqnhe, Vqe, LayeredVqe, NnBaseline };
enum class EstimationMode { Exact, SampledAmplitude, ShotProtocol };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::string mode_name(EstimationMode m);
EstimationMode mode_from_name(const std::string& name);

struct RunConfig {
    std::string id;  // unique within a suite
    Method method = Method::Svqnhe;
    ModelSpec model;
    std::string ansatz = "sign";  // sign | hea | brickwork | qaoa (vqe methods)
    int ansatz_reps = 2;          // hea reps / brickwork depth / qaoa rounds
    int layers = 1;               // sign-ansatz depth; also scales iteration budgets
    EstimationMode mode = EstimationMode::Exact;
    NoiseSpec noise;
    std::uint64_t seed = 1;
    int max_iters_per_layer = 2000;
    double eps_conv = -1.0;  // <= 0 picks the mode default: 1e-6 exact, 1e-3 otherwise
    int n_samples = 10000;   // sampled-amplitude draws per iteration
    int noise_trajectories = 32;  // error realizations per noisy sampled iteration
    int shots_per_basis = 1200;
    std::vector<int> nn_hidden;  // empty = two hidden layers of n units
    double nn_lr = 1e-2;
    double w_lr = 0.05;
    bool final_layer_complex = false;
    int cv_window = 50;  // iterations entering the per-layer dispersion statistic
    double transfer_tolerance = 0.1;
    int transfer_probes = 8;

    double effective_eps() const;
    void validate() const;  // throws std::invalid_argument with the field name
};

// ---- traces ----------------------------------------------------------------

struct IterationRecord {
    int layer = 1;
    int iteration = 0;  // 1-based within the layer
    double energy = 0.0;
    double std_error = 0.0;
    long shots = 0;    // measurements consumed by this iteration
    int circuits = 0;  // distinct circuits the estimate would execute
    double wall_seconds = 0.0;
};

struct TransferRecord {
    int layer = 0;  // layer that begins with this transfer
    double residual = 0.0;
    int fit_iterations = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double f2_variance_before = 0.0;
    double f2_variance_after = 0.0;
};

struct RunTrace {
    std::string run_id;
    std::string method;
    std::string model;
    std::string mode;
    std::uint64_t seed = 0;
    std::vector<IterationRecord> iterations;
    std::vector<TransferRecord> transfers;
    std::vector<double> cv_per_layer;  // dispersion of the final-window energies
    std::vector<double> layer_final_energies;
    double final_energy = 0.0;
    double e0 = 0.0;  // oracle ground energy (NaN when out of oracle range)
    long shots_total = 0;
    int circuits_per_iteration = 0;

    // First 1-based global iteration whose energy is at or below `target`;
    // -1 when never reached.
    int steps_to(double target) const;
};

// ---- optimization loops ----------------------------------------------------

RunTrace run_svqnhe(const RunConfig& cfg);
RunTrace run_vqe(const RunConfig& cfg);          // joint optimization, exact mode
RunTrace run_layered_vqe(const RunConfig& cfg);  // stagewise sign ansatz, no neural factor
RunTrace run_nn_baseline(const RunConfig& cfg);  // signed real MLP alone, exact mode
RunTrace run_config(const RunConfig& cfg);       // dispatch on cfg.method

// ---- metrics ---------------------------------------------------------------

struct MetricsReport {
    double mae_candidate = 0.0;
    double mae_baseline = 0.0;
    double var_candidate = 0.0;
    double var_baseline = 0.0;
    double r_mae = 0.0;  // (mae_candidate - mae_baseline) / mae_baseline
    double r_var = 0.0;
    double success_candidate = 0.0;  // fraction of runs reaching the target energy
    double success_baseline = 0.0;
};

// Final-energy error/dispersion across matched seed sets. `target_fraction`
// scales the oracle ground energy into the success threshold.
MetricsReport compute_metrics(const std::vector<RunTrace>& candidate,
                              const std::vector<RunTrace>& baseline, double e0,
                              double target_fraction = 0.9945);

// ---- combinatorial pipeline -------------------------------------------------

struct MaxCutComparison {
    std::vector<MaxCutRunResult> results;  // one per method
    long best_cut = 0;                     // best across methods and brute force
    std::vector<double> r_e;               // per method: cut / best_cut
};

// Runs the hybrid optimizer plus both circuit baselines on one graph.
MaxCutComparison run_maxcut(const Graph& g, const MaxCutConfig& cfg);

// ---- shared worker pool ------------------------------------------------------

// SVQNHE_THREADS when set and positive, otherwise hardware concurrency.
int worker_count();

// Runs fn(0..n_tasks-1) on the pool; rethrows the first captured exception.
void parallel_for(int n_tasks, const std::function<void(int)>& fn);

}  // namespace svqnhe
