// transfer.hpp: moves the distribution learned by the neural factor into a
// per-qubit Ry layer, so a grown circuit starts where the previous stage
// ended and the network can be re-initialized.
//
// The fit minimizes a weighted sum of KL divergences between the
// neural-reweighted and the Ry-rotated outcome distributions over a set of
// probe states: the previous optimized state plus Haar-random states.
#pragma once

#include <cstdint>
#include <vector>

#include "svqnhe/neural.hpp"
#include "svqnhe/qsim.hpp"

namespace svqnhe {

struct TransferConfig {
    int n_test_states = 8;     // probe count, previous state included
    double weight_prev = 0.5;  // weight of the previous state (1 if it is alone)
    int max_iters = 500;
    double lr = 0.05;
    double tol = 1e-12;  // stop when an accepted step improves less than this
    enum class Direction { ForwardKL, ReverseKL };
    Direction direction = Direction::ForwardKL;  // KL(P_F || P_G)
};

struct TransferResult {
    std::vector<double> angles;  // one Ry angle per qubit
    double residual = 0.0;       // final objective value
    bool converged = false;
    int iterations = 0;
    int n_test_states = 0;
    // objective after every accepted step (non-increasing by construction)
    std::vector<double> objective_trace;
};

TransferResult fit_g_to_f(const AmplitudeModel& model, const Statevector& prev_state,
                          std::uint64_t seed, const TransferConfig& cfg = {});

// Haar-random state on n qubits, deterministic in the seed.
Statevector haar_random_state(int n_qubits, std::uint64_t seed);

struct SignAnsatz;
class Hamiltonian;

struct TransferStepReport {
    TransferResult fit;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double f2_variance_before = 0.0;  // Var(f^2)/Mean(f^2)^2 under |psi|^2
    double f2_variance_after = 0.0;
};

// One growth step, run when training moves from layer_index-1 to layer_index:
// fits the Ry block between the two diagonal blocks to the current model over
// the state the previous layer finished with, bakes the fitted angles in, then
// re-initializes the model to a near-constant. Throws if the exact hybrid
// energy degrades by more than energy_tolerance * |energy_before|.
TransferStepReport transfer_step(SignAnsatz& ansatz, AmplitudeModel& model, int layer_index,
                                 const Hamiltonian& h, std::uint64_t seed,
                                 const TransferConfig& cfg = {},
                                 double energy_tolerance = 0.1);

}  // namespace svqnhe
