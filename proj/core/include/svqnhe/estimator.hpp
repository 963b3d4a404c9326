// estimator.hpp: hybrid energy estimation E = <psi|F H F|psi> / <psi|F^2|psi>
// in three modes, the measurement-basis plan that serves the shot mode, and
// the gradients the optimizer consumes.
//
// Post-processing reuses one batch of measurements for the energy, the neural
// gradient, and every diagonal-rotation gradient: d E / d theta_k for a
// diagonal rotation exp(-i theta_k/2 Z_k) equals
//   sum over terms P_i anticommuting with Z_k of  c_i * <Q_ik> / <F^2>,
// where Q_ik = -i P_i Z_k is again a Pauli string (±1 phase folded into a
// weight), so it rides on the same plan.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svqnhe/ansatz.hpp"
#include "svqnhe/neural.hpp"
#include "svqnhe/pauli.hpp"
#include "svqnhe/qsim.hpp"

namespace svqnhe {

struct EnergyEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 in exact mode
    long shots_used = 0;     // samples or shots consumed by this estimate
    std::string mode;
};

// ---- exact mode ----------------------------------------------------------

// fvals must hold f(s) for every basis index s.
double hybrid_energy_value(const Statevector& psi, const std::vector<cdouble>& fvals,
                           const Hamiltonian& h);
EnergyEstimate hybrid_energy_exact(const Statevector& psi, const AmplitudeModel& model,
                                   const Hamiltonian& h);

// Gradient of the exact hybrid energy over the model parameters.
ModelGradient nn_energy_gradient_exact(const Statevector& psi, const AmplitudeModel& model,
                                       const Hamiltonian& h);

// ---- sampled-amplitude mode ----------------------------------------------

// Samples drawn from |psi|^2 plus the f cache; reused across the energy and
// both gradient evaluations of one iteration.
struct SampleBatch {
    const Statevector* psi = nullptr;
    std::vector<std::uint64_t> samples;
    std::vector<cdouble> fvals;
};

SampleBatch draw_sample_batch(const Statevector& psi, const AmplitudeModel& model,
                              int n_samples, std::uint64_t seed);

// Mean of |f(s)|^2 over the batch; the shared denominator of every sampled
// ratio estimate.
double sampled_denominator(const SampleBatch& batch);

// Ratio estimate with a blocked-jackknife standard error (20 blocks).
// Requires at least 100 samples and a denominator above 1e-12.
EnergyEstimate hybrid_energy_sampled(const SampleBatch& batch, const Hamiltonian& h);
EnergyEstimate hybrid_energy_sampled(const Statevector& psi, const AmplitudeModel& model,
                                     const Hamiltonian& h, int n_samples, std::uint64_t seed);

ModelGradient nn_energy_gradient_sampled(const SampleBatch& batch, const AmplitudeModel& model,
                                         const Hamiltonian& h);

// d/dtheta of the sampled energy for each diagonal parameter, via the
// Pauli-product identity above. Weighted variant for arbitrary coefficients.
std::vector<double> w_gradient_sampled(const SampleBatch& batch, const Hamiltonian& h,
                                       const std::vector<WParamInfo>& w_params);

// ---- measurement plan and shot mode --------------------------------------

enum class BasisKind { Computational, PairEven, PairOdd };

struct MeasurementBasis {
    BasisKind kind = BasisKind::Computational;
    std::uint64_t flip_mask = 0;  // X-or-Y support (pair bases)
    std::uint64_t y_mask = 0;     // exact Y set (PairEven only)
    int pivot = -1;               // lowest flip-support qubit
    std::vector<Gate> suffix;     // appended to the ansatz before measuring
    std::vector<int> covered;     // indices into MeasurementPlan::strings
};

struct PlanString {
    PauliString string;   // phase +1; any ±1 phase lives in `weight` of users
    int basis_index = 0;  // basis that estimates it
};

struct MeasurementPlan {
    int n_qubits = 0;
    std::vector<MeasurementBasis> bases;  // bases[0] is always computational
    std::vector<PlanString> strings;      // Hamiltonian terms first
    std::size_t n_hamiltonian_strings = 0;
    // per diagonal parameter: (string index, c_i * phase) pairs whose
    // normalized expectations sum to the gradient component
    std::vector<std::vector<std::pair<int, double>>> gradient_terms;

    int circuit_count() const { return static_cast<int>(bases.size()); }
    std::string to_json() const;
};

MeasurementPlan build_measurement_plan(const Hamiltonian& h,
                                       const std::vector<WParamInfo>& w_params = {});

// ---- shot collection ------------------------------------------------------

struct ShotCollection {
    const MeasurementPlan* plan = nullptr;
    int shots_per_basis = 0;
    std::vector<std::vector<std::uint64_t>> outcomes;  // per basis
};

// Runs every plan basis. Without noise each basis is simulated once and
// sampled; with noise every shot is a fresh Pauli-error trajectory.
ShotCollection collect_shots(const Circuit& circuit, const MeasurementPlan& plan,
                             int shots_per_basis, const NoiseSpec& noise, std::uint64_t seed);

// Unnormalized <F P F> estimates for every plan string plus the <F^2>
// denominator, with 20-block partial sums for jackknife errors. Requires a
// real-valued (NonNegative or SignedReal) model.
struct ShotEstimates {
    std::vector<double> string_means;
    double denom_mean = 0.0;
    int n_blocks = 0;
    std::vector<std::vector<double>> string_blocks;  // [string][block]
    std::vector<double> denom_blocks;
    long shots_total = 0;
};

ShotEstimates reduce_shots(const ShotCollection& shots, const AmplitudeModel& model);

EnergyEstimate hybrid_energy_shots(const ShotEstimates& est, const Hamiltonian& h,
                                   const MeasurementPlan& plan);
EnergyEstimate hybrid_energy_shots(const Circuit& circuit, const AmplitudeModel& model,
                                   const Hamiltonian& h, int shots_per_basis,
                                   const NoiseSpec& noise, std::uint64_t seed);

// Neural gradient differentiating the shot-mode estimator on the collected
// outcomes (per-outcome pair values are linear in the two f values involved).
ModelGradient nn_energy_gradient_shots(const ShotCollection& shots, const AmplitudeModel& model,
                                       const Hamiltonian& h);

std::vector<double> w_gradient_shots(const ShotEstimates& est, const MeasurementPlan& plan);

// ---- parameter-shift and finite differences -------------------------------

// Exact-mode gradient over the named circuit parameters via ±pi/2 shifts.
// Each name must drive exactly one gate with scale 1. `model` may be null for
// plain expectation values.
std::vector<double> param_shift_gradient(const Circuit& circuit, const Hamiltonian& h,
                                         const AmplitudeModel* model,
                                         const std::vector<std::string>& names);

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& fn, std::vector<double> at,
    double step = 1e-5);

// ---- descriptive statistics ------------------------------------------------

// population standard deviation divided by |mean|; throws on an empty window
// or a zero mean
double cv_statistic(std::span<const double> window);

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // population variance

// Var(f^2)/Mean(f^2)^2 spread of the model, uniform over the computational
// basis. Monitors how far F is from a constant rescaling.
double model_f2_relative_variance(const AmplitudeModel& model);

// Same spread but weighted by |psi|^2, i.e. over the distribution the model
// actually sees. This is the quantity the transfer step flattens.
double f2_distribution_variance(const AmplitudeModel& model, const Statevector& psi);

// Greedy qubit-wise-commuting grouping; returns the number of groups. Used for
// the measurement accounting of product-basis baselines.
int qwc_group_count(const std::vector<PauliString>& strings);

}  // namespace svqnhe
