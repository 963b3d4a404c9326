// neural.hpp: the neural amplitude model F = sum_s f(s) |s><s|.
//
// Input encoding: qubit bit b maps to +1 (b=0) or -1 (b=1). Hidden layers use
// tanh. Output heads:
//   NonNegative:  f(s) = softplus(z0)              (strictly positive)
//   ComplexPhase: f(s) = softplus(z0) * e^{i z1}
//   SignedReal:   f(s) = z0                        (plain VMC baseline net)
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "svqnhe/pauli.hpp"

namespace svqnhe {

enum class OutputMode { NonNegative, ComplexPhase, SignedReal };

std::string output_mode_name(OutputMode m);
OutputMode output_mode_from_name(const std::string& name);

struct ModelGradient;

class AmplitudeModel {
public:
    AmplitudeModel() = default;

    // hidden = widths of the hidden layers (default used by callers: {n, n}).
    // Weights are drawn from U(-0.5, 0.5) / sqrt(fan_in); biases start at zero.
    static AmplitudeModel create(int n_qubits, std::vector<int> hidden, OutputMode mode,
                                 std::uint64_t seed);

    int n_qubits() const { return sizes_.empty() ? 0 : sizes_.front(); }
    OutputMode mode() const { return mode_; }
    const std::vector<int>& sizes() const { return sizes_; }
    std::size_t param_count() const;

    cdouble evaluate(std::uint64_t s) const;
    // every f(s) for s in [0, 2^n); the cache most estimator routines consume
    std::vector<cdouble> evaluate_all() const;

    // Re-draws all weights at a near-zero scale so that f is constant to within
    // ~1e-4 relative spread (f ~ ln 2 for the softplus heads). Deterministic in
    // the seed; calling twice with one seed gives identical weights.
    void reset_to_identity(std::uint64_t seed);

    // NonNegative -> ComplexPhase, keeping the magnitude head and adding a
    // near-zero phase head, so f is unchanged up to ~1e-4 phase jitter.
    void switch_to_complex(std::uint64_t seed);

    // Accumulates d/dp of Re[upstream * f(s)] into grad for every parameter p.
    void accumulate_gradient(std::uint64_t s, cdouble upstream, ModelGradient& grad) const;

    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);

    std::string to_json() const;
    static AmplitudeModel from_json(const std::string& text);

private:
    friend struct ModelGradient;
    void init_weights(std::uint64_t seed, double scale);
    std::vector<double> forward_raw(std::uint64_t s) const;  // output-layer pre-activations

    std::vector<int> sizes_;  // [n_in, hidden..., n_out]
    OutputMode mode_ = OutputMode::NonNegative;
    // weights_[l] is sizes_[l+1] x sizes_[l], row-major; biases_[l] has sizes_[l+1]
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<double>> biases_;
};

struct ModelGradient {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static ModelGradient zeros_like(const AmplitudeModel& m);
    void scale(double factor);
    void add(const ModelGradient& other, double factor = 1.0);
    std::vector<double> flatten() const;
    double norm() const;
};

double softplus(double z);

// Adam with bias correction; operates on a flat parameter vector.
class Adam {
public:
    explicit Adam(double lr = 1e-2, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::span<double> params, std::span<const double> grad);
    void reset();
    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace svqnhe
