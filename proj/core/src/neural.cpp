#include "svqnhe/neural.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "svqnhe/rng.hpp"

namespace svqnhe {

using json = nlohmann::json;

std::string output_mode_name(OutputMode m) {
    switch (m) {
        case OutputMode::NonNegative: return "non_negative";
        case OutputMode::ComplexPhase: return "complex_phase";
        case OutputMode::SignedReal: return "signed_real";
    }
    throw std::invalid_argument("unknown output mode");
}

OutputMode output_mode_from_name(const std::string& name) {
    if (name == "non_negative") return OutputMode::NonNegative;
    if (name == "complex_phase") return OutputMode::ComplexPhase;
    if (name == "signed_real") return OutputMode::SignedReal;
    throw std::invalid_argument("unknown output mode: " + name);
}

double softplus(double z) {
    // overflow-safe: softplus(z) = max(z, 0) + log1p(exp(-|z|))
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

AmplitudeModel AmplitudeModel::create(int n_qubits, std::vector<int> hidden, OutputMode mode,
                                      std::uint64_t seed) {
    if (n_qubits < 1) throw std::invalid_argument("model needs at least one input qubit");
    for (int w : hidden)
        if (w < 1) throw std::invalid_argument("hidden layer width must be positive");
    AmplitudeModel m;
    m.mode_ = mode;
    m.sizes_.push_back(n_qubits);
    for (int w : hidden) m.sizes_.push_back(w);
    m.sizes_.push_back(mode == OutputMode::ComplexPhase ? 2 : 1);
    m.init_weights(seed, 1.0);
    return m;
}

void AmplitudeModel::init_weights(std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    weights_.clear();
    biases_.clear();
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double s = scale / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
        for (double& x : w) x = unif(gen) * s;
        weights_.push_back(std::move(w));
        biases_.emplace_back(fan_out, 0.0);
    }
}

std::size_t AmplitudeModel::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

std::vector<double> AmplitudeModel::forward_raw(std::uint64_t s) const {
    const int n = sizes_.front();
    std::vector<double> act(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) act[q] = bit_of(s, q, n) ? -1.0 : 1.0;
    std::vector<double> next;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int out = sizes_[l + 1];
        const int in = sizes_[l];
        next.assign(static_cast<std::size_t>(out), 0.0);
        const double* w = weights_[l].data();
        for (int i = 0; i < out; ++i) {
            double z = biases_[l][i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) z += row[j] * act[j];
            next[i] = z;
        }
        if (l + 2 < sizes_.size())
            for (double& z : next) z = std::tanh(z);
        act = next;
    }
    return act;
}

cdouble AmplitudeModel::evaluate(std::uint64_t s) const {
    const std::vector<double> out = forward_raw(s);
    switch (mode_) {
        case OutputMode::NonNegative: return cdouble(softplus(out[0]), 0.0);
        case OutputMode::ComplexPhase: return std::polar(softplus(out[0]), out[1]);
        case OutputMode::SignedReal: return cdouble(out[0], 0.0);
    }
    throw std::logic_error("unreachable");
}

std::vector<cdouble> AmplitudeModel::evaluate_all() const {
    const std::uint64_t dim = std::uint64_t{1} << n_qubits();
    std::vector<cdouble> f(dim);
    for (std::uint64_t s = 0; s < dim; ++s) f[s] = evaluate(s);
    return f;
}

void AmplitudeModel::reset_to_identity(std::uint64_t seed) {
    init_weights(seed, 1e-4);
}

void AmplitudeModel::switch_to_complex(std::uint64_t seed) {
    if (mode_ == OutputMode::ComplexPhase) return;
    if (mode_ == OutputMode::SignedReal)
        throw std::invalid_argument("signed_real model cannot take a phase head");
    mode_ = OutputMode::ComplexPhase;
    sizes_.back() = 2;
    auto& last_w = weights_.back();
    auto& last_b = biases_.back();
    const int in = sizes_[sizes_.size() - 2];
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const double s = 1e-4 / std::sqrt(static_cast<double>(in));
    for (int j = 0; j < in; ++j) last_w.push_back(unif(gen) * s);
    last_b.push_back(0.0);
}

void AmplitudeModel::accumulate_gradient(std::uint64_t s, cdouble upstream,
                                         ModelGradient& grad) const {
    const std::size_t n_layers = weights_.size();
    // forward pass keeping activations
    const int n = sizes_.front();
    std::vector<std::vector<double>> acts(1);
    acts[0].resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) acts[0][q] = bit_of(s, q, n) ? -1.0 : 1.0;
    std::vector<double> raw_out;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int out = sizes_[l + 1];
        const int in = sizes_[l];
        std::vector<double> z(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            double v = biases_[l][i];
            const double* row = weights_[l].data() + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) v += row[j] * acts[l][j];
            z[i] = v;
        }
        if (l + 1 < n_layers) {
            for (double& v : z) v = std::tanh(v);
            acts.push_back(std::move(z));
        } else {
            raw_out = std::move(z);
        }
    }

    // head derivatives: delta over the output pre-activations of d(Re[upstream * f])/dz
    std::vector<double> delta(raw_out.size(), 0.0);
    switch (mode_) {
        case OutputMode::NonNegative:
            delta[0] = upstream.real() * sigmoid(raw_out[0]);
            break;
        case OutputMode::SignedReal:
            delta[0] = upstream.real();
            break;
        case OutputMode::ComplexPhase: {
            const double r = softplus(raw_out[0]);
            const cdouble u = upstream * std::polar(1.0, raw_out[1]);
            delta[0] = u.real() * sigmoid(raw_out[0]);
            delta[1] = -u.imag() * r;
            break;
        }
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const int out = sizes_[l + 1];
        const int in = sizes_[l];
        const std::vector<double>& a = acts[l];
        double* gw = grad.weights[l].data();
        for (int i = 0; i < out; ++i) {
            grad.biases[l][i] += delta[i];
            double* row = gw + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) row[j] += delta[i] * a[j];
        }
        if (l == 0) break;
        std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
        const double* w = weights_[l].data();
        for (int i = 0; i < out; ++i) {
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) prev[j] += delta[i] * row[j];
        }
        // tanh'(z) = 1 - a^2 with a the stored activation
        for (int j = 0; j < in; ++j) prev[j] *= 1.0 - a[j] * a[j];
        delta = std::move(prev);
    }
}

std::vector<double> AmplitudeModel::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].begin(), weights_[l].end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void AmplitudeModel::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw std::invalid_argument("parameter vector size mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (double& w : weights_[l]) w = flat[k++];
        for (double& b : biases_[l]) b = flat[k++];
    }
}

std::string AmplitudeModel::to_json() const {
    json j;
    j["mode"] = output_mode_name(mode_);
    j["sizes"] = sizes_;
    j["weights"] = weights_;
    j["biases"] = biases_;
    return j.dump();
}

AmplitudeModel AmplitudeModel::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    AmplitudeModel m;
    try {
        m.mode_ = output_mode_from_name(j.at("mode").get<std::string>());
        m.sizes_ = j.at("sizes").get<std::vector<int>>();
        m.weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
        m.biases_ = j.at("biases").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    if (m.weights_.size() + 1 != m.sizes_.size() || m.biases_.size() != m.weights_.size())
        throw std::invalid_argument("model JSON has inconsistent layer counts");
    for (std::size_t l = 0; l < m.weights_.size(); ++l) {
        const std::size_t want = static_cast<std::size_t>(m.sizes_[l + 1]) * m.sizes_[l];
        if (m.weights_[l].size() != want ||
            m.biases_[l].size() != static_cast<std::size_t>(m.sizes_[l + 1]))
            throw std::invalid_argument("model JSON has inconsistent layer shapes");
    }
    return m;
}

ModelGradient ModelGradient::zeros_like(const AmplitudeModel& m) {
    ModelGradient g;
    for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
        g.weights.emplace_back(static_cast<std::size_t>(m.sizes_[l + 1]) * m.sizes_[l], 0.0);
        g.biases.emplace_back(static_cast<std::size_t>(m.sizes_[l + 1]), 0.0);
    }
    return g;
}

void ModelGradient::scale(double factor) {
    for (auto& layer : weights)
        for (double& x : layer) x *= factor;
    for (auto& layer : biases)
        for (double& x : layer) x *= factor;
}

void ModelGradient::add(const ModelGradient& other, double factor) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i)
            weights[l][i] += factor * other.weights[l][i];
        for (std::size_t i = 0; i < biases[l].size(); ++i)
            biases[l][i] += factor * other.biases[l][i];
    }
}

std::vector<double> ModelGradient::flatten() const {
    std::vector<double> flat;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.insert(flat.end(), weights[l].begin(), weights[l].end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

double ModelGradient::norm() const {
    double s = 0;
    for (const auto& layer : weights)
        for (double x : layer) s += x * x;
    for (const auto& layer : biases)
        for (double x : layer) s += x * x;
    return std::sqrt(s);
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size())
        throw std::invalid_argument("Adam: parameter/gradient size mismatch");
    if (m_.empty()) {
        m_.assign(params.size(), 0.0);
        v_.assign(params.size(), 0.0);
    } else if (m_.size() != params.size()) {
        throw std::invalid_argument("Adam: parameter count changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
    }
}

void Adam::reset() {
    t_ = 0;
    m_.clear();
    v_.clear();
}

}  // namespace svqnhe
