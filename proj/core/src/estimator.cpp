#include "svqnhe/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "svqnhe/rng.hpp"

namespace svqnhe {

using json = nlohmann::json;

namespace {

int popcount64(std::uint64_t x) { return std::popcount(x); }

double parity_sign(std::uint64_t x) { return (popcount64(x) & 1) ? -1.0 : 1.0; }

void check_real_model(const AmplitudeModel& model, const char* where) {
    if (model.mode() == OutputMode::ComplexPhase)
        throw std::invalid_argument(std::string(where) +
                                    " requires a real-valued amplitude model");
}

}  // namespace

// ---- exact mode -----------------------------------------------------------

double hybrid_energy_value(const Statevector& psi, const std::vector<cdouble>& fvals,
                           const Hamiltonian& h) {
    const std::size_t dim = psi.amps.size();
    if (fvals.size() != dim) throw std::invalid_argument("f cache size mismatch");
    std::vector<cdouble> b(dim);
    for (std::size_t s = 0; s < dim; ++s) b[s] = fvals[s] * psi.amps[s];
    std::vector<cdouble> hb(dim);
    h.apply(b, hb);
    cdouble num = 0;
    double den = 0;
    for (std::size_t s = 0; s < dim; ++s) {
        num += std::conj(b[s]) * hb[s];
        den += std::norm(b[s]);
    }
    if (den <= 0) throw std::runtime_error("hybrid state has zero norm");
    return num.real() / den;
}

EnergyEstimate hybrid_energy_exact(const Statevector& psi, const AmplitudeModel& model,
                                   const Hamiltonian& h) {
    EnergyEstimate e;
    e.value = hybrid_energy_value(psi, model.evaluate_all(), h);
    e.mode = "exact";
    return e;
}

ModelGradient nn_energy_gradient_exact(const Statevector& psi, const AmplitudeModel& model,
                                       const Hamiltonian& h) {
    const std::size_t dim = psi.amps.size();
    const std::vector<cdouble> fvals = model.evaluate_all();
    std::vector<cdouble> b(dim);
    for (std::size_t s = 0; s < dim; ++s) b[s] = fvals[s] * psi.amps[s];
    std::vector<cdouble> hb(dim);
    h.apply(b, hb);
    cdouble num = 0;
    double den = 0;
    for (std::size_t s = 0; s < dim; ++s) {
        num += std::conj(b[s]) * hb[s];
        den += std::norm(b[s]);
    }
    if (den <= 0) throw std::runtime_error("hybrid state has zero norm");
    const double energy = num.real() / den;
    ModelGradient grad = ModelGradient::zeros_like(model);
    for (std::size_t s = 0; s < dim; ++s) {
        const cdouble residual = hb[s] - energy * b[s];
        const cdouble upstream = (2.0 / den) * psi.amps[s] * std::conj(residual);
        if (std::abs(upstream) == 0.0) continue;
        model.accumulate_gradient(s, upstream, grad);
    }
    return grad;
}

// ---- sampled-amplitude mode ------------------------------------------------

SampleBatch draw_sample_batch(const Statevector& psi, const AmplitudeModel& model,
                              int n_samples, std::uint64_t seed) {
    SampleBatch batch;
    batch.psi = &psi;
    std::mt19937_64 gen(seed);
    batch.samples = sample_indices(psi, n_samples, gen);
    batch.fvals = model.evaluate_all();
    return batch;
}

namespace {

// jackknife over equal-ish blocks of a ratio statistic built from per-block
// numerator/denominator sums
struct RatioJackknife {
    double value = 0, std_error = 0;
};

RatioJackknife jackknife_ratio(const std::vector<double>& num_blocks,
                               const std::vector<double>& den_blocks, double num_total,
                               double den_total) {
    const int nb = static_cast<int>(num_blocks.size());
    RatioJackknife out;
    const double full = num_total / den_total;
    if (nb < 2) {
        out.value = full;
        return out;
    }
    std::vector<double> leave(nb);
    for (int j = 0; j < nb; ++j) {
        const double d = den_total - den_blocks[j];
        if (d == 0) {
            out.value = full;
            return out;
        }
        leave[j] = (num_total - num_blocks[j]) / d;
    }
    double lm = 0;
    for (double x : leave) lm += x;
    lm /= nb;
    out.value = nb * full - (nb - 1) * lm;
    double var = 0;
    for (double x : leave) var += (x - lm) * (x - lm);
    out.std_error = std::sqrt((nb - 1.0) / nb * var);
    return out;
}

int block_of(std::size_t t, std::size_t total, int n_blocks) {
    return static_cast<int>(t * static_cast<std::size_t>(n_blocks) / total);
}

}  // namespace

double sampled_denominator(const SampleBatch& batch) {
    if (batch.samples.empty()) throw std::invalid_argument("empty sample batch");
    double den = 0;
    for (std::uint64_t s : batch.samples) den += std::norm(batch.fvals[s]);
    return den / static_cast<double>(batch.samples.size());
}

EnergyEstimate hybrid_energy_sampled(const SampleBatch& batch, const Hamiltonian& h) {
    if (batch.samples.size() < 100)
        throw std::invalid_argument("sampled-mode energy needs at least 100 samples");
    const Statevector& psi = *batch.psi;
    const std::size_t T = batch.samples.size();
    const int nb = static_cast<int>(std::min<std::size_t>(20, T));
    std::vector<double> num_blocks(nb, 0.0), den_blocks(nb, 0.0);
    double num_total = 0, den_total = 0;
    for (std::size_t t = 0; t < T; ++t) {
        const std::uint64_t s = batch.samples[t];
        const cdouble as = psi.amps[s];
        const double pa = std::norm(as);
        if (pa == 0) continue;  // cannot be sampled, defensive
        cdouble local = 0;
        for (const PauliTerm& term : h.terms()) {
            const std::uint64_t u = s ^ term.string.flip_mask();
            local += term.coeff * std::conj(batch.fvals[u] * psi.amps[u]) *
                     term.string.basis_phase(s) * batch.fvals[s] * as / pa;
        }
        const double v = local.real();
        const double d = std::norm(batch.fvals[s]);
        const int j = block_of(t, T, nb);
        num_total += v;
        den_total += d;
        num_blocks[j] += v;
        den_blocks[j] += d;
    }
    if (den_total / static_cast<double>(T) < 1e-12)
        throw std::runtime_error("sampled denominator vanished; model output is degenerate");
    const RatioJackknife jk = jackknife_ratio(num_blocks, den_blocks, num_total, den_total);
    EnergyEstimate e;
    e.value = jk.value;
    e.std_error = jk.std_error;
    e.shots_used = static_cast<long>(T);
    e.mode = "sampled";
    return e;
}

EnergyEstimate hybrid_energy_sampled(const Statevector& psi, const AmplitudeModel& model,
                                     const Hamiltonian& h, int n_samples, std::uint64_t seed) {
    return hybrid_energy_sampled(draw_sample_batch(psi, model, n_samples, seed), h);
}

ModelGradient nn_energy_gradient_sampled(const SampleBatch& batch, const AmplitudeModel& model,
                                         const Hamiltonian& h) {
    const Statevector& psi = *batch.psi;
    const std::size_t T = batch.samples.size();
    if (T == 0) throw std::invalid_argument("empty sample batch");

    // first pass: the estimate itself
    double num_total = 0, den_total = 0;
    for (const std::uint64_t s : batch.samples) {
        const double pa = std::norm(psi.amps[s]);
        if (pa == 0) continue;
        cdouble local = 0;
        for (const PauliTerm& term : h.terms()) {
            const std::uint64_t u = s ^ term.string.flip_mask();
            local += term.coeff * std::conj(batch.fvals[u] * psi.amps[u]) *
                     term.string.basis_phase(s) * batch.fvals[s] * psi.amps[s] / pa;
        }
        num_total += local.real();
        den_total += std::norm(batch.fvals[s]);
    }
    if (den_total == 0) throw std::runtime_error("sampled denominator vanished");
    const double energy = num_total / den_total;

    // d/dp of (num - E * den) / den, bucketed per distinct basis state so the
    // network only back-propagates once per state seen
    std::unordered_map<std::uint64_t, cdouble> upstream;
    for (const std::uint64_t s : batch.samples) {
        const cdouble as = psi.amps[s];
        const double pa = std::norm(as);
        if (pa == 0) continue;
        for (const PauliTerm& term : h.terms()) {
            const std::uint64_t u = s ^ term.string.flip_mask();
            const cdouble phase = term.string.basis_phase(s);
            const cdouble g = std::conj(psi.amps[u]) * phase * batch.fvals[s] * as / pa;
            upstream[u] += term.coeff * std::conj(g);
            const cdouble k = std::conj(batch.fvals[u] * psi.amps[u]) * phase * as / pa;
            upstream[s] += term.coeff * k;
        }
        upstream[s] -= energy * 2.0 * std::conj(batch.fvals[s]);
    }
    ModelGradient grad = ModelGradient::zeros_like(model);
    for (const auto& [s, c] : upstream) model.accumulate_gradient(s, c / den_total, grad);
    return grad;
}

namespace {

// Q = -i P Z(support): Pauli with a ±1 weight; defined when P anticommutes
// with Z(support), i.e. the X-type overlap has odd parity.
struct DiagonalShiftTerm {
    PauliString q;
    double weight;  // c_i times the folded ±1 phase
};

std::vector<std::vector<DiagonalShiftTerm>> diagonal_shift_terms(
    const Hamiltonian& h, const std::vector<WParamInfo>& w_params) {
    const int n = h.n_qubits();
    std::vector<std::vector<DiagonalShiftTerm>> out(w_params.size());
    for (std::size_t k = 0; k < w_params.size(); ++k) {
        PauliString z = PauliString::identity(n);
        for (int q = 0; q < n; ++q)
            if (w_params[k].z_support & qubit_mask(q, n)) z.ops[q] = PauliOp::Z;
        for (const PauliTerm& term : h.terms()) {
            if ((popcount64(term.string.flip_mask() & w_params[k].z_support) & 1) == 0)
                continue;  // commutes; no contribution
            PauliString q = term.string.multiplied_by(z);
            const cdouble w = cdouble(0, -1) * q.phase;
            if (std::abs(w.imag()) > 1e-12)
                throw std::logic_error("diagonal shift operator is not Hermitian");
            q.phase = 1.0;
            out[k].push_back({std::move(q), term.coeff * w.real()});
        }
    }
    return out;
}

}  // namespace

std::vector<double> w_gradient_sampled(const SampleBatch& batch, const Hamiltonian& h,
                                       const std::vector<WParamInfo>& w_params) {
    const Statevector& psi = *batch.psi;
    const std::size_t T = batch.samples.size();
    if (T == 0) throw std::invalid_argument("empty sample batch");
    const auto shift_terms = diagonal_shift_terms(h, w_params);

    double den_total = 0;
    std::vector<double> num(w_params.size(), 0.0);
    for (const std::uint64_t s : batch.samples) {
        const cdouble as = psi.amps[s];
        const double pa = std::norm(as);
        if (pa == 0) continue;
        den_total += std::norm(batch.fvals[s]);
        for (std::size_t k = 0; k < w_params.size(); ++k) {
            cdouble local = 0;
            for (const DiagonalShiftTerm& st : shift_terms[k]) {
                const std::uint64_t u = s ^ st.q.flip_mask();
                local += st.weight * std::conj(batch.fvals[u] * psi.amps[u]) *
                         st.q.basis_phase(s) * batch.fvals[s] * as / pa;
            }
            num[k] += local.real();
        }
    }
    if (den_total == 0) throw std::runtime_error("sampled denominator vanished");
    for (double& g : num) g /= den_total;
    return num;
}

// ---- measurement plan -------------------------------------------------------

namespace {

std::uint64_t letters_key(const PauliString& p) {
    std::uint64_t key = 0;
    for (int q = 0; q < p.n_qubits; ++q)
        key |= static_cast<std::uint64_t>(p.ops[q]) << (2 * q);
    return key;
}

int lowest_qubit_in_mask(std::uint64_t mask, int n) {
    for (int q = 0; q < n; ++q)
        if (mask & qubit_mask(q, n)) return q;
    return -1;
}

std::vector<Gate> pair_basis_suffix(int n, std::uint64_t flip_mask, std::uint64_t sdg_mask,
                                    int pivot) {
    std::vector<Gate> suffix;
    for (int q = 0; q < n; ++q)
        if (sdg_mask & qubit_mask(q, n)) suffix.push_back({GateKind::Sdg, q});
    for (int q = 0; q < n; ++q) {
        if (q == pivot || !(flip_mask & qubit_mask(q, n))) continue;
        Gate g{GateKind::CNOT, pivot};
        g.q1 = q;
        suffix.push_back(g);
    }
    suffix.push_back({GateKind::H, pivot});
    return suffix;
}

}  // namespace

MeasurementPlan build_measurement_plan(const Hamiltonian& h,
                                       const std::vector<WParamInfo>& w_params) {
    const int n = h.n_qubits();
    MeasurementPlan plan;
    plan.n_qubits = n;
    plan.bases.push_back({});  // computational; also supplies the denominator

    std::unordered_map<std::uint64_t, int> even_basis;  // key (flip | y<<32 packing below)
    std::unordered_map<std::uint64_t, int> odd_basis;   // key flip
    std::unordered_map<std::uint64_t, int> string_index;

    auto assign_basis = [&](const PauliString& p) -> int {
        if (p.is_diagonal()) return 0;
        const std::uint64_t flip = p.flip_mask();
        const std::uint64_t y = p.y_mask();
        const int pivot = lowest_qubit_in_mask(flip, n);
        if (popcount64(y) % 2 == 0) {
            const std::uint64_t key = flip | (y << 28);
            auto it = even_basis.find(key);
            if (it != even_basis.end()) return it->second;
            MeasurementBasis b;
            b.kind = BasisKind::PairEven;
            b.flip_mask = flip;
            b.y_mask = y;
            b.pivot = pivot;
            b.suffix = pair_basis_suffix(n, flip, y, pivot);
            plan.bases.push_back(std::move(b));
            const int idx = static_cast<int>(plan.bases.size()) - 1;
            even_basis.emplace(key, idx);
            return idx;
        }
        auto it = odd_basis.find(flip);
        if (it != odd_basis.end()) return it->second;
        MeasurementBasis b;
        b.kind = BasisKind::PairOdd;
        b.flip_mask = flip;
        b.y_mask = 0;
        b.pivot = pivot;
        b.suffix = pair_basis_suffix(n, flip, qubit_mask(pivot, n), pivot);
        plan.bases.push_back(std::move(b));
        const int idx = static_cast<int>(plan.bases.size()) - 1;
        odd_basis.emplace(flip, idx);
        return idx;
    };

    auto add_string = [&](const PauliString& p) -> int {
        const std::uint64_t key = letters_key(p);
        auto it = string_index.find(key);
        if (it != string_index.end()) return it->second;
        PlanString ps;
        ps.string = p;
        ps.string.phase = 1.0;
        ps.basis_index = assign_basis(p);
        plan.strings.push_back(std::move(ps));
        const int idx = static_cast<int>(plan.strings.size()) - 1;
        plan.bases[plan.strings[idx].basis_index].covered.push_back(idx);
        string_index.emplace(key, idx);
        return idx;
    };

    for (const PauliTerm& term : h.terms()) add_string(term.string);
    plan.n_hamiltonian_strings = plan.strings.size();

    const auto shift_terms = diagonal_shift_terms(h, w_params);
    plan.gradient_terms.resize(w_params.size());
    for (std::size_t k = 0; k < w_params.size(); ++k) {
        std::unordered_map<int, double> acc;
        for (const DiagonalShiftTerm& st : shift_terms[k]) acc[add_string(st.q)] += st.weight;
        for (const auto& [idx, w] : acc) plan.gradient_terms[k].push_back({idx, w});
        std::sort(plan.gradient_terms[k].begin(), plan.gradient_terms[k].end());
    }
    return plan;
}

std::string MeasurementPlan::to_json() const {
    json j;
    j["n_qubits"] = n_qubits;
    j["circuit_count"] = circuit_count();
    j["n_strings"] = strings.size();
    j["n_hamiltonian_strings"] = n_hamiltonian_strings;
    json jb = json::array();
    for (const MeasurementBasis& b : bases) {
        json e;
        e["kind"] = b.kind == BasisKind::Computational ? "computational"
                    : b.kind == BasisKind::PairEven    ? "pair_even"
                                                       : "pair_odd";
        e["flip_mask"] = b.flip_mask;
        e["y_mask"] = b.y_mask;
        e["pivot"] = b.pivot;
        e["suffix_gates"] = b.suffix.size();
        json cov = json::array();
        for (int idx : b.covered) cov.push_back(strings[idx].string.label());
        e["covers"] = cov;
        jb.push_back(e);
    }
    j["bases"] = jb;
    return j.dump(2);
}

// ---- shot collection --------------------------------------------------------

ShotCollection collect_shots(const Circuit& circuit, const MeasurementPlan& plan,
                             int shots_per_basis, const NoiseSpec& noise, std::uint64_t seed) {
    if (shots_per_basis < 1) throw std::invalid_argument("need at least one shot per basis");
    if (circuit.n_qubits != plan.n_qubits)
        throw std::invalid_argument("circuit and plan qubit counts differ");
    ShotCollection out;
    out.plan = &plan;
    out.shots_per_basis = shots_per_basis;
    const SeedSequence seq(seed);
    for (std::size_t b = 0; b < plan.bases.size(); ++b) {
        Circuit with_suffix = circuit;
        for (const Gate& g : plan.bases[b].suffix) with_suffix.add(g);
        std::vector<std::uint64_t> shots;
        if (!noise.enabled()) {
            const Statevector psi = with_suffix.simulate();
            std::mt19937_64 gen(seq.derive("shot-sample", b));
            shots = sample_indices(psi, shots_per_basis, gen);
        } else {
            shots.reserve(shots_per_basis);
            std::mt19937_64 sampler(seq.derive("shot-sample", b));
            for (int t = 0; t < shots_per_basis; ++t) {
                const Statevector psi = run_noisy_trajectory(
                    with_suffix, noise,
                    seq.derive("trajectory", b * static_cast<std::uint64_t>(shots_per_basis) + t));
                shots.push_back(sample_indices(psi, 1, sampler)[0]);
            }
        }
        out.outcomes.push_back(std::move(shots));
    }
    return out;
}

namespace {

// classical sign carried by the pair estimator at collapsed outcome s0
double pair_kappa(const MeasurementBasis& basis, const PauliString& p, std::uint64_t s0) {
    if (basis.kind == BasisKind::PairEven)
        return parity_sign(s0 & (p.z_mask() ^ p.y_mask()));
    const int y_count = popcount64(p.y_mask());
    const double lead = ((y_count - 1) / 2) % 2 ? -1.0 : 1.0;
    return lead * parity_sign(s0 & p.z_mask());
}

}  // namespace

ShotEstimates reduce_shots(const ShotCollection& shots, const AmplitudeModel& model) {
    check_real_model(model, "shot-mode estimation");
    const MeasurementPlan& plan = *shots.plan;
    const int n = plan.n_qubits;
    const std::vector<cdouble> fc = model.evaluate_all();
    std::vector<double> f(fc.size());
    for (std::size_t s = 0; s < fc.size(); ++s) f[s] = fc[s].real();

    ShotEstimates est;
    const std::size_t T = shots.outcomes[0].size();
    est.n_blocks = static_cast<int>(std::min<std::size_t>(20, T));
    est.string_means.assign(plan.strings.size(), 0.0);
    est.string_blocks.assign(plan.strings.size(), std::vector<double>(est.n_blocks, 0.0));
    est.denom_blocks.assign(est.n_blocks, 0.0);

    for (std::size_t b = 0; b < plan.bases.size(); ++b) {
        const MeasurementBasis& basis = plan.bases[b];
        const auto& outs = shots.outcomes[b];
        est.shots_total += static_cast<long>(outs.size());
        const std::uint64_t pivot_mask =
            basis.pivot >= 0 ? qubit_mask(basis.pivot, n) : 0;
        for (std::size_t t = 0; t < outs.size(); ++t) {
            const std::uint64_t m = outs[t];
            const int j = block_of(t, outs.size(), est.n_blocks);
            if (basis.kind == BasisKind::Computational) {
                const double d = f[m] * f[m];
                est.denom_mean += d;
                est.denom_blocks[j] += d;
                for (int idx : basis.covered) {
                    const PauliString& p = plan.strings[idx].string;
                    const double v = d * parity_sign(m & p.z_mask());
                    est.string_means[idx] += v;
                    est.string_blocks[idx][j] += v;
                }
            } else {
                const double sign_p = (m & pivot_mask) ? -1.0 : 1.0;
                const std::uint64_t s0 = m & ~pivot_mask;
                const std::uint64_t s1 = s0 ^ basis.flip_mask;
                const double base = f[s0] * f[s1] * sign_p;
                for (int idx : basis.covered) {
                    const double v = base * pair_kappa(basis, plan.strings[idx].string, s0);
                    est.string_means[idx] += v;
                    est.string_blocks[idx][j] += v;
                }
            }
        }
        for (int idx : basis.covered)
            est.string_means[idx] /= static_cast<double>(outs.size());
    }
    est.denom_mean /= static_cast<double>(shots.outcomes[0].size());
    return est;
}

EnergyEstimate hybrid_energy_shots(const ShotEstimates& est, const Hamiltonian& h,
                                   const MeasurementPlan& plan) {
    if (est.denom_mean <= 0) throw std::runtime_error("shot denominator vanished");
    const auto& terms = h.terms();
    if (terms.size() != plan.n_hamiltonian_strings)
        throw std::invalid_argument("plan was built for a different operator");

    // jackknife over aligned blocks; every basis contributes its block-j slice
    // block partitions are identical across bases, so leave-one-block-out
    // ratios of sums equal ratios of means
    const int nb = est.n_blocks;
    const std::size_t T = static_cast<std::size_t>(est.shots_total) / plan.bases.size();
    std::vector<double> num_blocks(nb, 0.0), den_blocks(nb, 0.0);
    double num_total = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        num_total += terms[i].coeff * est.string_means[i] * static_cast<double>(T);
        for (int j = 0; j < nb; ++j)
            num_blocks[j] += terms[i].coeff * est.string_blocks[i][j];
    }
    double den_total = est.denom_mean * static_cast<double>(T);
    for (int j = 0; j < nb; ++j) den_blocks[j] = est.denom_blocks[j];

    const RatioJackknife jk = jackknife_ratio(num_blocks, den_blocks, num_total, den_total);
    EnergyEstimate e;
    e.value = jk.value;
    e.std_error = jk.std_error;
    e.shots_used = est.shots_total;
    e.mode = "shots";
    return e;
}

EnergyEstimate hybrid_energy_shots(const Circuit& circuit, const AmplitudeModel& model,
                                   const Hamiltonian& h, int shots_per_basis,
                                   const NoiseSpec& noise, std::uint64_t seed) {
    const MeasurementPlan plan = build_measurement_plan(h);
    const ShotCollection shots = collect_shots(circuit, plan, shots_per_basis, noise, seed);
    return hybrid_energy_shots(reduce_shots(shots, model), h, plan);
}

ModelGradient nn_energy_gradient_shots(const ShotCollection& shots, const AmplitudeModel& model,
                                       const Hamiltonian& h) {
    check_real_model(model, "shot-mode gradients");
    const MeasurementPlan& plan = *shots.plan;
    const int n = plan.n_qubits;
    const auto& terms = h.terms();
    if (terms.size() != plan.n_hamiltonian_strings)
        throw std::invalid_argument("plan was built for a different operator");
    const std::vector<cdouble> fc = model.evaluate_all();
    std::vector<double> f(fc.size());
    for (std::size_t s = 0; s < fc.size(); ++s) f[s] = fc[s].real();

    // per-string coefficient: Hamiltonian weight for term strings, 0 otherwise
    std::vector<double> coeff(plan.strings.size(), 0.0);
    for (std::size_t i = 0; i < terms.size(); ++i) coeff[i] = terms[i].coeff;

    const double T0 = static_cast<double>(shots.outcomes[0].size());
    double num = 0, den = 0;
    std::unordered_map<std::uint64_t, double> up_num, up_den;
    for (std::size_t b = 0; b < plan.bases.size(); ++b) {
        const MeasurementBasis& basis = shots.plan->bases[b];
        const auto& outs = shots.outcomes[b];
        const double Tb = static_cast<double>(outs.size());
        const std::uint64_t pivot_mask = basis.pivot >= 0 ? qubit_mask(basis.pivot, n) : 0;
        for (const std::uint64_t m : outs) {
            if (basis.kind == BasisKind::Computational) {
                den += f[m] * f[m] / T0;
                up_den[m] += 2.0 * f[m] / T0;
                for (int idx : basis.covered) {
                    if (coeff[idx] == 0) continue;
                    const double zsign =
                        parity_sign(m & plan.strings[idx].string.z_mask());
                    num += coeff[idx] * f[m] * f[m] * zsign / Tb;
                    up_num[m] += coeff[idx] * 2.0 * f[m] * zsign / Tb;
                }
            } else {
                const double sign_p = (m & pivot_mask) ? -1.0 : 1.0;
                const std::uint64_t s0 = m & ~pivot_mask;
                const std::uint64_t s1 = s0 ^ basis.flip_mask;
                for (int idx : basis.covered) {
                    if (coeff[idx] == 0) continue;
                    const double k =
                        sign_p * pair_kappa(basis, plan.strings[idx].string, s0);
                    num += coeff[idx] * f[s0] * f[s1] * k / Tb;
                    up_num[s0] += coeff[idx] * f[s1] * k / Tb;
                    up_num[s1] += coeff[idx] * f[s0] * k / Tb;
                }
            }
        }
    }
    if (den <= 0) throw std::runtime_error("shot denominator vanished");
    const double energy = num / den;
    ModelGradient grad = ModelGradient::zeros_like(model);
    std::unordered_map<std::uint64_t, double> total = std::move(up_num);
    for (const auto& [s, d] : up_den) total[s] -= energy * d;
    for (const auto& [s, u] : total) model.accumulate_gradient(s, cdouble(u / den, 0), grad);
    return grad;
}

std::vector<double> w_gradient_shots(const ShotEstimates& est, const MeasurementPlan& plan) {
    if (est.denom_mean <= 0) throw std::runtime_error("shot denominator vanished");
    std::vector<double> grad(plan.gradient_terms.size(), 0.0);
    for (std::size_t k = 0; k < plan.gradient_terms.size(); ++k) {
        double g = 0;
        for (const auto& [idx, w] : plan.gradient_terms[k]) g += w * est.string_means[idx];
        grad[k] = g / est.denom_mean;
    }
    return grad;
}

// ---- parameter-shift and finite differences ---------------------------------

std::vector<double> param_shift_gradient(const Circuit& circuit, const Hamiltonian& h,
                                         const AmplitudeModel* model,
                                         const std::vector<std::string>& names) {
    Circuit work = circuit;
    std::vector<cdouble> fvals;
    if (model) fvals = model->evaluate_all();
    auto energy = [&]() {
        const Statevector psi = work.simulate();
        return model ? hybrid_energy_value(psi, fvals, h) : h.expectation(psi.amps);
    };
    std::vector<double> grad;
    grad.reserve(names.size());
    const double half_pi = std::numbers::pi / 2.0;
    for (const std::string& name : names) {
        int uses = 0;
        for (const Gate& g : circuit.gates) {
            if (g.param != name) continue;
            ++uses;
            if (g.scale != 1.0)
                throw std::invalid_argument("parameter-shift needs unscaled parameters: " + name);
        }
        if (uses != 1)
            throw std::invalid_argument("parameter-shift needs a single gate per parameter: " +
                                        name);
        const double old = work.params.at(name);
        work.bind(name, old + half_pi);
        const double ep = energy();
        work.bind(name, old - half_pi);
        const double em = energy();
        work.bind(name, old);
        grad.push_back(0.5 * (ep - em));
    }
    return grad;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& fn, std::vector<double> at,
    double step) {
    std::vector<double> grad(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double old = at[i];
        at[i] = old + step;
        const double fp = fn(at);
        at[i] = old - step;
        const double fm = fn(at);
        at[i] = old;
        grad[i] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

// ---- descriptive statistics ---------------------------------------------------

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty window");
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
    const double m = mean_of(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size());
}

double cv_statistic(std::span<const double> window) {
    const double m = mean_of(window);
    if (m == 0) throw std::invalid_argument("coefficient of variation undefined at zero mean");
    return std::sqrt(variance_of(window)) / std::abs(m);
}

double model_f2_relative_variance(const AmplitudeModel& model) {
    const std::vector<cdouble> f = model.evaluate_all();
    std::vector<double> f2(f.size());
    for (std::size_t s = 0; s < f.size(); ++s) f2[s] = std::norm(f[s]);
    const double m = mean_of(f2);
    if (m == 0) return 0;
    return variance_of(f2) / (m * m);
}

double f2_distribution_variance(const AmplitudeModel& model, const Statevector& psi) {
    if (model.n_qubits() != psi.n_qubits)
        throw std::invalid_argument("model/state width mismatch");
    const std::vector<cdouble> f = model.evaluate_all();
    double m = 0, m2 = 0;
    for (std::size_t s = 0; s < f.size(); ++s) {
        const double w = std::norm(psi.amps[s]);
        const double f2 = std::norm(f[s]);
        m += w * f2;
        m2 += w * f2 * f2;
    }
    if (m == 0) return 0;
    return (m2 - m * m) / (m * m);
}

int qwc_group_count(const std::vector<PauliString>& strings) {
    std::vector<std::vector<PauliOp>> groups;  // combined letter pattern, I = free
    int count = 0;
    for (const PauliString& p : strings) {
        if (p.is_identity()) continue;
        bool placed = false;
        for (auto& pattern : groups) {
            bool ok = true;
            for (int q = 0; q < p.n_qubits; ++q) {
                const PauliOp a = pattern[q];
                const PauliOp b = p.op(q);
                if (a != PauliOp::I && b != PauliOp::I && a != b) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            for (int q = 0; q < p.n_qubits; ++q)
                if (p.op(q) != PauliOp::I) pattern[q] = p.op(q);
            placed = true;
            break;
        }
        if (!placed) {
            groups.emplace_back(p.ops);
            ++count;
        }
    }
    return count;
}

}  // namespace svqnhe
