#include "svqnhe/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace svqnhe {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
const cdouble kI{0.0, 1.0};

void check_qubit(int q, int n) {
    if (q < 0 || q >= n) throw std::out_of_range("qubit index out of range");
}

struct Mat2 {
    cdouble m00, m01, m10, m11;
};

Mat2 single_qubit_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case GateKind::H: return {r, r, r, -r};
        case GateKind::X: return {0, 1, 1, 0};
        case GateKind::Y: return {0, -kI, kI, 0};
        case GateKind::Z: return {1, 0, 0, -1};
        case GateKind::S: return {1, 0, 0, kI};
        case GateKind::Sdg: return {1, 0, 0, -kI};
        case GateKind::Rx: return {c, -kI * s, -kI * s, c};
        case GateKind::Ry: return {c, -s, s, c};
        case GateKind::Rz: return {cdouble{c, -s}, 0, 0, cdouble{c, s}};
        case GateKind::XP: return single_qubit_matrix(GateKind::Rx, kHalfPi);
        case GateKind::XM: return single_qubit_matrix(GateKind::Rx, -kHalfPi);
        case GateKind::YP: return single_qubit_matrix(GateKind::Ry, kHalfPi);
        case GateKind::YM: return single_qubit_matrix(GateKind::Ry, -kHalfPi);
        default: throw std::invalid_argument("not a single-qubit gate kind");
    }
}

void apply_single(Statevector& psi, int q, const Mat2& m) {
    const std::uint64_t dim = std::uint64_t{1} << psi.n_qubits;
    const std::uint64_t mask = qubit_mask(q, psi.n_qubits);
    for (std::uint64_t s = 0; s < dim; ++s) {
        if (s & mask) continue;
        const cdouble a0 = psi.amps[s];
        const cdouble a1 = psi.amps[s | mask];
        psi.amps[s] = m.m00 * a0 + m.m01 * a1;
        psi.amps[s | mask] = m.m10 * a0 + m.m11 * a1;
    }
}

}  // namespace

Statevector Statevector::zero(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw std::invalid_argument("statevector needs 1 <= n_qubits <= 14");
    Statevector psi;
    psi.n_qubits = n_qubits;
    psi.amps.assign(std::uint64_t{1} << n_qubits, cdouble{0.0, 0.0});
    psi.amps[0] = 1.0;
    return psi;
}

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

void Statevector::normalize() {
    const double n = norm();
    if (n < 1e-300) throw std::runtime_error("cannot normalize a zero state");
    for (auto& a : amps) a /= n;
}

std::vector<double> Statevector::probabilities() const {
    std::vector<double> p(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) p[i] = std::norm(amps[i]);
    return p;
}

bool gate_is_two_qubit(GateKind k) {
    return k == GateKind::Rzz || k == GateKind::CNOT || k == GateKind::CZ;
}

bool gate_takes_angle(GateKind k) {
    return k == GateKind::Rx || k == GateKind::Ry || k == GateKind::Rz || k == GateKind::Rzz;
}

bool gate_is_diagonal(GateKind k) {
    switch (k) {
        case GateKind::Z:
        case GateKind::S:
        case GateKind::Sdg:
        case GateKind::Rz:
        case GateKind::Rzz:
        case GateKind::CZ: return true;
        default: return false;
    }
}

std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "Sdg";
        case GateKind::Rx: return "Rx";
        case GateKind::Ry: return "Ry";
        case GateKind::Rz: return "Rz";
        case GateKind::Rzz: return "Rzz";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::XP: return "XP";
        case GateKind::XM: return "XM";
        case GateKind::YP: return "YP";
        default: return "YM";
    }
}

GateKind gate_kind_from_name(const std::string& name) {
    static const std::map<std::string, GateKind> table = {
        {"H", GateKind::H},     {"X", GateKind::X},     {"Y", GateKind::Y},
        {"Z", GateKind::Z},     {"S", GateKind::S},     {"Sdg", GateKind::Sdg},
        {"Rx", GateKind::Rx},   {"Ry", GateKind::Ry},   {"Rz", GateKind::Rz},
        {"Rzz", GateKind::Rzz}, {"CNOT", GateKind::CNOT}, {"CZ", GateKind::CZ},
        {"XP", GateKind::XP},   {"XM", GateKind::XM},   {"YP", GateKind::YP},
        {"YM", GateKind::YM},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown gate kind '" + name + "'");
    return it->second;
}

void apply_gate(Statevector& psi, GateKind kind, int q0, int q1, double angle) {
    const int n = psi.n_qubits;
    check_qubit(q0, n);
    if (gate_takes_angle(kind) && !std::isfinite(angle))
        throw std::invalid_argument("non-finite gate angle");
    if (!gate_is_two_qubit(kind)) {
        apply_single(psi, q0, single_qubit_matrix(kind, angle));
        return;
    }
    check_qubit(q1, n);
    if (q0 == q1) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    const std::uint64_t dim = std::uint64_t{1} << n;
    const std::uint64_t m0 = qubit_mask(q0, n);
    const std::uint64_t m1 = qubit_mask(q1, n);
    switch (kind) {
        case GateKind::CZ:
            for (std::uint64_t s = 0; s < dim; ++s)
                if ((s & m0) && (s & m1)) psi.amps[s] = -psi.amps[s];
            break;
        case GateKind::CNOT:
            // q0 controls, q1 is the target
            for (std::uint64_t s = 0; s < dim; ++s)
                if ((s & m0) && !(s & m1)) std::swap(psi.amps[s], psi.amps[s | m1]);
            break;
        case GateKind::Rzz: {
            const cdouble same{std::cos(angle / 2.0), -std::sin(angle / 2.0)};
            const cdouble diff = std::conj(same);
            for (std::uint64_t s = 0; s < dim; ++s)
                psi.amps[s] *= (((s & m0) != 0) == ((s & m1) != 0)) ? same : diff;
            break;
        }
        default: throw std::invalid_argument("unhandled two-qubit gate");
    }
}

void Circuit::add(Gate g) {
    if (!g.param.empty() && !gate_takes_angle(g.kind))
        throw std::invalid_argument("parameter attached to a fixed gate kind");
    check_qubit(g.q0, n_qubits);
    if (gate_is_two_qubit(g.kind)) {
        check_qubit(g.q1, n_qubits);
        if (g.q0 == g.q1) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    if (!g.param.empty()) params.try_emplace(g.param, 0.0);
    gates.push_back(std::move(g));
}

void Circuit::add_fixed(GateKind kind, int q0, int q1, double angle) {
    Gate g;
    g.kind = kind;
    g.q0 = q0;
    g.q1 = q1;
    g.angle = angle;
    add(std::move(g));
}

void Circuit::add_param(GateKind kind, int q0, int q1, const std::string& param, double scale) {
    if (param.empty()) throw std::invalid_argument("empty parameter name");
    Gate g;
    g.kind = kind;
    g.q0 = q0;
    g.q1 = q1;
    g.param = param;
    g.scale = scale;
    add(std::move(g));
}

bool Circuit::has_param(const std::string& name) const { return params.count(name) != 0; }

void Circuit::bind(const std::string& name, double value) {
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("unknown parameter '" + name + "'");
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite parameter value");
    it->second = value;
}

void Circuit::bind_all(const std::map<std::string, double>& values) {
    for (const auto& [k, v] : values) bind(k, v);
}

std::vector<std::string> Circuit::param_names() const {
    std::vector<std::string> names;
    names.reserve(params.size());
    for (const auto& [k, v] : params) names.push_back(k);
    return names;
}

double Circuit::resolved_angle(const Gate& g) const {
    if (g.param.empty()) return g.angle;
    auto it = params.find(g.param);
    if (it == params.end())
        throw std::runtime_error("unbound parameter '" + g.param + "' at simulation time");
    return g.scale * it->second;
}

void Circuit::apply_to(Statevector& psi) const {
    if (psi.n_qubits != n_qubits) throw std::invalid_argument("circuit/state size mismatch");
    for (const auto& g : gates) apply_gate(psi, g.kind, g.q0, g.q1, resolved_angle(g));
}

Statevector Circuit::simulate() const {
    Statevector psi = Statevector::zero(n_qubits);
    apply_to(psi);
    return psi;
}

std::string Circuit::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits;
    auto& arr = j["gates"] = nlohmann::json::array();
    for (const auto& g : gates) {
        nlohmann::json jg;
        jg["kind"] = gate_kind_name(g.kind);
        if (gate_is_two_qubit(g.kind))
            jg["q"] = {g.q0, g.q1};
        else
            jg["q"] = {g.q0};
        if (!g.param.empty()) {
            jg["param"] = g.param;
            if (g.scale != 1.0) jg["scale"] = g.scale;
        } else if (gate_takes_angle(g.kind)) {
            jg["angle"] = g.angle;
        }
        arr.push_back(std::move(jg));
    }
    j["params"] = params;
    return j.dump(2);
}

Circuit Circuit::from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        Circuit c(j.at("n_qubits").get<int>());
        for (const auto& jg : j.at("gates")) {
            Gate g;
            g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
            const auto& q = jg.at("q");
            g.q0 = q.at(0).get<int>();
            if (q.size() > 1) g.q1 = q.at(1).get<int>();
            if (jg.contains("param")) {
                g.param = jg["param"].get<std::string>();
                g.scale = jg.value("scale", 1.0);
            } else if (jg.contains("angle")) {
                g.angle = jg["angle"].get<double>();
            }
            c.add(std::move(g));
        }
        if (j.contains("params"))
            for (const auto& [k, v] : j["params"].items()) {
                c.params.try_emplace(k, 0.0);
                c.bind(k, v.get<double>());
            }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("circuit JSON: ") + e.what());
    }
}

Statevector run_noisy_trajectory(const Circuit& c, const NoiseSpec& noise, std::uint64_t seed) {
    if (noise.p1 < 0.0 || noise.p1 > 1.0 || noise.p2 < 0.0 || noise.p2 > 1.0)
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pauli_pick(0, 3);
    Statevector psi = Statevector::zero(c.n_qubits);
    auto kick = [&](int q, double p) {
        if (p <= 0.0 || unif(gen) >= p) return;
        switch (pauli_pick(gen)) {
            case 1: apply_gate(psi, GateKind::X, q); break;
            case 2: apply_gate(psi, GateKind::Y, q); break;
            case 3: apply_gate(psi, GateKind::Z, q); break;
            default: break;  // identity branch completes the {I,X,Y,Z} mix
        }
    };
    for (const auto& g : c.gates) {
        apply_gate(psi, g.kind, g.q0, g.q1, c.resolved_angle(g));
        if (gate_is_two_qubit(g.kind)) {
            kick(g.q0, noise.p2);
            kick(g.q1, noise.p2);
        } else {
            kick(g.q0, noise.p1);
        }
    }
    return psi;
}

std::vector<std::uint64_t> sample_indices(const Statevector& psi, int n_samples,
                                          std::mt19937_64& gen) {
    if (n_samples < 0) throw std::invalid_argument("negative sample count");
    std::vector<double> cumulative(psi.amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.amps.size(); ++i) {
        acc += std::norm(psi.amps[i]);
        cumulative[i] = acc;
    }
    if (acc < 1e-300) throw std::runtime_error("cannot sample from a zero state");
    std::uniform_real_distribution<double> unif(0.0, acc);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n_samples));
    for (auto& s : out) {
        const double u = unif(gen);
        s = static_cast<std::uint64_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (s >= cumulative.size()) s = cumulative.size() - 1;
    }
    return out;
}

std::vector<std::string> sample_bitstrings(const Statevector& psi, int n_samples,
                                           std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto idx = sample_indices(psi, n_samples, gen);
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto s : idx) out.push_back(to_bitstring(s, psi.n_qubits));
    return out;
}

cdouble state_overlap(const Statevector& a, const Statevector& b) {
    if (a.n_qubits != b.n_qubits) throw std::invalid_argument("state size mismatch");
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

}  // namespace svqnhe
