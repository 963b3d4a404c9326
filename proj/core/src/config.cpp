#include "svqnhe/config.hpp"

#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace svqnhe {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config field '" + where + "': " + what);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) bad_field(where + "." + key, "unknown key");
}

template <typename T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_field(where + "." + key, e.what());
    }
}

json model_to_json(const ModelSpec& m) {
    return json{{"name", m.name}, {"n", m.n},       {"rows", m.rows},
                {"cols", m.cols}, {"j1", m.j1},     {"j2", m.j2},
                {"delta1", m.delta1}, {"delta2", m.delta2}, {"field", m.field},
                {"j", m.j},       {"h", m.h},       {"g", m.g}};
}

ModelSpec model_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) bad_field(where, "model must be an object");
    reject_unknown_keys(j, {"name", "n", "rows", "cols", "j1", "j2", "delta1", "delta2",
                            "field", "j", "h", "g"},
                        where);
    ModelSpec m;
    read_into(j, "name", m.name, where);
    read_into(j, "n", m.n, where);
    read_into(j, "rows", m.rows, where);
    read_into(j, "cols", m.cols, where);
    read_into(j, "j1", m.j1, where);
    read_into(j, "j2", m.j2, where);
    read_into(j, "delta1", m.delta1, where);
    read_into(j, "delta2", m.delta2, where);
    read_into(j, "field", m.field, where);
    read_into(j, "j", m.j, where);
    read_into(j, "h", m.h, where);
    read_into(j, "g", m.g, where);
    return m;
}

const std::set<std::string> kRunKeys = {
    "id",          "method",        "model",          "ansatz",
    "ansatz_reps", "layers",        "mode",           "noise",
    "seed",        "seeds",         "max_iters_per_layer", "eps_conv",
    "n_samples",   "noise_trajectories", "shots_per_basis", "nn_hidden",
    "nn_lr",       "w_lr",          "final_layer_complex", "cv_window",
    "transfer_tolerance", "transfer_probes"};

// Reads every RunConfig field except the seed handling, which differs between
// the single-run and suite paths.
RunConfig run_fields_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) bad_field(where, "run must be an object");
    reject_unknown_keys(j, kRunKeys, where);
    RunConfig cfg;
    read_into(j, "id", cfg.id, where);
    if (j.contains("method")) {
        std::string m;
        read_into(j, "method", m, where);
        try {
            cfg.method = method_from_name(m);
        } catch (const std::exception& e) {
            bad_field(where + ".method", e.what());
        }
    }
    if (j.contains("model")) cfg.model = model_from_json(j.at("model"), where + ".model");
    read_into(j, "ansatz", cfg.ansatz, where);
    read_into(j, "ansatz_reps", cfg.ansatz_reps, where);
    read_into(j, "layers", cfg.layers, where);
    if (j.contains("mode")) {
        std::string m;
        read_into(j, "mode", m, where);
        try {
            cfg.mode = mode_from_name(m);
        } catch (const std::exception& e) {
            bad_field(where + ".mode", e.what());
        }
    }
    if (j.contains("noise")) {
        const json& jn = j.at("noise");
        if (!jn.is_object()) bad_field(where + ".noise", "must be an object");
        reject_unknown_keys(jn, {"p1", "p2"}, where + ".noise");
        read_into(jn, "p1", cfg.noise.p1, where + ".noise");
        read_into(jn, "p2", cfg.noise.p2, where + ".noise");
    }
    read_into(j, "max_iters_per_layer", cfg.max_iters_per_layer, where);
    read_into(j, "eps_conv", cfg.eps_conv, where);
    read_into(j, "n_samples", cfg.n_samples, where);
    read_into(j, "noise_trajectories", cfg.noise_trajectories, where);
    read_into(j, "shots_per_basis", cfg.shots_per_basis, where);
    read_into(j, "nn_hidden", cfg.nn_hidden, where);
    read_into(j, "nn_lr", cfg.nn_lr, where);
    read_into(j, "w_lr", cfg.w_lr, where);
    read_into(j, "final_layer_complex", cfg.final_layer_complex, where);
    read_into(j, "cv_window", cfg.cv_window, where);
    read_into(j, "transfer_tolerance", cfg.transfer_tolerance, where);
    read_into(j, "transfer_probes", cfg.transfer_probes, where);
    return cfg;
}

json run_to_json_object(const RunConfig& cfg) {
    json j;
    j["id"] = cfg.id;
    j["method"] = method_name(cfg.method);
    j["model"] = model_to_json(cfg.model);
    j["ansatz"] = cfg.ansatz;
    j["ansatz_reps"] = cfg.ansatz_reps;
    j["layers"] = cfg.layers;
    j["mode"] = mode_name(cfg.mode);
    j["noise"] = json{{"p1", cfg.noise.p1}, {"p2", cfg.noise.p2}};
    j["seed"] = cfg.seed;
    j["max_iters_per_layer"] = cfg.max_iters_per_layer;
    j["eps_conv"] = cfg.eps_conv;
    j["n_samples"] = cfg.n_samples;
    j["noise_trajectories"] = cfg.noise_trajectories;
    j["shots_per_basis"] = cfg.shots_per_basis;
    j["nn_hidden"] = cfg.nn_hidden;
    j["nn_lr"] = cfg.nn_lr;
    j["w_lr"] = cfg.w_lr;
    j["final_layer_complex"] = cfg.final_layer_complex;
    j["cv_window"] = cfg.cv_window;
    j["transfer_tolerance"] = cfg.transfer_tolerance;
    j["transfer_probes"] = cfg.transfer_probes;
    return j;
}

}  // namespace

void ExperimentSuite::validate() const {
    if (version != "v1") throw std::invalid_argument("unsupported config version '" + version + "'");
    std::set<std::string> ids;
    for (const RunConfig& run : runs) {
        if (run.id.empty()) throw std::invalid_argument("every run needs a non-empty id");
        if (!ids.insert(run.id).second)
            throw std::invalid_argument("duplicate run id '" + run.id + "'");
        run.validate();
    }
    if (!baseline.empty()) method_from_name(baseline);
}

std::string run_config_to_json(const RunConfig& cfg) { return run_to_json_object(cfg).dump(2); }

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("run config is not valid JSON: ") + e.what());
    }
    RunConfig cfg = run_fields_from_json(j, "run");
    if (j.contains("seeds")) bad_field("run.seeds", "a single run takes 'seed', not 'seeds'");
    read_into(j, "seed", cfg.seed, "run");
    return cfg;
}

ExperimentSuite parse_suite(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("suite config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("suite config must be a JSON object");
    reject_unknown_keys(j, {"version", "name", "output_dir", "baseline", "runs"}, "suite");

    ExperimentSuite suite;
    read_into(j, "version", suite.version, "suite");
    read_into(j, "name", suite.name, "suite");
    read_into(j, "output_dir", suite.output_dir, "suite");
    read_into(j, "baseline", suite.baseline, "suite");

    if (j.contains("runs")) {
        const json& jr = j.at("runs");
        if (!jr.is_array()) bad_field("suite.runs", "must be an array");
        for (std::size_t i = 0; i < jr.size(); ++i) {
            const std::string where = "suite.runs[" + std::to_string(i) + "]";
            const json& entry = jr.at(i);
            RunConfig base = run_fields_from_json(entry, where);
            if (base.id.empty()) bad_field(where + ".id", "missing or empty");
            if (entry.contains("seed") && entry.contains("seeds"))
                bad_field(where, "'seed' and 'seeds' are mutually exclusive");
            if (entry.contains("seeds")) {
                std::vector<std::uint64_t> seeds;
                read_into(entry, "seeds", seeds, where);
                if (seeds.empty()) bad_field(where + ".seeds", "must not be empty");
                std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
                if (unique.size() != seeds.size()) bad_field(where + ".seeds", "duplicate seed");
                for (std::uint64_t s : seeds) {
                    RunConfig cfg = base;
                    cfg.seed = s;
                    cfg.id = base.id + "-s" + std::to_string(s);
                    suite.runs.push_back(std::move(cfg));
                }
            } else {
                read_into(entry, "seed", base.seed, where);
                suite.runs.push_back(std::move(base));
            }
        }
    }
    try {
        suite.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("suite config invalid: ") + e.what());
    }
    return suite;
}

std::string serialize_suite(const ExperimentSuite& suite) {
    json j;
    j["version"] = suite.version;
    j["name"] = suite.name;
    j["output_dir"] = suite.output_dir;
    j["baseline"] = suite.baseline;
    json jr = json::array();
    for (const RunConfig& run : suite.runs) jr.push_back(run_to_json_object(run));
    j["runs"] = jr;
    return j.dump(2);
}

}  // namespace svqnhe
