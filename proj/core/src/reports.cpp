#include "svqnhe/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace svqnhe {

using json = nlohmann::json;

namespace {

// fixed-width shortest-ish decimal; keeps CSV output locale-free and stable
std::string fmt_double(double x) {
    if (!std::isfinite(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string safe_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

SuiteResult run_suite(const ExperimentSuite& suite) {
    suite.validate();
    SuiteResult result;
    result.suite = suite;
    result.traces.resize(suite.runs.size());
    parallel_for(static_cast<int>(suite.runs.size()),
                 [&](int i) { result.traces[i] = run_config(suite.runs[i]); });
    return result;
}

std::string trace_to_jsonl(const RunTrace& trace) {
    std::string out;
    json meta;
    meta["type"] = "meta";
    meta["run_id"] = trace.run_id;
    meta["method"] = trace.method;
    meta["model"] = trace.model;
    meta["mode"] = trace.mode;
    meta["seed"] = trace.seed;
    meta["e0"] = trace.e0;
    meta["final_energy"] = trace.final_energy;
    meta["shots_total"] = trace.shots_total;
    meta["circuits_per_iteration"] = trace.circuits_per_iteration;
    meta["cv_per_layer"] = trace.cv_per_layer;
    meta["layer_final_energies"] = trace.layer_final_energies;
    out += meta.dump() + "\n";
    for (const TransferRecord& tr : trace.transfers) {
        json j;
        j["type"] = "transfer";
        j["layer"] = tr.layer;
        j["residual"] = tr.residual;
        j["fit_iterations"] = tr.fit_iterations;
        j["energy_before"] = tr.energy_before;
        j["energy_after"] = tr.energy_after;
        j["f2_variance_before"] = tr.f2_variance_before;
        j["f2_variance_after"] = tr.f2_variance_after;
        out += j.dump() + "\n";
    }
    for (const IterationRecord& rec : trace.iterations) {
        json j;
        j["type"] = "iteration";
        j["layer"] = rec.layer;
        j["iteration"] = rec.iteration;
        j["energy"] = rec.energy;
        j["std_error"] = rec.std_error;
        j["shots"] = rec.shots;
        j["circuits"] = rec.circuits;
        j["wall_seconds"] = rec.wall_seconds;
        out += j.dump() + "\n";
    }
    return out;
}

std::string aggregate_csv(const std::vector<RunConfig>& runs,
                          const std::vector<RunTrace>& traces) {
    if (runs.size() != traces.size())
        throw std::invalid_argument("config/trace count mismatch");
    std::string out =
        "method,model,seed,mode,final_energy,E0,rel_error,shots_total,"
        "circuits_per_iter,cv_layer1,cv_layer2\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const RunTrace& t = traces[i];
        out += t.method + "," + t.model + "," + std::to_string(t.seed) + "," + t.mode + ",";
        out += fmt_double(t.final_energy) + ",";
        out += fmt_double(t.e0) + ",";
        const bool have_rel = std::isfinite(t.e0) && t.e0 != 0;
        out += (have_rel ? fmt_double((t.final_energy - t.e0) / std::abs(t.e0)) : "");
        out += "," + std::to_string(t.shots_total) + "," +
               std::to_string(t.circuits_per_iteration) + ",";
        out += (!t.cv_per_layer.empty() ? fmt_double(t.cv_per_layer[0]) : "");
        out += ",";
        out += (t.cv_per_layer.size() > 1 ? fmt_double(t.cv_per_layer[1]) : "");
        out += "\n";
    }
    return out;
}

std::string metrics_table(const ExperimentSuite& suite, const std::vector<RunTrace>& traces) {
    if (suite.baseline.empty())
        return "no baseline designated; R-metrics unavailable\n";

    std::map<std::string, std::vector<const RunTrace*>> by_model;
    for (const RunTrace& t : traces) by_model[t.model].push_back(&t);

    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-14s %5s %5s %10s %10s %9s %9s\n", "model", "method",
                  "n", "n0", "R_MAE", "R_Var", "success", "success0");
    out += line;

    for (const auto& [model, group] : by_model) {
        std::vector<RunTrace> base;
        std::map<std::string, std::vector<RunTrace>> methods;
        for (const RunTrace* t : group) {
            if (t->method == suite.baseline)
                base.push_back(*t);
            else
                methods[t->method].push_back(*t);
        }
        if (base.empty()) {
            out += model + ": no '" + suite.baseline + "' runs, metrics skipped\n";
            continue;
        }
        const double e0 = base.front().e0;
        if (!std::isfinite(e0)) {
            out += model + ": ground energy unavailable, metrics skipped\n";
            continue;
        }
        for (const auto& [method, cand] : methods) {
            try {
                const MetricsReport rep = compute_metrics(cand, base, e0);
                std::snprintf(line, sizeof line, "%-20s %-14s %5zu %5zu %10.4f %10.4f %9.3f %9.3f\n",
                              model.c_str(), method.c_str(), cand.size(), base.size(), rep.r_mae,
                              rep.r_var, rep.success_candidate, rep.success_baseline);
                out += line;
            } catch (const std::exception& e) {
                out += model + " " + method + ": metrics unavailable (" + e.what() + ")\n";
            }
        }
    }
    return out;
}

void write_reports(const SuiteResult& result) {
    const std::filesystem::path dir(result.suite.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string());

    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        const RunTrace& t = result.traces[i];
        write_file(dir / (safe_filename(t.run_id) + ".jsonl"), trace_to_jsonl(t));
    }
    write_file(dir / "aggregate.csv", aggregate_csv(result.suite.runs, result.traces));
    write_file(dir / "metrics.txt", metrics_table(result.suite, result.traces));
}

}  // namespace svqnhe
