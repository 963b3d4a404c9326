// reports.hpp: suite execution and result persistence.
//
// One JSONL file per run (a meta line, the transfer records, then every
// iteration), one aggregate CSV over the whole suite, and a plain-text
// metrics table. The CSV is a pure function of configs and traces, so
// rerunning an unchanged suite reproduces it byte for byte.
#pragma once

#include <string>
#include <vector>

#include "svqnhe/config.hpp"
#include "svqnhe/driver.hpp"

namespace svqnhe {

struct SuiteResult {
    ExperimentSuite suite;
    std::vector<RunTrace> traces;  // aligned with suite.runs
};

// Executes every run on the shared worker pool. Does not touch the filesystem.
SuiteResult run_suite(const ExperimentSuite& suite);

std::string trace_to_jsonl(const RunTrace& trace);

// Columns: method, model, seed, mode, final_energy, E0, rel_error,
// shots_total, circuits_per_iter, cv_layer1, cv_layer2. rel_error is signed:
// (final_energy - E0) / |E0|. Unavailable values render as empty cells.
std::string aggregate_csv(const std::vector<RunConfig>& runs,
                          const std::vector<RunTrace>& traces);

// R_MAE / R_Var / success per (model, method) against the suite's designated
// baseline method on the same model.
std::string metrics_table(const ExperimentSuite& suite, const std::vector<RunTrace>& traces);

// Writes <output_dir>/<run_id>.jsonl per run plus aggregate.csv and
// metrics.txt. Throws std::runtime_error when the directory cannot be
// created or written.
void write_reports(const SuiteResult& result);

}  // namespace svqnhe
