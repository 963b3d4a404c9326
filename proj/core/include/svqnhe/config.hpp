// config.hpp: JSON experiment-suite configuration.
//
// Schema (version "v1"): a suite object holds version, name, output_dir, an
// optional baseline method designation, and a runs array. Each runs entry
// carries RunConfig fields plus an optional "seeds" list that expands into
// one run per seed with "-s<seed>" appended to the id. Unknown keys are
// rejected so typos fail loudly instead of silently using defaults.
#pragma once

#include <string>
#include <vector>

#include "svqnhe/driver.hpp"

namespace svqnhe {

struct ExperimentSuite {
    std::string version = "v1";
    std::string name;
    std::string output_dir = "out";
    std::string baseline;  // method whose traces anchor the R-metrics; may be empty
    std::vector<RunConfig> runs;  // seed-expanded, ids unique

    void validate() const;  // throws std::invalid_argument
};

// Single-run (de)serialization; round-trips field-for-field.
std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

// Suite parsing with seed expansion. All failure modes (bad JSON, wrong
// version, unknown key, bad value) throw std::invalid_argument with a message
// naming the offending field.
ExperimentSuite parse_suite(const std::string& text);
std::string serialize_suite(const ExperimentSuite& suite);

}  // namespace svqnhe
