// Experiment grid execution: (protocol x mobility model x max speed x seed),
// runs in parallel across a worker pool, merged deterministically by cell key.
#pragma once

#include <string>
#include <vector>

#include "manetsim/metrics.hpp"
#include "manetsim/scenario.hpp"

namespace manet {

struct SweepSpec {
    std::vector<std::string> protocols{"maodv", "odmrp", "admr"};
    std::vector<std::string> models{"rwp", "rpgm", "manhattan"};
    std::vector<double> speeds{1.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5};

    void validate() const;
};

struct SweepOutcome {
    std::vector<RunResult> results;     // cell order: protocol, model, speed, seed
    std::vector<std::string> failures;  // one line per failed cell
};

// Applies (protocol, model, speed, seed) onto the base scenario.
Scenario cell_scenario(const Scenario& base, const std::string& protocol,
                       const std::string& model, double speed, uint64_t seed);

SweepOutcome run_sweep(const Scenario& base, const SweepSpec& spec, int workers);

// Writes runs.csv, aggregate.csv, one series_<protocol>_<model>.csv per pair,
// and failures.txt when any cell failed.
void write_sweep_outputs(const SweepOutcome& outcome, const std::string& out_dir);

} // namespace manet
