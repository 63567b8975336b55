// Experiment dispatch behind the CLI: each command runs, writes series.csv /
// summary.json (and optionally final_state.json) under out_dir, and returns
// the summary document.
#pragma once

#include <string>

#include "kdv/config.hpp"

namespace kdv {

struct RunResult {
    std::string summary_json;
    bool checks_passed = true;  // verify / gated experiments
};

// name in {simulate, invariants, nudge, couple, ensemble, deterministic,
// verify, calibrate-N}.  Throws Error on validation problems; on blow-up the
// summary is written with the failure time before BlowupError is rethrown.
RunResult run_command(const std::string& name, const RunConfig& cfg, const std::string& out_dir,
                      int threads);

// Built-in analytic oracle suite (the `verify` command).  Appends one line
// per oracle to `report`; returns the number of failures.
struct OracleResult {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};
std::vector<OracleResult> run_verify_suite();

}  // namespace kdv
