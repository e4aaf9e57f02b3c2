#pragma once

#include <string>
#include <vector>

#include "defplan/evaluate.hpp"

namespace defplan {

// Runs every (trial, planner) K-test from a manifest and writes one CSV per
// pair plus summary.json and run_metadata.json under out_dir. Relative
// dataset paths resolve against the manifest's directory. Returns the
// reports in trial-major order.
std::vector<ScoreReport> run_experiment(const std::string& manifest_path,
                                        const std::vector<std::string>& planners,
                                        const RunConfig& config, const std::string& out_dir);

std::string report_csv_path(const std::string& out_dir, const std::string& trial,
                            const std::string& planner);

}  // namespace defplan
