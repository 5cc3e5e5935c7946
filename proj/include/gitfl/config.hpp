#pragma once

#include <string>
#include <vector>

#include "gitfl/orchestrator.hpp"

namespace gitfl {

struct NamedRun {
    std::string name;  // unique per run, used for the metrics file name
    RunConfig config;
    std::string cell;  // grid cell id (name minus the seed), for summaries
};

struct ExperimentSpec {
    std::vector<NamedRun> runs;
    std::string output_dir = "out";
    int repeats = 1;
    double target_accuracy = 0.0;  // 0 = no time-to-target column
};

// Flat key=value text with optional [section] headers and # comments.
// Comma-separated values for algorithm/selector/alpha/preset span a grid;
// repeats=R expands seeds base..base+R-1. Unknown keys are hard errors.
ExperimentSpec load_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text, const std::string& origin);

}  // namespace gitfl
