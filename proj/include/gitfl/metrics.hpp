#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitfl/config.hpp"
#include "gitfl/orchestrator.hpp"

namespace gitfl {

inline constexpr const char* kMetricsHeader =
    "virtual_time,event_index,master_loss,master_accuracy,min_version,"
    "max_version,mean_version,comm_count";

void write_metrics(const RunReport& report, const std::string& path);
std::vector<MetricRow> read_metrics(const std::string& path);

// First virtual time whose master_accuracy >= target; nullopt if never.
std::optional<double> time_to_accuracy(const std::vector<MetricRow>& rows,
                                       double target);
std::optional<long> comm_to_accuracy(const std::vector<MetricRow>& rows,
                                     double target);

struct CellSummary {
    std::string cell;
    int runs = 0;
    double mean_final_accuracy = 0.0;
    double stdev_final_accuracy = 0.0;
    int reached_target = 0;
    double mean_time_to_target = 0.0;  // over runs that reached it
    double mean_comm_to_target = 0.0;
};

std::vector<CellSummary> summarize_metrics(
    const std::vector<std::pair<std::string, std::vector<MetricRow>>>& per_run,
    double target);

// Executes every run in the spec, writing one metrics file per run and a
// summary.txt per experiment. Returns 0 iff all runs completed.
int run_experiment(const ExperimentSpec& spec);

}  // namespace gitfl
