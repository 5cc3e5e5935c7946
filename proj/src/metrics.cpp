#include "gitfl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gitfl {

void write_metrics(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics file: " + path);
    out << kMetricsHeader << "\n";
    char buf[256];
    for (const MetricRow& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%ld,%.17g,%.17g,%ld,%ld,%.17g,%ld\n",
                      r.virtual_time, r.event_index, r.master_loss,
                      r.master_accuracy, r.min_version, r.max_version,
                      r.mean_version, r.comm_count);
        out << buf;
    }
}

std::vector<MetricRow> read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != kMetricsHeader) {
        throw std::runtime_error("unexpected metrics header in " + path);
    }
    std::vector<MetricRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        MetricRow r;
        if (std::sscanf(line.c_str(), "%lg,%ld,%lg,%lg,%ld,%ld,%lg,%ld",
                        &r.virtual_time, &r.event_index, &r.master_loss,
                        &r.master_accuracy, &r.min_version, &r.max_version,
                        &r.mean_version, &r.comm_count) != 8) {
            throw std::runtime_error("bad metrics row in " + path + ": " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

std::optional<double> time_to_accuracy(const std::vector<MetricRow>& rows,
                                       double target) {
    for (const MetricRow& r : rows) {
        if (r.master_accuracy >= target) return r.virtual_time;
    }
    return std::nullopt;
}

std::optional<long> comm_to_accuracy(const std::vector<MetricRow>& rows,
                                     double target) {
    for (const MetricRow& r : rows) {
        if (r.master_accuracy >= target) return r.comm_count;
    }
    return std::nullopt;
}

std::vector<CellSummary> summarize_metrics(
    const std::vector<std::pair<std::string, std::vector<MetricRow>>>& per_run,
    double target) {
    std::map<std::string, std::vector<const std::vector<MetricRow>*>> cells;
    for (const auto& [cell, rows] : per_run) cells[cell].push_back(&rows);

    std::vector<CellSummary> out;
    for (const auto& [cell, runs] : cells) {
        CellSummary s;
        s.cell = cell;
        s.runs = static_cast<int>(runs.size());
        double sum = 0.0, sq = 0.0, tsum = 0.0, csum = 0.0;
        for (const auto* rows : runs) {
            const double acc = rows->empty() ? 0.0 : rows->back().master_accuracy;
            sum += acc;
            sq += acc * acc;
            if (target > 0.0) {
                if (auto t = time_to_accuracy(*rows, target)) {
                    s.reached_target += 1;
                    tsum += *t;
                    csum += static_cast<double>(*comm_to_accuracy(*rows, target));
                }
            }
        }
        s.mean_final_accuracy = sum / s.runs;
        const double var =
            s.runs > 1 ? (sq - sum * sum / s.runs) / (s.runs - 1) : 0.0;
        s.stdev_final_accuracy = std::sqrt(std::max(var, 0.0));
        if (s.reached_target > 0) {
            s.mean_time_to_target = tsum / s.reached_target;
            s.mean_comm_to_target = csum / s.reached_target;
        }
        out.push_back(s);
    }
    return out;
}

int run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    std::string out_dir = spec.output_dir;
    if (const char* env = std::getenv("GITFL_OUT_DIR")) out_dir = env;
    fs::create_directories(out_dir);

    std::vector<std::pair<std::string, std::vector<MetricRow>>> per_run;
    int failures = 0;
    for (const NamedRun& nr : spec.runs) {
        try {
            const RunReport report = run(nr.config);
            const std::string path = out_dir + "/" + nr.name + ".csv";
            write_metrics(report, path);
            per_run.emplace_back(nr.cell, report.rows);
            std::cout << nr.name << ": final_accuracy="
                      << (report.rows.empty() ? 0.0
                                              : report.rows.back().master_accuracy)
                      << "\n";
        } catch (const std::exception& e) {
            std::cerr << nr.name << ": FAILED: " << e.what() << "\n";
            ++failures;
        }
    }

    std::ofstream summary(out_dir + "/summary.txt");
    summary << "cell,runs,mean_final_accuracy,stdev_final_accuracy,"
               "reached_target,mean_time_to_target,mean_comm_to_target\n";
    char buf[512];
    for (const CellSummary& s :
         summarize_metrics(per_run, spec.target_accuracy)) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%d,%.17g,%.17g\n",
                      s.cell.c_str(), s.runs, s.mean_final_accuracy,
                      s.stdev_final_accuracy, s.reached_target,
                      s.mean_time_to_target, s.mean_comm_to_target);
        summary << buf;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace gitfl
