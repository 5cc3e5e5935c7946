// Experiment runner for the GitFL simulator.
//
//   gitfl_sim run <config>                 execute a sweep, write CSV metrics
//   gitfl_sim summarize <dir> --target A   time/comm-to-target report
//   gitfl_sim partition-stats <config>     per-client label histograms

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "gitfl/config.hpp"
#include "gitfl/metrics.hpp"
#include "gitfl/orchestrator.hpp"

namespace fs = std::filesystem;

namespace {

int usage() {
    std::cerr << "usage:\n"
              << "  gitfl_sim run <config-path>\n"
              << "  gitfl_sim summarize <metrics-dir> --target <accuracy>\n"
              << "  gitfl_sim partition-stats <config-path>\n";
    return 2;
}

int cmd_run(const std::string& path) {
    const gitfl::ExperimentSpec spec = gitfl::load_config(path);
    return gitfl::run_experiment(spec);
}

int cmd_summarize(const std::string& dir, double target) {
    std::vector<std::pair<std::string, std::vector<gitfl::MetricRow>>> per_run;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::string cell = file.stem().string();
        const std::size_t pos = cell.rfind("_seed");
        if (pos != std::string::npos) cell.resize(pos);
        per_run.emplace_back(cell, gitfl::read_metrics(file.string()));
    }
    if (per_run.empty()) {
        std::cerr << "no metrics files under " << dir << "\n";
        return 1;
    }
    std::printf("%-40s %5s %22s %8s %18s %18s\n", "cell", "runs", "final_acc",
                "reached", "time_to_target", "comm_to_target");
    for (const auto& s : gitfl::summarize_metrics(per_run, target)) {
        std::printf("%-40s %5d %12.4f +- %6.4f %5d/%-2d", s.cell.c_str(), s.runs,
                    s.mean_final_accuracy, s.stdev_final_accuracy,
                    s.reached_target, s.runs);
        if (s.reached_target > 0) {
            std::printf(" %17.1f %17.1f\n", s.mean_time_to_target,
                        s.mean_comm_to_target);
        } else {
            std::printf("%18s %18s\n", "-", "-");
        }
    }
    return 0;
}

int cmd_partition_stats(const std::string& path) {
    const gitfl::ExperimentSpec spec = gitfl::load_config(path);
    if (spec.runs.empty()) {
        std::cerr << "config produced no runs\n";
        return 1;
    }
    const gitfl::RunConfig& cfg = spec.runs.front().config;
    const gitfl::SimEnv env = gitfl::build_env(cfg);
    const int classes = env.test.classification ? env.test.classes : 0;
    if (classes == 0) {
        std::cout << "regression task: per-client sample counts\n";
        for (std::size_t c = 0; c < env.shards.size(); ++c) {
            std::cout << "client " << c << ": " << env.shards[c].n << "\n";
        }
        return 0;
    }
    std::cout << "client,total";
    for (int k = 0; k < classes; ++k) std::cout << ",class" << k;
    std::cout << "\n";
    for (std::size_t c = 0; c < env.shards.size(); ++c) {
        std::vector<int> hist(classes, 0);
        for (double y : env.shards[c].y) hist[static_cast<int>(y)] += 1;
        std::cout << c << "," << env.shards[c].n;
        for (int h : hist) std::cout << "," << h;
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) return usage();
    const std::string cmd = argv[1];
    try {
        if (cmd == "run") {
            return cmd_run(argv[2]);
        }
        if (cmd == "summarize") {
            double target = 0.0;
            for (int i = 3; i + 1 < argc; ++i) {
                if (std::string(argv[i]) == "--target") target = std::stod(argv[i + 1]);
            }
            if (target <= 0.0 || target >= 1.0) {
                std::cerr << "summarize requires --target in (0,1)\n";
                return 2;
            }
            return cmd_summarize(argv[2], target);
        }
        if (cmd == "partition-stats") {
            return cmd_partition_stats(argv[2]);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return usage();
}
