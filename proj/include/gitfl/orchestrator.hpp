#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gitfl/device_sim.hpp"
#include "gitfl/selector.hpp"
#include "gitfl/trainers.hpp"
#include "gitfl/version_control.hpp"

namespace gitfl {

enum class Algorithm { GitFL, FedAvg, FedAsync };

Algorithm parse_algorithm(const std::string& s);
const char* algorithm_name(Algorithm a);

struct RunConfig {
    Algorithm algorithm = Algorithm::GitFL;
    SelectorVariant variant = SelectorVariant::CV;
    int branches = 10;  // K, concurrent trainings
    int clients = 100;
    double time_budget = 20000.0;
    double eval_interval = 1000.0;
    bool iid = true;
    double alpha = 0.5;  // Dirichlet concentration when !iid
    std::uint64_t seed = 1;

    TrainConfig train;
    std::string task_kind = "blobs";  // blobs | linreg
    ModelKind model = ModelKind::Logistic;
    int task_dims = 16;
    int task_classes = 4;
    int task_samples = 10000;
    double task_margin = 5.0;
    double task_noise = 0.25;
    int hidden = 16;
    std::string dataset_path;  // optional external dataset, overrides task

    std::string preset = "uniform";
    double pull_base_weight = 10.0;
    double fedasync_beta = 0.6;
    double fedasync_a = 0.5;
    double network_multiplier = 1.0;
    double latency_sigma_scale = 1.0;  // 0 makes all latencies deterministic
    int threads = 1;

    void validate() const;  // throws std::invalid_argument
};

// One completed round trip: dispatched at completion_time - duration.
struct Event {
    double completion_time = 0.0;
    int branch_id = 0;
    int client_id = 0;
    long sequence_no = 0;
    double duration = 0.0;
};

struct MetricRow {
    double virtual_time = 0.0;
    long event_index = 0;
    double master_loss = 0.0;
    double master_accuracy = 0.0;
    long min_version = 0;
    long max_version = 0;
    double mean_version = 0.0;
    long comm_count = 0;
};

struct RunReport {
    std::vector<MetricRow> rows;
    std::vector<Event> events;          // completion order
    std::vector<double> round_durations;  // FedAvg only
    ParamVector final_master;
    VersionVector final_versions;
    std::vector<long> selection_counts;
};

// Shared per-run environment: population, shards, test set, initial model.
struct SimEnv {
    std::vector<ClientProfile> clients;
    std::vector<Shard> shards;
    Shard test;
    ModelSpec spec;
    ParamVector init;
    ParamVector task_optimum;  // linreg only, empty otherwise
};

SimEnv build_env(const RunConfig& cfg);

RunReport run_gitfl(const RunConfig& cfg);
RunReport run_fedavg(const RunConfig& cfg);
RunReport run_fedasync(const RunConfig& cfg);
RunReport run(const RunConfig& cfg);  // dispatch on cfg.algorithm

// Staleness-discounted mixing coefficient beta * (1 + s)^(-a).
double fedasync_mix(double beta, double a, long staleness);

}  // namespace gitfl
