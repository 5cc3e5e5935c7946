#include "gitfl/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace gitfl {

namespace {

// sub-stream tags
constexpr std::uint64_t kTagData = 'D';
constexpr std::uint64_t kTagPartition = 'P';
constexpr std::uint64_t kTagPopulation = 'B';
constexpr std::uint64_t kTagInit = 'I';
constexpr std::uint64_t kTagMain = 'M';
constexpr std::uint64_t kTagTrain = 'T';

struct InFlight {
    double completion_time = 0.0;
    int branch_id = 0;
    int client_id = 0;
    long sequence_no = 0;
    double duration = 0.0;
    long dispatch_update_count = 0;  // FedAsync staleness base
    std::future<ParamVector> result;
};

// earliest completion, ties broken by sequence number
std::size_t pop_earliest(const std::vector<InFlight>& inflight) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < inflight.size(); ++i) {
        const auto& a = inflight[i];
        const auto& b = inflight[best];
        if (a.completion_time < b.completion_time ||
            (a.completion_time == b.completion_time && a.sequence_no < b.sequence_no)) {
            best = i;
        }
    }
    return best;
}

std::future<ParamVector> launch_training(const RunConfig& cfg, const SimEnv& env,
                                         const ParamVector& params, int client,
                                         long seq) {
    const auto policy = cfg.threads > 1 ? std::launch::async : std::launch::deferred;
    ParamVector snapshot = params;
    const Shard* shard = &env.shards[client];
    const ModelSpec spec = env.spec;
    const TrainConfig train = cfg.train;
    const std::uint64_t seed = cfg.seed;
    return std::async(policy, [snapshot = std::move(snapshot), shard, spec, train,
                               seed, seq]() {
        Rng rng = substream(seed, kTagTrain, static_cast<std::uint64_t>(seq));
        return local_train(snapshot, *shard, spec, train, rng);
    });
}

// Emits metric rows at every eval_interval strictly below `up_to`, using the
// current model state. Called before each state change and once at the end
// with up_to just past the budget.
class EvalSchedule {
  public:
    EvalSchedule(const RunConfig& cfg, const SimEnv& env, RunReport& report)
        : cfg_(cfg), env_(env), report_(report) {}

    void flush(double up_to, const ParamVector& master, const VersionVector& versions,
               long events_done, long comm_count) {
        while (next_ <= cfg_.time_budget && next_ < up_to) {
            emit(master, versions, events_done, comm_count);
        }
    }

    void finish(const ParamVector& master, const VersionVector& versions,
                long events_done, long comm_count) {
        while (next_ <= cfg_.time_budget) {
            emit(master, versions, events_done, comm_count);
        }
    }

  private:
    void emit(const ParamVector& master, const VersionVector& versions,
              long events_done, long comm_count) {
        MetricRow row;
        row.virtual_time = next_;
        row.event_index = events_done;
        const EvalResult res = evaluate(master, env_.test, env_.spec);
        row.master_loss = res.loss;
        row.master_accuracy = res.accuracy;
        row.min_version = *std::min_element(versions.begin(), versions.end());
        row.max_version = *std::max_element(versions.begin(), versions.end());
        row.mean_version =
            std::accumulate(versions.begin(), versions.end(), 0.0) / versions.size();
        row.comm_count = comm_count;
        report_.rows.push_back(row);
        next_ += cfg_.eval_interval;
    }

    const RunConfig& cfg_;
    const SimEnv& env_;
    RunReport& report_;
    double next_ = 0.0;
};

}  // namespace

Algorithm parse_algorithm(const std::string& s) {
    if (s == "gitfl") return Algorithm::GitFL;
    if (s == "fedavg") return Algorithm::FedAvg;
    if (s == "fedasync") return Algorithm::FedAsync;
    throw std::invalid_argument("unknown algorithm: " + s);
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::GitFL: return "gitfl";
        case Algorithm::FedAvg: return "fedavg";
        case Algorithm::FedAsync: return "fedasync";
    }
    return "?";
}

void RunConfig::validate() const {
    if (branches < 1 || branches > clients) {
        throw std::invalid_argument("K must satisfy 1 <= K <= clients");
    }
    if (time_budget <= 0.0) throw std::invalid_argument("time_budget must be > 0");
    if (eval_interval <= 0.0) throw std::invalid_argument("eval_interval must be > 0");
    if (!iid && alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
    if (train.lr <= 0.0 || train.momentum < 0.0 || train.batch < 1 || train.epochs < 1) {
        throw std::invalid_argument("invalid trainer settings");
    }
}

SimEnv build_env(const RunConfig& cfg) {
    cfg.validate();
    SimEnv env;

    Rng data_rng = substream(cfg.seed, kTagData);
    Shard train_set;
    if (!cfg.dataset_path.empty()) {
        train_set = load_shard(cfg.dataset_path);
        // hold out a fifth for evaluation
        Rng split_rng = substream(cfg.seed, kTagData, 1);
        std::vector<Shard> halves = iid_partition(train_set, 5, split_rng);
        env.test = halves[0];
        Shard rest;
        rest.d = train_set.d;
        rest.classification = train_set.classification;
        rest.classes = train_set.classes;
        for (int i = 1; i < 5; ++i) {
            rest.x.insert(rest.x.end(), halves[i].x.begin(), halves[i].x.end());
            rest.y.insert(rest.y.end(), halves[i].y.begin(), halves[i].y.end());
            rest.n += halves[i].n;
        }
        train_set = std::move(rest);
    } else {
        SyntheticTask task =
            make_synthetic_task(cfg.task_kind, cfg.task_dims, cfg.task_classes,
                                cfg.task_samples, data_rng, cfg.task_margin,
                                cfg.task_noise);
        train_set = std::move(task.train);
        env.test = std::move(task.test);
        if (task.optimum) env.task_optimum = *task.optimum;
    }

    env.spec.kind = cfg.model;
    env.spec.dims = train_set.d;
    env.spec.classes = train_set.classification ? train_set.classes : 1;
    env.spec.hidden = cfg.hidden;

    Rng part_rng = substream(cfg.seed, kTagPartition);
    if (cfg.iid || !train_set.classification) {
        env.shards = iid_partition(train_set, cfg.clients, part_rng);
    } else {
        env.shards = dirichlet_partition(train_set, cfg.clients, cfg.alpha, part_rng);
    }

    Rng pop_rng = substream(cfg.seed, kTagPopulation);
    env.clients = build_population(preset_by_name(cfg.preset, cfg.clients),
                                   cfg.clients, pop_rng);
    if (cfg.latency_sigma_scale != 1.0) {
        for (ClientProfile& c : env.clients) {
            c.compute.sigma *= cfg.latency_sigma_scale;
            c.network.sigma *= cfg.latency_sigma_scale;
        }
    }

    Rng init_rng = substream(cfg.seed, kTagInit);
    env.init.resize(env.spec.param_count());
    for (double& v : env.init) v = 0.01 * next_normal(init_rng);
    return env;
}

RunReport run_gitfl(const RunConfig& cfg) {
    const SimEnv env = build_env(cfg);
    const int k = cfg.branches;

    Repository repo = Repository::make(k, env.init);
    VersionVector versions(k, 0);
    ClientStats stats(cfg.clients);
    Rng main_rng = substream(cfg.seed, kTagMain);

    RunReport report;
    EvalSchedule evals(cfg, env, report);
    long seq = 0;
    long comm_count = 0;
    long events_done = 0;

    std::vector<InFlight> inflight;
    inflight.reserve(k);

    auto dispatch = [&](int branch, double now) {
        const ParamVector master = merge_master(repo, versions);
        const ParamVector pulled =
            model_pull(branch, versions, master, repo.branches[branch].params,
                       cfg.pull_base_weight);
        const int client =
            select_client(branch, versions, stats, cfg.variant, main_rng);
        const double rtt =
            round_trip_time(env.clients[client], main_rng, cfg.network_multiplier);
        InFlight f;
        f.completion_time = now + rtt;
        f.branch_id = branch;
        f.client_id = client;
        f.sequence_no = seq++;
        f.duration = rtt;
        f.result = launch_training(cfg, env, pulled, client, f.sequence_no);
        inflight.push_back(std::move(f));
    };

    for (int i = 0; i < k; ++i) dispatch(i, 0.0);

    while (!inflight.empty()) {
        const std::size_t idx = pop_earliest(inflight);
        InFlight ev = std::move(inflight[idx]);
        inflight.erase(inflight.begin() + idx);

        evals.flush(ev.completion_time, merge_master(repo, versions), versions,
                    events_done, comm_count);

        ParamVector trained = ev.result.get();
        model_push(repo, ev.branch_id, std::move(trained), versions);
        record_completion(ev.client_id, ev.duration, stats);
        comm_count += 2;
        events_done += 1;
        report.events.push_back(Event{ev.completion_time, ev.branch_id,
                                      ev.client_id, ev.sequence_no, ev.duration});

        if (ev.completion_time < cfg.time_budget) {
            dispatch(ev.branch_id, ev.completion_time);
        }
    }

    report.final_master = merge_master(repo, versions);
    evals.finish(report.final_master, versions, events_done, comm_count);
    report.final_versions = versions;
    report.selection_counts = stats.count_table;
    return report;
}

RunReport run_fedavg(const RunConfig& cfg) {
    const SimEnv env = build_env(cfg);
    const int k = cfg.branches;

    ParamVector global = env.init;
    VersionVector rounds_done(1, 0);  // round counter doubles as version trace
    Rng main_rng = substream(cfg.seed, kTagMain);

    RunReport report;
    EvalSchedule evals(cfg, env, report);
    report.selection_counts.assign(cfg.clients, 0);
    long seq = 0;
    long comm_count = 0;
    long events_done = 0;
    double now = 0.0;

    std::vector<int> ids(cfg.clients);
    std::iota(ids.begin(), ids.end(), 0);

    while (now < cfg.time_budget) {
        // K distinct clients, uniform
        std::vector<int> chosen;
        chosen.reserve(k);
        for (int j = 0; j < k; ++j) {
            const int pick = j + static_cast<int>(next_uniform(main_rng) *
                                                  static_cast<double>(cfg.clients - j));
            std::swap(ids[j], ids[std::min(pick, cfg.clients - 1)]);
            chosen.push_back(ids[j]);
        }

        std::vector<InFlight> batch;
        batch.reserve(k);
        double round_dur = 0.0;
        for (int client : chosen) {
            InFlight f;
            f.client_id = client;
            f.sequence_no = seq++;
            f.duration =
                round_trip_time(env.clients[client], main_rng, cfg.network_multiplier);
            f.completion_time = now + f.duration;
            round_dur = std::max(round_dur, f.duration);
            f.result = launch_training(cfg, env, global, client, f.sequence_no);
            batch.push_back(std::move(f));
        }

        std::vector<ParamVector> locals;
        locals.reserve(k);
        for (auto& f : batch) {
            locals.push_back(f.result.get());
            report.events.push_back(Event{f.completion_time, 0, f.client_id,
                                          f.sequence_no, f.duration});
            report.selection_counts[f.client_id] += 1;
        }
        const double round_end = now + round_dur;
        evals.flush(round_end, global, rounds_done, events_done, comm_count);

        const std::vector<double> weights(k, 1.0);
        global = axpy_combine(weights, locals);
        now = round_end;
        comm_count += 2L * k;
        events_done += k;
        rounds_done[0] += 1;
        report.round_durations.push_back(round_dur);
    }

    report.final_master = global;
    evals.finish(global, rounds_done, events_done, comm_count);
    report.final_versions = rounds_done;
    return report;
}

RunReport run_fedasync(const RunConfig& cfg) {
    const SimEnv env = build_env(cfg);
    const int k = cfg.branches;

    ParamVector global = env.init;
    VersionVector updates(1, 0);
    ClientStats stats(cfg.clients);
    Rng main_rng = substream(cfg.seed, kTagMain);

    RunReport report;
    EvalSchedule evals(cfg, env, report);
    long seq = 0;
    long comm_count = 0;
    long events_done = 0;

    std::vector<InFlight> inflight;
    inflight.reserve(k);

    auto dispatch = [&](double now) {
        const std::vector<int> idle = stats.eligible();
        const int pick = static_cast<int>(next_uniform(main_rng) *
                                          static_cast<double>(idle.size()));
        const int client = idle[std::min<std::size_t>(pick, idle.size() - 1)];
        stats.mark_busy(client);
        InFlight f;
        f.client_id = client;
        f.sequence_no = seq++;
        f.duration =
            round_trip_time(env.clients[client], main_rng, cfg.network_multiplier);
        f.completion_time = now + f.duration;
        f.dispatch_update_count = updates[0];
        f.result = launch_training(cfg, env, global, client, f.sequence_no);
        inflight.push_back(std::move(f));
    };

    for (int i = 0; i < k; ++i) dispatch(0.0);

    while (!inflight.empty()) {
        const std::size_t idx = pop_earliest(inflight);
        InFlight ev = std::move(inflight[idx]);
        inflight.erase(inflight.begin() + idx);

        evals.flush(ev.completion_time, global, updates, events_done, comm_count);

        const ParamVector local = ev.result.get();
        const double mix = fedasync_mix(cfg.fedasync_beta, cfg.fedasync_a,
                                        updates[0] - ev.dispatch_update_count);
        for (std::size_t j = 0; j < global.size(); ++j) {
            global[j] = (1.0 - mix) * global[j] + mix * local[j];
        }
        updates[0] += 1;
        record_completion(ev.client_id, ev.duration, stats);
        comm_count += 2;
        events_done += 1;
        report.events.push_back(Event{ev.completion_time, 0, ev.client_id,
                                      ev.sequence_no, ev.duration});

        if (ev.completion_time < cfg.time_budget) {
            dispatch(ev.completion_time);
        }
    }

    report.final_master = global;
    evals.finish(global, updates, events_done, comm_count);
    report.final_versions = updates;
    report.selection_counts = stats.count_table;
    return report;
}

double fedasync_mix(double beta, double a, long staleness) {
    return beta * std::pow(1.0 + static_cast<double>(staleness), -a);
}

RunReport run(const RunConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::GitFL: return run_gitfl(cfg);
        case Algorithm::FedAvg: return run_fedavg(cfg);
        case Algorithm::FedAsync: return run_fedasync(cfg);
    }
    throw std::logic_error("unreachable");
}

}  // namespace gitfl
