#include "gitfl/device_sim.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace gitfl {

namespace {

constexpr std::array<LatencyDist, kNumTiers> kComputeTiers{{
    {100.0, 5.0},   // Excellent
    {150.0, 10.0},  // High
    {200.0, 20.0},  // Medium
    {300.0, 30.0},  // Low
    {500.0, 50.0},  // Critical
}};

constexpr std::array<LatencyDist, kNumTiers> kNetworkTiers{{
    {10.0, 1.0},
    {15.0, 2.0},
    {20.0, 3.0},
    {30.0, 5.0},
    {80.0, 10.0},
}};

constexpr const char* kTierNames[kNumTiers] = {"Excellent", "High", "Medium",
                                               "Low", "Critical"};

// Fisher-Yates with our own uniform so the draw count is fixed.
template <typename T>
void shuffle_seq(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(next_uniform(rng) * static_cast<double>(i));
        std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
}

}  // namespace

LatencyDist compute_dist(Tier t) { return kComputeTiers[static_cast<int>(t)]; }
LatencyDist network_dist(Tier t) { return kNetworkTiers[static_cast<int>(t)]; }
const char* tier_name(Tier t) { return kTierNames[static_cast<int>(t)]; }

CompositionPreset scale_preset(const CompositionPreset& base, int base_total,
                               int total) {
    if (total == base_total) return base;
    CompositionPreset out;
    auto scale_row = [&](const std::array<int, kNumTiers>& row) {
        std::array<int, kNumTiers> scaled{};
        std::array<double, kNumTiers> frac{};
        int assigned = 0;
        for (int i = 0; i < kNumTiers; ++i) {
            const double exact =
                static_cast<double>(row[i]) * total / static_cast<double>(base_total);
            scaled[i] = static_cast<int>(exact);
            frac[i] = exact - scaled[i];
            assigned += scaled[i];
        }
        // largest remainder
        std::array<int, kNumTiers> order{};
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return frac[a] > frac[b]; });
        for (int i = 0; assigned < total; ++i) {
            scaled[order[i % kNumTiers]] += 1;
            ++assigned;
        }
        return scaled;
    };
    out.training = scale_row(base.training);
    out.comm = scale_row(base.comm);
    return out;
}

CompositionPreset preset_by_name(const std::string& name, int total) {
    CompositionPreset p;
    if (name == "config1") {
        p.training = p.comm = {40, 30, 10, 10, 10};
    } else if (name == "config2") {
        p.training = p.comm = {10, 20, 40, 20, 10};
    } else if (name == "config3") {
        p.training = p.comm = {10, 10, 10, 30, 40};
    } else if (name == "config4") {
        p.training = p.comm = {40, 10, 0, 10, 40};
    } else if (name == "uniform") {
        p.training = p.comm = {20, 20, 20, 20, 20};
    } else if (name == "excellent") {
        p.training = p.comm = {100, 0, 0, 0, 0};
    } else if (name.rfind("counts-", 0) == 0 || name.rfind("paired-", 0) == 0) {
        // explicit per-tier counts, e.g. counts-40-30-10-10-10; must sum to
        // the client total. "paired-" gives each client the same tier for
        // compute and network.
        p.paired = name[0] == 'p';
        int vals[kNumTiers];
        if (std::sscanf(name.c_str() + 7, "%d-%d-%d-%d-%d", &vals[0], &vals[1],
                        &vals[2], &vals[3], &vals[4]) != kNumTiers) {
            throw std::invalid_argument("bad counts preset: " + name);
        }
        int sum = 0;
        for (int i = 0; i < kNumTiers; ++i) {
            p.training[i] = p.comm[i] = vals[i];
            sum += vals[i];
        }
        if (sum != total) {
            throw std::invalid_argument("preset counts do not sum to the client total");
        }
        return p;
    } else {
        throw std::invalid_argument("unknown device preset: " + name);
    }
    return scale_preset(p, 100, total);
}

double sample_latency(const LatencyDist& dist, Rng& rng) {
    const double floor = 0.01 * dist.mu;
    if (dist.sigma <= 0.0) return dist.mu;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double x = dist.mu + dist.sigma * next_normal(rng);
        if (x >= floor) return x;
    }
    return floor;
}

double round_trip_time(const ClientProfile& profile, Rng& rng,
                       double network_multiplier) {
    const double net = sample_latency(profile.network, rng) * network_multiplier;
    const double comp = sample_latency(profile.compute, rng);
    return net + comp;
}

std::vector<ClientProfile> build_population(const CompositionPreset& preset,
                                            int total, Rng& rng) {
    auto expand = [&](const std::array<int, kNumTiers>& row) {
        std::vector<int> tiers;
        tiers.reserve(total);
        for (int t = 0; t < kNumTiers; ++t) {
            tiers.insert(tiers.end(), row[t], t);
        }
        return tiers;
    };
    std::vector<int> train_tiers = expand(preset.training);
    std::vector<int> comm_tiers = expand(preset.comm);
    if (static_cast<int>(train_tiers.size()) != total ||
        static_cast<int>(comm_tiers.size()) != total) {
        throw std::invalid_argument("preset counts do not sum to the client total");
    }
    shuffle_seq(train_tiers, rng);
    if (preset.paired) {
        comm_tiers = train_tiers;
    } else {
        shuffle_seq(comm_tiers, rng);
    }

    std::vector<ClientProfile> clients(total);
    for (int c = 0; c < total; ++c) {
        clients[c].client_id = c;
        clients[c].compute = compute_dist(static_cast<Tier>(train_tiers[c]));
        clients[c].network = network_dist(static_cast<Tier>(comm_tiers[c]));
        clients[c].shard_id = c;
    }
    return clients;
}

}  // namespace gitfl
