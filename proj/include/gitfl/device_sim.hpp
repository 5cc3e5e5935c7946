#pragma once

#include <array>
#include <string>
#include <vector>

#include "gitfl/rng.hpp"

namespace gitfl {

struct LatencyDist {
    double mu = 0.0;
    double sigma = 0.0;
};

enum class Tier { Excellent = 0, High, Medium, Low, Critical };
inline constexpr int kNumTiers = 5;

LatencyDist compute_dist(Tier t);
LatencyDist network_dist(Tier t);
const char* tier_name(Tier t);

struct ClientProfile {
    int client_id = 0;
    LatencyDist compute;
    LatencyDist network;
    int shard_id = 0;
};

// Counts per tier for the compute ("Training") and network ("Comm") roles.
// When `paired` is set, each client draws one tier for both roles instead of
// two independent draws (useful for forcing a known straggler profile).
struct CompositionPreset {
    std::array<int, kNumTiers> training{};
    std::array<int, kNumTiers> comm{};
    bool paired = false;
};

// Named presets: config1..config4 (defined for 100 clients, scaled to other
// totals by largest remainder) and uniform.
CompositionPreset preset_by_name(const std::string& name, int total);
CompositionPreset scale_preset(const CompositionPreset& base, int base_total, int total);

// Gaussian draw truncated below at 0.01*mu (resample up to 100 times, then
// clamp).
double sample_latency(const LatencyDist& dist, Rng& rng);

// Network draw first, then compute, both from the shared run stream.
double round_trip_time(const ClientProfile& profile, Rng& rng,
                       double network_multiplier = 1.0);

// Compute tiers from the Training row, network tiers from the Comm row,
// paired by independent seeded shuffles.
std::vector<ClientProfile> build_population(const CompositionPreset& preset,
                                            int total, Rng& rng);

}  // namespace gitfl
