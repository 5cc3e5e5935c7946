#include "gitfl/selector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gitfl {

SelectorVariant parse_variant(const std::string& s) {
    if (s == "CV" || s == "cv") return SelectorVariant::CV;
    if (s == "R" || s == "r") return SelectorVariant::R;
    if (s == "C" || s == "c") return SelectorVariant::C;
    if (s == "V" || s == "v") return SelectorVariant::V;
    throw std::invalid_argument("unknown selector variant: " + s);
}

const char* variant_name(SelectorVariant v) {
    switch (v) {
        case SelectorVariant::CV: return "CV";
        case SelectorVariant::R: return "R";
        case SelectorVariant::C: return "C";
        case SelectorVariant::V: return "V";
    }
    return "?";
}

std::vector<int> ClientStats::eligible() const {
    std::vector<int> out;
    out.reserve(count_table.size());
    for (int c = 0; c < size(); ++c) {
        if (!busy[c]) out.push_back(c);
    }
    return out;
}

void ClientStats::mark_busy(int client) {
    if (busy[client]) {
        throw std::logic_error("client already holds a branch model");
    }
    busy[client] = true;
}

double version_reward(int client, int branch_id, const VersionVector& versions,
                      const ClientStats& stats) {
    double tmax = 0.0, tmean = 0.0;
    for (double t : stats.time_table) {
        tmax = std::max(tmax, t);
        tmean += t;
    }
    if (tmax <= 0.0) return 0.0;  // no timing information yet
    tmean /= stats.size();
    const double vdiff = version_ctrl(branch_id, versions);
    return vdiff * (stats.time_table[client] - tmean) / tmax;
}

double curiosity_reward(int client, const ClientStats& stats) {
    const double n = static_cast<double>(std::max(stats.count_table[client], 1L));
    return 1.0 / std::sqrt(n);
}

double combined_reward(int client, int branch_id, const VersionVector& versions,
                       const ClientStats& stats) {
    return std::max(0.0, version_reward(client, branch_id, versions, stats) +
                             curiosity_reward(client, stats));
}

std::vector<double> selection_probabilities(int branch_id,
                                            const VersionVector& versions,
                                            const ClientStats& stats,
                                            const std::vector<int>& eligible,
                                            SelectorVariant variant) {
    if (eligible.empty()) {
        throw std::logic_error("selection_probabilities: no eligible clients");
    }
    std::vector<double> rewards(eligible.size(), 1.0);
    switch (variant) {
        case SelectorVariant::R:
            break;  // uniform
        case SelectorVariant::C:
            for (std::size_t j = 0; j < eligible.size(); ++j) {
                rewards[j] = curiosity_reward(eligible[j], stats);
            }
            break;
        case SelectorVariant::V:
            for (std::size_t j = 0; j < eligible.size(); ++j) {
                rewards[j] = std::max(
                    0.0, version_reward(eligible[j], branch_id, versions, stats));
            }
            break;
        case SelectorVariant::CV:
            for (std::size_t j = 0; j < eligible.size(); ++j) {
                rewards[j] = combined_reward(eligible[j], branch_id, versions, stats);
            }
            break;
    }
    double total = 0.0;
    for (double r : rewards) total += r;
    if (total <= 0.0) {
        // every reward clamped to 0: uniform fallback
        const double p = 1.0 / static_cast<double>(eligible.size());
        std::fill(rewards.begin(), rewards.end(), p);
        return rewards;
    }
    for (double& r : rewards) r /= total;
    return rewards;
}

int select_client(int branch_id, const VersionVector& versions,
                  ClientStats& stats, SelectorVariant variant, Rng& rng) {
    const std::vector<int> eligible = stats.eligible();
    const std::vector<double> probs =
        selection_probabilities(branch_id, versions, stats, eligible, variant);
    const double u = next_uniform(rng);
    double cum = 0.0;
    int chosen = eligible.back();
    for (std::size_t j = 0; j < probs.size(); ++j) {
        cum += probs[j];
        if (u < cum) {
            chosen = eligible[j];
            break;
        }
    }
    stats.mark_busy(chosen);
    return chosen;
}

void record_completion(int client, double duration, ClientStats& stats) {
    if (!stats.busy[client]) {
        throw std::logic_error("record_completion: client was not busy");
    }
    stats.busy[client] = false;
    stats.count_table[client] += 1;
    const double n = static_cast<double>(stats.count_table[client]);
    stats.time_table[client] = ((n - 1.0) * stats.time_table[client] + duration) / n;
}

}  // namespace gitfl
