#pragma once

#include <string>
#include <vector>

#include "gitfl/rng.hpp"
#include "gitfl/version_control.hpp"

namespace gitfl {

enum class SelectorVariant { CV, R, C, V };

SelectorVariant parse_variant(const std::string& s);
const char* variant_name(SelectorVariant v);

// Per-client selection count (T_c), running-mean round-trip time (T_t) and
// the set of clients currently holding a branch model.
struct ClientStats {
    std::vector<long> count_table;
    std::vector<double> time_table;
    std::vector<bool> busy;

    explicit ClientStats(int num_clients = 0)
        : count_table(num_clients, 0), time_table(num_clients, 0.0),
          busy(num_clients, false) {}

    int size() const { return static_cast<int>(count_table.size()); }
    std::vector<int> eligible() const;
    void mark_busy(int client);
};

// (V[i] - mean(V)) * (T_t[c] - mean(T_t)) / max(T_t); 0 before any timing
// information exists.
double version_reward(int client, int branch_id, const VersionVector& versions,
                      const ClientStats& stats);

// Count-based exploration bonus 1/sqrt(T_c), count floored at 1.
double curiosity_reward(int client, const ClientStats& stats);

double combined_reward(int client, int branch_id, const VersionVector& versions,
                       const ClientStats& stats);

// Normalized rewards over the eligible clients (indices align with
// `eligible`). All-zero rewards fall back to uniform. Throws when eligible
// is empty.
std::vector<double> selection_probabilities(int branch_id,
                                            const VersionVector& versions,
                                            const ClientStats& stats,
                                            const std::vector<int>& eligible,
                                            SelectorVariant variant = SelectorVariant::CV);

// Samples a client from selection_probabilities and marks it busy.
int select_client(int branch_id, const VersionVector& versions,
                  ClientStats& stats, SelectorVariant variant, Rng& rng);

// Bumps T_c, folds the duration into the T_t running mean and frees the
// client. Throws if the client is not busy.
void record_completion(int client, double duration, ClientStats& stats);

}  // namespace gitfl
