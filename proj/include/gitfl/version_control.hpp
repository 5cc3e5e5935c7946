#pragma once

#include <vector>

#include "gitfl/params.hpp"

namespace gitfl {

// Per-branch counters of completed local trainings.
using VersionVector = std::vector<long>;

// Version-weighted merge of all branch models. When every version is 0 the
// weighted form is undefined and the uniform mean of the branches is returned
// (all branches are identical at init, so this is the continuous extension).
ParamVector merge_master(const Repository& repo, const VersionVector& versions);

// Branch version minus the mean version; may be negative or fractional.
double version_ctrl(int branch_id, const VersionVector& versions);

// Blend a branch with the master before dispatch. Branch weight is
// max(base + v_ctrl, 2), so the master never gets more than 1/3 of the mix.
ParamVector model_pull(int branch_id, const VersionVector& versions,
                       const ParamVector& master, const ParamVector& branch,
                       double pull_base_weight = 10.0);

// Replace the branch params with the trained model and bump its version.
void model_push(Repository& repo, int branch_id, ParamVector trained,
                VersionVector& versions);

}  // namespace gitfl
