#include "gitfl/version_control.hpp"

#include <algorithm>
#include <stdexcept>

namespace gitfl {

ParamVector merge_master(const Repository& repo, const VersionVector& versions) {
    const int k = repo.size();
    if (k < 1 || static_cast<int>(versions.size()) != k) {
        throw std::invalid_argument("merge_master: repo/versions mismatch");
    }
    long vsum = 0;
    for (long v : versions) vsum += v;

    std::vector<double> weights(k);
    std::vector<ParamVector> models(k);
    for (int i = 0; i < k; ++i) {
        weights[i] = vsum == 0 ? 1.0 : static_cast<double>(versions[i]);
        models[i] = repo.branches[i].params;
    }
    return axpy_combine(weights, models);
}

double version_ctrl(int branch_id, const VersionVector& versions) {
    const int k = static_cast<int>(versions.size());
    if (branch_id < 0 || branch_id >= k) {
        throw std::out_of_range("version_ctrl: bad branch id");
    }
    double mean = 0.0;
    for (long v : versions) mean += static_cast<double>(v);
    mean /= k;
    return static_cast<double>(versions[branch_id]) - mean;
}

ParamVector model_pull(int branch_id, const VersionVector& versions,
                       const ParamVector& master, const ParamVector& branch,
                       double pull_base_weight) {
    const double w = std::max(pull_base_weight + version_ctrl(branch_id, versions), 2.0);
    const std::vector<double> weights{w, 1.0};
    const std::vector<ParamVector> models{branch, master};
    return axpy_combine(weights, models);
}

void model_push(Repository& repo, int branch_id, ParamVector trained,
                VersionVector& versions) {
    if (branch_id < 0 || branch_id >= repo.size()) {
        throw std::out_of_range("model_push: bad branch id");
    }
    repo.branches[branch_id].params = std::move(trained);
    repo.branches[branch_id].version += 1;
    versions[branch_id] += 1;
}

}  // namespace gitfl
