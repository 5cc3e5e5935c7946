#include "gitfl/params.hpp"

#include <cmath>
#include <stdexcept>

namespace gitfl {

Repository Repository::make(int k, const ParamVector& init) {
    Repository repo;
    repo.branches.reserve(k);
    for (int i = 0; i < k; ++i) {
        repo.branches.push_back(BranchModel{i, init, 0});
    }
    return repo;
}

ParamVector axpy_combine(std::span<const double> weights,
                         std::span<const ParamVector> models) {
    if (weights.empty() || weights.size() != models.size()) {
        throw std::invalid_argument("axpy_combine: weights/models length mismatch");
    }
    const std::size_t dim = models[0].size();
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (wsum <= 0.0) {
        throw std::invalid_argument("axpy_combine: weight sum must be positive");
    }
    ParamVector out(dim, 0.0);
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i].size() != dim) {
            throw std::invalid_argument("axpy_combine: model dimension mismatch");
        }
        const double w = weights[i];
        for (std::size_t j = 0; j < dim; ++j) out[j] += w * models[i][j];
    }
    for (double& x : out) x /= wsum;
    return out;
}

bool all_finite(const ParamVector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace gitfl
