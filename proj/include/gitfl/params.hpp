#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gitfl {

// Flat vector of model weights; the unit of merging, pulling and training.
using ParamVector = std::vector<double>;

struct BranchModel {
    int branch_id = 0;
    ParamVector params;
    long version = 0;
};

// Exactly K branch models indexed by branch_id.
struct Repository {
    std::vector<BranchModel> branches;

    static Repository make(int k, const ParamVector& init);
    int size() const { return static_cast<int>(branches.size()); }
};

// Weighted mean: sum(w_i * m_i) / sum(w_i), coordinate-wise.
// Throws std::invalid_argument on dimension mismatch or zero weight sum.
ParamVector axpy_combine(std::span<const double> weights,
                         std::span<const ParamVector> models);

bool all_finite(const ParamVector& v);

}  // namespace gitfl
