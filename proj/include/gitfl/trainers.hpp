#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gitfl/params.hpp"
#include "gitfl/rng.hpp"

namespace gitfl {

// Dense feature matrix (n x d, row major) plus labels. Labels are class
// indices for classification, real targets for regression.
struct Shard {
    int n = 0;
    int d = 0;
    std::vector<double> x;
    std::vector<double> y;
    bool classification = false;
    int classes = 1;

    std::span<const double> row(int i) const { return {x.data() + i * d, (size_t)d}; }
};

enum class ModelKind { Linear, Logistic, Mlp };

ModelKind parse_model_kind(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::Linear;
    int dims = 0;
    int classes = 1;
    int hidden = 0;  // MLP only

    int param_count() const;
};

struct TrainConfig {
    double lr = 0.01;
    double momentum = 0.5;
    int batch = 50;
    int epochs = 5;
};

// Mean loss over the given sample indices; accumulates the gradient into
// *grad when non-null (grad is zeroed first). MSE for linear, softmax
// cross-entropy for logistic and MLP.
double loss_grad(const ParamVector& params, const Shard& shard,
                 const ModelSpec& spec, std::span<const int> idx,
                 ParamVector* grad);

// SGD with classical momentum, batch order reshuffled per epoch from `rng`,
// velocity reset per call. Input params untouched.
ParamVector local_train(const ParamVector& params, const Shard& shard,
                        const ModelSpec& spec, const TrainConfig& cfg, Rng& rng);

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

// Mean loss and top-1 accuracy (regression: fraction of |residual| <= 0.5).
EvalResult evaluate(const ParamVector& params, const Shard& test,
                    const ModelSpec& spec);

// Per-class Dir(alpha) split over clients; every sample assigned exactly
// once, empty shards repaired from the largest one.
std::vector<Shard> dirichlet_partition(const Shard& dataset, int num_clients,
                                       double alpha, Rng& rng);

std::vector<Shard> iid_partition(const Shard& dataset, int num_clients, Rng& rng);

struct SyntheticTask {
    Shard train;
    Shard test;
    std::optional<ParamVector> optimum;  // linreg only: least-squares solution
};

// kind "linreg": y = w.x + b + noise*N(0,1), optimum solved analytically.
// kind "blobs": Gaussian class clusters with pairwise center distance
// >= 2*margin.
SyntheticTask make_synthetic_task(const std::string& kind, int dims, int classes,
                                  int n, Rng& rng, double margin = 5.0,
                                  double noise = 0.0);

// Columnar text format: header "d=<dims>,classes=<k>" (classes=0 for
// regression) then one comma-separated row of d features + label per line.
Shard load_shard(const std::string& path);
void save_shard(const Shard& shard, const std::string& path);

}  // namespace gitfl
