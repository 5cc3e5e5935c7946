#include "gitfl/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gitfl {

namespace {

void shuffle_ints(std::vector<int>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(next_uniform(rng) * static_cast<double>(i));
        std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
}

// logits -> softmax in place, returns log(sum(exp)) shift-safe
void softmax(std::vector<double>& z) {
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// Solve A x = b (symmetric positive definite, small) by Gaussian elimination
// with partial pivoting.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b,
                                int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        }
        if (std::fabs(a[piv * n + col]) < 1e-12) {
            throw std::runtime_error("solve_dense: singular system");
        }
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * x[j];
        x[r] = s / a[r * n + r];
    }
    return x;
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
    if (s == "linreg" || s == "linear") return ModelKind::Linear;
    if (s == "logistic") return ModelKind::Logistic;
    if (s == "mlp") return ModelKind::Mlp;
    throw std::invalid_argument("unknown trainer kind: " + s);
}

int ModelSpec::param_count() const {
    switch (kind) {
        case ModelKind::Linear:
            return dims + 1;
        case ModelKind::Logistic:
            return classes * (dims + 1);
        case ModelKind::Mlp:
            return hidden * (dims + 1) + classes * (hidden + 1);
    }
    return 0;
}

double loss_grad(const ParamVector& params, const Shard& shard,
                 const ModelSpec& spec, std::span<const int> idx,
                 ParamVector* grad) {
    if (static_cast<int>(params.size()) != spec.param_count()) {
        throw std::invalid_argument("loss_grad: parameter dimension mismatch");
    }
    if (grad) {
        grad->assign(params.size(), 0.0);
    }
    const double inv_n = 1.0 / static_cast<double>(idx.size());
    double loss = 0.0;

    if (spec.kind == ModelKind::Linear) {
        const double* w = params.data();
        const double b = params[spec.dims];
        for (int i : idx) {
            auto xi = shard.row(i);
            double pred = b;
            for (int j = 0; j < spec.dims; ++j) pred += w[j] * xi[j];
            const double r = pred - shard.y[i];
            loss += r * r * inv_n;
            if (grad) {
                const double g = 2.0 * r * inv_n;
                for (int j = 0; j < spec.dims; ++j) (*grad)[j] += g * xi[j];
                (*grad)[spec.dims] += g;
            }
        }
    } else if (spec.kind == ModelKind::Logistic) {
        std::vector<double> z(spec.classes);
        for (int i : idx) {
            auto xi = shard.row(i);
            for (int c = 0; c < spec.classes; ++c) {
                const double* wc = params.data() + c * (spec.dims + 1);
                double v = wc[spec.dims];
                for (int j = 0; j < spec.dims; ++j) v += wc[j] * xi[j];
                z[c] = v;
            }
            softmax(z);
            const int label = static_cast<int>(shard.y[i]);
            loss += -std::log(std::max(z[label], 1e-300)) * inv_n;
            if (grad) {
                for (int c = 0; c < spec.classes; ++c) {
                    const double delta = (z[c] - (c == label ? 1.0 : 0.0)) * inv_n;
                    double* gc = grad->data() + c * (spec.dims + 1);
                    for (int j = 0; j < spec.dims; ++j) gc[j] += delta * xi[j];
                    gc[spec.dims] += delta;
                }
            }
        }
    } else {  // Mlp, one tanh hidden layer
        const int d = spec.dims, h = spec.hidden, k = spec.classes;
        const double* w1 = params.data();           // h x d
        const double* b1 = w1 + h * d;               // h
        const double* w2 = b1 + h;                   // k x h
        const double* b2 = w2 + k * h;               // k
        std::vector<double> a(h), z(k), dz(k), da(h);
        for (int i : idx) {
            auto xi = shard.row(i);
            for (int u = 0; u < h; ++u) {
                double v = b1[u];
                for (int j = 0; j < d; ++j) v += w1[u * d + j] * xi[j];
                a[u] = std::tanh(v);
            }
            for (int c = 0; c < k; ++c) {
                double v = b2[c];
                for (int u = 0; u < h; ++u) v += w2[c * h + u] * a[u];
                z[c] = v;
            }
            softmax(z);
            const int label = static_cast<int>(shard.y[i]);
            loss += -std::log(std::max(z[label], 1e-300)) * inv_n;
            if (grad) {
                double* g1 = grad->data();
                double* gb1 = g1 + h * d;
                double* g2 = gb1 + h;
                double* gb2 = g2 + k * h;
                for (int c = 0; c < k; ++c) dz[c] = (z[c] - (c == label ? 1.0 : 0.0)) * inv_n;
                std::fill(da.begin(), da.end(), 0.0);
                for (int c = 0; c < k; ++c) {
                    for (int u = 0; u < h; ++u) {
                        g2[c * h + u] += dz[c] * a[u];
                        da[u] += dz[c] * w2[c * h + u];
                    }
                    gb2[c] += dz[c];
                }
                for (int u = 0; u < h; ++u) {
                    const double dpre = da[u] * (1.0 - a[u] * a[u]);
                    for (int j = 0; j < d; ++j) g1[u * d + j] += dpre * xi[j];
                    gb1[u] += dpre;
                }
            }
        }
    }
    return loss;
}

ParamVector local_train(const ParamVector& params, const Shard& shard,
                        const ModelSpec& spec, const TrainConfig& cfg, Rng& rng) {
    ParamVector p = params;
    ParamVector velocity(p.size(), 0.0);
    ParamVector grad;
    std::vector<int> order(shard.n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_ints(order, rng);
        for (int start = 0; start < shard.n; start += cfg.batch) {
            const int end = std::min(start + cfg.batch, shard.n);
            std::span<const int> batch(order.data() + start, end - start);
            const double loss = loss_grad(p, shard, spec, batch, &grad);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("local_train: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            for (std::size_t j = 0; j < p.size(); ++j) {
                velocity[j] = cfg.momentum * velocity[j] + grad[j];
                p[j] -= cfg.lr * velocity[j];
            }
        }
    }
    return p;
}

EvalResult evaluate(const ParamVector& params, const Shard& test,
                    const ModelSpec& spec) {
    if (test.n == 0) throw std::invalid_argument("evaluate: empty test set");
    std::vector<int> idx(test.n);
    std::iota(idx.begin(), idx.end(), 0);
    EvalResult res;
    res.loss = loss_grad(params, test, spec, idx, nullptr);

    int correct = 0;
    if (spec.kind == ModelKind::Linear) {
        const double* w = params.data();
        const double b = params[spec.dims];
        for (int i = 0; i < test.n; ++i) {
            auto xi = test.row(i);
            double pred = b;
            for (int j = 0; j < spec.dims; ++j) pred += w[j] * xi[j];
            if (std::fabs(pred - test.y[i]) <= 0.5) ++correct;
        }
    } else {
        std::vector<double> z(spec.classes);
        for (int i = 0; i < test.n; ++i) {
            auto xi = test.row(i);
            if (spec.kind == ModelKind::Logistic) {
                for (int c = 0; c < spec.classes; ++c) {
                    const double* wc = params.data() + c * (spec.dims + 1);
                    double v = wc[spec.dims];
                    for (int j = 0; j < spec.dims; ++j) v += wc[j] * xi[j];
                    z[c] = v;
                }
            } else {
                const int d = spec.dims, h = spec.hidden, k = spec.classes;
                const double* w1 = params.data();
                const double* b1 = w1 + h * d;
                const double* w2 = b1 + h;
                const double* b2 = w2 + k * h;
                std::vector<double> a(h);
                for (int u = 0; u < h; ++u) {
                    double v = b1[u];
                    for (int j = 0; j < d; ++j) v += w1[u * d + j] * xi[j];
                    a[u] = std::tanh(v);
                }
                for (int c = 0; c < k; ++c) {
                    double v = b2[c];
                    for (int u = 0; u < h; ++u) v += w2[c * h + u] * a[u];
                    z[c] = v;
                }
            }
            const int pred = static_cast<int>(
                std::max_element(z.begin(), z.end()) - z.begin());
            if (pred == static_cast<int>(test.y[i])) ++correct;
        }
    }
    res.accuracy = static_cast<double>(correct) / test.n;
    return res;
}

std::vector<Shard> dirichlet_partition(const Shard& dataset, int num_clients,
                                       double alpha, Rng& rng) {
    if (!dataset.classification) {
        throw std::invalid_argument("dirichlet_partition: classification labels required");
    }
    if (alpha <= 0.0) throw std::invalid_argument("dirichlet_partition: alpha must be > 0");
    if (dataset.n < num_clients) {
        throw std::invalid_argument("dirichlet_partition: fewer samples than clients");
    }

    std::vector<std::vector<int>> assign(num_clients);
    std::gamma_distribution<double> gamma(alpha, 1.0);

    for (int cls = 0; cls < dataset.classes; ++cls) {
        std::vector<int> members;
        for (int i = 0; i < dataset.n; ++i) {
            if (static_cast<int>(dataset.y[i]) == cls) members.push_back(i);
        }
        if (members.empty()) continue;
        shuffle_ints(members, rng);

        std::vector<double> prop(num_clients);
        double total = 0.0;
        for (double& p : prop) {
            p = gamma(rng);
            total += p;
        }
        if (total <= 0.0) total = 1.0;
        // counts by largest remainder so every sample lands exactly once
        const int m = static_cast<int>(members.size());
        std::vector<int> counts(num_clients);
        std::vector<double> frac(num_clients);
        int used = 0;
        for (int c = 0; c < num_clients; ++c) {
            const double exact = prop[c] / total * m;
            counts[c] = static_cast<int>(exact);
            frac[c] = exact - counts[c];
            used += counts[c];
        }
        std::vector<int> order(num_clients);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return frac[a] > frac[b]; });
        for (int i = 0; used < m; ++i) {
            counts[order[i % num_clients]] += 1;
            ++used;
        }
        int pos = 0;
        for (int c = 0; c < num_clients; ++c) {
            for (int j = 0; j < counts[c]; ++j) assign[c].push_back(members[pos++]);
        }
    }

    // repair empty shards from the largest one
    for (int c = 0; c < num_clients; ++c) {
        if (!assign[c].empty()) continue;
        int largest = 0;
        for (int o = 1; o < num_clients; ++o) {
            if (assign[o].size() > assign[largest].size()) largest = o;
        }
        assign[c].push_back(assign[largest].back());
        assign[largest].pop_back();
    }

    std::vector<Shard> shards(num_clients);
    for (int c = 0; c < num_clients; ++c) {
        Shard& s = shards[c];
        s.d = dataset.d;
        s.classification = true;
        s.classes = dataset.classes;
        s.n = static_cast<int>(assign[c].size());
        s.x.reserve(s.n * s.d);
        s.y.reserve(s.n);
        for (int i : assign[c]) {
            auto xi = dataset.row(i);
            s.x.insert(s.x.end(), xi.begin(), xi.end());
            s.y.push_back(dataset.y[i]);
        }
    }
    return shards;
}

std::vector<Shard> iid_partition(const Shard& dataset, int num_clients, Rng& rng) {
    if (dataset.n < num_clients) {
        throw std::invalid_argument("iid_partition: fewer samples than clients");
    }
    std::vector<int> order(dataset.n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_ints(order, rng);

    std::vector<Shard> shards(num_clients);
    for (int c = 0; c < num_clients; ++c) {
        Shard& s = shards[c];
        s.d = dataset.d;
        s.classification = dataset.classification;
        s.classes = dataset.classes;
    }
    for (int i = 0; i < dataset.n; ++i) {
        Shard& s = shards[i % num_clients];
        auto xi = dataset.row(order[i]);
        s.x.insert(s.x.end(), xi.begin(), xi.end());
        s.y.push_back(dataset.y[order[i]]);
        s.n += 1;
    }
    return shards;
}

SyntheticTask make_synthetic_task(const std::string& kind, int dims, int classes,
                                  int n, Rng& rng, double margin, double noise) {
    if (n < classes) throw std::invalid_argument("make_synthetic_task: n < classes");
    SyntheticTask task;
    const int n_test = std::max(n / 5, 1);

    if (kind == "linreg") {
        std::vector<double> w(dims);
        for (double& v : w) v = next_normal(rng);
        const double b = next_normal(rng);
        auto fill = [&](Shard& s, int count) {
            s.n = count;
            s.d = dims;
            s.classification = false;
            s.x.resize(count * dims);
            s.y.resize(count);
            for (int i = 0; i < count; ++i) {
                double pred = b;
                for (int j = 0; j < dims; ++j) {
                    const double xv = next_normal(rng);
                    s.x[i * dims + j] = xv;
                    pred += w[j] * xv;
                }
                s.y[i] = pred + noise * next_normal(rng);
            }
        };
        fill(task.train, n);
        fill(task.test, n_test);

        // least squares on the training set: (X'X) beta = X'y with bias column
        const int p = dims + 1;
        std::vector<double> xtx(p * p, 0.0), xty(p, 0.0);
        for (int i = 0; i < n; ++i) {
            auto xi = task.train.row(i);
            for (int a = 0; a < p; ++a) {
                const double xa = a < dims ? xi[a] : 1.0;
                xty[a] += xa * task.train.y[i];
                for (int bcol = 0; bcol < p; ++bcol) {
                    const double xb = bcol < dims ? xi[bcol] : 1.0;
                    xtx[a * p + bcol] += xa * xb;
                }
            }
        }
        task.optimum = solve_dense(std::move(xtx), std::move(xty), p);
    } else if (kind == "blobs") {
        std::vector<std::vector<double>> centers(classes, std::vector<double>(dims));
        for (auto& c : centers) {
            for (double& v : c) v = next_normal(rng);
        }
        // enforce pairwise center distance >= 2*margin
        double min_dist = std::numeric_limits<double>::max();
        for (int a = 0; a < classes; ++a) {
            for (int b = a + 1; b < classes; ++b) {
                double d2 = 0.0;
                for (int j = 0; j < dims; ++j) {
                    const double diff = centers[a][j] - centers[b][j];
                    d2 += diff * diff;
                }
                min_dist = std::min(min_dist, std::sqrt(d2));
            }
        }
        if (classes > 1 && min_dist < 2.0 * margin) {
            const double scale = 2.0 * margin / std::max(min_dist, 1e-9);
            for (auto& c : centers) {
                for (double& v : c) v *= scale;
            }
        }
        auto fill = [&](Shard& s, int count) {
            s.n = count;
            s.d = dims;
            s.classification = true;
            s.classes = classes;
            s.x.resize(count * dims);
            s.y.resize(count);
            for (int i = 0; i < count; ++i) {
                const int cls = i % classes;  // balanced
                for (int j = 0; j < dims; ++j) {
                    s.x[i * dims + j] = centers[cls][j] + next_normal(rng);
                }
                s.y[i] = cls;
            }
        };
        fill(task.train, n);
        fill(task.test, n_test);
    } else {
        throw std::invalid_argument("unknown synthetic task kind: " + kind);
    }
    return task;
}

Shard load_shard(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::string header;
    std::getline(in, header);
    Shard s;
    if (std::sscanf(header.c_str(), "d=%d,classes=%d", &s.d, &s.classes) != 2) {
        throw std::runtime_error("bad dataset header in " + path);
    }
    s.classification = s.classes > 0;
    if (s.classes == 0) s.classes = 1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != s.d + 1) {
            throw std::runtime_error("bad row width in " + path);
        }
        s.x.insert(s.x.end(), vals.begin(), vals.end() - 1);
        s.y.push_back(vals.back());
        s.n += 1;
    }
    return s;
}

void save_shard(const Shard& shard, const std::string& path) {
    std::ofstream out(path);
    out << "d=" << shard.d << ",classes="
        << (shard.classification ? shard.classes : 0) << "\n";
    char buf[32];
    for (int i = 0; i < shard.n; ++i) {
        for (int j = 0; j < shard.d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", shard.x[i * shard.d + j]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", shard.y[i]);
        out << buf << '\n';
    }
}

}  // namespace gitfl
