#include "gitfl/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gitfl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::set<std::string> kKnownKeys = {
    "algorithm", "selector", "K", "clients", "time_budget", "alpha", "iid",
    "preset", "seed", "repeats", "eval_interval", "pull_base_weight",
    "network_multiplier", "latency_sigma_scale", "threads", "output_dir",
    "target", "dataset",
    "trainer.kind", "trainer.lr", "trainer.momentum", "trainer.batch",
    "trainer.epochs", "trainer.hidden",
    "task.dims", "task.classes", "task.samples", "task.margin", "task.noise",
    "fedasync.beta", "fedasync.a",
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& origin, int line, const std::string& key,
                 const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(origin, line, "key '" + key + "': not a number: '" + v + "'");
    }
}

long to_long(const std::string& origin, int line, const std::string& key,
             const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(origin, line, "key '" + key + "': not an integer: '" + v + "'");
    }
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::map<std::string, int> key_line;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (!kKnownKeys.count(key)) fail(origin, lineno, "unknown key '" + key + "'");
        if (kv.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
        kv[key] = value;
        key_line[key] = lineno;
    }

    auto has = [&](const std::string& k) { return kv.count(k) > 0; };
    auto line_of = [&](const std::string& k) { return key_line[k]; };

    if (has("alpha") && has("iid")) {
        fail(origin, line_of("iid"), "alpha and iid are mutually exclusive");
    }

    ExperimentSpec spec;
    if (has("output_dir")) spec.output_dir = kv["output_dir"];
    spec.repeats = has("repeats")
                       ? static_cast<int>(to_long(origin, line_of("repeats"),
                                                  "repeats", kv["repeats"]))
                       : 1;
    if (spec.repeats < 1) fail(origin, line_of("repeats"), "repeats must be >= 1");
    if (has("target")) {
        spec.target_accuracy =
            to_double(origin, line_of("target"), "target", kv["target"]);
    }

    RunConfig base;
    if (has("K")) base.branches = (int)to_long(origin, line_of("K"), "K", kv["K"]);
    if (has("clients"))
        base.clients = (int)to_long(origin, line_of("clients"), "clients", kv["clients"]);
    if (has("time_budget"))
        base.time_budget =
            to_double(origin, line_of("time_budget"), "time_budget", kv["time_budget"]);
    if (has("eval_interval"))
        base.eval_interval = to_double(origin, line_of("eval_interval"),
                                       "eval_interval", kv["eval_interval"]);
    if (has("seed"))
        base.seed = (std::uint64_t)to_long(origin, line_of("seed"), "seed", kv["seed"]);
    if (has("pull_base_weight"))
        base.pull_base_weight = to_double(origin, line_of("pull_base_weight"),
                                          "pull_base_weight", kv["pull_base_weight"]);
    if (has("network_multiplier"))
        base.network_multiplier =
            to_double(origin, line_of("network_multiplier"), "network_multiplier",
                      kv["network_multiplier"]);
    if (has("latency_sigma_scale"))
        base.latency_sigma_scale =
            to_double(origin, line_of("latency_sigma_scale"), "latency_sigma_scale",
                      kv["latency_sigma_scale"]);
    if (has("threads"))
        base.threads = (int)to_long(origin, line_of("threads"), "threads", kv["threads"]);
    if (has("dataset")) base.dataset_path = kv["dataset"];

    if (has("trainer.kind")) {
        base.model = parse_model_kind(kv["trainer.kind"]);
        base.task_kind = base.model == ModelKind::Linear ? "linreg" : "blobs";
    }
    if (has("trainer.lr"))
        base.train.lr = to_double(origin, line_of("trainer.lr"), "trainer.lr",
                                  kv["trainer.lr"]);
    if (has("trainer.momentum"))
        base.train.momentum = to_double(origin, line_of("trainer.momentum"),
                                        "trainer.momentum", kv["trainer.momentum"]);
    if (has("trainer.batch"))
        base.train.batch = (int)to_long(origin, line_of("trainer.batch"),
                                        "trainer.batch", kv["trainer.batch"]);
    if (has("trainer.epochs"))
        base.train.epochs = (int)to_long(origin, line_of("trainer.epochs"),
                                         "trainer.epochs", kv["trainer.epochs"]);
    if (has("trainer.hidden"))
        base.hidden = (int)to_long(origin, line_of("trainer.hidden"),
                                   "trainer.hidden", kv["trainer.hidden"]);
    if (has("task.dims"))
        base.task_dims = (int)to_long(origin, line_of("task.dims"), "task.dims",
                                      kv["task.dims"]);
    if (has("task.classes"))
        base.task_classes = (int)to_long(origin, line_of("task.classes"),
                                         "task.classes", kv["task.classes"]);
    if (has("task.samples"))
        base.task_samples = (int)to_long(origin, line_of("task.samples"),
                                         "task.samples", kv["task.samples"]);
    if (has("task.margin"))
        base.task_margin = to_double(origin, line_of("task.margin"), "task.margin",
                                     kv["task.margin"]);
    if (has("task.noise"))
        base.task_noise = to_double(origin, line_of("task.noise"), "task.noise",
                                    kv["task.noise"]);
    if (has("fedasync.beta"))
        base.fedasync_beta = to_double(origin, line_of("fedasync.beta"),
                                       "fedasync.beta", kv["fedasync.beta"]);
    if (has("fedasync.a"))
        base.fedasync_a = to_double(origin, line_of("fedasync.a"), "fedasync.a",
                                    kv["fedasync.a"]);

    // grid axes
    const std::vector<std::string> algorithms =
        has("algorithm") ? split_list(kv["algorithm"]) : std::vector<std::string>{"gitfl"};
    const std::vector<std::string> selectors =
        has("selector") ? split_list(kv["selector"]) : std::vector<std::string>{"CV"};
    const std::vector<std::string> presets =
        has("preset") ? split_list(kv["preset"]) : std::vector<std::string>{"uniform"};
    std::vector<std::string> alphas;
    if (has("alpha")) {
        alphas = split_list(kv["alpha"]);
    } else {
        // iid accepted as "iid = true" or omitted entirely
        if (has("iid") && kv["iid"] != "true" && kv["iid"] != "1") {
            fail(origin, line_of("iid"), "iid must be 'true' or '1' (or use alpha)");
        }
        alphas = {"iid"};
    }
    if (algorithms.empty() || selectors.empty() || presets.empty() || alphas.empty()) {
        fail(origin, 0, "empty grid axis");
    }

    for (const auto& algo : algorithms) {
        for (const auto& sel : selectors) {
            for (const auto& alpha : alphas) {
                for (const auto& preset : presets) {
                    RunConfig cfg = base;
                    try {
                        cfg.algorithm = parse_algorithm(algo);
                        cfg.variant = parse_variant(sel);
                    } catch (const std::exception& e) {
                        fail(origin, 0, e.what());
                    }
                    cfg.preset = preset;
                    if (alpha == "iid") {
                        cfg.iid = true;
                    } else {
                        cfg.iid = false;
                        cfg.alpha = to_double(origin, line_of("alpha"), "alpha", alpha);
                    }
                    std::string cell = algo;
                    if (cfg.algorithm == Algorithm::GitFL) cell += "_" + std::string(variant_name(cfg.variant));
                    cell += "_" + (alpha == "iid" ? std::string("iid") : "alpha" + alpha);
                    cell += "_" + preset;
                    for (int r = 0; r < spec.repeats; ++r) {
                        RunConfig run_cfg = cfg;
                        run_cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                        try {
                            run_cfg.validate();
                        } catch (const std::exception& e) {
                            fail(origin, 0, e.what());
                        }
                        NamedRun nr;
                        nr.cell = cell;
                        nr.name = cell + "_seed" + std::to_string(run_cfg.seed);
                        nr.config = run_cfg;
                        spec.runs.push_back(std::move(nr));
                    }
                }
            }
        }
    }
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace gitfl
