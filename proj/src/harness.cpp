#include "cbs/harness.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbs/snapshot_io.hpp"

namespace cbs {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(path + "." + key, "unknown key");
    }
}

template <typename T>
T require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required key");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

template <typename T>
T optional_or(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

DatasetSpec parse_dataset(const json& j) {
    DatasetSpec ds;
    const std::string path = "dataset";
    const auto kind = require<std::string>(j, path, "kind");
    ds.seed = optional_or<std::uint64_t>(j, path, "seed", 0);
    if (kind == "blobs") {
        ds.kind = DatasetSpec::Kind::blobs;
        reject_unknown_keys(j, path,
                           {"kind", "seed", "n_per_class", "classes", "dim", "spread",
                            "label_noise_p", "test_n_per_class"});
        ds.n_per_class = require<std::size_t>(j, path, "n_per_class");
        ds.classes = require<std::size_t>(j, path, "classes");
        ds.dim = require<std::size_t>(j, path, "dim");
        ds.spread = require<double>(j, path, "spread");
        ds.label_noise_p = optional_or<double>(j, path, "label_noise_p", 0.0);
        ds.test_n_per_class = optional_or<std::size_t>(j, path, "test_n_per_class", ds.n_per_class);
    } else if (kind == "markov_text") {
        ds.kind = DatasetSpec::Kind::markov_text;
        reject_unknown_keys(
            j, path, {"kind", "seed", "vocab", "transition_seed", "length", "n_ctx", "test_length"});
        ds.vocab = require<std::size_t>(j, path, "vocab");
        ds.transition_seed = optional_or<std::uint64_t>(j, path, "transition_seed", 0);
        ds.length = require<std::size_t>(j, path, "length");
        ds.n_ctx = require<std::size_t>(j, path, "n_ctx");
        ds.test_length = optional_or<std::size_t>(j, path, "test_length", ds.length / 4);
    } else if (kind == "idx") {
        ds.kind = DatasetSpec::Kind::idx;
        reject_unknown_keys(j, path,
                           {"kind", "seed", "images", "labels", "test_images", "test_labels"});
        ds.images_path = require<std::string>(j, path, "images");
        ds.labels_path = require<std::string>(j, path, "labels");
        ds.test_images_path = require<std::string>(j, path, "test_images");
        ds.test_labels_path = require<std::string>(j, path, "test_labels");
    } else {
        fail(path + ".kind", "unknown dataset kind '" + kind + "'");
    }
    return ds;
}

InitSpec parse_init(const json& j) {
    InitSpec init;
    const std::string path = "model.init";
    reject_unknown_keys(j, path, {"kind", "std"});
    const auto kind = require<std::string>(j, path, "kind");
    if (kind == "xavier_uniform") {
        init.kind = InitSpec::Kind::xavier_uniform;
    } else if (kind == "gaussian") {
        init.kind = InitSpec::Kind::gaussian;
        init.gaussian_std = require<double>(j, path, "std");
    } else {
        fail(path + ".kind", "unknown init kind '" + kind + "'");
    }
    init.validate();
    return init;
}

ModelSpec parse_model(const json& j) {
    const std::string path = "model";
    const auto kind = require<std::string>(j, path, "kind");
    InitSpec init;
    if (j.contains("init")) init = parse_init(j.at("init"));
    const double dropout_p = optional_or<double>(j, path, "dropout_p", 0.0);
    if (kind == "mlp") {
        reject_unknown_keys(j, path, {"kind", "layer_sizes", "dropout_p", "init"});
        return ModelSpec::mlp(require<std::vector<std::size_t>>(j, path, "layer_sizes"), dropout_p,
                              init);
    }
    if (kind == "ngram_lm") {
        reject_unknown_keys(j, path,
                           {"kind", "vocab", "context", "embed_dim", "hidden", "dropout_p", "init"});
        return ModelSpec::ngram_lm(require<std::size_t>(j, path, "vocab"),
                                   require<std::size_t>(j, path, "context"),
                                   require<std::size_t>(j, path, "embed_dim"),
                                   optional_or<std::vector<std::size_t>>(j, path, "hidden", {}),
                                   dropout_p, init);
    }
    fail(path + ".kind", "unknown model kind '" + kind + "'");
}

BatchSchedule parse_batch(const json& j) {
    const std::string path = "train.batch";
    const auto kind = require<std::string>(j, path, "kind");
    if (kind == "fixed") {
        reject_unknown_keys(j, path, {"kind", "size"});
        return BatchSchedule::fixed(require<std::size_t>(j, path, "size"));
    }
    if (kind == "cyclic") {
        reject_unknown_keys(j, path,
                           {"kind", "base", "step_width", "steps", "multiplier", "shape"});
        const auto shape_name = optional_or<std::string>(j, path, "shape", "staircase");
        CycleShape shape;
        if (shape_name == "staircase")
            shape = CycleShape::staircase;
        else if (shape_name == "triangular")
            shape = CycleShape::triangular;
        else
            fail(path + ".shape", "unknown shape '" + shape_name + "'");
        return BatchSchedule::cyclic(require<std::size_t>(j, path, "base"),
                                     require<std::size_t>(j, path, "step_width"),
                                     optional_or<std::size_t>(j, path, "steps", 4),
                                     optional_or<std::size_t>(j, path, "multiplier", 2), shape);
    }
    fail(path + ".kind", "unknown batch schedule kind '" + kind + "'");
}

LrSchedule parse_lr(const json& j) {
    const std::string path = "train.lr";
    const auto kind = require<std::string>(j, path, "kind");
    const double initial = require<double>(j, path, "initial");
    if (kind == "constant") {
        reject_unknown_keys(j, path, {"kind", "initial"});
        return LrSchedule::constant(initial);
    }
    if (kind == "step_decay") {
        reject_unknown_keys(j, path, {"kind", "initial", "milestones", "factor"});
        return LrSchedule::step_decay(initial,
                                      require<std::vector<std::size_t>>(j, path, "milestones"),
                                      require<double>(j, path, "factor"));
    }
    if (kind == "exp_decay_after") {
        reject_unknown_keys(j, path, {"kind", "initial", "start_epoch", "factor"});
        return LrSchedule::exp_decay_after(initial, require<std::size_t>(j, path, "start_epoch"),
                                           require<double>(j, path, "factor"));
    }
    fail(path + ".kind", "unknown lr schedule kind '" + kind + "'");
}

AdvConfig parse_adversarial(const json& j) {
    const std::string path = "train.adversarial";
    reject_unknown_keys(j, path, {"epsilon", "active_fraction", "clamp"});
    AdvConfig adv;
    adv.epsilon = require<double>(j, path, "epsilon");
    adv.active_fraction = optional_or<double>(j, path, "active_fraction", 0.5);
    if (j.contains("clamp")) {
        const auto clamp = require<std::vector<double>>(j, path, "clamp");
        if (clamp.size() != 2) fail(path + ".clamp", "expected [lo, hi]");
        adv.clamp_lo = clamp[0];
        adv.clamp_hi = clamp[1];
    }
    adv.validate();
    return adv;
}

TrainConfig parse_train(const json& j) {
    const std::string path = "train";
    reject_unknown_keys(j, path,
                       {"epochs", "batch", "lr", "clip_norm", "seed", "adversarial",
                        "snapshot_epochs", "eval_every"});
    TrainConfig cfg;
    cfg.epochs = require<std::size_t>(j, path, "epochs");
    if (!j.contains("batch")) fail(path + ".batch", "missing required key");
    cfg.batch_sched = parse_batch(j.at("batch"));
    if (!j.contains("lr")) fail(path + ".lr", "missing required key");
    cfg.lr_sched = parse_lr(j.at("lr"));
    if (j.contains("clip_norm")) cfg.clip_norm = require<double>(j, path, "clip_norm");
    cfg.seed = optional_or<std::uint64_t>(j, path, "seed", 0);
    if (j.contains("adversarial")) cfg.adversarial = parse_adversarial(j.at("adversarial"));
    cfg.snapshot_epochs = optional_or<std::vector<std::size_t>>(j, path, "snapshot_epochs", {});
    cfg.eval_every = optional_or<std::size_t>(j, path, "eval_every", 1);
    cfg.validate();
    return cfg;
}

void cross_validate(const ExperimentConfig& cfg) {
    if (cfg.name.empty()) throw ValidationError("name: must be nonempty");
    for (char c : cfg.name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            throw ValidationError("name: '" + cfg.name + "' is not filesystem-safe");

    const bool lm_model = cfg.model.kind == ModelSpec::Kind::ngram_lm;
    const bool lm_data = cfg.dataset.kind == DatasetSpec::Kind::markov_text;
    if (lm_model != lm_data)
        throw ValidationError("model/dataset mismatch: ngram_lm pairs with markov_text");
    if (lm_model) {
        if (cfg.model.vocab != cfg.dataset.vocab)
            throw ValidationError("model.vocab must equal dataset.vocab");
        if (cfg.model.context_len != cfg.dataset.n_ctx)
            throw ValidationError("model.context must equal dataset.n_ctx");
    } else if (cfg.dataset.kind == DatasetSpec::Kind::blobs) {
        if (cfg.model.layer_sizes.front() != cfg.dataset.dim)
            throw ValidationError("model input width must equal dataset.dim");
        if (cfg.model.layer_sizes.back() != cfg.dataset.classes)
            throw ValidationError("model output width must equal dataset.classes");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    reject_unknown_keys(j, "", {"name", "dataset", "model", "train", "output_dir"});
    ExperimentConfig cfg;
    cfg.name = require<std::string>(j, "", "name");
    if (!j.contains("dataset")) fail("dataset", "missing required key");
    cfg.dataset = parse_dataset(j.at("dataset"));
    if (!j.contains("model")) fail("model", "missing required key");
    cfg.model = parse_model(j.at("model"));
    if (!j.contains("train")) fail("train", "missing required key");
    cfg.train = parse_train(j.at("train"));
    cfg.output_dir = optional_or<std::string>(j, "", "output_dir", "out/" + cfg.name);
    cross_validate(cfg);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;

    json& d = j["dataset"];
    d["seed"] = cfg.dataset.seed;
    switch (cfg.dataset.kind) {
        case DatasetSpec::Kind::blobs:
            d["kind"] = "blobs";
            d["n_per_class"] = cfg.dataset.n_per_class;
            d["classes"] = cfg.dataset.classes;
            d["dim"] = cfg.dataset.dim;
            d["spread"] = cfg.dataset.spread;
            d["label_noise_p"] = cfg.dataset.label_noise_p;
            d["test_n_per_class"] = cfg.dataset.test_n_per_class;
            break;
        case DatasetSpec::Kind::markov_text:
            d["kind"] = "markov_text";
            d["vocab"] = cfg.dataset.vocab;
            d["transition_seed"] = cfg.dataset.transition_seed;
            d["length"] = cfg.dataset.length;
            d["n_ctx"] = cfg.dataset.n_ctx;
            d["test_length"] = cfg.dataset.test_length;
            break;
        case DatasetSpec::Kind::idx:
            d["kind"] = "idx";
            d["images"] = cfg.dataset.images_path;
            d["labels"] = cfg.dataset.labels_path;
            d["test_images"] = cfg.dataset.test_images_path;
            d["test_labels"] = cfg.dataset.test_labels_path;
            break;
    }

    json& m = j["model"];
    if (cfg.model.kind == ModelSpec::Kind::mlp) {
        m["kind"] = "mlp";
        m["layer_sizes"] = cfg.model.layer_sizes;
    } else {
        m["kind"] = "ngram_lm";
        m["vocab"] = cfg.model.vocab;
        m["context"] = cfg.model.context_len;
        m["embed_dim"] = cfg.model.embed_dim;
        m["hidden"] = cfg.model.hidden_sizes;
    }
    m["dropout_p"] = cfg.model.dropout_p;
    if (cfg.model.init.kind == InitSpec::Kind::xavier_uniform) {
        m["init"] = {{"kind", "xavier_uniform"}};
    } else {
        m["init"] = {{"kind", "gaussian"}, {"std", cfg.model.init.gaussian_std}};
    }

    json& t = j["train"];
    t["epochs"] = cfg.train.epochs;
    if (cfg.train.batch_sched.kind == BatchSchedule::Kind::fixed) {
        t["batch"] = {{"kind", "fixed"}, {"size", cfg.train.batch_sched.base_batch}};
    } else {
        t["batch"] = {{"kind", "cyclic"},
                      {"base", cfg.train.batch_sched.base_batch},
                      {"step_width", cfg.train.batch_sched.step_width},
                      {"steps", cfg.train.batch_sched.steps},
                      {"multiplier", cfg.train.batch_sched.multiplier},
                      {"shape", cfg.train.batch_sched.shape == CycleShape::staircase
                                    ? "staircase"
                                    : "triangular"}};
    }
    switch (cfg.train.lr_sched.kind) {
        case LrSchedule::Kind::constant:
            t["lr"] = {{"kind", "constant"}, {"initial", cfg.train.lr_sched.initial}};
            break;
        case LrSchedule::Kind::step_decay:
            t["lr"] = {{"kind", "step_decay"},
                       {"initial", cfg.train.lr_sched.initial},
                       {"milestones", cfg.train.lr_sched.milestones},
                       {"factor", cfg.train.lr_sched.factor}};
            break;
        case LrSchedule::Kind::exp_decay_after:
            t["lr"] = {{"kind", "exp_decay_after"},
                       {"initial", cfg.train.lr_sched.initial},
                       {"start_epoch", cfg.train.lr_sched.start_epoch},
                       {"factor", cfg.train.lr_sched.factor}};
            break;
    }
    if (cfg.train.clip_norm) t["clip_norm"] = *cfg.train.clip_norm;
    t["seed"] = cfg.train.seed;
    if (cfg.train.adversarial) {
        json a;
        a["epsilon"] = cfg.train.adversarial->epsilon;
        a["active_fraction"] = cfg.train.adversarial->active_fraction;
        if (cfg.train.adversarial->clamp_lo)
            a["clamp"] = {*cfg.train.adversarial->clamp_lo, *cfg.train.adversarial->clamp_hi};
        t["adversarial"] = a;
    }
    if (!cfg.train.snapshot_epochs.empty()) t["snapshot_epochs"] = cfg.train.snapshot_epochs;
    t["eval_every"] = cfg.train.eval_every;

    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

Dataset DatasetSpec::make_train() const {
    switch (kind) {
        case Kind::blobs:
            return gen_blobs(n_per_class, classes, dim, spread, label_noise_p, seed);
        case Kind::markov_text:
            return gen_markov_text(vocab, transition_seed, length, n_ctx, seed);
        case Kind::idx:
            return load_idx(images_path, labels_path);
    }
    throw ValidationError("unreachable dataset kind");
}

Dataset DatasetSpec::make_test() const {
    switch (kind) {
        case Kind::blobs:
            // held-out draw from the same distribution, disjoint stream
            return gen_blobs(test_n_per_class, classes, dim, spread, label_noise_p,
                             Rng::mix(seed, 0x74657374ULL));
        case Kind::markov_text:
            return gen_markov_text(vocab, transition_seed, test_length, n_ctx,
                                   Rng::mix(seed, 0x74657374ULL));
        case Kind::idx:
            return load_idx(test_images_path, test_labels_path);
    }
    throw ValidationError("unreachable dataset kind");
}

std::size_t DatasetSpec::train_size() const {
    switch (kind) {
        case Kind::blobs:
            return n_per_class * classes;
        case Kind::markov_text:
            return length - n_ctx;
        case Kind::idx:
            return make_train().size();
    }
    return 0;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metrics_csv_text(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << "epoch,iteration,batch_size,lr,noise_scale,train_loss,train_metric,test_loss,"
          "test_metric,cycle_index,snapshot_taken\n";
    for (const MetricsRow& r : rows) {
        os << r.epoch << ',' << r.iteration << ',' << r.batch_size << ',' << format_real(r.lr)
           << ',' << format_real(r.noise_scale) << ',' << format_real(r.train_loss) << ','
           << format_real(r.train_metric) << ',' << format_real(r.test_loss) << ','
           << format_real(r.test_metric) << ',' << r.cycle_index << ','
           << (r.snapshot_taken ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << metrics_csv_text(rows);
}

std::string plan_csv_text(const std::vector<PlanRow>& rows) {
    std::ostringstream os;
    os << "epoch,batch_size,lr,noise_scale,cycle_index,cycle_end\n";
    for (const PlanRow& r : rows) {
        os << r.epoch << ',' << r.batch_size << ',' << format_real(r.lr) << ','
           << format_real(r.noise_scale) << ',' << r.cycle_index << ',' << (r.cycle_end ? 1 : 0)
           << '\n';
    }
    return os.str();
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("CBS_OUT_DIR"))
        return std::string(env) + "/" + cfg.name;
    return cfg.output_dir;
}

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset train_set = cfg.dataset.make_train();
    const Dataset test_set = cfg.dataset.make_test();

    const std::filesystem::path out_dir = resolve_output_dir(cfg);
    std::filesystem::create_directories(out_dir);

    const TrainResult res = train(cfg.model, train_set, test_set, cfg.train);

    RunArtifacts art;
    art.metrics_csv_path = (out_dir / "metrics.csv").string();
    write_metrics_csv(res.metrics, art.metrics_csv_path);

    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof(name), "snapshot_%03zu.bin", i);
        const std::string path = (out_dir / name).string();
        save_params(res.snapshots[i].params, path);
        art.snapshot_paths.push_back(path);
    }

    const MetricsRow& last = res.metrics.back();
    art.final_test_loss = last.test_loss;
    art.final_test_metric = last.test_metric;
    art.final_train_loss = last.train_loss;
    art.final_train_metric = last.train_metric;
    art.total_iterations = last.iteration;
    const bool lower_better = train_set.kind == Dataset::Kind::lm;
    art.best_test_metric = last.test_metric;
    for (const MetricsRow& r : res.metrics)
        if (lower_better ? r.test_metric < art.best_test_metric
                         : r.test_metric > art.best_test_metric)
            art.best_test_metric = r.test_metric;
    art.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json summary;
    summary["name"] = cfg.name;
    summary["final_test_loss"] = art.final_test_loss;
    summary["final_test_metric"] = art.final_test_metric;
    summary["best_test_metric"] = art.best_test_metric;
    summary["final_train_loss"] = art.final_train_loss;
    summary["final_train_metric"] = art.final_train_metric;
    summary["total_iterations"] = art.total_iterations;
    summary["snapshots"] = art.snapshot_paths.size();
    summary["wall_time_s"] = art.wall_time_s;
    std::ofstream sum_out(out_dir / "summary.json");
    sum_out << summary.dump(2) << '\n';

    return art;
}

ComparisonRecord compare_runs(const ExperimentConfig& baseline, const ExperimentConfig& cbs) {
    auto dataset_json = [](const ExperimentConfig& c) {
        return json::parse(serialize_config(c)).at("dataset");
    };
    auto model_json = [](const ExperimentConfig& c) {
        return json::parse(serialize_config(c)).at("model");
    };
    if (dataset_json(baseline) != dataset_json(cbs))
        throw ContractError("compare: runs must share the dataset spec");
    if (model_json(baseline) != model_json(cbs))
        throw ContractError("compare: runs must share the model spec");
    if (baseline.train.seed != cbs.train.seed)
        throw ContractError("compare: runs must share the seed");
    if (baseline.train.epochs != cbs.train.epochs)
        throw ContractError("compare: runs must share the epoch count");

    ComparisonRecord rec;
    rec.baseline = run_experiment(baseline);
    rec.cbs = run_experiment(cbs);

    const std::size_t n = baseline.dataset.train_size();
    rec.baseline_iterations =
        total_iterations(baseline.train.batch_sched, n, baseline.train.epochs);
    rec.cbs_iterations = total_iterations(cbs.train.batch_sched, n, cbs.train.epochs);
    rec.iteration_reduction_pct =
        100.0 * (1.0 - static_cast<double>(rec.cbs_iterations) /
                           static_cast<double>(rec.baseline_iterations));
    rec.baseline_gap = rec.baseline.final_train_metric - rec.baseline.final_test_metric;
    rec.cbs_gap = rec.cbs.final_train_metric - rec.cbs.final_test_metric;
    return rec;
}

}  // namespace cbs
