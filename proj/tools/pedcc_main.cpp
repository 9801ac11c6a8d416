// Command-line front end: centroid generation, synthetic data, single-task
// training, incremental ensemble growth, and evaluation reports. Every run
// writes a JSON run manifest alongside its artifacts so results can be
// replayed from the recorded configuration.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedcc/centroids.hpp"
#include "pedcc/classifier.hpp"
#include "pedcc/dataset.hpp"
#include "pedcc/ensemble.hpp"
#include "pedcc/errors.hpp"
#include "pedcc/serialize.hpp"
#include "pedcc/trainer.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace pedcc;

constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 success, 1 usage, 2 data/format, 3 training/numeric.
int exit_code_for(errc code) {
    switch (code) {
        case errc::invalid_argument:
        case errc::infeasible_simplex:
            return 1;
        case errc::training_diverged:
        case errc::degenerate_feature:
        case errc::cache_mismatch:
            return 3;
        default:
            return 2;
    }
}

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- flat key=value configuration files --------------------------------

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(errc::file_missing, path);
    std::map<std::string, std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(errc::format,
                        path + ":" + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw Error(errc::format, path + ":" + std::to_string(line_no) + ": empty key");
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

// Pulls keys out of the map as they are consumed so leftovers can be
// reported as typos instead of being silently ignored.
class KvReader {
public:
    KvReader(std::string path, std::map<std::string, std::string> values)
        : path_(std::move(path)), values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string take_string(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    double take_double(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const double v = parse_double(key, it->second);
        values_.erase(it);
        return v;
    }

    int take_int(const std::string& key, int fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const int v = static_cast<int>(parse_long(key, it->second));
        values_.erase(it);
        return v;
    }

    std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const auto v = static_cast<std::uint64_t>(parse_long(key, it->second));
        values_.erase(it);
        return v;
    }

    std::vector<int> take_int_list(const std::string& key, std::vector<int> fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<int> out;
        std::string rest = it->second;
        values_.erase(it);
        if (rest.empty()) return out;
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const std::string cell = rest.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            out.push_back(static_cast<int>(parse_long(key, cell)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    void reject_leftovers() const {
        if (values_.empty()) return;
        std::string keys;
        for (const auto& [key, value] : values_) {
            if (!keys.empty()) keys += ", ";
            keys += key;
        }
        throw Error(errc::invalid_argument, "unknown keys in " + path_ + ": " + keys);
    }

private:
    long long parse_long(const std::string& key, const std::string& text) const {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw Error(errc::format, path_ + ": bad integer for " + key + ": '" + text + "'");
        }
    }

    double parse_double(const std::string& key, const std::string& text) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw Error(errc::format, path_ + ": bad number for " + key + ": '" + text + "'");
        }
    }

    std::string path_;
    std::map<std::string, std::string> values_;
};

// input_dim may be omitted; 0 means "infer from the dataset".
NetworkSpec read_network_spec(const std::string& path) {
    KvReader kv(path, read_kv_file(path));
    NetworkSpec spec;
    spec.input_dim = kv.take_int("input_dim", 0);
    spec.hidden_layers = kv.take_int_list("hidden_layers", {});
    spec.feature_dim = kv.take_int("feature_dim", 16);
    spec.activation = activation_from_name(kv.take_string("activation", "relu"));
    kv.reject_leftovers();
    return spec;
}

TrainConfig read_train_config(const std::string& path) {
    KvReader kv(path, read_kv_file(path));
    TrainConfig cfg;
    cfg.epochs = kv.take_int("epochs", cfg.epochs);
    cfg.batch_size = kv.take_int("batch_size", cfg.batch_size);
    cfg.base_lr = kv.take_double("base_lr", cfg.base_lr);
    cfg.lr_drop_epochs = kv.take_int_list("lr_drop_epochs", cfg.lr_drop_epochs);
    cfg.lr_drop_factor = kv.take_double("lr_drop_factor", cfg.lr_drop_factor);
    cfg.momentum = kv.take_double("momentum", cfg.momentum);
    cfg.weight_decay = kv.take_double("weight_decay", cfg.weight_decay);
    cfg.loss.s = kv.take_double("loss.s", cfg.loss.s);
    cfg.loss.m = kv.take_double("loss.m", cfg.loss.m);
    cfg.loss.n = kv.take_double("loss.n", cfg.loss.n);
    cfg.seed = kv.take_u64("seed", cfg.seed);
    kv.reject_leftovers();
    validate_train_config(cfg);
    return cfg;
}

json spec_to_json(const NetworkSpec& spec) {
    return json{{"input_dim", spec.input_dim},
                {"hidden_layers", spec.hidden_layers},
                {"feature_dim", spec.feature_dim},
                {"activation", activation_name(spec.activation)}};
}

json train_config_to_json(const TrainConfig& cfg) {
    return json{{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"base_lr", cfg.base_lr},
                {"lr_drop_epochs", cfg.lr_drop_epochs},
                {"lr_drop_factor", cfg.lr_drop_factor},
                {"momentum", cfg.momentum},
                {"weight_decay", cfg.weight_decay},
                {"loss", json{{"s", cfg.loss.s}, {"m", cfg.loss.m}, {"n", cfg.loss.n}}},
                {"seed", cfg.seed}};
}

// One manifest per run, next to the run's primary artifact. The resolved
// section holds every effective value, defaults included, so a rerun from
// the manifest reproduces the artifact.
struct RunManifest {
    std::string command;
    std::string started;
    json arguments = json::object();
    json resolved = json::object();
    std::vector<std::string> outputs;

    explicit RunManifest(std::string cmd) : command(std::move(cmd)), started(iso_utc_now()) {}

    void write(const std::string& path) const {
        json doc{{"tool", "pedcc"},
                 {"tool_version", kToolVersion},
                 {"command", command},
                 {"started_utc", started},
                 {"finished_utc", iso_utc_now()},
                 {"arguments", arguments},
                 {"resolved", resolved},
                 {"outputs", outputs}};
        std::ofstream out(path);
        if (!out)
            throw Error(errc::io, "cannot write " + path);
        out << doc.dump(2) << "\n";
    }
};

// ---- subcommand bodies ---------------------------------------------------

struct GenCentroidsArgs {
    int classes = 0;
    int dim = 0;
    std::uint64_t seed = 0;
    int iterations = 2000;
    std::string out;
};

int run_gen_centroids(const GenCentroidsArgs& args) {
    RunManifest manifest("gen-centroids");
    manifest.arguments = {{"classes", args.classes},
                          {"dim", args.dim},
                          {"seed", args.seed},
                          {"iterations", args.iterations},
                          {"out", args.out}};
    manifest.resolved = manifest.arguments;

    const CentroidSet c = generate_centroids(args.classes, args.dim, args.seed, args.iterations);
    save_centroids(c, args.out);
    const CentroidStats stats = centroid_stats(c);
    manifest.resolved["max_pairwise_cosine"] = stats.max_cosine;
    manifest.resolved["min_pairwise_angle_deg"] = stats.min_angle_deg;
    manifest.outputs = {args.out};
    manifest.write(args.out + ".run.json");
    std::printf("wrote %s (%d x %d, max cosine %.6f)\n", args.out.c_str(), c.n_classes, c.dim,
                stats.max_cosine);
    return 0;
}

struct SynthArgs {
    int classes = 0;
    int dim = 0;
    int per_class = 0;
    double separation = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_synth(const SynthArgs& args) {
    RunManifest manifest("synth");
    manifest.arguments = {{"classes", args.classes},     {"dim", args.dim},
                          {"per_class", args.per_class}, {"separation", args.separation},
                          {"seed", args.seed},           {"out", args.out}};
    manifest.resolved = manifest.arguments;

    const LabeledDataset data =
        synth_blobs(args.classes, args.dim, args.per_class, args.separation, args.seed);
    save_csv(data, args.out);
    manifest.outputs = {args.out};
    manifest.write(args.out + ".run.json");
    std::printf("wrote %s (%lld samples, %d classes)\n", args.out.c_str(),
                static_cast<long long>(data.size()), args.classes);
    return 0;
}

struct TrainArgs {
    std::string data, spec, config, centroids, out, trace;
};

int run_train(const TrainArgs& args) {
    RunManifest manifest("train");
    manifest.arguments = {{"data", args.data},
                          {"spec", args.spec},
                          {"config", args.config},
                          {"centroids", args.centroids},
                          {"out", args.out},
                          {"trace", args.trace}};

    const LabeledDataset data = load_csv(args.data);
    NetworkSpec spec = read_network_spec(args.spec);
    if (spec.input_dim == 0) spec.input_dim = static_cast<int>(data.dim());
    const TrainConfig cfg = read_train_config(args.config);
    const CentroidSet head = load_centroids(args.centroids);

    manifest.resolved = {{"spec", spec_to_json(spec)},
                         {"train", train_config_to_json(cfg)},
                         {"centroid_file_seed", head.seed}};

    const TrainResult result = train_task(data, head, spec, cfg);
    save_model(result.model, args.out);
    manifest.outputs = {args.out};
    if (!args.trace.empty()) {
        write_trace_csv(result.trace, args.trace);
        manifest.outputs.push_back(args.trace);
    }
    manifest.write(args.out + ".run.json");
    std::printf("wrote %s (final train accuracy %.4f)\n", args.out.c_str(),
                result.trace.back().train_accuracy);
    return 0;
}

struct IncrAddArgs {
    std::string ensemble, data, spec, config;
    std::uint64_t centroid_seed = 0;
    int centroid_iterations = 2000;
};

int run_incr_add(const IncrAddArgs& args) {
    RunManifest manifest("incr-add");
    manifest.arguments = {{"ensemble", args.ensemble},
                          {"data", args.data},
                          {"spec", args.spec},
                          {"config", args.config},
                          {"centroid_seed", args.centroid_seed},
                          {"centroid_iterations", args.centroid_iterations}};

    EnsembleModel ensemble;
    const bool existing = fs::exists(fs::path(args.ensemble) / "manifest.json");
    if (existing) {
        ensemble = restore_ensemble(args.ensemble);
    } else {
        // Flags seed a brand-new ensemble; an existing one keeps its stored values.
        ensemble.centroid_seed = args.centroid_seed;
        ensemble.centroid_iterations = args.centroid_iterations;
    }

    const LabeledDataset data = load_csv(args.data);
    NetworkSpec spec = read_network_spec(args.spec);
    if (spec.input_dim == 0) spec.input_dim = static_cast<int>(data.dim());
    const TrainConfig cfg = read_train_config(args.config);

    manifest.resolved = {{"spec", spec_to_json(spec)},
                         {"train", train_config_to_json(cfg)},
                         {"centroid_seed", ensemble.centroid_seed},
                         {"centroid_iterations", ensemble.centroid_iterations},
                         {"existing_members", existing ? ensemble.members.size() : 0}};

    const std::vector<EpochStats> trace = add_task(ensemble, data, spec, cfg);
    const std::string manifest_path = persist_ensemble(ensemble, args.ensemble);
    const std::size_t member_index = ensemble.members.size() - 1;

    manifest.resolved["new_member_index"] = member_index;
    manifest.resolved["final_train_accuracy"] = trace.back().train_accuracy;
    manifest.outputs = {manifest_path};
    char name[48];
    std::snprintf(name, sizeof(name), "run_incr_add_%03zu.json", member_index);
    manifest.write((fs::path(args.ensemble) / name).string());
    std::printf("ensemble %s now has %zu members (new member train accuracy %.4f)\n",
                args.ensemble.c_str(), ensemble.members.size(), trace.back().train_accuracy);
    return 0;
}

struct EvalArgs {
    std::string ensemble, test, report;
};

int run_eval(const EvalArgs& args) {
    RunManifest manifest("eval");
    manifest.arguments = {{"ensemble", args.ensemble}, {"test", args.test},
                          {"report", args.report}};

    const EnsembleModel ensemble = restore_ensemble(args.ensemble);
    const LabeledDataset test = load_csv(args.test);
    const EvaluationReport report = evaluate(ensemble, test);
    emit_report(report, args.report);

    manifest.resolved = {{"members", ensemble.members.size()},
                         {"test_samples", test.size()},
                         {"cumulative_accuracy", report.cumulative_accuracy}};
    manifest.outputs = {args.report};
    manifest.write(args.report + ".run.json");
    std::printf("wrote %s (overall accuracy %.4f)\n", args.report.c_str(),
                report.cumulative_accuracy.back());
    return 0;
}

struct SubsetEvalArgs {
    std::string model, test, subset, report;
};

int run_subset_eval(const SubsetEvalArgs& args) {
    RunManifest manifest("subset-eval");
    manifest.arguments = {{"model", args.model},
                          {"test", args.test},
                          {"subset", args.subset},
                          {"report", args.report}};

    const NetworkModel model = load_model(args.model);
    const LabeledDataset test = load_csv(args.test);

    std::vector<int> subset;
    {
        std::size_t start = 0;
        while (start <= args.subset.size()) {
            const auto comma = args.subset.find(',', start);
            const std::string cell = args.subset.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            try {
                std::size_t used = 0;
                subset.push_back(std::stoi(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(errc::invalid_argument, "bad subset entry '" + cell + "'");
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    // Score only samples whose true class is inside the restriction — the
    // question answered is "how much does narrowing the candidates help on
    // the classes we kept".
    std::set<int> subset_globals;
    for (int local : subset) {
        if (local < 0 || local >= static_cast<int>(model.label_map.size()))
            throw Error(errc::invalid_argument,
                        "subset index " + std::to_string(local) + " outside the model's classes");
        subset_globals.insert(model.label_map[static_cast<std::size_t>(local)]);
    }

    Eigen::Index samples = 0, full_correct = 0, subset_correct = 0;
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const int truth = test.labels[static_cast<std::size_t>(i)];
        if (!subset_globals.count(truth)) continue;
        ++samples;
        const Eigen::VectorXd sample = test.features.row(i).transpose();
        if (predict(model, sample).global_label == truth) ++full_correct;
        if (subset_predict(model, sample, subset).global_label == truth) ++subset_correct;
    }
    const double full_acc = samples ? static_cast<double>(full_correct) / samples : 0.0;
    const double subset_acc = samples ? static_cast<double>(subset_correct) / samples : 0.0;

    std::ofstream out(args.report);
    if (!out)
        throw Error(errc::io, "cannot write " + args.report);
    char row[96];
    std::snprintf(row, sizeof(row), "%zu,%lld,%.4f,%.4f\n", subset.size(),
                  static_cast<long long>(samples), full_acc, subset_acc);
    out << "subset_size,samples,full_accuracy,subset_accuracy\n" << row;
    out.close();

    manifest.resolved = {{"subset_local_indices", subset},
                         {"samples", samples},
                         {"full_accuracy", full_acc},
                         {"subset_accuracy", subset_acc}};
    manifest.outputs = {args.report};
    manifest.write(args.report + ".run.json");
    std::printf("wrote %s (full %.4f, subset %.4f on %lld samples)\n", args.report.c_str(),
                full_acc, subset_acc, static_cast<long long>(samples));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evenly-spread fixed-centroid classifiers with per-task ensemble growth"};
    app.require_subcommand(1);

    GenCentroidsArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen-centroids", "Generate a centroid file");
    cmd_gen->add_option("--classes", gen.classes, "number of classes")->required();
    cmd_gen->add_option("--dim", gen.dim, "feature dimension")->required();
    cmd_gen->add_option("--seed", gen.seed, "random seed")->default_val(0);
    cmd_gen->add_option("--iterations", gen.iterations, "optimization budget")->default_val(2000);
    cmd_gen->add_option("--out", gen.out, "output path")->required();

    SynthArgs synth;
    CLI::App* cmd_synth = app.add_subcommand("synth", "Generate synthetic Gaussian clusters");
    cmd_synth->add_option("--classes", synth.classes)->required();
    cmd_synth->add_option("--dim", synth.dim)->required();
    cmd_synth->add_option("--per-class", synth.per_class)->required();
    cmd_synth->add_option("--separation", synth.separation)->required();
    cmd_synth->add_option("--seed", synth.seed)->default_val(0);
    cmd_synth->add_option("--out", synth.out)->required();

    TrainArgs train;
    CLI::App* cmd_train = app.add_subcommand("train", "Train one model on one dataset");
    cmd_train->add_option("--data", train.data, "training CSV")->required();
    cmd_train->add_option("--spec", train.spec, "network spec file (key=value)")->required();
    cmd_train->add_option("--config", train.config, "training config file (key=value)")->required();
    cmd_train->add_option("--centroids", train.centroids, "centroid file")->required();
    cmd_train->add_option("--out", train.out, "output model path")->required();
    cmd_train->add_option("--trace", train.trace, "optional per-epoch CSV trace");

    IncrAddArgs incr;
    CLI::App* cmd_incr = app.add_subcommand("incr-add", "Add one class batch to an ensemble");
    cmd_incr->add_option("--ensemble", incr.ensemble, "ensemble directory")->required();
    cmd_incr->add_option("--data", incr.data, "training CSV for the new classes")->required();
    cmd_incr->add_option("--spec", incr.spec)->required();
    cmd_incr->add_option("--config", incr.config)->required();
    cmd_incr->add_option("--centroid-seed", incr.centroid_seed,
                         "centroid seed for a new ensemble (ignored when extending)")
        ->default_val(0);
    cmd_incr->add_option("--centroid-iterations", incr.centroid_iterations)->default_val(2000);

    EvalArgs eval;
    CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate an ensemble on a test CSV");
    cmd_eval->add_option("--ensemble", eval.ensemble)->required();
    cmd_eval->add_option("--test", eval.test)->required();
    cmd_eval->add_option("--report", eval.report)->required();

    SubsetEvalArgs subset;
    CLI::App* cmd_subset = app.add_subcommand("subset-eval",
                                              "Compare full vs subset-restricted prediction");
    cmd_subset->add_option("--model", subset.model)->required();
    cmd_subset->add_option("--test", subset.test)->required();
    cmd_subset->add_option("--subset", subset.subset, "comma-separated local class indices")
        ->required();
    cmd_subset->add_option("--report", subset.report)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Prints help or a parse diagnostic; fold CLI11's assorted parse
        // codes into the single usage exit code.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_gen->parsed()) return run_gen_centroids(gen);
        if (cmd_synth->parsed()) return run_synth(synth);
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_incr->parsed()) return run_incr_add(incr);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_subset->parsed()) return run_subset_eval(subset);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
