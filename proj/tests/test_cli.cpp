#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pedcc/centroids.hpp"
#include "pedcc/dataset.hpp"
#include "pedcc/ensemble.hpp"
#include "pedcc/serialize.hpp"

using namespace pedcc;

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

const char* cli_path() {
    const char* path = std::getenv("PEDCC_CLI");
    REQUIRE_MESSAGE(path != nullptr, "PEDCC_CLI must point at the executable");
    return path;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pedcc_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

CommandResult run_cli(const TempDir& tmp, const std::string& args) {
    const std::string log = tmp.file("cmd.log");
    const std::string command =
        std::string("\"") + cli_path() + "\" " + args + " > \"" + log + "\" 2>&1";
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

void write_spec_file(const std::string& path, const std::string& hidden, int feature_dim) {
    std::ofstream out(path);
    out << "hidden_layers=" << hidden << "\n"
        << "feature_dim=" << feature_dim << "\n"
        << "activation=relu\n";
}

void write_config_file(const std::string& path, int epochs, std::uint64_t seed) {
    std::ofstream out(path);
    out << "epochs=" << epochs << "\n"
        << "batch_size=64\n"
        << "base_lr=0.1\n"
        << "lr_drop_epochs=" << (epochs * 2 / 3) << "\n"
        << "seed=" << seed << "\n";
}

}  // namespace

TEST_CASE("gen-centroids writes an antipodal pair") {
    TempDir tmp;
    const auto r = run_cli(tmp, "gen-centroids --classes 2 --dim 3 --seed 1 --out " +
                                    tmp.file("c.pedcc"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);

    const CentroidSet c = load_centroids(tmp.file("c.pedcc"));
    CHECK(c.n_classes == 2);
    CHECK(c.rows.row(0).dot(c.rows.row(1)) <= -1.0 + 1e-3);
    CHECK(fs::exists(tmp.file("c.pedcc.run.json")));  // run manifest alongside
}

TEST_CASE("the full pipeline matches library-level evaluation") {
    TempDir tmp;
    write_spec_file(tmp.file("net.spec"), "24", 8);
    write_config_file(tmp.file("train.cfg"), 12, 5);

    REQUIRE(run_cli(tmp, "synth --classes 3 --dim 8 --per-class 40 --separation 5 --seed 3 --out " +
                             tmp.file("t0.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "synth --classes 3 --dim 8 --per-class 15 --separation 5 --seed 9 --out " +
                             tmp.file("test.csv"))
                .exit_code == 0);

    const auto add = run_cli(tmp, "incr-add --ensemble " + tmp.file("ens") + " --data " +
                                      tmp.file("t0.csv") + " --spec " + tmp.file("net.spec") +
                                      " --config " + tmp.file("train.cfg"));
    REQUIRE_MESSAGE(add.exit_code == 0, add.output);

    const auto eval = run_cli(tmp, "eval --ensemble " + tmp.file("ens") + " --test " +
                                       tmp.file("test.csv") + " --report " + tmp.file("report.csv"));
    REQUIRE_MESSAGE(eval.exit_code == 0, eval.output);

    // The CLI must agree with a direct library computation on the same inputs.
    const EnsembleModel ensemble = restore_ensemble(tmp.file("ens"));
    const LabeledDataset test = load_csv(tmp.file("test.csv"));
    const EvaluationReport report = evaluate(ensemble, test);
    std::ostringstream expected;
    emit_report(report, expected);

    std::ifstream in(tmp.file("report.csv"));
    std::ostringstream actual;
    actual << in.rdbuf();
    CHECK(actual.str() == expected.str());
}

TEST_CASE("incremental growth keeps prior member files byte-identical") {
    TempDir tmp;
    write_spec_file(tmp.file("net.spec"), "16", 6);
    write_config_file(tmp.file("train.cfg"), 6, 1);

    REQUIRE(run_cli(tmp, "synth --classes 2 --dim 6 --per-class 30 --separation 5 --seed 1 --out " +
                             tmp.file("t0.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "incr-add --ensemble " + tmp.file("ens") + " --data " + tmp.file("t0.csv") +
                             " --spec " + tmp.file("net.spec") + " --config " + tmp.file("train.cfg"))
                .exit_code == 0);

    std::ifstream first(tmp.file("ens") + "/member_000.json");
    std::ostringstream before;
    before << first.rdbuf();

    // Second task: same generator, labels shifted to stay disjoint.
    {
        LabeledDataset t1 = offset_labels(synth_blobs(2, 6, 30, 5.0, 2), 2);
        save_csv(t1, tmp.file("t1.csv"));
    }
    REQUIRE(run_cli(tmp, "incr-add --ensemble " + tmp.file("ens") + " --data " + tmp.file("t1.csv") +
                             " --spec " + tmp.file("net.spec") + " --config " + tmp.file("train.cfg"))
                .exit_code == 0);

    std::ifstream second(tmp.file("ens") + "/member_000.json");
    std::ostringstream after;
    after << second.rdbuf();
    CHECK(after.str() == before.str());
    CHECK(fs::exists(tmp.file("ens") + "/member_001.json"));
}

TEST_CASE("overlapping labels surface as a disjointness diagnostic") {
    TempDir tmp;
    write_spec_file(tmp.file("net.spec"), "16", 6);
    write_config_file(tmp.file("train.cfg"), 4, 1);
    REQUIRE(run_cli(tmp, "synth --classes 2 --dim 6 --per-class 20 --separation 5 --seed 1 --out " +
                             tmp.file("t0.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "incr-add --ensemble " + tmp.file("ens") + " --data " + tmp.file("t0.csv") +
                             " --spec " + tmp.file("net.spec") + " --config " + tmp.file("train.cfg"))
                .exit_code == 0);

    const auto again = run_cli(tmp, "incr-add --ensemble " + tmp.file("ens") + " --data " +
                                        tmp.file("t0.csv") + " --spec " + tmp.file("net.spec") +
                                        " --config " + tmp.file("train.cfg"));
    CHECK(again.exit_code == 2);
    CHECK(again.output.find("disjoint") != std::string::npos);
}

TEST_CASE("subset restriction is reported against the full model") {
    TempDir tmp;
    write_spec_file(tmp.file("net.spec"), "24", 8);
    write_config_file(tmp.file("train.cfg"), 12, 2);
    REQUIRE(run_cli(tmp, "synth --classes 4 --dim 8 --per-class 40 --separation 4 --seed 2 --out " +
                             tmp.file("train.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "synth --classes 4 --dim 8 --per-class 20 --separation 4 --seed 7 --out " +
                             tmp.file("test.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "gen-centroids --classes 4 --dim 8 --seed 0 --out " + tmp.file("c.pedcc"))
                .exit_code == 0);
    const auto train = run_cli(tmp, "train --data " + tmp.file("train.csv") + " --spec " +
                                        tmp.file("net.spec") + " --config " + tmp.file("train.cfg") +
                                        " --centroids " + tmp.file("c.pedcc") + " --out " +
                                        tmp.file("model.json") + " --trace " + tmp.file("trace.csv"));
    REQUIRE_MESSAGE(train.exit_code == 0, train.output);
    CHECK(fs::exists(tmp.file("trace.csv")));

    const auto sub = run_cli(tmp, "subset-eval --model " + tmp.file("model.json") + " --test " +
                                      tmp.file("test.csv") + " --subset 0,2 --report " +
                                      tmp.file("subset.csv"));
    REQUIRE_MESSAGE(sub.exit_code == 0, sub.output);

    std::ifstream in(tmp.file("subset.csv"));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "subset_size,samples,full_accuracy,subset_accuracy");
    // subset_size,samples,full,subset — restriction can never hurt on
    // subset-true samples.
    const auto p1 = row.find(','), p2 = row.find(',', p1 + 1), p3 = row.find(',', p2 + 1);
    REQUIRE(p3 != std::string::npos);
    CHECK(row.substr(0, p1) == "2");
    CHECK(std::stoi(row.substr(p1 + 1, p2 - p1 - 1)) == 40);
    CHECK(std::stod(row.substr(p3 + 1)) >= std::stod(row.substr(p2 + 1, p3 - p2 - 1)));
}

TEST_CASE("usage problems exit 1") {
    TempDir tmp;
    CHECK(run_cli(tmp, "no-such-command").exit_code == 1);
    CHECK(run_cli(tmp, "gen-centroids --classes 2").exit_code == 1);  // missing required flags
    CHECK(run_cli(tmp, "gen-centroids --classes 1 --dim 3 --out " + tmp.file("x")).exit_code == 1);
}

TEST_CASE("data problems exit 2") {
    TempDir tmp;
    write_spec_file(tmp.file("net.spec"), "16", 6);
    write_config_file(tmp.file("train.cfg"), 4, 1);
    const auto r = run_cli(tmp, "eval --ensemble " + tmp.file("ens") + " --test " +
                                    tmp.file("absent.csv") + " --report " + tmp.file("r.csv"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.rfind("error: ", 0) == 0);
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 1);  // single-line diagnostic
}

TEST_CASE("training blowups exit 3") {
    TempDir tmp;
    std::ofstream(tmp.file("id.spec")) << "hidden_layers=16\nfeature_dim=6\nactivation=identity\n";
    std::ofstream(tmp.file("hot.cfg")) << "epochs=4\nbatch_size=8\nbase_lr=1e160\nlr_drop_epochs=\n";
    REQUIRE(run_cli(tmp, "synth --classes 2 --dim 6 --per-class 20 --separation 4 --seed 1 --out " +
                             tmp.file("d.csv"))
                .exit_code == 0);
    REQUIRE(run_cli(tmp, "gen-centroids --classes 2 --dim 6 --seed 0 --out " + tmp.file("c.pedcc"))
                .exit_code == 0);
    const auto r = run_cli(tmp, "train --data " + tmp.file("d.csv") + " --spec " + tmp.file("id.spec") +
                                    " --config " + tmp.file("hot.cfg") + " --centroids " +
                                    tmp.file("c.pedcc") + " --out " + tmp.file("m.json"));
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("diverged") != std::string::npos);
}

TEST_CASE("run manifests record the resolved configuration") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, "synth --classes 2 --dim 4 --per-class 10 --separation 3 --seed 8 --out " +
                             tmp.file("d.csv"))
                .exit_code == 0);
    std::ifstream in(tmp.file("d.csv.run.json"));
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    CHECK(text.find("\"command\": \"synth\"") != std::string::npos);
    CHECK(text.find("\"separation\": 3.0") != std::string::npos);
    CHECK(text.find("\"seed\": 8") != std::string::npos);
    CHECK(text.find("started_utc") != std::string::npos);
}
