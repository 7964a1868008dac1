#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = LTML_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string small_data_args =
    "--data.num_samples 600 --data.num_classes 5 --data.feature_dim 8 "
    "--data.head_count 150 --data.decay_ratio 0.6 --data.seed 7";

}  // namespace

TEST_CASE("datagen writes the five CSVs plus manifest, reproducibly") {
    TempDir tmp("ltml_cli_datagen");
    const auto out1 = tmp.path / "a";
    const auto out2 = tmp.path / "b";
    REQUIRE(run("datagen " + small_data_args + " --out " + out1.string()) == 0);
    REQUIRE(run("datagen " + small_data_args + " --out " + out2.string()) == 0);
    for (const char* f : {"features.csv", "labels_clean.csv", "labels_noisy.csv",
                          "noise_mask.csv", "splits.csv", "manifest.json"}) {
        CHECK(fs::exists(out1 / f));
        CHECK(slurp(out1 / f) == slurp(out2 / f));
    }
}

TEST_CASE("datagen with eta=0 emits identical clean and noisy labels") {
    TempDir tmp("ltml_cli_eta0");
    REQUIRE(run("datagen " + small_data_args +
                " --data.eta_head 0 --data.eta_medium 0 --data.eta_tail 0 --out " +
                tmp.path.string()) == 0);
    CHECK(slurp(tmp.path / "labels_clean.csv") == slurp(tmp.path / "labels_noisy.csv"));
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run("datagen --data.num_classes 2") == 2);
    CHECK(run("datagen --no-such-flag 1") == 2);
    CHECK(run("datagen --data.decay_ratio 0.01") == 2);  // infeasible prevalence
}

TEST_CASE("missing dataset exits with code 3") {
    CHECK(run("train --data-dir /nonexistent/dataset") == 3);
}

TEST_CASE("train then eval, deterministically") {
    TempDir tmp("ltml_cli_train");
    const auto data = tmp.path / "data";
    REQUIRE(run("datagen " + small_data_args + " --out " + data.string()) == 0);

    const std::string train_args = "train --data-dir " + data.string() +
                                   " --train.epochs 2 --train.seed 3 --loss.kind anr "
                                   "--llr.mode lla --out ";
    const auto run1 = tmp.path / "run1";
    const auto run2 = tmp.path / "run2";
    REQUIRE(run(train_args + run1.string()) == 0);
    REQUIRE(run(train_args + run2.string()) == 0);

    for (const char* f : {"model.bin", "epochs.jsonl", "metrics_val.csv", "metrics_test.csv",
                          "metrics_test.json", "manifest.json", "class_stats.json"})
        CHECK(fs::exists(run1 / f));
    // byte-identical replay
    CHECK(slurp(run1 / "metrics_test.csv") == slurp(run2 / "metrics_test.csv"));
    CHECK(slurp(run1 / "metrics_val.csv") == slurp(run2 / "metrics_val.csv"));
    CHECK(slurp(run1 / "model.bin") == slurp(run2 / "model.bin"));
    CHECK(slurp(run1 / "manifest.json") == slurp(run2 / "manifest.json"));

    // eval on the saved model reproduces the test metrics
    const auto eval_out = tmp.path / "eval";
    REQUIRE(run("eval --data-dir " + data.string() + " --model " +
                (run1 / "model.bin").string() + " --split test --out " +
                eval_out.string()) == 0);
    CHECK(slurp(eval_out / "metrics_test.csv") == slurp(run1 / "metrics_test.csv"));
}

TEST_CASE("config file plus --set override") {
    TempDir tmp("ltml_cli_config");
    const auto cfg_path = tmp.path / "exp.toml";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[data]\n"
               "num_samples = 600\n"
               "num_classes = 5\n"
               "feature_dim = 8\n"
               "head_count = 150\n"
               "decay_ratio = 0.6\n"
               "seed = 7\n";
    }
    const auto out1 = tmp.path / "a";
    const auto out2 = tmp.path / "b";
    REQUIRE(run("datagen --config " + cfg_path.string() + " --out " + out1.string()) == 0);
    REQUIRE(run("datagen " + small_data_args + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "features.csv") == slurp(out2 / "features.csv"));

    // --set flips the seed; output must differ
    const auto out3 = tmp.path / "c";
    REQUIRE(run("datagen --config " + cfg_path.string() + " --set data.seed=8 --out " +
                out3.string()) == 0);
    CHECK(slurp(out3 / "features.csv") != slurp(out2 / "features.csv"));
}

TEST_CASE("gradcurves emits the expected columns") {
    TempDir tmp("ltml_cli_curves");
    REQUIRE(run("gradcurves --curves.steps 11 --curves.u_min -5 --curves.u_max 5 --out " +
                tmp.path.string()) == 0);
    const auto text = slurp(tmp.path / "gradcurves.csv");
    CHECK(text.find("u,grad_bce,grad_nr,grad_anr,ce_grad_pos0") == 0);
    // 11 data rows + header
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);
}
