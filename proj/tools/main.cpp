// ltml: synthetic long-tailed multi-label experiment harness.
// Subcommands: datagen, train, eval, gradcurves.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ltml/class_stats.hpp"
#include "ltml/csv.hpp"
#include "ltml/datagen.hpp"
#include "ltml/errors.hpp"
#include "ltml/gradcurves.hpp"
#include "ltml/metrics.hpp"
#include "ltml/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::uint64_t fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Options {
    ltml::DatasetConfig data;
    ltml::TrainConfig train;
    std::string loss_kind = "anr";
    std::string llr_mode = "off";
    std::string model_kind = "mlp1";
    std::string data_dir = "dataset";
    std::string out_dir = "out";
    std::string model_path;
    std::string eval_split = "test";
    ltml::GradCurvesConfig curves;
};

void add_options(CLI::App& app, Options& o) {
    app.add_option("--data.num_samples", o.data.num_samples);
    app.add_option("--data.num_classes", o.data.num_classes);
    app.add_option("--data.feature_dim", o.data.feature_dim);
    app.add_option("--data.head_count", o.data.head_count);
    app.add_option("--data.decay_ratio", o.data.decay_ratio);
    app.add_option("--data.latent_dim", o.data.latent_dim);
    app.add_option("--data.shared_factors", o.data.shared_factors);
    app.add_option("--data.mixing_weight", o.data.mixing_weight);
    app.add_option("--data.feature_noise", o.data.feature_noise);
    app.add_option("--data.eta_head", o.data.eta_head);
    app.add_option("--data.eta_medium", o.data.eta_medium);
    app.add_option("--data.eta_tail", o.data.eta_tail);
    app.add_option("--data.split_ratios", o.data.split_ratios)->expected(3);
    app.add_option("--data.seed", o.data.seed);

    app.add_option("--train.learning_rate", o.train.learning_rate);
    app.add_option("--train.momentum", o.train.momentum);
    app.add_option("--train.weight_decay", o.train.weight_decay);
    app.add_option("--train.batch_size", o.train.batch_size);
    app.add_option("--train.epochs", o.train.epochs);
    app.add_option("--train.model", o.model_kind)
        ->check(CLI::IsMember({"linear", "mlp1"}));
    app.add_option("--train.hidden_dim", o.train.hidden_dim);
    app.add_option("--train.seed", o.train.seed);

    app.add_option("--loss.kind", o.loss_kind)
        ->check(CLI::IsMember({"bce", "focal", "nr", "anr"}));
    app.add_option("--loss.beta", o.train.loss.beta);
    app.add_option("--loss.lambda_nr", o.train.loss.lambda_nr);
    app.add_option("--loss.focal_gamma", o.train.loss.focal_gamma);
    app.add_option("--loss.focal_alpha", o.train.loss.focal_alpha);
    app.add_option("--loss.use_bias", o.train.loss.use_bias);

    app.add_option("--llr.mode", o.llr_mode)->check(CLI::IsMember({"off", "lla", "llm"}));
    app.add_option("--llr.rho_max", o.train.llr.rho_max);
    app.add_option("--llr.warmup_epochs", o.train.llr.warmup_epochs);
    app.add_option("--llr.ramp_epochs", o.train.llr.ramp_epochs);

    app.add_option("--sampler.q", o.train.sampler.q);
    app.add_option("--sampler.include_all_negative_pool",
                   o.train.sampler.include_all_negative_pool);

    app.add_option("--curves.beta", o.curves.beta);
    app.add_option("--curves.lambda_nr", o.curves.lambda_nr);
    app.add_option("--curves.u_min", o.curves.u_min);
    app.add_option("--curves.u_max", o.curves.u_max);
    app.add_option("--curves.steps", o.curves.steps);
    app.add_option("--curves.ce_positive_logits", o.curves.ce_positive_logits);

    app.add_option("--data-dir", o.data_dir, "dataset directory");
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--model", o.model_path, "model file (eval)");
    app.add_option("--split", o.eval_split)->check(CLI::IsMember({"val", "test"}));
}

void finish_options(Options& o) {
    o.train.loss.kind = ltml::loss_kind_from_name(o.loss_kind);
    o.train.llr.mode = ltml::llr_mode_from_name(o.llr_mode);
    o.train.model = ltml::model_kind_from_name(o.model_kind);
    o.train.sampler.seed = o.train.seed;
}

json train_config_json(const Options& o) {
    json j;
    j["train"] = {{"learning_rate", o.train.learning_rate},
                  {"momentum", o.train.momentum},
                  {"weight_decay", o.train.weight_decay},
                  {"batch_size", o.train.batch_size},
                  {"epochs", o.train.epochs},
                  {"model", o.model_kind},
                  {"hidden_dim", o.train.hidden_dim},
                  {"seed", o.train.seed}};
    j["loss"] = {{"kind", o.loss_kind},
                 {"beta", o.train.loss.beta},
                 {"lambda_nr", o.train.loss.lambda_nr},
                 {"focal_gamma", o.train.loss.focal_gamma},
                 {"focal_alpha", o.train.loss.focal_alpha},
                 {"use_bias", o.train.loss.use_bias}};
    j["llr"] = {{"mode", o.llr_mode},
                {"rho_max", o.train.llr.rho_max},
                {"warmup_epochs", o.train.llr.warmup_epochs},
                {"ramp_epochs", o.train.llr.ramp_epochs}};
    j["sampler"] = {{"q", o.train.sampler.q},
                    {"include_all_negative_pool", o.train.sampler.include_all_negative_pool}};
    return j;
}

json dataset_hashes(const fs::path& dir) {
    json j;
    for (const char* name : {"features.csv", "labels_clean.csv", "labels_noisy.csv",
                             "noise_mask.csv", "splits.csv", "manifest.json"})
        j[name] = hex64(fnv1a_file(dir / name));
    return j;
}

int cmd_datagen(const Options& o) {
    const auto ds = ltml::generate(o.data);
    ds.save(o.out_dir);
    std::cout << "wrote dataset (" << o.data.num_samples << " samples, "
              << o.data.num_classes << " classes) to " << o.out_dir << "\n";
    return 0;
}

int cmd_train(const Options& o) {
    const auto ds = ltml::SyntheticDataset::load(o.data_dir);
    ltml::Trainer trainer(ds, o.train);
    fs::create_directories(o.out_dir);
    const fs::path out(o.out_dir);

    const json cfg_json = train_config_json(o);
    const std::string cfg_hash = hex64(std::hash<std::string>{}(cfg_json.dump()));

    std::ofstream epoch_log(out / "epochs.jsonl", std::ios::binary);
    for (int e = 0; e < o.train.epochs; ++e) {
        auto log = trainer.train_epoch(e);
        json j = json::parse(log.to_json());
        const auto val = trainer.evaluate(ltml::Split::Val);
        if (val.total.bacc) j["val_total_bacc"] = *val.total.bacc;
        if (val.total.auc) j["val_total_auc"] = *val.total.auc;
        epoch_log << j.dump() << '\n';
    }

    trainer.model().save(out / "model.bin", cfg_hash);
    trainer.evaluate(ltml::Split::Val).write(out / "metrics_val.csv", out / "metrics_val.json");
    trainer.evaluate(ltml::Split::Test)
        .write(out / "metrics_test.csv", out / "metrics_test.json");
    std::ofstream(out / "class_stats.json", std::ios::binary) << trainer.stats().to_json();

    json manifest;
    manifest["command"] = "train";
    manifest["config"] = cfg_json;
    manifest["config_hash"] = cfg_hash;
    manifest["seed"] = o.train.seed;
    manifest["dataset_dir"] = o.data_dir;
    manifest["dataset_hashes"] = dataset_hashes(o.data_dir);
    std::ofstream(out / "manifest.json", std::ios::binary) << manifest.dump(2);

    const auto test = trainer.evaluate(ltml::Split::Test);
    std::cout << "test Total BACC "
              << (test.total.bacc ? ltml::csv::format_double(*test.total.bacc) : "NA")
              << ", AUC "
              << (test.total.auc ? ltml::csv::format_double(*test.total.auc) : "NA") << "\n";
    return 0;
}

int cmd_eval(const Options& o) {
    const auto ds = ltml::SyntheticDataset::load(o.data_dir);
    const fs::path model_path =
        o.model_path.empty() ? fs::path(o.out_dir) / "model.bin" : fs::path(o.model_path);
    const auto model = ltml::Model::load(model_path);

    // Mirror training: stats from the noisy train labels.
    const auto train_rows = ds.rows_of(ltml::Split::Train);
    ltml::LabelMatrix train_labels(train_rows.size(), ds.labels().cols());
    for (std::size_t i = 0; i < train_rows.size(); ++i)
        for (std::size_t c = 0; c < train_labels.cols(); ++c)
            train_labels(i, c) = ds.labels()(train_rows[i], c);
    const auto stats = ltml::compute_class_stats(train_labels);

    const auto split = o.eval_split == "val" ? ltml::Split::Val : ltml::Split::Test;
    const auto rows = ds.rows_of(split);
    ltml::Matrix x(rows.size(), ds.features.cols());
    ltml::LabelMatrix y(rows.size(), ds.labels().cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = ds.features(rows[i], j);
        for (std::size_t c = 0; c < y.cols(); ++c) y(i, c) = ds.labels()(rows[i], c);
    }
    const auto u = ltml::shift_logits(model.forward(x), stats);
    const auto table = ltml::evaluate_scores(u, y, stats.partition);

    fs::create_directories(o.out_dir);
    const fs::path out(o.out_dir);
    table.write(out / ("metrics_" + o.eval_split + ".csv"),
                out / ("metrics_" + o.eval_split + ".json"));
    std::cout << table.to_csv();
    return 0;
}

int cmd_gradcurves(const Options& o) {
    const auto table = ltml::gradient_curves(o.curves);
    fs::create_directories(o.out_dir);
    std::ofstream(fs::path(o.out_dir) / "gradcurves.csv", std::ios::binary)
        << table.to_csv();
    std::cout << "wrote " << (fs::path(o.out_dir) / "gradcurves.csv").string() << "\n";
    return 0;
}

// Flatten TOML sections into the dotted option names used on the command
// line, so `[data] num_samples = 600` binds to `--data.num_samples`.
class FlatTomlConfig : public CLI::ConfigTOML {
  public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigTOML::from_config(input);
        std::vector<CLI::ConfigItem> flat;
        for (auto& item : items) {
            if (item.name == "++" || item.name == "--") continue;  // section markers
            for (auto it = item.parents.rbegin(); it != item.parents.rend(); ++it)
                item.name = *it + "." + item.name;
            item.parents.clear();
            flat.push_back(std::move(item));
        }
        return flat;
    }
};

// `--set key=value` is shorthand for `--key=value`, so overrides compose
// with the TOML config file.
std::vector<std::string> expand_set_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--set" && i + 1 < argc) {
            args.push_back("--" + std::string(argv[++i]));
        } else if (a.rfind("--set=", 0) == 0) {
            args.push_back("--" + a.substr(6));
        } else {
            args.push_back(std::move(a));
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-tailed multi-label classification lab"};
    app.fallthrough();
    Options o;
    add_options(app, o);
    app.set_config("--config", "", "TOML experiment config");
    app.config_formatter(std::make_shared<FlatTomlConfig>());
    app.require_subcommand(1);

    auto* sc_datagen = app.add_subcommand("datagen", "generate a synthetic dataset");
    auto* sc_train = app.add_subcommand("train", "train and evaluate a model");
    auto* sc_eval = app.add_subcommand("eval", "evaluate a saved model");
    auto* sc_curves = app.add_subcommand("gradcurves", "emit gradient-vs-logit curves");

    auto args = expand_set_args(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        finish_options(o);
        if (sc_datagen->parsed()) return cmd_datagen(o);
        if (sc_train->parsed()) return cmd_train(o);
        if (sc_eval->parsed()) return cmd_eval(o);
        if (sc_curves->parsed()) return cmd_gradcurves(o);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ltml::NonFiniteLoss& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}
