#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ltml/class_stats.hpp"
#include "ltml/datagen.hpp"
#include "ltml/llr.hpp"
#include "ltml/losses.hpp"
#include "ltml/matrix.hpp"
#include "ltml/metrics.hpp"
#include "ltml/rng.hpp"
#include "ltml/sampler.hpp"

namespace ltml {

enum class ModelKind { Linear, Mlp1 };

ModelKind model_kind_from_name(const std::string& name);
std::string model_kind_name(ModelKind kind);

/// Linear or one-hidden-layer (ReLU) classifier emitting raw logits.
struct Model {
    ModelKind kind = ModelKind::Linear;
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;  // Mlp1 only
    std::size_t output_dim = 0;

    Matrix w1;                 // input x hidden (Mlp1) or input x output (Linear)
    std::vector<double> b1;
    Matrix w2;                 // hidden x output (Mlp1 only)
    std::vector<double> b2;

    static Model make(ModelKind kind, std::size_t input_dim, std::size_t output_dim,
                      std::size_t hidden_dim, RngState& rng);

    /// Raw logits; optionally emits the ReLU activations (Mlp1).
    LogitMatrix forward(const Matrix& features, Matrix* hidden = nullptr) const;

    void save(const std::filesystem::path& path, const std::string& config_hash) const;
    static Model load(const std::filesystem::path& path, std::string* config_hash = nullptr);
};

struct TrainConfig {
    double learning_rate = 0.02;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::size_t batch_size = 32;
    int epochs = 10;
    ModelKind model = ModelKind::Mlp1;
    std::size_t hidden_dim = 64;
    LossConfig loss;
    LlrConfig llr;
    SamplerConfig sampler;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    double mean_loss = 0.0;
    std::size_t k_last = 0;
    // LLR selection quality against the injected-noise ground truth,
    // when available: per-batch precision and the noisy-among-negatives
    // base rate.
    std::vector<double> selection_precision;
    std::vector<double> noise_base_rate;

    std::string to_json() const;
};

class Trainer {
public:
    Trainer(const SyntheticDataset& dataset, const TrainConfig& cfg);

    const Model& model() const { return model_; }
    const ClassStats& stats() const { return stats_; }
    const TrainConfig& config() const { return cfg_; }

    EpochLog train_epoch(int epoch);
    std::vector<EpochLog> run();  // all configured epochs

    MetricsTable evaluate(Split split) const;

private:
    void step(const Matrix& x_batch, const Matrix& hidden, const LossReport& report);

    const SyntheticDataset& data_;
    TrainConfig cfg_;
    ClassStats stats_;
    ClassIndex train_index_;
    std::vector<std::size_t> train_rows_;
    Model model_;
    RngState sampler_rng_;
    // momentum buffers
    Matrix v_w1_, v_w2_;
    std::vector<double> v_b1_, v_b2_;
};

}  // namespace ltml
