#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ltml/matrix.hpp"

namespace ltml {

enum class Split { Train, Val, Test };

std::string split_name(Split s);

struct SplitResult {
    std::vector<Split> assignment;
    std::vector<std::size_t> too_few_positives;  // classes under 25 positives
};

/// Greedy iterative stratification: per-class positive prevalence in each
/// split tracks the global prevalence; deterministic given the seed.
SplitResult stratified_split(const LabelMatrix& labels, std::array<double, 3> ratios,
                             std::uint64_t seed);

struct DatasetConfig {
    std::int64_t num_samples = 20000;
    std::size_t num_classes = 20;
    std::size_t feature_dim = 64;

    // Geometric prevalence law: class c targets round(head_count * decay_ratio^c).
    double head_count = 5000.0;
    double decay_ratio = 0.72;

    // Latent-factor model. Class weight vectors mix a component on the
    // first shared_factors coordinates (driving co-occurrence) with a
    // private per-class factor. latent_dim 0 means shared + one private
    // factor per class.
    std::size_t latent_dim = 0;
    std::size_t shared_factors = 8;
    double mixing_weight = 0.7;
    double feature_noise = 1.0;

    // Positive->negative flip rates on train/val rows, per class group.
    double eta_head = 0.02;
    double eta_medium = 0.1;
    double eta_tail = 0.1;

    std::array<double, 3> split_ratios{0.7, 0.1, 0.2};
    std::uint64_t seed = 0;

    std::size_t effective_latent_dim() const {
        return latent_dim ? latent_dim : shared_factors + num_classes;
    }
    void validate() const;
    std::string to_json() const;
    static DatasetConfig from_json(const std::string& text);
};

struct SyntheticDataset {
    Matrix features;
    LabelMatrix clean_labels;
    LabelMatrix noisy_labels;
    std::vector<std::uint8_t> noise_mask;  // N*C row-major, true where a flip occurred
    std::vector<Split> split;
    DatasetConfig config;

    bool noise_at(std::size_t r, std::size_t c) const {
        return noise_mask[r * clean_labels.cols() + c] != 0;
    }
    std::vector<std::size_t> rows_of(Split s) const;

    /// labels for training/eval: noisy on train/val, and identical to
    /// clean on test by construction.
    const LabelMatrix& labels() const { return noisy_labels; }

    void save(const std::filesystem::path& dir) const;
    static SyntheticDataset load(const std::filesystem::path& dir);
};

SyntheticDataset generate(const DatasetConfig& cfg);

}  // namespace ltml
