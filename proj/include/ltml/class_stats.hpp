#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltml/matrix.hpp"

namespace ltml {

enum class Subset { Head, Medium, Tail };

std::string subset_name(Subset s);

struct PartitionConfig {
    // Class is Head if n_i >= t_head, Tail if n_i <= t_tail, else Medium.
    // Unset thresholds default to tercile boundaries of the sorted counts.
    std::optional<std::int64_t> t_head;
    std::optional<std::int64_t> t_tail;
};

/// Per-class statistics of a label matrix: positive counts, the prior
/// bias v_i = log(N/n_i - 1), and the Head/Medium/Tail partition.
struct ClassStats {
    std::int64_t total_samples = 0;
    std::vector<std::int64_t> positives_per_class;
    std::vector<double> bias;
    std::vector<Subset> partition;

    std::size_t num_classes() const { return positives_per_class.size(); }

    std::string to_json() const;
    static ClassStats from_json(const std::string& text);
};

/// Throws DegenerateClass if any class has n_i = 0 or n_i = N.
ClassStats compute_class_stats(const LabelMatrix& labels, const PartitionConfig& cfg = {});

/// u = p - v, broadcast per column. sigmoid(u) = n_i/N at p = 0.
LogitMatrix shift_logits(const LogitMatrix& p, const ClassStats& stats);

}  // namespace ltml
