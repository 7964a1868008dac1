#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ltml/class_stats.hpp"
#include "ltml/matrix.hpp"

namespace ltml {

/// Balanced accuracy: (sensitivity + specificity) / 2, prediction
/// positive iff score > threshold. Throws UndefinedMetric without at
/// least one positive and one negative label.
double bacc(std::span<const double> scores, std::span<const std::uint8_t> labels,
            double threshold = 0.0);

/// ROC-AUC as the Mann-Whitney statistic P(s_pos > s_neg) + 0.5 P(tie),
/// computed by sorting with midrank tie handling.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct ClassMetrics {
    std::optional<double> bacc;  // nullopt when the class is undefined in the split
    std::optional<double> auc;
};

struct SubsetAggregate {
    std::optional<double> bacc;
    std::optional<double> auc;
    std::size_t num_classes = 0;
};

struct MetricsTable {
    std::vector<ClassMetrics> per_class;
    SubsetAggregate total, head, medium, tail;
    std::vector<std::size_t> excluded_classes;

    std::string to_csv() const;
    std::string to_json() const;
    void write(const std::filesystem::path& csv_path,
               const std::filesystem::path& json_path) const;
};

/// Unweighted means over member classes; undefined classes are excluded
/// from every aggregate and listed in excluded_classes.
MetricsTable aggregate(const std::vector<ClassMetrics>& per_class,
                       const std::vector<Subset>& partition);

/// Per-class BACC/AUC over score matrix columns, then aggregate.
MetricsTable evaluate_scores(const Matrix& scores, const LabelMatrix& labels,
                             const std::vector<Subset>& partition,
                             double bacc_threshold = 0.0);

}  // namespace ltml
