#include "ltml/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ltml/csv.hpp"
#include "ltml/errors.hpp"

namespace ltml {

static void check_binary_split(std::span<const std::uint8_t> labels) {
    bool has_pos = false, has_neg = false;
    for (auto y : labels) (y ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw UndefinedMetric("metric needs at least one positive and one negative");
}

double bacc(std::span<const double> scores, std::span<const std::uint8_t> labels,
            double threshold) {
    if (scores.size() != labels.size()) throw ShapeMismatch("bacc: size mismatch");
    check_binary_split(labels);
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > threshold;
        if (labels[i])
            (pred ? tp : fn)++;
        else
            (pred ? fp : tn)++;
    }
    const double sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return 0.5 * (sens + spec);
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw ShapeMismatch("auc: size mismatch");
    check_binary_split(labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos n_neg).
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // (i+1 + j)/2
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]]) {
                rank_sum_pos += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricsTable aggregate(const std::vector<ClassMetrics>& per_class,
                       const std::vector<Subset>& partition) {
    if (per_class.size() != partition.size())
        throw ShapeMismatch("aggregate: partition does not cover the classes");
    MetricsTable table;
    table.per_class = per_class;

    struct Acc { double bacc = 0, auc = 0; std::size_t n = 0; };
    Acc total, by_subset[3];
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        const auto& m = per_class[c];
        if (!m.bacc || !m.auc) {
            table.excluded_classes.push_back(c);
            continue;
        }
        for (Acc* acc : {&total, &by_subset[static_cast<int>(partition[c])]}) {
            acc->bacc += *m.bacc;
            acc->auc += *m.auc;
            acc->n += 1;
        }
    }
    auto finish = [](const Acc& a) {
        SubsetAggregate out;
        out.num_classes = a.n;
        if (a.n > 0) {
            out.bacc = a.bacc / static_cast<double>(a.n);
            out.auc = a.auc / static_cast<double>(a.n);
        }
        return out;
    };
    table.total = finish(total);
    table.head = finish(by_subset[static_cast<int>(Subset::Head)]);
    table.medium = finish(by_subset[static_cast<int>(Subset::Medium)]);
    table.tail = finish(by_subset[static_cast<int>(Subset::Tail)]);
    return table;
}

MetricsTable evaluate_scores(const Matrix& scores, const LabelMatrix& labels,
                             const std::vector<Subset>& partition, double bacc_threshold) {
    require_same_shape(scores, labels, "evaluate_scores");
    std::vector<ClassMetrics> per_class(scores.cols());
    std::vector<double> s(scores.rows());
    std::vector<std::uint8_t> y(scores.rows());
    for (std::size_t c = 0; c < scores.cols(); ++c) {
        for (std::size_t r = 0; r < scores.rows(); ++r) {
            s[r] = scores(r, c);
            y[r] = labels(r, c);
        }
        try {
            per_class[c].bacc = bacc(s, y, bacc_threshold);
            per_class[c].auc = auc(s, y);
        } catch (const UndefinedMetric&) {
            per_class[c] = {};
        }
    }
    return aggregate(per_class, partition);
}

static std::string opt_str(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : "NA";
}

std::string MetricsTable::to_csv() const {
    std::ostringstream out;
    out << "name,bacc,auc\n";
    for (std::size_t c = 0; c < per_class.size(); ++c)
        out << "class" << c << ',' << opt_str(per_class[c].bacc) << ','
            << opt_str(per_class[c].auc) << '\n';
    const std::pair<const char*, const SubsetAggregate*> aggs[] = {
        {"Total", &total}, {"Head", &head}, {"Medium", &medium}, {"Tail", &tail}};
    for (const auto& [name, agg] : aggs)
        out << name << ',' << opt_str(agg->bacc) << ',' << opt_str(agg->auc) << '\n';
    return out.str();
}

std::string MetricsTable::to_json() const {
    nlohmann::json j;
    auto put = [](nlohmann::json& dst, const char* key, const std::optional<double>& v) {
        if (v) dst[key] = *v; else dst[key] = nullptr;
    };
    j["per_class"] = nlohmann::json::array();
    for (const auto& m : per_class) {
        nlohmann::json e;
        put(e, "bacc", m.bacc);
        put(e, "auc", m.auc);
        j["per_class"].push_back(e);
    }
    const std::pair<const char*, const SubsetAggregate*> aggs[] = {
        {"Total", &total}, {"Head", &head}, {"Medium", &medium}, {"Tail", &tail}};
    for (const auto& [name, agg] : aggs) {
        nlohmann::json e;
        put(e, "bacc", agg->bacc);
        put(e, "auc", agg->auc);
        e["num_classes"] = agg->num_classes;
        j["aggregates"][name] = e;
    }
    j["excluded_classes"] = excluded_classes;
    return j.dump(2);
}

void MetricsTable::write(const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path) const {
    std::ofstream(csv_path, std::ios::binary) << to_csv();
    std::ofstream(json_path, std::ios::binary) << to_json();
}

}  // namespace ltml
