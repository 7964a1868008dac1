#include "ltml/class_stats.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace ltml {

std::string subset_name(Subset s) {
    switch (s) {
        case Subset::Head: return "Head";
        case Subset::Medium: return "Medium";
        case Subset::Tail: return "Tail";
    }
    return "?";
}

static Subset subset_from_name(const std::string& s) {
    if (s == "Head") return Subset::Head;
    if (s == "Medium") return Subset::Medium;
    if (s == "Tail") return Subset::Tail;
    throw std::invalid_argument("unknown subset tag: " + s);
}

ClassStats compute_class_stats(const LabelMatrix& labels, const PartitionConfig& cfg) {
    if (labels.rows() == 0 || labels.cols() == 0)
        throw std::invalid_argument("compute_class_stats: empty label matrix");

    ClassStats st;
    st.total_samples = static_cast<std::int64_t>(labels.rows());
    st.positives_per_class = labels.column_sums();

    const auto n_total = st.total_samples;
    for (std::size_t c = 0; c < st.positives_per_class.size(); ++c) {
        const auto n = st.positives_per_class[c];
        if (n == 0 || n == n_total)
            throw DegenerateClass("class " + std::to_string(c) + " has n_i = " +
                                  std::to_string(n) + " of N = " + std::to_string(n_total));
        st.bias.push_back(std::log(static_cast<double>(n_total) / static_cast<double>(n) - 1.0));
    }

    std::int64_t t_head, t_tail;
    if (cfg.t_head && cfg.t_tail) {
        t_head = *cfg.t_head;
        t_tail = *cfg.t_tail;
    } else {
        // Tercile boundaries of the sorted per-class counts.
        auto sorted = st.positives_per_class;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t c_minus_1 = sorted.size() - 1;
        t_tail = cfg.t_tail ? *cfg.t_tail : sorted[c_minus_1 / 3];
        t_head = cfg.t_head ? *cfg.t_head : sorted[c_minus_1 - c_minus_1 / 3];
    }

    for (const auto n : st.positives_per_class) {
        if (n >= t_head)
            st.partition.push_back(Subset::Head);
        else if (n <= t_tail)
            st.partition.push_back(Subset::Tail);
        else
            st.partition.push_back(Subset::Medium);
    }
    return st;
}

LogitMatrix shift_logits(const LogitMatrix& p, const ClassStats& stats) {
    if (p.cols() != stats.num_classes())
        throw ShapeMismatch("shift_logits: logit columns != class count");
    LogitMatrix u(p.rows(), p.cols());
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c)
            u(r, c) = p(r, c) - stats.bias[c];
    return u;
}

std::string ClassStats::to_json() const {
    nlohmann::json j;
    j["N"] = total_samples;
    j["n"] = positives_per_class;
    j["v"] = bias;
    std::vector<std::string> tags;
    for (auto s : partition) tags.push_back(subset_name(s));
    j["partition"] = tags;
    return j.dump(2);
}

ClassStats ClassStats::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ClassStats st;
    st.total_samples = j.at("N").get<std::int64_t>();
    st.positives_per_class = j.at("n").get<std::vector<std::int64_t>>();
    st.bias = j.at("v").get<std::vector<double>>();
    for (const auto& tag : j.at("partition"))
        st.partition.push_back(subset_from_name(tag.get<std::string>()));
    return st;
}

}  // namespace ltml
