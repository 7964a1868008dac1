#include "ltml/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ltml/class_stats.hpp"
#include "ltml/csv.hpp"
#include "ltml/errors.hpp"
#include "ltml/rng.hpp"

namespace ltml {

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

static Split split_from_name(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split tag: " + s);
}

SplitResult stratified_split(const LabelMatrix& labels, std::array<double, 3> ratios,
                             std::uint64_t seed) {
    const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(ratio_sum - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");
    const std::size_t n = labels.rows(), c_count = labels.cols();

    SplitResult res;
    res.assignment.assign(n, Split::Train);
    std::vector<bool> assigned(n, false);

    auto counts = labels.column_sums();
    for (std::size_t c = 0; c < c_count; ++c)
        if (counts[c] > 0 && counts[c] < 25) res.too_few_positives.push_back(c);

    // Remaining per-split demand, overall and per class.
    std::array<double, 3> capacity;
    std::vector<std::array<double, 3>> demand(c_count);
    for (int s = 0; s < 3; ++s) {
        capacity[s] = ratios[s] * static_cast<double>(n);
        for (std::size_t c = 0; c < c_count; ++c)
            demand[c][s] = ratios[s] * static_cast<double>(counts[c]);
    }

    RngState rng = RngState::derive(seed, 101);
    std::vector<std::size_t> row_order(n);
    std::iota(row_order.begin(), row_order.end(), 0);
    for (std::size_t i = n; i > 1; --i)
        std::swap(row_order[i - 1], row_order[rng.uniform_index(i)]);

    std::vector<std::int64_t> remaining(counts.begin(), counts.end());
    auto assign = [&](std::size_t row, int s) {
        res.assignment[row] = static_cast<Split>(s);
        assigned[row] = true;
        capacity[s] -= 1.0;
        for (std::size_t c = 0; c < c_count; ++c) {
            if (labels(row, c)) {
                demand[c][s] -= 1.0;
                remaining[c] -= 1;
            }
        }
    };

    // Scarcest label first; each of its unassigned rows goes to the split
    // with the largest remaining demand for that label.
    while (true) {
        std::size_t cls = c_count;
        for (std::size_t c = 0; c < c_count; ++c)
            if (remaining[c] > 0 && (cls == c_count || remaining[c] < remaining[cls]))
                cls = c;
        if (cls == c_count) break;
        for (std::size_t row : row_order) {
            if (assigned[row] || !labels(row, cls)) continue;
            int best = 0;
            for (int s = 1; s < 3; ++s) {
                if (demand[cls][s] > demand[cls][best] ||
                    (demand[cls][s] == demand[cls][best] && capacity[s] > capacity[best]))
                    best = s;
            }
            assign(row, best);
        }
    }

    // All-negative rows fill whatever overall capacity is left.
    for (std::size_t row : row_order) {
        if (assigned[row]) continue;
        int best = 0;
        for (int s = 1; s < 3; ++s)
            if (capacity[s] > capacity[best]) best = s;
        assign(row, best);
    }
    return res;
}

void DatasetConfig::validate() const {
    if (num_samples <= 0) throw std::invalid_argument("num_samples must be > 0");
    if (num_classes < 3) throw std::invalid_argument("num_classes must be >= 3");
    if (feature_dim == 0) throw std::invalid_argument("feature_dim must be > 0");
    if (decay_ratio <= 0.0 || decay_ratio > 1.0)
        throw std::invalid_argument("decay_ratio must be in (0,1]");
    for (double eta : {eta_head, eta_medium, eta_tail})
        if (eta < 0.0 || eta > 0.5) throw std::invalid_argument("noise rate must be in [0,0.5]");
    if (shared_factors >= effective_latent_dim())
        throw std::invalid_argument("latent_dim must exceed shared_factors");
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double target = std::round(head_count * std::pow(decay_ratio, static_cast<double>(c)));
        if (target < 5.0 || target > static_cast<double>(num_samples) / 2.0)
            throw InfeasiblePrevalence("class " + std::to_string(c) + " target count " +
                                       std::to_string(target) + " outside [5, N/2]");
    }
}

std::vector<std::size_t> SyntheticDataset::rows_of(Split s) const {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < split.size(); ++r)
        if (split[r] == s) rows.push_back(r);
    return rows;
}

SyntheticDataset generate(const DatasetConfig& cfg) {
    cfg.validate();
    const std::size_t n = static_cast<std::size_t>(cfg.num_samples);
    const std::size_t num_c = cfg.num_classes;
    const std::size_t d = cfg.feature_dim;
    const std::size_t latent = cfg.effective_latent_dim();
    const std::size_t num_private = latent - cfg.shared_factors;

    RngState rng_latent = RngState::derive(cfg.seed, 1);
    RngState rng_mix = RngState::derive(cfg.seed, 2);
    RngState rng_weights = RngState::derive(cfg.seed, 3);
    RngState rng_feat_noise = RngState::derive(cfg.seed, 4);
    RngState rng_label_noise = RngState::derive(cfg.seed, 5);

    // z ~ N(0, I); x = A z + feature_noise * eps.
    Matrix z(n, latent);
    for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = rng_latent.normal();

    Matrix mix(d, latent);
    const double scale = 1.0 / std::sqrt(static_cast<double>(latent));
    for (std::size_t i = 0; i < mix.size(); ++i) mix.data()[i] = scale * rng_mix.normal();

    SyntheticDataset ds;
    ds.config = cfg;
    ds.features = Matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < latent; ++l) acc += mix(j, l) * z(r, l);
            ds.features(r, j) = acc + cfg.feature_noise * rng_feat_noise.normal();
        }
    }

    // Class weight vectors: shared component (co-occurrence) plus one
    // private factor per class. Shared loadings are half-normal so every
    // class leans the same way on the shared factors and pairs co-occur
    // above independence. The shared fraction ramps with class index:
    // rare classes ride the shared factors (comorbidity with common
    // classes), common classes are mostly private.
    Matrix weights(num_c, latent);
    for (std::size_t c = 0; c < num_c; ++c) {
        const double ramp =
            num_c > 1 ? static_cast<double>(c) / static_cast<double>(num_c - 1) : 1.0;
        const double share = cfg.mixing_weight * ramp * ramp * ramp;
        double norm2 = 0.0;
        for (std::size_t l = 0; l < cfg.shared_factors; ++l) {
            const double g = std::abs(rng_weights.normal());
            weights(c, l) = g;
            norm2 += g * g;
        }
        const double norm = std::sqrt(std::max(norm2, 1e-300));
        for (std::size_t l = 0; l < cfg.shared_factors; ++l)
            weights(c, l) *= share / norm;
        weights(c, cfg.shared_factors + (c % num_private)) = 1.0 - share;
    }

    // Thresholds by empirical quantile: exactly the target count of
    // scores falls above tau_c (ties have measure zero here).
    ds.clean_labels = LabelMatrix(n, num_c);
    std::vector<double> scores(n);
    for (std::size_t c = 0; c < num_c; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            double acc = 0.0;
            for (std::size_t l = 0; l < latent; ++l) acc += weights(c, l) * z(r, l);
            scores[r] = acc;
        }
        const auto target = static_cast<std::size_t>(
            std::round(cfg.head_count * std::pow(cfg.decay_ratio, static_cast<double>(c))));
        std::vector<double> sorted = scores;
        std::nth_element(sorted.begin(), sorted.begin() + target, sorted.end(),
                         std::greater<>());
        const double tau = sorted[target];
        for (std::size_t r = 0; r < n; ++r)
            if (scores[r] > tau) ds.clean_labels(r, c) = 1;
    }

    auto split_res = stratified_split(ds.clean_labels, cfg.split_ratios, cfg.seed);
    ds.split = std::move(split_res.assignment);

    // Positive->negative flips on train/val only; test stays clean.
    const auto stats = compute_class_stats(ds.clean_labels);
    ds.noisy_labels = ds.clean_labels;
    ds.noise_mask.assign(n * num_c, 0);
    for (std::size_t c = 0; c < num_c; ++c) {
        double eta = cfg.eta_medium;
        if (stats.partition[c] == Subset::Head) eta = cfg.eta_head;
        if (stats.partition[c] == Subset::Tail) eta = cfg.eta_tail;
        for (std::size_t r = 0; r < n; ++r) {
            if (!ds.clean_labels(r, c)) continue;
            const bool flip = rng_label_noise.uniform() < eta;
            if (flip && ds.split[r] != Split::Test) {
                ds.noisy_labels(r, c) = 0;
                ds.noise_mask[r * num_c + c] = 1;
            }
        }
    }
    return ds;
}

void SyntheticDataset::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const std::size_t num_c = clean_labels.cols();
    const auto class_names = csv::default_header("class", num_c);
    csv::write_matrix(dir / "features.csv", features,
                      csv::default_header("f", features.cols()));
    csv::write_labels(dir / "labels_clean.csv", clean_labels, class_names);
    csv::write_labels(dir / "labels_noisy.csv", noisy_labels, class_names);

    LabelMatrix mask(clean_labels.rows(), num_c);
    for (std::size_t r = 0; r < mask.rows(); ++r)
        for (std::size_t c = 0; c < num_c; ++c)
            mask(r, c) = noise_mask[r * num_c + c];
    csv::write_labels(dir / "noise_mask.csv", mask, class_names);

    std::ofstream splits(dir / "splits.csv", std::ios::binary);
    splits << "split\n";
    for (Split s : split) splits << split_name(s) << '\n';

    std::ofstream(dir / "manifest.json", std::ios::binary) << config.to_json();
}

SyntheticDataset SyntheticDataset::load(const std::filesystem::path& dir) {
    SyntheticDataset ds;
    ds.features = csv::read_matrix(dir / "features.csv");
    ds.clean_labels = csv::read_labels(dir / "labels_clean.csv");
    ds.noisy_labels = csv::read_labels(dir / "labels_noisy.csv");
    const LabelMatrix mask = csv::read_labels(dir / "noise_mask.csv");
    ds.noise_mask.assign(mask.raw().begin(), mask.raw().end());

    std::ifstream splits(dir / "splits.csv");
    if (!splits) throw std::runtime_error("cannot open " + (dir / "splits.csv").string());
    std::string line;
    std::getline(splits, line);  // header
    while (std::getline(splits, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ds.split.push_back(split_from_name(line));
    }

    std::ifstream manifest(dir / "manifest.json");
    if (manifest) {
        std::stringstream buf;
        buf << manifest.rdbuf();
        ds.config = DatasetConfig::from_json(buf.str());
    }
    if (ds.split.size() != ds.features.rows())
        throw std::runtime_error("splits.csv row count mismatch");
    return ds;
}

std::string DatasetConfig::to_json() const {
    nlohmann::json j;
    j["num_samples"] = num_samples;
    j["num_classes"] = num_classes;
    j["feature_dim"] = feature_dim;
    j["head_count"] = head_count;
    j["decay_ratio"] = decay_ratio;
    j["latent_dim"] = latent_dim;
    j["shared_factors"] = shared_factors;
    j["mixing_weight"] = mixing_weight;
    j["feature_noise"] = feature_noise;
    j["eta_head"] = eta_head;
    j["eta_medium"] = eta_medium;
    j["eta_tail"] = eta_tail;
    j["split_ratios"] = split_ratios;
    j["seed"] = seed;
    return j.dump(2);
}

DatasetConfig DatasetConfig::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    DatasetConfig cfg;
    cfg.num_samples = j.value("num_samples", cfg.num_samples);
    cfg.num_classes = j.value("num_classes", cfg.num_classes);
    cfg.feature_dim = j.value("feature_dim", cfg.feature_dim);
    cfg.head_count = j.value("head_count", cfg.head_count);
    cfg.decay_ratio = j.value("decay_ratio", cfg.decay_ratio);
    cfg.latent_dim = j.value("latent_dim", cfg.latent_dim);
    cfg.shared_factors = j.value("shared_factors", cfg.shared_factors);
    cfg.mixing_weight = j.value("mixing_weight", cfg.mixing_weight);
    cfg.feature_noise = j.value("feature_noise", cfg.feature_noise);
    cfg.eta_head = j.value("eta_head", cfg.eta_head);
    cfg.eta_medium = j.value("eta_medium", cfg.eta_medium);
    cfg.eta_tail = j.value("eta_tail", cfg.eta_tail);
    if (j.contains("split_ratios")) cfg.split_ratios = j["split_ratios"].get<std::array<double, 3>>();
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

}  // namespace ltml
