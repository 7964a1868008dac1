#include "ltml/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "ltml/errors.hpp"

namespace ltml {

void SamplerConfig::validate() const {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("sampler q must be in [0,1]");
}

ClassIndex build_index(const LabelMatrix& labels) {
    if (labels.rows() == 0) throw std::invalid_argument("build_index: empty labels");
    ClassIndex idx;
    idx.num_rows = labels.rows();
    idx.per_class.resize(labels.cols());
    for (std::size_t r = 0; r < labels.rows(); ++r) {
        bool any = false;
        for (std::size_t c = 0; c < labels.cols(); ++c) {
            if (labels(r, c)) {
                idx.per_class[c].push_back(r);
                any = true;
            }
        }
        if (!any) idx.all_negative_pool.push_back(r);
    }
    return idx;
}

std::vector<std::size_t> sample_batch(const ClassIndex& index, const SamplerConfig& cfg,
                                      std::size_t batch_size, RngState& rng) {
    cfg.validate();
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

    // Pools: the per-class lists, plus the all-negative pool as one
    // pseudo-class when enabled and non-empty.
    std::vector<const std::vector<std::size_t>*> pools;
    std::vector<double> weights;
    auto add_pool = [&](const std::vector<std::size_t>& pool) {
        const double w = std::pow(static_cast<double>(pool.size()), cfg.q);
        if (pool.empty()) {
            if (w != 0.0) throw EmptyClass("sampler: empty class with nonzero mass");
            return;
        }
        pools.push_back(&pool);
        weights.push_back(w);
    };
    for (const auto& pool : index.per_class) add_pool(pool);
    if (cfg.include_all_negative_pool && !index.all_negative_pool.empty())
        add_pool(index.all_negative_pool);
    if (pools.empty()) throw EmptyClass("sampler: no non-empty pools");

    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) cdf[i] = (acc += weights[i]);

    std::vector<std::size_t> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        const double x = rng.uniform() * acc;
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] > x) hi = mid; else lo = mid + 1;
        }
        const auto& pool = *pools[lo];
        batch.push_back(pool[rng.uniform_index(pool.size())]);
    }
    return batch;
}

}  // namespace ltml
