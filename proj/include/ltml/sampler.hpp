#pragma once

#include <cstdint>
#include <vector>

#include "ltml/matrix.hpp"
#include "ltml/rng.hpp"

namespace ltml {

struct SamplerConfig {
    double q = 0.0;  // class-frequency smoothing exponent; 0 = uniform over classes
    bool include_all_negative_pool = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per-class instance lists plus the pool of rows with no positive label.
struct ClassIndex {
    std::vector<std::vector<std::size_t>> per_class;
    std::vector<std::size_t> all_negative_pool;
    std::size_t num_rows = 0;
};

ClassIndex build_index(const LabelMatrix& labels);

/// Two-stage class-aware draw: pick a class with probability
/// proportional to n_c^q (the all-negative pool acts as one pseudo-class
/// when enabled), then an instance uniformly within it. Draws are i.i.d.
/// with replacement. Throws EmptyClass when q gives an empty class
/// nonzero mass.
std::vector<std::size_t> sample_batch(const ClassIndex& index, const SamplerConfig& cfg,
                                      std::size_t batch_size, RngState& rng);

}  // namespace ltml
