#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ltml/losses.hpp"
#include "ltml/matrix.hpp"

namespace ltml {

enum class LlrMode { Off, LLA, LLM };

LlrMode llr_mode_from_name(const std::string& name);
std::string llr_mode_name(LlrMode mode);

struct LlrConfig {
    LlrMode mode = LlrMode::Off;
    double rho_max = 0.05;     // max fraction of negative entries reconsidered
    int warmup_epochs = 1;
    int ramp_epochs = 5;

    void validate() const;
};

/// Per-batch selection of suspected-noisy negative entries.
struct LlrSelection {
    std::vector<std::uint8_t> mask;  // B*C row-major, true only where y = 0
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t k = 0;
    int epoch = 0;

    bool at(std::size_t r, std::size_t c) const { return mask[r * cols + c] != 0; }
};

/// k = ceil(rho(epoch) * negatives), rho ramping linearly from 0 after
/// warmup to rho_max over ramp_epochs.
std::size_t k_schedule(int epoch, std::size_t negatives_in_batch, const LlrConfig& cfg);

/// Marks the k negative-labeled entries with the largest per-entry loss.
/// Ties break lexicographically by (row, col); k clamps to the number of
/// negatives available.
LlrSelection select_large_losses(const LossReport& report, const LabelMatrix& y,
                                 std::size_t k);

/// Large loss abandoning: zero out the selected entries' loss and
/// gradient, recompute the total.
LossReport apply_lla(const LossReport& report, const LlrSelection& sel);

using LossFn = std::function<LossReport(const LogitMatrix&, const LabelMatrix&)>;

/// Large loss modifying: flip the selected negatives to positive for this
/// batch only and re-evaluate loss_fn. The caller's labels are untouched.
LossReport apply_llm(const LogitMatrix& u, const LabelMatrix& y, const LlrSelection& sel,
                     const LossFn& loss_fn);

}  // namespace ltml
