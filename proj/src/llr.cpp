#include "ltml/llr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace ltml {

LlrMode llr_mode_from_name(const std::string& name) {
    if (name == "off") return LlrMode::Off;
    if (name == "lla") return LlrMode::LLA;
    if (name == "llm") return LlrMode::LLM;
    throw std::invalid_argument("unknown llr mode: " + name);
}

std::string llr_mode_name(LlrMode mode) {
    switch (mode) {
        case LlrMode::Off: return "off";
        case LlrMode::LLA: return "lla";
        case LlrMode::LLM: return "llm";
    }
    return "?";
}

void LlrConfig::validate() const {
    if (rho_max < 0.0 || rho_max > 1.0)
        throw std::invalid_argument("llr rho_max must be in [0,1]");
    if (warmup_epochs < 0) throw std::invalid_argument("llr warmup_epochs must be >= 0");
    if (ramp_epochs < 1) throw std::invalid_argument("llr ramp_epochs must be >= 1");
}

std::size_t k_schedule(int epoch, std::size_t negatives_in_batch, const LlrConfig& cfg) {
    cfg.validate();
    double t = static_cast<double>(epoch - cfg.warmup_epochs) / cfg.ramp_epochs;
    t = std::clamp(t, 0.0, 1.0);
    const double rho = cfg.rho_max * t;
    return static_cast<std::size_t>(std::ceil(rho * static_cast<double>(negatives_in_batch)));
}

LlrSelection select_large_losses(const LossReport& report, const LabelMatrix& y,
                                 std::size_t k) {
    require_same_shape(report.per_entry_loss, y, "select_large_losses");
    const std::size_t rows = y.rows(), cols = y.cols();

    struct Entry { double loss; std::size_t r, c; };
    std::vector<Entry> negatives;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (!y(r, c)) negatives.push_back({report.per_entry_loss(r, c), r, c});

    k = std::min(k, negatives.size());
    // Largest loss first; equal losses keep (row, col) order.
    std::partial_sort(negatives.begin(), negatives.begin() + k, negatives.end(),
                      [](const Entry& a, const Entry& b) {
                          if (a.loss != b.loss) return a.loss > b.loss;
                          return std::tie(a.r, a.c) < std::tie(b.r, b.c);
                      });

    LlrSelection sel;
    sel.rows = rows;
    sel.cols = cols;
    sel.mask.assign(rows * cols, 0);
    sel.k = k;
    for (std::size_t i = 0; i < k; ++i)
        sel.mask[negatives[i].r * cols + negatives[i].c] = 1;
    return sel;
}

LossReport apply_lla(const LossReport& report, const LlrSelection& sel) {
    if (sel.rows != report.per_entry_loss.rows() || sel.cols != report.per_entry_loss.cols())
        throw ShapeMismatch("apply_lla: selection shape mismatch");
    LossReport out = report;
    double sum = 0.0;
    for (std::size_t r = 0; r < sel.rows; ++r) {
        for (std::size_t c = 0; c < sel.cols; ++c) {
            if (sel.at(r, c)) {
                out.per_entry_loss(r, c) = 0.0;
                out.grad_u(r, c) = 0.0;
            }
            sum += out.per_entry_loss(r, c);
        }
    }
    out.total = sum / static_cast<double>(sel.rows * sel.cols);
    return out;
}

LossReport apply_llm(const LogitMatrix& u, const LabelMatrix& y, const LlrSelection& sel,
                     const LossFn& loss_fn) {
    require_same_shape(u, y, "apply_llm");
    if (sel.rows != y.rows() || sel.cols != y.cols())
        throw ShapeMismatch("apply_llm: selection shape mismatch");
    LabelMatrix flipped = y;
    for (std::size_t r = 0; r < sel.rows; ++r) {
        for (std::size_t c = 0; c < sel.cols; ++c) {
            if (!sel.at(r, c)) continue;
            if (y(r, c))
                throw SelectionOnPositive("apply_llm: selection hits a positive entry");
            flipped(r, c) = 1;
        }
    }
    return loss_fn(u, flipped);
}

}  // namespace ltml
