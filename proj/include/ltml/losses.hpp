#pragma once

#include <cmath>
#include <string>

#include "ltml/matrix.hpp"

namespace ltml {

enum class LossKind { Bce, Focal, Nr, Anr };

LossKind loss_kind_from_name(const std::string& name);
std::string loss_kind_name(LossKind kind);

struct LossConfig {
    LossKind kind = LossKind::Anr;
    double beta = 10.0;        // adaptive scale strength; 0 disables
    double lambda_nr = 2.0;    // constant scale for the linear variant, >= 1
    double focal_gamma = 2.0;
    double focal_alpha = 0.5;
    bool use_bias = true;      // apply the per-class prior shift before the loss

    void validate() const;
};

/// Per-entry loss values and analytic gradients w.r.t. the (shifted)
/// logits. grad_u holds the derivative of each entry's own loss term;
/// `total` is the mean over samples of the per-sample (1/C) sums, i.e.
/// sum(per_entry_loss) / (B*C).
struct LossReport {
    Matrix per_entry_loss;
    Matrix grad_u;
    double total = 0.0;
};

/// Stable log(1 + e^x): max(x,0) + log1p(e^{-|x|}).
inline double log1pexp(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// lambda_i = 1 + beta * (1 - sigmoid(u_i)).
Matrix adaptive_lambda(const LogitMatrix& u, double beta);

/// Adaptive negative regularization: positives get log(1+e^{-u}),
/// negatives (1/lambda) * log(1+e^{lambda u}) with lambda from
/// adaptive_lambda. Gradients treat lambda as a constant.
LossReport anr_bce(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg);

/// Same negative-branch scaling with a constant lambda = cfg.lambda_nr.
LossReport nr_bce(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg);

/// Plain sigmoid binary cross-entropy.
LossReport bce(const LogitMatrix& u, const LabelMatrix& y);

/// -alpha (1-s)^gamma y log s - (1-alpha) s^gamma (1-y) log(1-s), s = sigmoid(u).
LossReport focal(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg);

/// Dispatch on cfg.kind.
LossReport compute_loss(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg);

/// Total loss with the negative-branch lambda supplied and held fixed;
/// finite differences of this function check grad_u under the detached
/// convention.
double loss_value_frozen_lambda(const LogitMatrix& u, const LabelMatrix& y,
                                const Matrix& lambda);

}  // namespace ltml
