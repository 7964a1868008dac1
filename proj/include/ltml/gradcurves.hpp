#pragma once

#include <string>
#include <vector>

namespace ltml {

struct GradCurvesConfig {
    double beta = 10.0;
    double lambda_nr = 2.0;
    double u_min = -10.0;
    double u_max = 10.0;
    std::size_t steps = 401;
    std::vector<double> ce_positive_logits{0.0, 2.0, 5.0};
};

/// Negative-branch gradient magnitudes as functions of the logit u:
/// sigmoid(u) for BCE, sigmoid(lambda_nr * u) for the linear scaling, and
/// sigmoid(lambda(u) * u) for the adaptive scaling; plus the two-class
/// softmax CE gradient of a negative logit at fixed positive logits.
struct GradCurvesTable {
    std::vector<double> u;
    std::vector<double> grad_bce;
    std::vector<double> grad_nr;
    std::vector<double> grad_anr;
    std::vector<std::vector<double>> ce_grads;  // one column per positive logit
    std::vector<double> ce_positive_logits;

    std::string to_csv() const;
};

GradCurvesTable gradient_curves(const GradCurvesConfig& cfg);

}  // namespace ltml
