#include "ltml/gradcurves.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ltml/csv.hpp"
#include "ltml/losses.hpp"

namespace ltml {

GradCurvesTable gradient_curves(const GradCurvesConfig& cfg) {
    if (cfg.steps < 2) throw std::invalid_argument("gradcurves: steps must be >= 2");
    if (cfg.u_max <= cfg.u_min) throw std::invalid_argument("gradcurves: empty u range");

    GradCurvesTable t;
    t.ce_positive_logits = cfg.ce_positive_logits;
    t.ce_grads.resize(cfg.ce_positive_logits.size());
    const double step = (cfg.u_max - cfg.u_min) / static_cast<double>(cfg.steps - 1);
    for (std::size_t i = 0; i < cfg.steps; ++i) {
        const double u = cfg.u_min + step * static_cast<double>(i);
        t.u.push_back(u);
        t.grad_bce.push_back(sigmoid(u));
        t.grad_nr.push_back(sigmoid(cfg.lambda_nr * u));
        const double lam = 1.0 + cfg.beta * (1.0 - sigmoid(u));
        t.grad_anr.push_back(sigmoid(lam * u));
        for (std::size_t j = 0; j < cfg.ce_positive_logits.size(); ++j) {
            // two-class softmax weight of the negative logit
            t.ce_grads[j].push_back(sigmoid(u - cfg.ce_positive_logits[j]));
        }
    }
    return t;
}

std::string GradCurvesTable::to_csv() const {
    std::ostringstream out;
    out << "u,grad_bce,grad_nr,grad_anr";
    for (double p : ce_positive_logits) out << ",ce_grad_pos" << csv::format_double(p);
    out << '\n';
    for (std::size_t i = 0; i < u.size(); ++i) {
        out << csv::format_double(u[i]) << ',' << csv::format_double(grad_bce[i]) << ','
            << csv::format_double(grad_nr[i]) << ',' << csv::format_double(grad_anr[i]);
        for (const auto& col : ce_grads) out << ',' << csv::format_double(col[i]);
        out << '\n';
    }
    return out.str();
}

}  // namespace ltml
