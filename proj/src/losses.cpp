#include "ltml/losses.hpp"

#include <stdexcept>

namespace ltml {

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "bce") return LossKind::Bce;
    if (name == "focal") return LossKind::Focal;
    if (name == "nr") return LossKind::Nr;
    if (name == "anr") return LossKind::Anr;
    throw std::invalid_argument("unknown loss kind: " + name);
}

std::string loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::Bce: return "bce";
        case LossKind::Focal: return "focal";
        case LossKind::Nr: return "nr";
        case LossKind::Anr: return "anr";
    }
    return "?";
}

void LossConfig::validate() const {
    if (beta < 0.0) throw std::invalid_argument("loss beta must be >= 0");
    if (lambda_nr < 1.0) throw std::invalid_argument("loss lambda_nr must be >= 1");
    if (focal_gamma < 0.0) throw std::invalid_argument("focal_gamma must be >= 0");
    if (focal_alpha < 0.0 || focal_alpha > 1.0)
        throw std::invalid_argument("focal_alpha must be in [0,1]");
}

Matrix adaptive_lambda(const LogitMatrix& u, double beta) {
    Matrix lam(u.rows(), u.cols());
    for (std::size_t r = 0; r < u.rows(); ++r)
        for (std::size_t c = 0; c < u.cols(); ++c)
            lam(r, c) = 1.0 + beta * (1.0 - sigmoid(u(r, c)));
    return lam;
}

// Shared core for the scaled-negative BCE family. Positives:
// log(1+e^{-u}), grad -(1-sigmoid(u)). Negatives: (1/lam) log(1+e^{lam u}),
// grad sigmoid(lam u) with lam held constant.
static LossReport scaled_negative_bce(const LogitMatrix& u, const LabelMatrix& y,
                                      const Matrix& lambda) {
    require_same_shape(u, y, "scaled_negative_bce");
    require_same_shape(u, lambda, "scaled_negative_bce");
    LossReport rep{Matrix(u.rows(), u.cols()), Matrix(u.rows(), u.cols()), 0.0};
    double sum = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) {
        for (std::size_t c = 0; c < u.cols(); ++c) {
            const double ui = u(r, c);
            double loss, grad;
            if (y(r, c)) {
                loss = log1pexp(-ui);
                grad = -sigmoid(-ui);  // -(1-s), computed without cancellation
            } else {
                const double lam = lambda(r, c);
                loss = log1pexp(lam * ui) / lam;
                grad = sigmoid(lam * ui);
            }
            rep.per_entry_loss(r, c) = loss;
            rep.grad_u(r, c) = grad;
            sum += loss;
        }
    }
    rep.total = sum / static_cast<double>(u.rows() * u.cols());
    return rep;
}

LossReport anr_bce(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg) {
    cfg.validate();
    return scaled_negative_bce(u, y, adaptive_lambda(u, cfg.beta));
}

LossReport nr_bce(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg) {
    cfg.validate();
    return scaled_negative_bce(u, y, Matrix(u.rows(), u.cols(), cfg.lambda_nr));
}

LossReport bce(const LogitMatrix& u, const LabelMatrix& y) {
    return scaled_negative_bce(u, y, Matrix(u.rows(), u.cols(), 1.0));
}

LossReport focal(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg) {
    cfg.validate();
    require_same_shape(u, y, "focal");
    const double a = cfg.focal_alpha;
    const double g = cfg.focal_gamma;
    LossReport rep{Matrix(u.rows(), u.cols()), Matrix(u.rows(), u.cols()), 0.0};
    double sum = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) {
        for (std::size_t c = 0; c < u.cols(); ++c) {
            const double ui = u(r, c);
            const double s = sigmoid(ui);
            const double sm = sigmoid(-ui);  // 1-s without cancellation
            double loss, grad;
            if (y(r, c)) {
                // -log s = log(1+e^{-u}); d/du log1pexp(-u) = -(1-s)
                const double nls = log1pexp(-ui);
                const double w = std::pow(sm, g);
                loss = a * w * nls;
                grad = a * (-g * s * w * nls - w * sm);
            } else {
                const double nls = log1pexp(ui);  // -log(1-s)
                const double w = std::pow(s, g);
                loss = (1.0 - a) * w * nls;
                grad = (1.0 - a) * (g * w * sm * nls + w * s);
            }
            rep.per_entry_loss(r, c) = loss;
            rep.grad_u(r, c) = grad;
            sum += loss;
        }
    }
    rep.total = sum / static_cast<double>(u.rows() * u.cols());
    return rep;
}

LossReport compute_loss(const LogitMatrix& u, const LabelMatrix& y, const LossConfig& cfg) {
    switch (cfg.kind) {
        case LossKind::Bce: return bce(u, y);
        case LossKind::Focal: return focal(u, y, cfg);
        case LossKind::Nr: return nr_bce(u, y, cfg);
        case LossKind::Anr: return anr_bce(u, y, cfg);
    }
    throw std::logic_error("unreachable loss kind");
}

double loss_value_frozen_lambda(const LogitMatrix& u, const LabelMatrix& y,
                                const Matrix& lambda) {
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda.data()[i] < 1.0)
            throw std::invalid_argument("frozen lambda entries must be >= 1");
    return scaled_negative_bce(u, y, lambda).total;
}

}  // namespace ltml
