#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ltml/class_stats.hpp"
#include "ltml/datagen.hpp"
#include "ltml/gradcurves.hpp"
#include "ltml/llr.hpp"
#include "ltml/losses.hpp"
#include "ltml/metrics.hpp"
#include "ltml/sampler.hpp"
#include "ltml/trainer.hpp"

namespace py = pybind11;

namespace {

ltml::Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    ltml::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data());
    return m;
}

ltml::LabelMatrix to_labels(
    const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    ltml::LabelMatrix m(static_cast<std::size_t>(a.shape(0)),
                        static_cast<std::size_t>(a.shape(1)));
    for (py::ssize_t r = 0; r < a.shape(0); ++r)
        for (py::ssize_t c = 0; c < a.shape(1); ++c) {
            const auto v = a.at(r, c);
            if (v != 0 && v != 1) throw std::invalid_argument("labels must be 0/1");
            m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = v;
        }
    return m;
}

py::array_t<double> from_matrix(const ltml::Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), a.mutable_data());
    return a;
}

py::array_t<std::uint8_t> from_labels(const ltml::LabelMatrix& m) {
    py::array_t<std::uint8_t> a({m.rows(), m.cols()});
    std::copy(m.raw().begin(), m.raw().end(), a.mutable_data());
    return a;
}

ltml::LossConfig make_loss_config(const std::string& kind, double beta, double lambda_nr,
                                  double focal_gamma, double focal_alpha) {
    ltml::LossConfig cfg;
    cfg.kind = ltml::loss_kind_from_name(kind);
    cfg.beta = beta;
    cfg.lambda_nr = lambda_nr;
    cfg.focal_gamma = focal_gamma;
    cfg.focal_alpha = focal_alpha;
    return cfg;
}

py::dict report_to_dict(const ltml::LossReport& rep) {
    py::dict d;
    d["per_entry_loss"] = from_matrix(rep.per_entry_loss);
    d["grad_u"] = from_matrix(rep.grad_u);
    d["total"] = rep.total;
    return d;
}

py::dict stats_to_dict(const ltml::ClassStats& st) {
    py::dict d;
    d["N"] = st.total_samples;
    d["n"] = st.positives_per_class;
    d["v"] = st.bias;
    std::vector<std::string> tags;
    for (auto s : st.partition) tags.push_back(ltml::subset_name(s));
    d["partition"] = tags;
    return d;
}

std::vector<double> col(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

std::vector<std::uint8_t> col_u8(
    const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "long-tailed multi-label classification lab (core operations)";

    m.def("compute_class_stats",
          [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
              return stats_to_dict(ltml::compute_class_stats(to_labels(y)));
          },
          py::arg("labels"));

    m.def("shift_logits",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& p,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
              return from_matrix(
                  ltml::shift_logits(to_matrix(p), ltml::compute_class_stats(to_labels(y))));
          },
          py::arg("logits"), py::arg("labels"));

    m.def("adaptive_lambda",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u,
             double beta) { return from_matrix(ltml::adaptive_lambda(to_matrix(u), beta)); },
          py::arg("u"), py::arg("beta"));

    m.def("loss",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             const std::string& kind, double beta, double lambda_nr, double focal_gamma,
             double focal_alpha) {
              const auto cfg =
                  make_loss_config(kind, beta, lambda_nr, focal_gamma, focal_alpha);
              return report_to_dict(ltml::compute_loss(to_matrix(u), to_labels(y), cfg));
          },
          py::arg("u"), py::arg("y"), py::arg("kind") = "anr", py::arg("beta") = 10.0,
          py::arg("lambda_nr") = 2.0, py::arg("focal_gamma") = 2.0,
          py::arg("focal_alpha") = 0.5);

    m.def("loss_value_frozen_lambda",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& lam) {
              return ltml::loss_value_frozen_lambda(to_matrix(u), to_labels(y), to_matrix(lam));
          },
          py::arg("u"), py::arg("y"), py::arg("lambda_matrix"));

    m.def("k_schedule",
          [](int epoch, std::size_t negatives, double rho_max, int warmup_epochs,
             int ramp_epochs) {
              ltml::LlrConfig cfg;
              cfg.rho_max = rho_max;
              cfg.warmup_epochs = warmup_epochs;
              cfg.ramp_epochs = ramp_epochs;
              return ltml::k_schedule(epoch, negatives, cfg);
          },
          py::arg("epoch"), py::arg("negatives_in_batch"), py::arg("rho_max") = 0.02,
          py::arg("warmup_epochs") = 1, py::arg("ramp_epochs") = 5);

    m.def("select_large_losses",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& losses,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             std::size_t k) {
              ltml::LossReport rep;
              rep.per_entry_loss = to_matrix(losses);
              rep.grad_u = ltml::Matrix(rep.per_entry_loss.rows(), rep.per_entry_loss.cols());
              const auto sel = ltml::select_large_losses(rep, to_labels(y), k);
              ltml::LabelMatrix mask(sel.rows, sel.cols);
              for (std::size_t r = 0; r < sel.rows; ++r)
                  for (std::size_t c = 0; c < sel.cols; ++c) mask(r, c) = sel.at(r, c);
              return from_labels(mask);
          },
          py::arg("per_entry_loss"), py::arg("y"), py::arg("k"));

    m.def("bacc",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y,
             double threshold) { return ltml::bacc(col(s), col_u8(y), threshold); },
          py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.0);

    m.def("auc",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& y) {
              return ltml::auc(col(s), col_u8(y));
          },
          py::arg("scores"), py::arg("labels"));

    m.def("gradient_curves",
          [](double beta, double lambda_nr, double u_min, double u_max, std::size_t steps) {
              ltml::GradCurvesConfig cfg;
              cfg.beta = beta;
              cfg.lambda_nr = lambda_nr;
              cfg.u_min = u_min;
              cfg.u_max = u_max;
              cfg.steps = steps;
              const auto t = ltml::gradient_curves(cfg);
              py::dict d;
              d["u"] = t.u;
              d["grad_bce"] = t.grad_bce;
              d["grad_nr"] = t.grad_nr;
              d["grad_anr"] = t.grad_anr;
              d["ce_positive_logits"] = t.ce_positive_logits;
              d["ce_grads"] = t.ce_grads;
              return d;
          },
          py::arg("beta") = 10.0, py::arg("lambda_nr") = 2.0, py::arg("u_min") = -10.0,
          py::arg("u_max") = 10.0, py::arg("steps") = 401);

    m.def("generate_dataset",
          [](const std::string& config_json) {
              const auto ds = ltml::generate(ltml::DatasetConfig::from_json(config_json));
              py::dict d;
              d["features"] = from_matrix(ds.features);
              d["clean_labels"] = from_labels(ds.clean_labels);
              d["noisy_labels"] = from_labels(ds.noisy_labels);
              ltml::LabelMatrix mask(ds.clean_labels.rows(), ds.clean_labels.cols());
              for (std::size_t r = 0; r < mask.rows(); ++r)
                  for (std::size_t c = 0; c < mask.cols(); ++c)
                      mask(r, c) = ds.noise_at(r, c);
              d["noise_mask"] = from_labels(mask);
              std::vector<std::string> split;
              for (auto s : ds.split) split.push_back(ltml::split_name(s));
              d["split"] = split;
              return d;
          },
          py::arg("config_json") = "{}");
}
