#include "ltml/trainer.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ltml {

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "linear") return ModelKind::Linear;
    if (name == "mlp1") return ModelKind::Mlp1;
    throw std::invalid_argument("unknown model kind: " + name);
}

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::Linear ? "linear" : "mlp1";
}

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("learning_rate must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    loss.validate();
    llr.validate();
    sampler.validate();
}

Model Model::make(ModelKind kind, std::size_t input_dim, std::size_t output_dim,
                  std::size_t hidden_dim, RngState& rng) {
    Model m;
    m.kind = kind;
    m.input_dim = input_dim;
    m.output_dim = output_dim;
    m.hidden_dim = kind == ModelKind::Mlp1 ? hidden_dim : 0;
    const std::size_t first_out = kind == ModelKind::Mlp1 ? hidden_dim : output_dim;
    m.w1 = Matrix(input_dim, first_out);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = s1 * rng.normal();
    m.b1.assign(first_out, 0.0);
    if (kind == ModelKind::Mlp1) {
        m.w2 = Matrix(hidden_dim, output_dim);
        const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
        for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = s2 * rng.normal();
        m.b2.assign(output_dim, 0.0);
    }
    return m;
}

static Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix out(x.rows(), w.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            double acc = b[j];
            for (std::size_t i = 0; i < x.cols(); ++i) acc += x(r, i) * w(i, j);
            out(r, j) = acc;
        }
    }
    return out;
}

LogitMatrix Model::forward(const Matrix& features, Matrix* hidden) const {
    if (features.cols() != input_dim)
        throw ShapeMismatch("forward: feature dim " + std::to_string(features.cols()) +
                            " != model input dim " + std::to_string(input_dim));
    if (kind == ModelKind::Linear) return affine(features, w1, b1);
    Matrix h = affine(features, w1, b1);
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = std::max(h.data()[i], 0.0);
    Matrix p = affine(h, w2, b2);
    if (hidden) *hidden = std::move(h);
    return p;
}

Trainer::Trainer(const SyntheticDataset& dataset, const TrainConfig& cfg)
    : data_(dataset), cfg_(cfg), sampler_rng_(RngState::derive(cfg.seed, 11)) {
    cfg_.validate();
    train_rows_ = data_.rows_of(Split::Train);
    if (train_rows_.empty()) throw std::invalid_argument("no training rows");

    LabelMatrix train_labels(train_rows_.size(), data_.labels().cols());
    for (std::size_t i = 0; i < train_rows_.size(); ++i)
        for (std::size_t c = 0; c < train_labels.cols(); ++c)
            train_labels(i, c) = data_.labels()(train_rows_[i], c);

    stats_ = compute_class_stats(train_labels);
    train_index_ = build_index(train_labels);

    RngState init_rng = RngState::derive(cfg.seed, 12);
    model_ = Model::make(cfg_.model, data_.features.cols(), train_labels.cols(),
                         cfg_.hidden_dim, init_rng);
    v_w1_ = Matrix(model_.w1.rows(), model_.w1.cols());
    v_b1_.assign(model_.b1.size(), 0.0);
    if (cfg_.model == ModelKind::Mlp1) {
        v_w2_ = Matrix(model_.w2.rows(), model_.w2.cols());
        v_b2_.assign(model_.b2.size(), 0.0);
    }
}

// Classical momentum; weight decay on weights only, never offsets.
static void sgd_update(Matrix& w, Matrix& vel, const Matrix& grad, double lr, double mom,
                       double wd) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        vel.data()[i] = mom * vel.data()[i] + grad.data()[i] + wd * w.data()[i];
        w.data()[i] -= lr * vel.data()[i];
    }
}

static void sgd_update(std::vector<double>& b, std::vector<double>& vel,
                       const std::vector<double>& grad, double lr, double mom) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        vel[i] = mom * vel[i] + grad[i];
        b[i] -= lr * vel[i];
    }
}

static std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> sums(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) sums[c] += m(r, c);
    return sums;
}

static Matrix transpose_times(const Matrix& a, const Matrix& b) {
    // a^T b, a: B x I, b: B x J -> I x J
    Matrix out(a.cols(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double av = a(r, i);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += av * b(r, j);
        }
    return out;
}

void Trainer::step(const Matrix& x_batch, const Matrix& hidden, const LossReport& report) {
    const double denom = static_cast<double>(report.grad_u.rows() * report.grad_u.cols());
    Matrix grad_p = report.grad_u;
    for (std::size_t i = 0; i < grad_p.size(); ++i) grad_p.data()[i] /= denom;

    const double lr = cfg_.learning_rate, mom = cfg_.momentum, wd = cfg_.weight_decay;
    if (cfg_.model == ModelKind::Linear) {
        sgd_update(model_.w1, v_w1_, transpose_times(x_batch, grad_p), lr, mom, wd);
        sgd_update(model_.b1, v_b1_, column_sums(grad_p), lr, mom);
        return;
    }
    sgd_update(model_.w2, v_w2_, transpose_times(hidden, grad_p), lr, mom, wd);
    sgd_update(model_.b2, v_b2_, column_sums(grad_p), lr, mom);
    // back through ReLU
    Matrix grad_h(hidden.rows(), hidden.cols());
    for (std::size_t r = 0; r < hidden.rows(); ++r)
        for (std::size_t i = 0; i < hidden.cols(); ++i) {
            if (hidden(r, i) <= 0.0) continue;
            double acc = 0.0;
            for (std::size_t j = 0; j < grad_p.cols(); ++j)
                acc += grad_p(r, j) * model_.w2(i, j);
            grad_h(r, i) = acc;
        }
    sgd_update(model_.w1, v_w1_, transpose_times(x_batch, grad_h), lr, mom, wd);
    sgd_update(model_.b1, v_b1_, column_sums(grad_h), lr, mom);
}

EpochLog Trainer::train_epoch(int epoch) {
    const std::size_t num_c = data_.labels().cols();
    const std::size_t iters =
        (train_rows_.size() + cfg_.batch_size - 1) / cfg_.batch_size;

    EpochLog log;
    log.epoch = epoch;
    double loss_sum = 0.0;

    for (std::size_t it = 0; it < iters; ++it) {
        const auto local = sample_batch(train_index_, cfg_.sampler, cfg_.batch_size,
                                        sampler_rng_);
        Matrix x(local.size(), data_.features.cols());
        LabelMatrix y(local.size(), num_c);
        std::size_t negatives = 0, noisy_negatives = 0;
        for (std::size_t i = 0; i < local.size(); ++i) {
            const std::size_t row = train_rows_[local[i]];
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = data_.features(row, j);
            for (std::size_t c = 0; c < num_c; ++c) {
                y(i, c) = data_.labels()(row, c);
                if (!y(i, c)) {
                    ++negatives;
                    if (data_.noise_at(row, c)) ++noisy_negatives;
                }
            }
        }

        Matrix hidden;
        LogitMatrix p = model_.forward(x, &hidden);
        LogitMatrix u = cfg_.loss.use_bias ? shift_logits(p, stats_) : p;
        LossReport report = compute_loss(u, y, cfg_.loss);

        if (cfg_.llr.mode != LlrMode::Off) {
            const std::size_t k = k_schedule(epoch, negatives, cfg_.llr);
            log.k_last = k;
            if (k > 0) {
                const LlrSelection sel = select_large_losses(report, y, k);
                if (cfg_.llr.mode == LlrMode::LLA)
                    report = apply_lla(report, sel);
                else
                    report = apply_llm(u, y, sel, [this](const LogitMatrix& uu,
                                                         const LabelMatrix& yy) {
                        return compute_loss(uu, yy, cfg_.loss);
                    });
                std::size_t hits = 0;
                for (std::size_t i = 0; i < local.size(); ++i)
                    for (std::size_t c = 0; c < num_c; ++c)
                        if (sel.at(i, c) && data_.noise_at(train_rows_[local[i]], c)) ++hits;
                log.selection_precision.push_back(static_cast<double>(hits) /
                                                  static_cast<double>(sel.k));
                log.noise_base_rate.push_back(negatives == 0 ? 0.0
                                                             : static_cast<double>(noisy_negatives) /
                                                                   static_cast<double>(negatives));
            }
        }

        if (!std::isfinite(report.total) || !report.grad_u.all_finite())
            throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch) +
                                " iteration " + std::to_string(it) +
                                " (loss=" + std::to_string(report.total) + ")");

        loss_sum += report.total;
        step(x, hidden, report);
    }

    log.mean_loss = loss_sum / static_cast<double>(iters);
    return log;
}

std::vector<EpochLog> Trainer::run() {
    std::vector<EpochLog> logs;
    for (int e = 0; e < cfg_.epochs; ++e) logs.push_back(train_epoch(e));
    return logs;
}

MetricsTable Trainer::evaluate(Split split) const {
    const auto rows = data_.rows_of(split);
    Matrix x(rows.size(), data_.features.cols());
    LabelMatrix y(rows.size(), data_.labels().cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = data_.features(rows[i], j);
        for (std::size_t c = 0; c < y.cols(); ++c) y(i, c) = data_.labels()(rows[i], c);
    }
    const LogitMatrix p = model_.forward(x);
    const LogitMatrix u = shift_logits(p, stats_);
    return evaluate_scores(u, y, stats_.partition);
}

std::string EpochLog::to_json() const {
    nlohmann::json j;
    j["epoch"] = epoch;
    j["mean_loss"] = mean_loss;
    j["k_last"] = k_last;
    j["selection_precision"] = selection_precision;
    j["noise_base_rate"] = noise_base_rate;
    return j.dump();
}

void Model::save(const std::filesystem::path& path, const std::string& config_hash) const {
    nlohmann::json header;
    header["kind"] = model_kind_name(kind);
    header["input_dim"] = input_dim;
    header["hidden_dim"] = hidden_dim;
    header["output_dim"] = output_dim;
    header["config_hash"] = config_hash;
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out.write("LTMLMDL1", 8);
    const std::uint64_t len = header_text.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(len));
    auto dump = [&](const double* ptr, std::size_t n) {
        out.write(reinterpret_cast<const char*>(ptr), static_cast<std::streamsize>(n * 8));
    };
    dump(w1.data(), w1.size());
    dump(b1.data(), b1.size());
    if (kind == ModelKind::Mlp1) {
        dump(w2.data(), w2.size());
        dump(b2.data(), b2.size());
    }
}

Model Model::load(const std::filesystem::path& path, std::string* config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, "LTMLMDL1", 8) != 0)
        throw std::runtime_error("bad model file magic: " + path.string());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string header_text(len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(len));
    auto header = nlohmann::json::parse(header_text);

    Model m;
    m.kind = model_kind_from_name(header.at("kind").get<std::string>());
    m.input_dim = header.at("input_dim").get<std::size_t>();
    m.hidden_dim = header.at("hidden_dim").get<std::size_t>();
    m.output_dim = header.at("output_dim").get<std::size_t>();
    if (config_hash) *config_hash = header.value("config_hash", "");

    const std::size_t first_out = m.kind == ModelKind::Mlp1 ? m.hidden_dim : m.output_dim;
    m.w1 = Matrix(m.input_dim, first_out);
    m.b1.assign(first_out, 0.0);
    auto slurp = [&](double* ptr, std::size_t n) {
        in.read(reinterpret_cast<char*>(ptr), static_cast<std::streamsize>(n * 8));
    };
    slurp(m.w1.data(), m.w1.size());
    slurp(m.b1.data(), m.b1.size());
    if (m.kind == ModelKind::Mlp1) {
        m.w2 = Matrix(m.hidden_dim, m.output_dim);
        m.b2.assign(m.output_dim, 0.0);
        slurp(m.w2.data(), m.w2.size());
        slurp(m.b2.data(), m.b2.size());
    }
    if (!in) throw std::runtime_error("truncated model file: " + path.string());
    return m;
}

}  // namespace ltml
