#include "reveal/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "reveal/error.hpp"
#include "reveal/manifest.hpp"
#include "reveal/rng.hpp"

namespace reveal::align {
namespace {

double log1p_exp(double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double sigmoid(double a) {
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

// C += A^T * B for A (n x p), B (n x d), C (p x d).
void accumulate_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        const double* brow = b.row(i);
        for (std::size_t p = 0; p < a.cols; ++p) {
            const double coef = arow[p];
            if (coef == 0.0) continue;
            double* crow = c.row(p);
            for (std::size_t d = 0; d < b.cols; ++d) crow[d] += coef * brow[d];
        }
    }
}

Matrix affine_forward(const ProjectionHead& head, const Matrix& x) {
    if (x.cols != head.input_dim())
        throw ConfigError("projection head input width " + std::to_string(head.input_dim()) +
                          " does not match data width " + std::to_string(x.cols));
    Matrix u(x.rows, head.output_dim());
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t p = 0; p < head.output_dim(); ++p)
            u(i, p) = dot(head.w.row(p), x.row(i), x.cols) + head.b[p];
    return u;
}

void check_loss_shapes(const Matrix& s, const gacl::LabelMatrix& labels) {
    if (s.rows != labels.n || s.cols != labels.n)
        throw NumericError("loss: similarity and label shapes differ");
}

} // namespace

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be nonnegative");
    if (eps <= 0.0) throw ConfigError("eps must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
    if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (temperature <= 0.0) throw ConfigError("temperature must be positive");
    if (projection_dim < 1) throw ConfigError("projection_dim must be positive");
    if (!(dev_fraction > 0.0 && dev_fraction <= 1.0))
        throw ConfigError("dev_fraction must be in (0, 1]");
}

EmbeddingPair encode(const AlignmentModel& model, const Matrix& image_inputs,
                     const Matrix& text_features) {
    EmbeddingPair pair;
    pair.image = row_unit_normalize(affine_forward(model.image_head, image_inputs));
    pair.text = row_unit_normalize(affine_forward(model.text_head, text_features));
    return pair;
}

Matrix cosine_matrix(const EmbeddingPair& pair) { return matmul_bt(pair.image, pair.text); }

double gacl_loss(const Matrix& s, const gacl::LabelMatrix& labels, double tau, double beta) {
    check_loss_shapes(s, labels);
    if (tau <= 0.0) throw ConfigError("gacl_loss: temperature must be positive");
    double total = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j)
            total += log1p_exp(labels.at(i, j) * (-s(i, j) / tau + beta));
    return total / static_cast<double>(s.rows * s.cols);
}

Matrix gacl_loss_grad_s(const Matrix& s, const gacl::LabelMatrix& labels, double tau, double beta) {
    check_loss_shapes(s, labels);
    if (tau <= 0.0) throw ConfigError("gacl_loss: temperature must be positive");
    const double scale = 1.0 / static_cast<double>(s.rows * s.cols);
    Matrix g(s.rows, s.cols);
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j) {
            const double l = labels.at(i, j);
            g(i, j) = scale * sigmoid(l * (-s(i, j) / tau + beta)) * l * (-1.0 / tau);
        }
    return g;
}

double gacl_loss_grad_beta(const Matrix& s, const gacl::LabelMatrix& labels, double tau,
                           double beta) {
    check_loss_shapes(s, labels);
    const double scale = 1.0 / static_cast<double>(s.rows * s.cols);
    double g = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j) {
            const double l = labels.at(i, j);
            g += sigmoid(l * (-s(i, j) / tau + beta)) * l;
        }
    return scale * g;
}

double infonce_loss(const Matrix& s, double tau) {
    if (s.rows != s.cols) throw NumericError("infonce_loss: similarity matrix must be square");
    if (tau <= 0.0) throw ConfigError("infonce_loss: temperature must be positive");
    const std::size_t n = s.rows;
    double total = 0.0;
    // image -> text over rows, text -> image over columns.
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = -1e300, col_max = -1e300;
        for (std::size_t j = 0; j < n; ++j) {
            row_max = std::max(row_max, s(i, j) / tau);
            col_max = std::max(col_max, s(j, i) / tau);
        }
        double row_sum = 0.0, col_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row_sum += std::exp(s(i, j) / tau - row_max);
            col_sum += std::exp(s(j, i) / tau - col_max);
        }
        total += -(s(i, i) / tau - row_max - std::log(row_sum));
        total += -(s(i, i) / tau - col_max - std::log(col_sum));
    }
    return total / (2.0 * static_cast<double>(n));
}

Matrix infonce_grad_s(const Matrix& s, double tau) {
    if (s.rows != s.cols) throw NumericError("infonce_grad_s: similarity matrix must be square");
    if (tau <= 0.0) throw ConfigError("infonce_grad_s: temperature must be positive");
    const std::size_t n = s.rows;
    Matrix g(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n) * tau);
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = -1e300;
        for (std::size_t j = 0; j < n; ++j) row_max = std::max(row_max, s(i, j) / tau);
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) row_sum += std::exp(s(i, j) / tau - row_max);
        for (std::size_t j = 0; j < n; ++j) {
            const double p = std::exp(s(i, j) / tau - row_max) / row_sum;
            g(i, j) += scale * (p - (i == j ? 1.0 : 0.0));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        double col_max = -1e300;
        for (std::size_t i = 0; i < n; ++i) col_max = std::max(col_max, s(i, j) / tau);
        double col_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) col_sum += std::exp(s(i, j) / tau - col_max);
        for (std::size_t i = 0; i < n; ++i) {
            const double q = std::exp(s(i, j) / tau - col_max) / col_sum;
            g(i, j) += scale * (q - (i == j ? 1.0 : 0.0));
        }
    }
    return g;
}

double ModelGradients::norm() const {
    double ss = beta * beta;
    for (const double v : w_image.data) ss += v * v;
    for (const double v : w_text.data) ss += v * v;
    for (const double v : b_image) ss += v * v;
    for (const double v : b_text) ss += v * v;
    return std::sqrt(ss);
}

LossAndGrads alignment_backward(const AlignmentModel& model, const Matrix& image_inputs,
                                const Matrix& text_features, const gacl::LabelMatrix& labels,
                                LossKind kind) {
    const Matrix u_img = affine_forward(model.image_head, image_inputs);
    const Matrix u_txt = affine_forward(model.text_head, text_features);
    const Matrix i_hat = row_unit_normalize(u_img);
    const Matrix t_hat = row_unit_normalize(u_txt);
    const Matrix s = matmul_bt(i_hat, t_hat);

    LossAndGrads out;
    Matrix grad_s;
    if (kind == LossKind::gacl) {
        out.loss = gacl_loss(s, labels, model.temperature, model.beta);
        grad_s = gacl_loss_grad_s(s, labels, model.temperature, model.beta);
        out.grads.beta = gacl_loss_grad_beta(s, labels, model.temperature, model.beta);
    } else {
        out.loss = infonce_loss(s, model.temperature);
        grad_s = infonce_grad_s(s, model.temperature);
        out.grads.beta = 0.0;
    }

    // d loss / d unit embeddings.
    const Matrix d_ihat = matmul(grad_s, t_hat);
    Matrix d_that(t_hat.rows, t_hat.cols);
    accumulate_at_b(grad_s, i_hat, d_that);

    // Through the normalization Jacobian (I - u_hat u_hat^T) / ||u||,
    // then through the affine heads.
    auto backprop_head = [](const Matrix& u, const Matrix& u_hat, const Matrix& d_uhat,
                            const Matrix& x, Matrix& d_w, std::vector<double>& d_b) {
        Matrix d_u(u.rows, u.cols);
        for (std::size_t i = 0; i < u.rows; ++i) {
            const double inv_norm = 1.0 / norm2(u.row(i), u.cols);
            const double proj = dot(u_hat.row(i), d_uhat.row(i), u.cols);
            for (std::size_t p = 0; p < u.cols; ++p)
                d_u(i, p) = (d_uhat(i, p) - proj * u_hat(i, p)) * inv_norm;
        }
        d_w = Matrix(u.cols, x.cols);
        accumulate_at_b(d_u, x, d_w);
        d_b.assign(u.cols, 0.0);
        for (std::size_t i = 0; i < u.rows; ++i)
            for (std::size_t p = 0; p < u.cols; ++p) d_b[p] += d_u(i, p);
    };
    backprop_head(u_img, i_hat, d_ihat, image_inputs, out.grads.w_image, out.grads.b_image);
    backprop_head(u_txt, t_hat, d_that, text_features, out.grads.w_text, out.grads.b_text);
    return out;
}

void AdamW::step(std::span<double> params, std::span<const double> grads, bool decay) {
    ++t_;
    const double beta1 = 0.9, beta2 = 0.999;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1 * m_[i] + (1.0 - beta1) * grads[i];
        v_[i] = beta2 * v_[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        if (decay) params[i] -= lr_ * wd_ * params[i];
    }
}

namespace {

struct BatchData {
    Matrix image;
    Matrix text;
    Matrix morpho;
};

BatchData gather_batch(const TrainInputs& inputs, std::span<const std::size_t> ids) {
    const std::vector<std::size_t> v(ids.begin(), ids.end());
    BatchData b;
    b.image = cohort::image_proxy_matrix(*inputs.subjects, v);
    b.morpho = cohort::morphometry_matrix(*inputs.subjects, v);
    b.text = Matrix(v.size(), inputs.text_features->cols);
    for (std::size_t r = 0; r < v.size(); ++r)
        std::copy(inputs.text_features->row(v[r]), inputs.text_features->row(v[r]) + b.text.cols,
                  b.text.row(r));
    return b;
}

// Optional fixed z-statistics, computed once over the alignment training
// morphometry when morphometry_global_stats is set.
struct GlobalZStats {
    std::vector<double> mean;
    std::vector<double> sd;
};

GlobalZStats compute_global_stats(const TrainInputs& inputs) {
    const Matrix m = cohort::morphometry_matrix(*inputs.subjects, inputs.align_train);
    GlobalZStats stats;
    stats.mean.assign(m.cols, 0.0);
    stats.sd.assign(m.cols, 0.0);
    for (std::size_t j = 0; j < m.cols; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) mu += m(i, j);
        mu /= double(m.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) ss += (m(i, j) - mu) * (m(i, j) - mu);
        const double sd = std::sqrt(ss / double(m.rows - 1));
        if (sd == 0.0)
            throw NumericError("global z-stats: zero variance in morphometry column " +
                               std::to_string(j));
        stats.mean[j] = mu;
        stats.sd[j] = sd;
    }
    return stats;
}

gacl::LabelMatrix build_labels(const BatchData& batch, const TrainConfig& cfg, double tau_f,
                               double tau_t, const GlobalZStats* global_stats) {
    Matrix s_f;
    if (cfg.image_similarity_source == gacl::SimilaritySource::image_latent) {
        s_f = gacl::similarity(batch.image, true);
    } else if (global_stats) {
        Matrix f = batch.morpho;
        for (std::size_t j = 0; j < f.cols; ++j)
            for (std::size_t i = 0; i < f.rows; ++i)
                f(i, j) = (f(i, j) - global_stats->mean[j]) / global_stats->sd[j];
        s_f = gacl::similarity(f, !cfg.morphometry_raw_dot);
    } else {
        const Matrix f = gacl::z_normalize(batch.morpho);
        s_f = gacl::similarity(f, !cfg.morphometry_raw_dot);
    }
    const Matrix s_t = gacl::similarity(batch.text, true);
    const gacl::GroupMask mask_f = gacl::threshold_mask(s_f, tau_f);
    const gacl::GroupMask mask_t = gacl::threshold_mask(s_t, tau_t);
    return gacl::group_labels(mask_f, mask_t, cfg.combiner);
}

} // namespace

std::vector<std::size_t> dev_slice_indices(const TrainInputs& inputs, const TrainConfig& config) {
    std::vector<std::size_t> dev = inputs.align_train;
    dev.insert(dev.end(), inputs.align_val.begin(), inputs.align_val.end());
    if (dev.size() < 3) throw NumericError("dev slice: need at least 3 alignment subjects");
    Rng rng = Rng(config.seed).fork("dev_slice");
    rng.shuffle(dev);
    const std::size_t keep = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::floor(config.dev_fraction * double(dev.size()))));
    dev.resize(std::min(keep, dev.size()));
    return dev;
}

DevQuantiles dev_similarity_quantiles(const TrainInputs& inputs, const TrainConfig& config) {
    const std::vector<std::size_t> dev = dev_slice_indices(inputs, config);
    const BatchData data = gather_batch(inputs, dev);
    DevQuantiles q;
    q.morphometry = gacl::quantile_thresholds(
        gacl::similarity(gacl::z_normalize(data.morpho), !config.morphometry_raw_dot));
    q.text = gacl::quantile_thresholds(gacl::similarity(data.text, true));
    q.latent = gacl::quantile_thresholds(gacl::similarity(data.image, true));
    return q;
}

AlignmentModel train(const TrainInputs& inputs, const TrainConfig& config, TrainLog* log) {
    config.validate();
    if (!inputs.subjects || !inputs.text_features) throw ConfigError("train: inputs not wired");
    if (inputs.align_train.empty()) throw ConfigError("train: align_train is empty");
    if (config.batch_size > inputs.align_train.size())
        throw ConfigError("train: batch_size exceeds the alignment training set");

    double tau_f = config.tau_f;
    double tau_t = config.tau_t;
    const bool latent_source =
        config.image_similarity_source == gacl::SimilaritySource::image_latent;
    if (config.thresholds_from_quantiles || latent_source) {
        const DevQuantiles q = dev_similarity_quantiles(inputs, config);
        if (config.thresholds_from_quantiles) {
            tau_f = q.morphometry.first;
            tau_t = q.text.first;
        }
        // The latent source always takes its threshold from the dev-set Q3.
        if (latent_source) tau_f = q.latent.first;
    }

    const std::size_t d_img = (*inputs.subjects)[inputs.align_train.front()].image_proxy.size();
    const std::size_t d_txt = inputs.text_features->cols;
    const std::size_t p = config.projection_dim;

    Rng root(config.seed);
    AlignmentModel model;
    model.temperature = config.temperature;
    model.beta = config.beta;
    auto init_head = [&](ProjectionHead& head, std::size_t d_in, const char* tag) {
        Rng r = root.fork(tag);
        head.w = Matrix(p, d_in);
        for (double& v : head.w.data) v = r.normal() / std::sqrt(double(d_in));
        head.b.assign(p, 0.0);
    };
    init_head(model.image_head, d_img, "init_image");
    init_head(model.text_head, d_txt, "init_text");

    AdamW opt_wi(p * d_img, config.learning_rate, config.eps, config.weight_decay);
    AdamW opt_bi(p, config.learning_rate, config.eps, config.weight_decay);
    AdamW opt_wt(p * d_txt, config.learning_rate, config.eps, config.weight_decay);
    AdamW opt_bt(p, config.learning_rate, config.eps, config.weight_decay);
    AdamW opt_beta(1, config.learning_rate, config.eps, 0.0);

    if (log) {
        *log = TrainLog{};
        log->tau_f_used = tau_f;
        log->tau_t_used = tau_t;
    }

    GlobalZStats global_stats;
    const bool use_global = config.morphometry_global_stats &&
                            config.image_similarity_source ==
                                gacl::SimilaritySource::morphometry &&
                            config.loss == LossKind::gacl;
    if (use_global) global_stats = compute_global_stats(inputs);
    const GlobalZStats* stats_ptr = use_global ? &global_stats : nullptr;

    AlignmentModel last_good = model;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order = inputs.align_train;
        root.fork("epoch_" + std::to_string(epoch)).shuffle(order);

        double loss_sum = 0.0, pos_sum = 0.0, grad_sum = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, order.size() - start);
            if (len < 2) break; // a single-row batch cannot be z-normalized
            const std::span<const std::size_t> ids(order.data() + start, len);
            const BatchData batch = gather_batch(inputs, ids);

            gacl::LabelMatrix labels;
            double pos_fraction = 1.0 / double(len);
            if (config.loss == LossKind::gacl) {
                labels = build_labels(batch, config, tau_f, tau_t, stats_ptr);
                pos_fraction = labels.positive_fraction();
            }
            const LossAndGrads result =
                alignment_backward(model, batch.image, batch.text, labels, config.loss);

            opt_wi.step(model.image_head.w.data, result.grads.w_image.data);
            opt_bi.step(model.image_head.b, result.grads.b_image);
            opt_wt.step(model.text_head.w.data, result.grads.w_text.data);
            opt_bt.step(model.text_head.b, result.grads.b_text);
            if (config.beta_trainable && config.loss == LossKind::gacl) {
                double beta_param[1] = {model.beta};
                const double beta_grad[1] = {result.grads.beta};
                opt_beta.step(beta_param, beta_grad, false);
                model.beta = beta_param[0];
            }

            loss_sum += result.loss;
            pos_sum += pos_fraction;
            grad_sum += result.grads.norm();
            ++n_batches;
        }

        EpochStats stats;
        stats.train_loss = n_batches ? loss_sum / double(n_batches)
                                     : std::numeric_limits<double>::quiet_NaN();
        stats.pos_fraction = n_batches ? pos_sum / double(n_batches) : 0.0;
        stats.grad_norm = n_batches ? grad_sum / double(n_batches) : 0.0;

        stats.val_loss = std::numeric_limits<double>::quiet_NaN();
        if (inputs.align_val.size() >= 2) {
            const BatchData val = gather_batch(inputs, inputs.align_val);
            gacl::LabelMatrix val_labels;
            if (config.loss == LossKind::gacl)
                val_labels = build_labels(val, config, tau_f, tau_t, stats_ptr);
            const EmbeddingPair pair = encode(model, val.image, val.text);
            const Matrix s = cosine_matrix(pair);
            stats.val_loss = config.loss == LossKind::gacl
                                 ? gacl_loss(s, val_labels, model.temperature, model.beta)
                                 : infonce_loss(s, model.temperature);
        }
        if (log) log->epochs.push_back(stats);

        if (!std::isfinite(stats.train_loss)) {
            model = last_good;
            if (log) log->aborted = true;
            break;
        }
        last_good = model;
    }
    return model;
}

void save_train_log_csv(const TrainLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "epoch,train_loss,val_loss,pos_fraction,grad_norm\n";
    char buf[196];
    for (std::size_t e = 0; e < log.epochs.size(); ++e) {
        const EpochStats& s = log.epochs[e];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", e + 1, s.train_loss,
                      s.val_loss, s.pos_fraction, s.grad_norm);
        out << buf;
    }
}

namespace {

using nlohmann::json;

json head_to_json(const ProjectionHead& head) {
    return json{{"rows", head.w.rows}, {"cols", head.w.cols}, {"w", head.w.data}, {"b", head.b}};
}

ProjectionHead head_from_json(const json& j) {
    ProjectionHead head;
    head.w.rows = j.at("rows").get<std::size_t>();
    head.w.cols = j.at("cols").get<std::size_t>();
    head.w.data = j.at("w").get<std::vector<double>>();
    head.b = j.at("b").get<std::vector<double>>();
    if (head.w.data.size() != head.w.rows * head.w.cols || head.b.size() != head.w.rows)
        throw SchemaError("checkpoint: projection head has inconsistent shapes");
    return head;
}

} // namespace

json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const json& j);

json train_config_to_json(const TrainConfig& c) {
    return json{
        {"learning_rate", c.learning_rate},
        {"eps", c.eps},
        {"weight_decay", c.weight_decay},
        {"batch_size", c.batch_size},
        {"epochs", c.epochs},
        {"seed", c.seed},
        {"loss", c.loss == LossKind::gacl ? "gacl" : "infonce"},
        {"combiner", c.combiner == gacl::Combiner::OR ? "or" : "and"},
        {"tau_f", c.tau_f},
        {"tau_t", c.tau_t},
        {"thresholds_from_quantiles", c.thresholds_from_quantiles},
        {"image_similarity_source",
         c.image_similarity_source == gacl::SimilaritySource::image_latent ? "latent"
                                                                           : "morphometry"},
        {"morphometry_raw_dot", c.morphometry_raw_dot},
        {"morphometry_global_stats", c.morphometry_global_stats},
        {"temperature", c.temperature},
        {"beta", c.beta},
        {"beta_trainable", c.beta_trainable},
        {"projection_dim", c.projection_dim},
        {"dev_fraction", c.dev_fraction},
    };
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.eps = j.value("eps", c.eps);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    const std::string loss = j.value("loss", "gacl");
    if (loss == "gacl")
        c.loss = LossKind::gacl;
    else if (loss == "infonce")
        c.loss = LossKind::infonce;
    else
        throw ConfigError("unknown loss kind: " + loss);
    const std::string combiner = j.value("combiner", "or");
    if (combiner == "or")
        c.combiner = gacl::Combiner::OR;
    else if (combiner == "and")
        c.combiner = gacl::Combiner::AND;
    else
        throw ConfigError("unknown combiner: " + combiner);
    c.tau_f = j.value("tau_f", c.tau_f);
    c.tau_t = j.value("tau_t", c.tau_t);
    c.thresholds_from_quantiles = j.value("thresholds_from_quantiles", c.thresholds_from_quantiles);
    c.morphometry_global_stats = j.value("morphometry_global_stats", c.morphometry_global_stats);
    const std::string source = j.value("image_similarity_source", "morphometry");
    if (source == "morphometry")
        c.image_similarity_source = gacl::SimilaritySource::morphometry;
    else if (source == "latent")
        c.image_similarity_source = gacl::SimilaritySource::image_latent;
    else
        throw ConfigError("unknown image similarity source: " + source);
    c.morphometry_raw_dot = j.value("morphometry_raw_dot", c.morphometry_raw_dot);
    c.temperature = j.value("temperature", c.temperature);
    c.beta = j.value("beta", c.beta);
    c.beta_trainable = j.value("beta_trainable", c.beta_trainable);
    c.projection_dim = j.value("projection_dim", c.projection_dim);
    c.dev_fraction = j.value("dev_fraction", c.dev_fraction);
    return c;
}

void save_checkpoint(const AlignmentModel& model, const TrainConfig& config,
                     const std::string& path) {
    const json config_json = train_config_to_json(config);
    json j{
        {"format_version", 1},
        {"config", config_json},
        {"config_hash", manifest::sha256_hex(config_json.dump())},
        {"temperature", model.temperature},
        {"beta", model.beta},
        {"image_head", head_to_json(model.image_head)},
        {"text_head", head_to_json(model.text_head)},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("checkpoint is not valid JSON: " + std::string(e.what()));
    }
    Checkpoint ckpt;
    ckpt.config = train_config_from_json(j.at("config"));
    ckpt.model.temperature = j.at("temperature").get<double>();
    ckpt.model.beta = j.at("beta").get<double>();
    ckpt.model.image_head = head_from_json(j.at("image_head"));
    ckpt.model.text_head = head_from_json(j.at("text_head"));
    return ckpt;
}

std::vector<double> random_search_minimize(
    std::span<const std::pair<double, double>> box, std::size_t n_trials, std::uint64_t seed,
    const std::function<double(std::span<const double>)>& objective,
    std::vector<SearchTrial>* table) {
    if (box.empty()) throw ConfigError("random_search_minimize: empty search space");
    if (n_trials < 1) throw ConfigError("random_search_minimize: n_trials must be >= 1");
    Rng rng(seed);
    std::vector<double> best_point;
    double best_value = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        std::vector<double> point(box.size());
        for (std::size_t d = 0; d < box.size(); ++d)
            point[d] = rng.uniform(box[d].first, box[d].second);
        const double value = objective(point);
        if (table) table->push_back({point, value});
        if (best_point.empty() || value < best_value) {
            best_point = point;
            best_value = value;
        }
    }
    return best_point;
}

TrainConfig tune(const TrainInputs& inputs, const TrainConfig& base, TuneSpace space,
                 std::size_t n_trials, std::uint64_t seed,
                 const std::function<double(const TrainConfig&)>& objective,
                 std::vector<SearchTrial>* table) {
    if (space.tau_f.first == 0.0 && space.tau_f.second == 0.0) {
        const DevQuantiles q = dev_similarity_quantiles(inputs, base);
        space.tau_f = q.morphometry;
        space.tau_t = q.text;
    }
    const std::pair<double, double> box[] = {
        {std::log10(space.learning_rate.first), std::log10(space.learning_rate.second)},
        {std::log10(space.eps.first), std::log10(space.eps.second)},
        {std::log10(space.weight_decay.first), std::log10(space.weight_decay.second)},
        space.beta,
        space.tau_f,
        space.tau_t,
    };
    auto config_at = [&](std::span<const double> point) {
        TrainConfig c = base;
        c.learning_rate = std::pow(10.0, point[0]);
        c.eps = std::pow(10.0, point[1]);
        c.weight_decay = std::pow(10.0, point[2]);
        c.beta = point[3];
        c.tau_f = point[4];
        c.tau_t = point[5];
        c.thresholds_from_quantiles = false;
        return c;
    };
    auto default_objective = [&](const TrainConfig& c) {
        TrainLog log;
        train(inputs, c, &log);
        if (log.epochs.empty()) return std::numeric_limits<double>::infinity();
        const EpochStats& last = log.epochs.back();
        return std::isfinite(last.val_loss) ? last.val_loss : last.train_loss;
    };
    const auto& eval = objective ? objective : std::function<double(const TrainConfig&)>(default_objective);
    const std::vector<double> best = random_search_minimize(
        box, n_trials, seed, [&](std::span<const double> p) { return eval(config_at(p)); }, table);
    return config_at(best);
}

} // namespace reveal::align
