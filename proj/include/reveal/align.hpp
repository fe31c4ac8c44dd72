#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reveal/cohort.hpp"
#include "reveal/gacl.hpp"
#include "reveal/matrix.hpp"

namespace reveal::align {

// Affine map into the shared space; rows of the output are unit-normalized
// by encode().
struct ProjectionHead {
    Matrix w;               // P x d_in
    std::vector<double> b;  // P

    std::size_t output_dim() const { return w.rows; }
    std::size_t input_dim() const { return w.cols; }
};

struct AlignmentModel {
    ProjectionHead image_head;
    ProjectionHead text_head;
    double temperature = 0.07;
    double beta = -0.6319;
};

enum class LossKind { gacl, infonce };

struct TrainConfig {
    double learning_rate = 2.42e-4;
    double eps = 8.61e-7;
    double weight_decay = 0.0232;
    std::size_t batch_size = 128;
    std::size_t epochs = 30;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::gacl;
    gacl::Combiner combiner = gacl::Combiner::OR;
    // Similarity thresholds. The concrete defaults are the tuned values from
    // the reference configuration; with thresholds_from_quantiles set they
    // are re-derived as the Q3 of the development-set similarity
    // distributions instead.
    double tau_f = 0.9480;
    double tau_t = 0.9808;
    bool thresholds_from_quantiles = false;
    gacl::SimilaritySource image_similarity_source = gacl::SimilaritySource::morphometry;
    // Plain dot products of z-scored morphometry rows instead of cosine.
    bool morphometry_raw_dot = false;
    // z-score morphometry with statistics of the whole alignment training
    // set instead of per batch.
    bool morphometry_global_stats = false;
    double temperature = 0.07;
    double beta = -0.6319;
    bool beta_trainable = false;
    std::size_t projection_dim = 64;
    double dev_fraction = 0.85; // slice of alignment data used for quantiles

    void validate() const;
};

struct EmbeddingPair {
    Matrix image; // N x P, unit rows
    Matrix text;  // N x P, unit rows
};

// Projects and unit-normalizes both modalities. Throws when a row projects
// to the zero vector.
EmbeddingPair encode(const AlignmentModel& model, const Matrix& image_inputs,
                     const Matrix& text_features);

// s = I * T^T over unit rows; entries are cosines.
Matrix cosine_matrix(const EmbeddingPair& pair);

// Mean over all pairs of log(1 + exp(l_ij * (-s_ij / tau + beta))), in the
// numerically stable log1p-exp form. Always >= 0.
double gacl_loss(const Matrix& s, const gacl::LabelMatrix& labels, double tau, double beta);

// d loss / d s for the sigmoid pairwise objective (includes the 1/(N*N)
// averaging factor).
Matrix gacl_loss_grad_s(const Matrix& s, const gacl::LabelMatrix& labels, double tau, double beta);

// d loss / d beta when the bias is trainable.
double gacl_loss_grad_beta(const Matrix& s, const gacl::LabelMatrix& labels, double tau, double beta);

// Symmetric cross-entropy with the diagonal as the positive, averaged over
// the image->text and text->image directions.
double infonce_loss(const Matrix& s, double tau);
Matrix infonce_grad_s(const Matrix& s, double tau);

struct ModelGradients {
    Matrix w_image;
    std::vector<double> b_image;
    Matrix w_text;
    std::vector<double> b_text;
    double beta = 0.0;

    double norm() const;
};

// Loss plus analytic gradients through the cosine, the normalization
// Jacobian, and both affine heads.
struct LossAndGrads {
    double loss = 0.0;
    ModelGradients grads;
};
LossAndGrads alignment_backward(const AlignmentModel& model, const Matrix& image_inputs,
                                const Matrix& text_features, const gacl::LabelMatrix& labels,
                                LossKind kind);

// Adam with decoupled weight decay; moment decays fixed at (0.9, 0.999).
class AdamW {
public:
    AdamW(std::size_t n_params, double lr, double eps, double weight_decay)
        : lr_(lr), eps_(eps), wd_(weight_decay), m_(n_params, 0.0), v_(n_params, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads, bool decay = true);

private:
    double lr_, eps_, wd_;
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double pos_fraction = 0.0;
    double grad_norm = 0.0;
};

struct TrainLog {
    std::vector<EpochStats> epochs;
    double tau_f_used = 0.0;
    double tau_t_used = 0.0;
    bool aborted = false; // loss diverged; model is the last good checkpoint
};

struct TrainInputs {
    const std::vector<cohort::Subject>* subjects = nullptr;
    const Matrix* text_features = nullptr; // one row per subject, unit norm
    std::vector<std::size_t> align_train;
    std::vector<std::size_t> align_val;
};

// Stage-1 training: per batch, build the group-aware label matrix from the
// configured similarity source, encode both modalities, and take one AdamW
// step on the configured loss. Deterministic given config.seed.
AlignmentModel train(const TrainInputs& inputs, const TrainConfig& config, TrainLog* log = nullptr);

void save_train_log_csv(const TrainLog& log, const std::string& path);

void save_checkpoint(const AlignmentModel& model, const TrainConfig& config,
                     const std::string& path);
struct Checkpoint {
    AlignmentModel model;
    TrainConfig config;
};
Checkpoint load_checkpoint(const std::string& path);

// Seeded uniform random search over a box; returns the argmin sample.
// Ties keep the earliest trial.
struct SearchTrial {
    std::vector<double> point;
    double objective = 0.0;
};
std::vector<double> random_search_minimize(
    std::span<const std::pair<double, double>> box, std::size_t n_trials, std::uint64_t seed,
    const std::function<double(std::span<const double>)>& objective,
    std::vector<SearchTrial>* table = nullptr);

struct TuneSpace {
    std::pair<double, double> learning_rate{1e-6, 5e-4}; // sampled log-uniform
    std::pair<double, double> eps{1e-9, 1e-6};           // log-uniform
    std::pair<double, double> weight_decay{1e-6, 1e-1};  // log-uniform
    std::pair<double, double> beta{-5.0, 0.0};
    std::pair<double, double> tau_f{0.0, 0.0}; // defaults from dev quantiles
    std::pair<double, double> tau_t{0.0, 0.0};
};

// Seeded random search over the hyperparameter box; the objective defaults
// to the final validation loss. Threshold ranges left at (0,0) are replaced
// by the Q3-to-max range of the development-set similarity distributions.
TrainConfig tune(const TrainInputs& inputs, const TrainConfig& base, TuneSpace space,
                 std::size_t n_trials, std::uint64_t seed,
                 const std::function<double(const TrainConfig&)>& objective = {},
                 std::vector<SearchTrial>* table = nullptr);

// Seeded dev slice: dev_fraction of the alignment subjects (train + val).
std::vector<std::size_t> dev_slice_indices(const TrainInputs& inputs, const TrainConfig& config);

// Q3-to-max similarity ranges measured on the dev slice (85% of the
// alignment subjects): first for morphometry, then text, then image latent.
struct DevQuantiles {
    std::pair<double, double> morphometry;
    std::pair<double, double> text;
    std::pair<double, double> latent;
};
DevQuantiles dev_similarity_quantiles(const TrainInputs& inputs, const TrainConfig& config);

} // namespace reveal::align
