#include "reveal/downstream.hpp"

#include <algorithm>
#include <cmath>

#include "reveal/error.hpp"

namespace reveal::downstream {
namespace {

struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> sd;
};

ColumnStats column_stats(const Matrix& x) {
    ColumnStats s;
    s.mean.assign(x.cols, 0.0);
    s.sd.assign(x.cols, 0.0);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) m += x(i, j);
        m /= double(x.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
        s.mean[j] = m;
        s.sd[j] = x.rows > 1 ? std::sqrt(ss / double(x.rows - 1)) : 0.0;
    }
    return s;
}

// (x - mean) / sd with constant columns mapped to 0.
void apply_z(Matrix& x, const ColumnStats& s) {
    for (std::size_t j = 0; j < x.cols; ++j) {
        const double sd = s.sd[j];
        for (std::size_t i = 0; i < x.rows; ++i)
            x(i, j) = sd > 1e-12 ? (x(i, j) - s.mean[j]) / sd : 0.0;
    }
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw NumericError("hcat: row counts differ");
    Matrix c(a.rows, a.cols + b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::copy(a.row(i), a.row(i) + a.cols, c.row(i));
        std::copy(b.row(i), b.row(i) + b.cols, c.row(i) + a.cols);
    }
    return c;
}

Matrix gather_text(const Matrix& text_features, const std::vector<std::size_t>& indices) {
    Matrix t(indices.size(), text_features.cols);
    for (std::size_t r = 0; r < indices.size(); ++r)
        std::copy(text_features.row(indices[r]), text_features.row(indices[r]) + t.cols, t.row(r));
    return t;
}

} // namespace

const char* variant_name(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::joint: return "joint";
        case FeatureVariant::image_only: return "image_only";
        case FeatureVariant::text_only: return "text_only";
        case FeatureVariant::image_plus_table: return "image_plus_table";
        case FeatureVariant::tabular: return "tabular";
    }
    return "?";
}

FeatureVariant variant_from_name(const std::string& name) {
    if (name == "joint") return FeatureVariant::joint;
    if (name == "image_only") return FeatureVariant::image_only;
    if (name == "text_only") return FeatureVariant::text_only;
    if (name == "image_plus_table") return FeatureVariant::image_plus_table;
    if (name == "tabular") return FeatureVariant::tabular;
    throw ConfigError("unknown feature variant: " + name);
}

Matrix expand_tabular(const std::vector<cohort::Subject>& subjects,
                      const std::vector<std::size_t>& indices, bool include_morphometry) {
    const auto& catalog = field_catalog();
    std::size_t width = 0;
    for (const auto& spec : catalog)
        width += spec.kind == FieldKind::numeric ? 1 : spec.categories.size();
    if (include_morphometry) width += cohort::kMorphometryCount;

    Matrix out(indices.size(), width);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const cohort::Subject& s = subjects[indices[r]];
        std::size_t col = 0;
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            const FieldValue& v = s.profile.values[f];
            if (v.missing)
                throw NumericError("expand_tabular: subject " + s.id + " field '" +
                                   catalog[f].name + "' is MISSING; impute first");
            if (catalog[f].kind == FieldKind::numeric) {
                out(r, col++) = v.numeric;
            } else {
                for (std::size_t c = 0; c < catalog[f].categories.size(); ++c)
                    out(r, col++) = static_cast<int>(c) == v.category ? 1.0 : 0.0;
            }
        }
        if (include_morphometry)
            for (std::size_t k = 0; k < cohort::kMorphometryCount; ++k)
                out(r, col++) = s.morphometry[k];
    }
    return out;
}

Matrix build_features(const align::AlignmentModel* model,
                      const std::vector<cohort::Subject>& subjects,
                      const Matrix* text_features, const std::vector<std::size_t>& indices,
                      FeatureVariant variant, const std::vector<std::size_t>& stats_indices) {
    const bool needs_model = variant != FeatureVariant::tabular;
    if (needs_model && model == nullptr)
        throw ConfigError(std::string("variant '") + variant_name(variant) +
                          "' requires a trained alignment model");
    if ((variant == FeatureVariant::joint || variant == FeatureVariant::text_only ||
         variant == FeatureVariant::image_only || variant == FeatureVariant::image_plus_table) &&
        text_features == nullptr)
        throw ConfigError("embedding variants require text features");

    auto embeddings = [&]() -> align::EmbeddingPair {
        return align::encode(*model, cohort::image_proxy_matrix(subjects, indices),
                             gather_text(*text_features, indices));
    };

    switch (variant) {
        case FeatureVariant::joint: {
            const align::EmbeddingPair pair = embeddings();
            return hcat(pair.image, pair.text);
        }
        case FeatureVariant::image_only: return embeddings().image;
        case FeatureVariant::text_only: return embeddings().text;
        case FeatureVariant::image_plus_table: {
            Matrix table = expand_tabular(subjects, indices, false);
            Matrix stats_block = expand_tabular(subjects, stats_indices, false);
            apply_z(table, column_stats(stats_block));
            return hcat(embeddings().image, table);
        }
        case FeatureVariant::tabular: {
            Matrix table = expand_tabular(subjects, indices, true);
            Matrix stats_block = expand_tabular(subjects, stats_indices, true);
            apply_z(table, column_stats(stats_block));
            return table;
        }
    }
    throw ConfigError("unhandled feature variant");
}

CvSelection cross_validate(const Matrix& x, const std::vector<int>& y,
                           std::span<const double> c_grid, std::span<const double> gamma_grid,
                           std::size_t folds, std::uint64_t seed, const svm::SvmParams& base) {
    if (folds < 2) throw ConfigError("cross_validate: folds must be >= 2");
    if (c_grid.empty() || gamma_grid.empty()) throw ConfigError("cross_validate: empty grid");
    std::size_t n_pos = 0;
    for (const int v : y) n_pos += v != 0;
    const std::size_t n_neg = y.size() - n_pos;
    const std::size_t usable = std::min({folds, n_pos, n_neg});
    if (usable < 2)
        throw NumericError("cross_validate: cannot stratify " + std::to_string(n_pos) + " vs " +
                           std::to_string(n_neg) + " labels into 2+ folds");

    const std::vector<std::size_t> fold_of = svm::stratified_fold_ids(y, usable, seed);

    std::vector<double> cs(c_grid.begin(), c_grid.end());
    std::vector<double> gammas(gamma_grid.begin(), gamma_grid.end());
    std::sort(cs.begin(), cs.end());
    std::sort(gammas.begin(), gammas.end());

    // Fold index lists are shared across the grid.
    std::vector<std::vector<std::size_t>> fold_train(usable), fold_test(usable);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t f = 0; f < usable; ++f)
            (fold_of[i] == f ? fold_test[f] : fold_train[f]).push_back(i);

    CvSelection sel;
    double best = -1.0;
    for (const double c : cs) {
        for (const double gamma : gammas) {
            double auc_sum = 0.0;
            for (std::size_t f = 0; f < usable; ++f) {
                Matrix xt(fold_train[f].size(), x.cols);
                std::vector<int> yt(fold_train[f].size());
                for (std::size_t r = 0; r < fold_train[f].size(); ++r) {
                    std::copy(x.row(fold_train[f][r]), x.row(fold_train[f][r]) + x.cols, xt.row(r));
                    yt[r] = y[fold_train[f][r]];
                }
                svm::SvmParams p = base;
                p.c = c;
                p.gamma = gamma;
                p.fit_probabilities = false; // fold AUROC needs only decision values
                const svm::SvmModel m = svm::train_svm(xt, yt, p);
                std::vector<double> scores(fold_test[f].size());
                std::vector<int> labels(fold_test[f].size());
                for (std::size_t r = 0; r < fold_test[f].size(); ++r) {
                    scores[r] = m.decision_value({x.row(fold_test[f][r]), x.cols});
                    labels[r] = y[fold_test[f][r]];
                }
                auc_sum += metrics::auroc(scores, labels);
            }
            const double mean_auc = auc_sum / double(usable);
            sel.table.push_back({c, gamma, mean_auc});
            if (mean_auc > best) { // strict: ties keep smaller C, then gamma
                best = mean_auc;
                sel.c = c;
                sel.gamma = gamma;
            }
        }
    }
    return sel;
}

EvalOutcome fit_and_evaluate(const Matrix& x_train, const std::vector<int>& y_train,
                             const Matrix& x_test, const std::vector<int>& y_test,
                             std::span<const double> c_grid, std::span<const double> gamma_grid,
                             std::size_t folds, std::uint64_t seed, const svm::SvmParams& base) {
    const CvSelection sel = cross_validate(x_train, y_train, c_grid, gamma_grid, folds, seed, base);
    svm::SvmParams params = base;
    params.c = sel.c;
    params.gamma = sel.gamma;
    params.fit_probabilities = true;
    const svm::SvmModel model = svm::train_svm(x_train, y_train, params);

    EvalOutcome out;
    out.c = sel.c;
    out.gamma = sel.gamma;
    out.test_labels = y_test;
    out.test_scores.resize(x_test.rows);
    out.test_probabilities.resize(x_test.rows);
    for (std::size_t i = 0; i < x_test.rows; ++i) {
        out.test_scores[i] = model.decision_value({x_test.row(i), x_test.cols});
        out.test_probabilities[i] = model.probability({x_test.row(i), x_test.cols});
    }
    out.test = metrics::compute_metrics(out.test_scores, out.test_probabilities, out.test_labels);
    return out;
}

} // namespace reveal::downstream
