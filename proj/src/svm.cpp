#include "reveal/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reveal/error.hpp"
#include "reveal/rng.hpp"

namespace reveal::svm {

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (gamma <= 0.0) throw ConfigError("rbf_kernel: gamma must be positive");
    if (x.size() != y.size()) throw NumericError("rbf_kernel: dimension mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        ss += d * d;
    }
    return std::exp(-gamma * ss);
}

void SvmParams::validate() const {
    if (c <= 0.0) throw ConfigError("svm: C must be positive");
    if (gamma <= 0.0) throw ConfigError("svm: gamma must be positive");
    if (weight_pos <= 0.0 || weight_neg <= 0.0) throw ConfigError("svm: class weights must be positive");
    if (tol <= 0.0) throw ConfigError("svm: tolerance must be positive");
    if (platt_folds < 2) throw ConfigError("svm: platt_folds must be >= 2");
}

double SvmModel::decision_value(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.rows; ++i)
        f += dual_coef[i] *
             rbf_kernel({support_vectors.row(i), support_vectors.cols}, x, gamma);
    return f;
}

double SvmModel::probability(std::span<const double> x) const {
    const double f = decision_value(x);
    const double a = platt_a * f + platt_b;
    return a >= 0.0 ? std::exp(-a) / (1.0 + std::exp(-a)) : 1.0 / (1.0 + std::exp(a));
}

namespace {

// Dual SMO with the maximal-violating-pair / second-order working-set
// selection used by LIBSVM. Labels y in {-1, +1}; per-sample upper bound
// C_i encodes class weighting.
struct SmoSolver {
    const Matrix& x;
    const std::vector<double>& y;
    const std::vector<double>& c_bound;
    double gamma;
    double tol;
    std::size_t max_iter;

    std::vector<double> alpha;
    std::vector<double> grad; // gradient of 1/2 a'Qa - e'a
    std::vector<double> kdiag;
    Matrix kernel; // full cache; problem sizes here stay modest

    double bias = 0.0;
    double residual = 0.0;

    explicit SmoSolver(const Matrix& x_, const std::vector<double>& y_,
                       const std::vector<double>& c_, double gamma_, double tol_,
                       std::size_t max_iter_)
        : x(x_), y(y_), c_bound(c_), gamma(gamma_), tol(tol_), max_iter(max_iter_) {}

    double k(std::size_t i, std::size_t j) const { return kernel(i, j); }

    void solve() {
        const std::size_t n = x.rows;
        alpha.assign(n, 0.0);
        grad.assign(n, -1.0);
        kernel = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double v = rbf_kernel({x.row(i), x.cols}, {x.row(j), x.cols}, gamma);
                kernel(i, j) = v;
                kernel(j, i) = v;
            }
        }
        kdiag.resize(n);
        for (std::size_t i = 0; i < n; ++i) kdiag[i] = kernel(i, i);

        std::size_t iter = 0;
        while (iter++ < max_iter) {
            // m = max over I_up of -y G, M = min over I_low of -y G.
            double m_up = -std::numeric_limits<double>::infinity();
            double m_low = std::numeric_limits<double>::infinity();
            std::ptrdiff_t i_sel = -1;
            for (std::size_t t = 0; t < n; ++t) {
                const bool in_up = (y[t] > 0 && alpha[t] < c_bound[t]) || (y[t] < 0 && alpha[t] > 0);
                if (in_up && -y[t] * grad[t] > m_up) {
                    m_up = -y[t] * grad[t];
                    i_sel = static_cast<std::ptrdiff_t>(t);
                }
            }
            std::ptrdiff_t j_sel = -1;
            double best_obj = -std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c_bound[t]);
                if (!in_low) continue;
                const double v = -y[t] * grad[t];
                m_low = std::min(m_low, v);
                if (i_sel >= 0 && v < m_up) {
                    // Second-order gain of the (i, t) pair. The Hessian along
                    // the feasible direction is K_ii + K_tt - 2 K_it for any
                    // label combination.
                    const std::size_t i = static_cast<std::size_t>(i_sel);
                    const double b_it = m_up - v;
                    double a_it = kdiag[i] + kdiag[t] - 2.0 * k(i, t);
                    if (a_it <= 0.0) a_it = 1e-12;
                    const double gain = b_it * b_it / a_it;
                    if (gain > best_obj) {
                        best_obj = gain;
                        j_sel = static_cast<std::ptrdiff_t>(t);
                    }
                }
            }
            residual = m_up - m_low;
            if (i_sel < 0 || j_sel < 0 || residual < tol) break;

            const std::size_t i = static_cast<std::size_t>(i_sel);
            const std::size_t j = static_cast<std::size_t>(j_sel);
            double a_ij = kdiag[i] + kdiag[j] - 2.0 * k(i, j);
            if (a_ij <= 0.0) a_ij = 1e-12;
            // Newton step along alpha_i += y_i d, alpha_j -= y_j d, clamped
            // so both multipliers stay inside their boxes.
            double delta = (-y[i] * grad[i] + y[j] * grad[j]) / a_ij;
            const double hi_i = y[i] > 0 ? c_bound[i] - alpha[i] : alpha[i];
            const double hi_j = y[j] > 0 ? alpha[j] : c_bound[j] - alpha[j];
            delta = std::min(delta, std::min(hi_i, hi_j));

            const double old_ai = alpha[i], old_aj = alpha[j];
            alpha[i] += y[i] * delta;
            alpha[j] -= y[j] * delta;
            alpha[i] = std::clamp(alpha[i], 0.0, c_bound[i]);
            alpha[j] = std::clamp(alpha[j], 0.0, c_bound[j]);

            const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
            for (std::size_t t = 0; t < n; ++t)
                grad[t] += y[t] * (y[i] * k(i, t) * dai + y[j] * k(j, t) * daj);
        }

        if (residual >= tol && iter >= max_iter)
            throw NumericError("svm: SMO failed to converge, KKT residual " +
                               std::to_string(residual));

        // Bias from the free support vectors, falling back to the bound
        // midpoint when none are strictly inside the box.
        double free_sum = 0.0;
        std::size_t free_count = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] > 1e-12 && alpha[t] < c_bound[t] - 1e-12) {
                free_sum += y[t] * grad[t]; // y_t G_t = f(x_t) - b ... - y_t
                ++free_count;
            }
        }
        if (free_count > 0) {
            bias = -free_sum / static_cast<double>(free_count);
        } else {
            double m_up = -std::numeric_limits<double>::infinity();
            double m_low = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n; ++t) {
                const bool in_up = (y[t] > 0 && alpha[t] < c_bound[t]) || (y[t] < 0 && alpha[t] > 0);
                const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c_bound[t]);
                if (in_up) m_up = std::max(m_up, -y[t] * grad[t]);
                if (in_low) m_low = std::min(m_low, -y[t] * grad[t]);
            }
            bias = (m_up + m_low) / 2.0;
        }
    }
};

SvmModel train_svm_impl(const Matrix& x, const std::vector<int>& y, const SvmParams& params) {
    std::size_t n_pos = 0;
    for (const int v : y) n_pos += v != 0;
    const std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw NumericError("svm: training data has a single class");

    double w_pos = params.weight_pos, w_neg = params.weight_neg;
    if (params.balanced_weights) {
        w_pos = static_cast<double>(y.size()) / (2.0 * static_cast<double>(n_pos));
        w_neg = static_cast<double>(y.size()) / (2.0 * static_cast<double>(n_neg));
    }
    std::vector<double> signed_y(y.size()), c_bound(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        signed_y[i] = y[i] != 0 ? 1.0 : -1.0;
        c_bound[i] = params.c * (y[i] != 0 ? w_pos : w_neg);
    }

    SmoSolver solver(x, signed_y, c_bound, params.gamma, params.tol, params.max_iter);
    solver.solve();

    SvmModel model;
    model.gamma = params.gamma;
    model.kkt_residual = solver.residual;
    model.bias = solver.bias;
    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (solver.alpha[i] > 1e-12) sv.push_back(i);
    model.support_vectors = Matrix(sv.size(), x.cols);
    model.dual_coef.resize(sv.size());
    for (std::size_t r = 0; r < sv.size(); ++r) {
        std::copy(x.row(sv[r]), x.row(sv[r]) + x.cols, model.support_vectors.row(r));
        model.dual_coef[r] = solver.alpha[sv[r]] * signed_y[sv[r]];
    }
    return model;
}

} // namespace

std::vector<std::size_t> stratified_fold_ids(const std::vector<int>& y, std::size_t folds,
                                             std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] != 0 ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::size_t> fold_of(y.size(), 0);
    for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
    for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;
    return fold_of;
}

PlattParams fit_platt(std::span<const double> decision_values, std::span<const int> labels) {
    if (decision_values.size() != labels.size() || decision_values.empty())
        throw NumericError("fit_platt: bad inputs");
    double prior1 = 0.0;
    for (const int y : labels) prior1 += y != 0;
    const double prior0 = static_cast<double>(labels.size()) - prior1;

    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> target(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) target[i] = labels[i] != 0 ? hi : lo;

    double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double aa, double bb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double f = aa * decision_values[i] + bb;
            // Cross-entropy with p = 1/(1+exp(f)) as P(y=1).
            if (f >= 0.0)
                obj += target[i] * f + std::log1p(std::exp(-f));
            else
                obj += (target[i] - 1.0) * f + std::log1p(std::exp(f));
        }
        return obj;
    };

    constexpr int kMaxIter = 100;
    constexpr double kMinStep = 1e-10, kSigma = 1e-12, kEps = 1e-5;
    double fval = objective(a, b);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double f = a * decision_values[i] + b;
            const double p = f >= 0.0 ? std::exp(-f) / (1.0 + std::exp(-f))
                                      : 1.0 / (1.0 + std::exp(f));
            const double q = 1.0 - p;
            const double d2 = p * q;
            h11 += decision_values[i] * decision_values[i] * d2;
            h22 += d2;
            h21 += decision_values[i] * d2;
            const double d1 = target[i] - p;
            g1 += decision_values[i] * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < kEps && std::fabs(g2) < kEps) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= kMinStep) {
            const double na = a + step * da, nb = b + step * db;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                moved = true;
                break;
            }
            step /= 2.0;
        }
        if (!moved) break;
    }
    return {a, b};
}

SvmModel train_svm(const Matrix& x, const std::vector<int>& y, const SvmParams& params) {
    params.validate();
    if (x.rows != y.size() || x.rows == 0) throw NumericError("svm: bad training data shape");
    SvmModel model = train_svm_impl(x, y, params);

    if (params.fit_probabilities) {
        // Out-of-fold decision values so the sigmoid is not fit on
        // training-set outputs.
        const std::size_t folds = std::min<std::size_t>(params.platt_folds, x.rows);
        const std::vector<std::size_t> fold_of = stratified_fold_ids(y, folds, params.platt_seed);
        std::vector<double> oof(x.rows, 0.0);
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> train_idx;
            for (std::size_t i = 0; i < x.rows; ++i)
                if (fold_of[i] != f) train_idx.push_back(i);
            Matrix xt(train_idx.size(), x.cols);
            std::vector<int> yt(train_idx.size());
            std::size_t n_p = 0;
            for (std::size_t r = 0; r < train_idx.size(); ++r) {
                std::copy(x.row(train_idx[r]), x.row(train_idx[r]) + x.cols, xt.row(r));
                yt[r] = y[train_idx[r]];
                n_p += yt[r] != 0;
            }
            SvmModel sub;
            if (n_p == 0 || n_p == yt.size()) {
                sub = model; // degenerate fold: fall back to the full model
            } else {
                sub = train_svm_impl(xt, yt, params);
            }
            for (std::size_t i = 0; i < x.rows; ++i)
                if (fold_of[i] == f) oof[i] = sub.decision_value({x.row(i), x.cols});
        }
        const PlattParams platt = fit_platt(oof, y);
        model.platt_a = platt.a;
        model.platt_b = platt.b;
        model.probabilities_fitted = true;
    }
    return model;
}

} // namespace reveal::svm
