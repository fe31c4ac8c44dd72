#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reveal/error.hpp"
#include "reveal/metrics.hpp"
#include "reveal/rng.hpp"

using namespace reveal;

TEST_CASE("auroc: hand fixtures") {
    // Pairs: (0.35 vs 0.1) ok, (0.35 vs 0.4) wrong, (0.8 vs 0.1) ok,
    // (0.8 vs 0.4) ok -> 3/4.
    const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> labels{0, 0, 1, 1};
    CHECK(metrics::auroc(scores, labels) == doctest::Approx(0.75).epsilon(1e-12));

    CHECK(metrics::auroc(std::vector<double>{0.0, 1.0}, std::vector<int>{0, 1}) ==
          doctest::Approx(1.0));
    CHECK(metrics::auroc(std::vector<double>{1.0, 0.0}, std::vector<int>{0, 1}) ==
          doctest::Approx(0.0));
    // All-tied scores get half credit.
    CHECK(metrics::auroc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) ==
          doctest::Approx(0.5));

    CHECK_THROWS_AS(metrics::auroc(std::vector<double>{0.5, 0.7}, std::vector<int>{1, 1}),
                    NumericError);
}

TEST_CASE("auroc: equals exhaustive pair counting on every small instance") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(19); // n <= 20
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse score grid to force plenty of ties.
            scores[i] = double(rng.below(6)) / 5.0;
            labels[i] = rng.uniform() < 0.4 ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(metrics::auroc(scores, labels) ==
              doctest::Approx(oracles::pair_count_auroc(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("compute_metrics: perfect separation scores 1 everywhere") {
    const std::vector<double> scores{-2.0, -1.0, 1.0, 2.0};
    const std::vector<double> probs{0.1, 0.2, 0.8, 0.9};
    const std::vector<int> labels{0, 0, 1, 1};
    const metrics::BinaryMetrics m = metrics::compute_metrics(scores, probs, labels);
    CHECK(m.auroc == doctest::Approx(1.0));
    CHECK(m.balanced_accuracy == doctest::Approx(1.0));
    CHECK(m.f1 == doctest::Approx(1.0));
    CHECK(m.mcc == doctest::Approx(1.0));
}

TEST_CASE("compute_metrics: the all-negative predictor degenerates correctly") {
    // 12% prevalence, every probability below threshold.
    std::vector<double> scores, probs;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
        scores.push_back(-1.0 - i * 1e-3);
        probs.push_back(0.2);
        labels.push_back(i < 12 ? 1 : 0);
    }
    const metrics::BinaryMetrics m = metrics::compute_metrics(scores, probs, labels);
    CHECK(m.balanced_accuracy == doctest::Approx(0.5));
    CHECK(m.f1 == doctest::Approx(0.0));
    CHECK(m.mcc == doctest::Approx(0.0));
}

TEST_CASE("mcc is flip-invariant, f1 is not") {
    Rng rng(29);
    bool f1_changed_somewhere = false;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 12 + rng.below(30);
        std::vector<double> scores(n), probs(n);
        std::vector<int> labels(n), flipped(n);
        std::vector<double> flipped_probs(n), flipped_scores(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.normal();
            probs[i] = 1.0 / (1.0 + std::exp(-scores[i]));
            labels[i] = rng.uniform() < 0.4 ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
            flipped[i] = 1 - labels[i];
            flipped_probs[i] = 1.0 - probs[i];
            flipped_scores[i] = -scores[i];
        }
        if (!has_pos || !has_neg) continue;
        const auto m = metrics::compute_metrics(scores, probs, labels);
        const auto mf = metrics::compute_metrics(flipped_scores, flipped_probs, flipped);
        CHECK(m.mcc == doctest::Approx(mf.mcc).epsilon(1e-9));
        if (std::fabs(m.f1 - mf.f1) > 1e-9) f1_changed_somewhere = true;
    }
    CHECK(f1_changed_somewhere);
}

TEST_CASE("metric ranges hold on random prediction draws") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 4 + rng.below(40);
        std::vector<double> scores(n), probs(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.normal();
            probs[i] = rng.uniform();
            labels[i] = rng.uniform() < 0.3 ? 1 : 0;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        const auto m = metrics::compute_metrics(scores, probs, labels);
        CHECK(m.auroc >= 0.0);
        CHECK(m.auroc <= 1.0);
        CHECK(m.balanced_accuracy >= 0.0);
        CHECK(m.balanced_accuracy <= 1.0);
        CHECK(m.f1 >= 0.0);
        CHECK(m.f1 <= 1.0);
        CHECK(m.mcc >= -1.0);
        CHECK(m.mcc <= 1.0);
    }
}

TEST_CASE("incomplete beta: analytic identities") {
    for (const double x : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        CHECK(metrics::incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-10));
        CHECK(metrics::incomplete_beta(1.0, 3.0, x) ==
              doctest::Approx(1.0 - std::pow(1.0 - x, 3.0)).epsilon(1e-10));
        CHECK(metrics::incomplete_beta(4.0, 1.0, x) ==
              doctest::Approx(std::pow(x, 4.0)).epsilon(1e-10));
        CHECK(metrics::incomplete_beta(2.5, 3.5, x) ==
              doctest::Approx(1.0 - metrics::incomplete_beta(3.5, 2.5, 1.0 - x)).epsilon(1e-10));
    }
}

TEST_CASE("welch: identical samples give t=0, p=1") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    const metrics::WelchResult r = metrics::welch_t(a, a);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(metrics::hedges_g(a, a) == doctest::Approx(0.0));
}

TEST_CASE("welch: p shrinks as the separation grows") {
    std::vector<double> base{0.1, -0.2, 0.05, 0.3, -0.15, 0.0, 0.2, -0.1, 0.12, -0.07};
    double last_p = 1.1;
    for (const double shift : {0.1, 0.5, 1.0, 2.0}) {
        std::vector<double> shifted = base;
        for (double& v : shifted) v += shift;
        const metrics::WelchResult r = metrics::welch_t(shifted, base);
        CHECK(r.p < last_p);
        CHECK(r.p > 0.0);
        CHECK(r.t > 0.0);
        last_p = r.p;
    }
}

TEST_CASE("hedges g: closed-form fixture with unit SDs and unit mean gap") {
    // Samples engineered to have sample SD exactly 1 and means 1 and 0:
    // d = 1, J = 1 - 3/71, g = 0.9577...
    const double c = std::sqrt(9.0 / 82.5);
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
        a[i] = 1.0 + c * (double(i) - 4.5);
        b[i] = 0.0 + c * (double(i) - 4.5);
    }
    CHECK(metrics::sample_stddev(a) == doctest::Approx(1.0).epsilon(1e-12));
    const double g = metrics::hedges_g(a, b);
    CHECK(g == doctest::Approx(1.0 - 3.0 / 71.0).epsilon(1e-12));
    CHECK(std::fabs(g - 0.958) < 1e-3);

    // The Welch side of the same fixture: se^2 = 0.2, df lands at 18.
    const metrics::WelchResult r = metrics::welch_t(a, b);
    CHECK(r.t == doctest::Approx(1.0 / std::sqrt(0.2)).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(18.0).epsilon(1e-9));

    CHECK_THROWS_AS(metrics::welch_t(std::vector<double>{1.0}, b), NumericError);
    const std::vector<double> flat{2.0, 2.0, 2.0};
    CHECK_THROWS_AS(metrics::welch_t(flat, flat), NumericError);
}
