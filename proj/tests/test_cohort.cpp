#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "reveal/cohort.hpp"
#include "reveal/error.hpp"
#include "reveal/metrics.hpp"

using namespace reveal;
using cohort::CohortConfig;
using cohort::SplitConfig;
using cohort::Subject;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

double realized_prevalence(const std::vector<Subject>& subjects) {
    std::size_t cases = 0;
    for (const auto& s : subjects) cases += s.is_case;
    return double(cases) / double(subjects.size());
}

// Held-out AUROC of the oracle logistic fit on morphometry.
double oracle_morphometry_auroc(const std::vector<Subject>& subjects) {
    const std::size_t half = subjects.size() / 2;
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < subjects.size(); ++i)
        (i < half ? train_idx : test_idx).push_back(i);
    const Matrix x_train = cohort::morphometry_matrix(subjects, train_idx);
    const Matrix x_test = cohort::morphometry_matrix(subjects, test_idx);
    std::vector<int> y_train, y_test;
    for (const std::size_t i : train_idx) y_train.push_back(subjects[i].is_case ? 1 : 0);
    for (const std::size_t i : test_idx) y_test.push_back(subjects[i].is_case ? 1 : 0);

    const oracles::LogisticFit fit = oracles::fit_logistic(x_train, y_train);
    std::vector<double> scores(test_idx.size());
    for (std::size_t i = 0; i < test_idx.size(); ++i)
        scores[i] = oracles::logistic_score(fit, x_test.row(i));
    return metrics::auroc(scores, y_test);
}

CohortConfig planted_config(std::size_t n, double rho, std::uint64_t seed) {
    CohortConfig cfg;
    cfg.n_subjects = n;
    cfg.prevalence = 0.12;
    cfg.signal_strength = rho;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("generate: no signal leaves morphometry indistinguishable across labels") {
    const auto subjects = cohort::generate_cohort(planted_config(1000, 0.0, 7));
    const double prev = realized_prevalence(subjects);
    CHECK(prev >= 0.10);
    CHECK(prev <= 0.14);

    std::vector<std::size_t> case_idx, control_idx;
    for (std::size_t i = 0; i < subjects.size(); ++i)
        (subjects[i].is_case ? case_idx : control_idx).push_back(i);
    const Matrix cases = cohort::morphometry_matrix(subjects, case_idx);
    const Matrix controls = cohort::morphometry_matrix(subjects, control_idx);

    double p_sum = 0.0;
    for (std::size_t k = 0; k < cohort::kMorphometryCount; ++k) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < cases.rows; ++i) a.push_back(cases(i, k));
        for (std::size_t i = 0; i < controls.rows; ++i) b.push_back(controls(i, k));
        p_sum += metrics::welch_t(a, b).p;
    }
    CHECK(p_sum / double(cohort::kMorphometryCount) > 0.01);
}

TEST_CASE("generate: byte-identical cohorts for identical config and seed") {
    const auto a = cohort::generate_cohort(planted_config(300, 0.4, 7));
    const auto b = cohort::generate_cohort(planted_config(300, 0.4, 7));
    const std::string pa = temp_path("cohort_det_a.csv"), pb = temp_path("cohort_det_b.csv");
    cohort::save_cohort_csv(a, pa);
    cohort::save_cohort_csv(b, pb);
    CHECK(slurp(pa) == slurp(pb));

    const auto c = cohort::generate_cohort(planted_config(300, 0.4, 8));
    const std::string pc = temp_path("cohort_det_c.csv");
    cohort::save_cohort_csv(c, pc);
    CHECK(slurp(pa) != slurp(pc));
}

TEST_CASE("generate: strong signal makes morphometry predictive for the oracle") {
    const auto subjects = cohort::generate_cohort(planted_config(2000, 0.9, 3));
    CHECK(oracle_morphometry_auroc(subjects) > 0.70);
}

TEST_CASE("generate: oracle AUROC is nondecreasing in the signal strength") {
    const double rhos[] = {0.0, 0.3, 0.6, 0.9};
    double mean_auc[4] = {0, 0, 0, 0};
    const int n_seeds = 10;
    for (int seed = 0; seed < n_seeds; ++seed)
        for (int r = 0; r < 4; ++r) {
            const auto subjects = cohort::generate_cohort(planted_config(800, rhos[r], 100 + seed));
            mean_auc[r] += oracle_morphometry_auroc(subjects) / n_seeds;
        }
    CHECK(mean_auc[0] <= mean_auc[1]);
    CHECK(mean_auc[1] <= mean_auc[2]);
    CHECK(mean_auc[2] <= mean_auc[3]);
}

TEST_CASE("generate: invariants on subjects") {
    const auto subjects = cohort::generate_cohort(planted_config(200, 0.5, 21));
    for (const Subject& s : subjects) {
        cohort::validate_morphometry(s.morphometry);
        validate_profile(s.profile);
        CHECK(s.image_proxy.size() == 32);
        CHECK(s.years_to_onset.has_value() == s.is_case);
        if (s.years_to_onset) {
            CHECK(*s.years_to_onset >= 1.5);
            CHECK(*s.years_to_onset <= 11.58);
        }
        CHECK_FALSE(s.profile.at(Rf::age).missing);
        CHECK_FALSE(s.profile.at(Rf::sex).missing);
    }
}

TEST_CASE("generate: config validation") {
    CohortConfig bad = planted_config(5, 0.0, 1);
    CHECK_THROWS_AS(cohort::generate_cohort(bad), ConfigError);
    bad = planted_config(100, 0.0, 1);
    bad.prevalence = 0.6;
    CHECK_THROWS_AS(cohort::generate_cohort(bad), ConfigError);
    bad = planted_config(100, 1.2, 1);
    CHECK_THROWS_AS(cohort::generate_cohort(bad), ConfigError);
}

TEST_CASE("split: 93 cases at 12% target draw 682 matched controls") {
    CohortConfig cfg = planted_config(3100, 0.3, 5);
    cfg.prevalence = 0.03; // 93 cases
    const auto subjects = cohort::generate_cohort(cfg);
    std::size_t cases = 0;
    for (const auto& s : subjects) cases += s.is_case;
    REQUIRE(cases == 93);

    SplitConfig split_cfg;
    const cohort::CohortSplits splits = cohort::split_cohort(subjects, split_cfg, 17);
    CHECK(splits.eval_pool.size() == 93 + 682);

    // 80/20 stratified partition of the pool.
    CHECK(splits.svm_train.size() + splits.svm_test.size() == splits.eval_pool.size());
    std::size_t test_cases = 0;
    for (const std::size_t i : splits.svm_test) test_cases += subjects[i].is_case;
    CHECK(test_cases == std::size_t(std::llround(0.2 * 93)));
}

TEST_CASE("split: 86 cases at the matched target draw exactly 1077 controls") {
    CohortConfig cfg = planted_config(4300, 0.3, 5);
    cfg.prevalence = 0.02; // 86 cases
    const auto subjects = cohort::generate_cohort(cfg);
    std::size_t cases = 0;
    for (const auto& s : subjects) cases += s.is_case;
    REQUIRE(cases == 86);

    SplitConfig split_cfg;
    split_cfg.eval_prevalence = 86.0 / 1163.0;
    split_cfg.prevalence_tolerance = 0.02;
    const cohort::CohortSplits splits = cohort::split_cohort(subjects, split_cfg, 3);
    CHECK(splits.eval_pool.size() == 1163); // 86 cases + 1077 matched controls
}

TEST_CASE("split: zero cases is an error") {
    auto subjects = cohort::generate_cohort(planted_config(100, 0.0, 2));
    for (Subject& s : subjects) {
        s.is_case = false;
        s.years_to_onset.reset();
    }
    CHECK_THROWS_AS(cohort::split_cohort(subjects, SplitConfig{}, 1), NumericError);
}

TEST_CASE("split: infeasible matching names the shortfall") {
    // 12% cases and a huge alignment allocation leave too few controls.
    const auto subjects = cohort::generate_cohort(planted_config(500, 0.0, 3));
    SplitConfig cfg;
    cfg.align_train_fraction = 0.8;
    cfg.align_val_fraction = 0.1;
    CHECK_THROWS_WITH_AS(cohort::split_cohort(subjects, cfg, 1), doctest::Contains("short by"),
                         NumericError);
}

TEST_CASE("split: disjointness, case exclusion, and prevalence over random configs") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        CohortConfig cfg;
        cfg.n_subjects = 60 + rng.below(240);
        cfg.prevalence = 0.05 + 0.10 * rng.uniform();
        cfg.signal_strength = rng.uniform();
        cfg.seed = 1000 + trial;
        const auto subjects = cohort::generate_cohort(cfg);

        SplitConfig split_cfg;
        split_cfg.align_train_fraction = 0.2;
        split_cfg.align_val_fraction = 0.1;
        split_cfg.eval_prevalence = 0.3;
        const cohort::CohortSplits splits = cohort::split_cohort(subjects, split_cfg, cfg.seed);

        std::set<std::size_t> seen;
        for (const auto* part : {&splits.align_train, &splits.align_val, &splits.eval_pool})
            for (const std::size_t i : *part) CHECK(seen.insert(i).second);

        for (const std::size_t i : splits.align_train) CHECK_FALSE(subjects[i].is_case);
        for (const std::size_t i : splits.align_val) CHECK_FALSE(subjects[i].is_case);

        std::size_t eval_cases = 0, total_cases = 0;
        for (const std::size_t i : splits.eval_pool) eval_cases += subjects[i].is_case;
        for (const auto& s : subjects) total_cases += s.is_case;
        CHECK(eval_cases == total_cases);

        const double prev = double(eval_cases) / double(splits.eval_pool.size());
        CHECK(prev >= split_cfg.eval_prevalence - split_cfg.prevalence_tolerance - 1e-12);
        CHECK(prev <= split_cfg.eval_prevalence + split_cfg.prevalence_tolerance + 1e-12);

        std::set<std::size_t> eval_set(splits.eval_pool.begin(), splits.eval_pool.end());
        std::set<std::size_t> svm_union;
        for (const std::size_t i : splits.svm_train) CHECK(svm_union.insert(i).second);
        for (const std::size_t i : splits.svm_test) CHECK(svm_union.insert(i).second);
        CHECK(svm_union == eval_set);
    }
}

TEST_CASE("split: deterministic given seed") {
    const auto subjects = cohort::generate_cohort(planted_config(400, 0.5, 9));
    const auto a = cohort::split_cohort(subjects, SplitConfig{}, 42);
    const auto b = cohort::split_cohort(subjects, SplitConfig{}, 42);
    CHECK(a.align_train == b.align_train);
    CHECK(a.eval_pool == b.eval_pool);
    CHECK(a.svm_test == b.svm_test);
}

TEST_CASE("csv: save-load-save reproduces the file byte for byte") {
    const auto subjects = cohort::generate_cohort(planted_config(50, 0.7, 23));
    const std::string p1 = temp_path("cohort_rt1.csv"), p2 = temp_path("cohort_rt2.csv");
    cohort::save_cohort_csv(subjects, p1);
    const auto loaded = cohort::load_cohort_csv(p1);
    cohort::save_cohort_csv(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));

    REQUIRE(loaded.size() == subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        CHECK(loaded[i].id == subjects[i].id);
        CHECK(loaded[i].is_case == subjects[i].is_case);
        CHECK(loaded[i].profile == subjects[i].profile);
        for (std::size_t k = 0; k < cohort::kMorphometryCount; ++k)
            CHECK(loaded[i].morphometry[k] == subjects[i].morphometry[k]);
        CHECK(loaded[i].image_proxy == subjects[i].image_proxy);
    }
}

TEST_CASE("csv: missing column is a schema error naming it") {
    const auto subjects = cohort::generate_cohort(planted_config(12, 0.0, 4));
    const std::string path = temp_path("cohort_schema.csv");
    cohort::save_cohort_csv(subjects, path);

    // Drop the HbA1C column wholesale.
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    std::stringstream hs(line);
    std::string cell;
    std::size_t drop = 0;
    {
        std::size_t idx = 0;
        while (std::getline(hs, cell, ',')) {
            if (cell == "HbA1C") drop = idx;
            header.push_back(cell);
            ++idx;
        }
    }
    std::ostringstream out;
    auto write_without = [&](const std::string& row) {
        std::stringstream rs(row);
        std::vector<std::string> cells;
        std::string c;
        while (std::getline(rs, c, ',')) cells.push_back(c);
        // split drops trailing empty cells; restore the expected width
        while (cells.size() < header.size()) cells.push_back("");
        bool first = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == drop) continue;
            out << (first ? "" : ",") << cells[i];
            first = false;
        }
        out << "\n";
    };
    write_without(line);
    while (std::getline(in, line))
        if (!line.empty()) write_without(line);
    const std::string mutated = temp_path("cohort_schema_cut.csv");
    std::ofstream(mutated, std::ios::binary) << out.str();

    CHECK_THROWS_WITH_AS(cohort::load_cohort_csv(mutated), doctest::Contains("HbA1C"), SchemaError);
}

TEST_CASE("csv: unknown column listed, bad numeric cell located") {
    const auto subjects = cohort::generate_cohort(planted_config(10, 0.0, 4));
    const std::string path = temp_path("cohort_bad.csv");
    cohort::save_cohort_csv(subjects, path);
    std::string content = slurp(path);

    std::string extra = content;
    extra.insert(extra.find('\n'), ",mystery_column");
    const std::string p_extra = temp_path("cohort_extra.csv");
    std::ofstream(p_extra, std::ios::binary) << extra;
    CHECK_THROWS_WITH_AS(cohort::load_cohort_csv(p_extra), doctest::Contains("mystery_column"),
                         SchemaError);

    // Corrupt the first BMI cell.
    const auto loaded = cohort::load_cohort_csv(path);
    std::string bad = content;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", loaded[0].profile.at(Rf::bmi).numeric);
    const std::string needle = std::string(",") + buf + ",";
    const std::size_t pos = bad.find(needle);
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, needle.size(), ",abc,");
    const std::string p_bad = temp_path("cohort_nonnum.csv");
    std::ofstream(p_bad, std::ios::binary) << bad;
    CHECK_THROWS_WITH_AS(cohort::load_cohort_csv(p_bad), doctest::Contains("abc"), SchemaError);
}

TEST_CASE("csv: hand-constructed subjects survive a round trip") {
    std::vector<Subject> subjects(3);
    const auto& catalog = field_catalog();
    for (std::size_t i = 0; i < 3; ++i) {
        Subject& s = subjects[i];
        s.id = "H" + std::to_string(i);
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            FieldValue& v = s.profile.values[f];
            v.missing = false;
            if (catalog[f].kind == FieldKind::numeric)
                v.numeric = catalog[f].lo + double(i + 1) * 0.25 * (catalog[f].hi - catalog[f].lo);
            else
                v.category = int(i % catalog[f].categories.size());
        }
        s.profile.at(Rf::hdl).missing = i == 1; // one MISSING numeric cell
        for (std::size_t k = 0; k < cohort::kMorphometryCount; ++k)
            s.morphometry[k] = 0.1 + 0.01 * double(k + 1) * double(i + 1);
        s.image_proxy = {double(i), 1.5, -2.25};
        s.is_case = i == 2;
        if (s.is_case) s.years_to_onset = 7.25;
    }
    const std::string path = temp_path("cohort_hand.csv");
    cohort::save_cohort_csv(subjects, path);
    const auto loaded = cohort::load_cohort_csv(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[1].profile.at(Rf::hdl).missing);
    CHECK(loaded[2].years_to_onset == 7.25);
    CHECK(loaded[0].image_proxy == std::vector<double>{0.0, 1.5, -2.25});
    for (std::size_t i = 0; i < 3; ++i) CHECK(loaded[i].profile == subjects[i].profile);
}

TEST_CASE("impute: median and mode from the statistics subset only") {
    auto subjects = cohort::generate_cohort(planted_config(10, 0.0, 6));
    // Continuous: observed {1, 2, 4} among stats subjects -> median 2.
    subjects[0].profile.at(Rf::bmi) = {false, 1.0 + 19.0, -1}; // keep in range: 20
    subjects[1].profile.at(Rf::bmi) = {false, 21.0, -1};
    subjects[2].profile.at(Rf::bmi) = {true, 0.0, -1};
    subjects[3].profile.at(Rf::bmi) = {false, 23.0, -1};
    // Categorical: observed {a, a, b} -> mode a (index 0).
    subjects[0].profile.at(Rf::milk_type) = {false, 0.0, 0};
    subjects[1].profile.at(Rf::milk_type) = {false, 0.0, 0};
    subjects[2].profile.at(Rf::milk_type) = {false, 0.0, 1};
    subjects[3].profile.at(Rf::milk_type) = {true, 0.0, -1};

    const std::vector<std::size_t> stats = {0, 1, 2, 3};
    const auto log = cohort::impute(subjects, stats);
    CHECK(subjects[2].profile.at(Rf::bmi).numeric == doctest::Approx(21.0));
    CHECK(subjects[3].profile.at(Rf::milk_type).category == 0);
    for (const auto& s : subjects)
        for (const auto& v : s.profile.values) CHECK_FALSE(v.missing);
    CHECK_FALSE(log.empty());

    // A field MISSING everywhere in the stats subset cannot be imputed.
    auto broken = cohort::generate_cohort(planted_config(10, 0.0, 6));
    for (auto& s : broken) s.profile.at(Rf::hdl).missing = true;
    CHECK_THROWS_WITH_AS(cohort::impute(broken, stats), doctest::Contains("HDL"), NumericError);
}
