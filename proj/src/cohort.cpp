#include "reveal/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reveal/error.hpp"
#include "reveal/rng.hpp"

namespace reveal::cohort {
namespace {

// How strongly each field tracks the latent risk, in within-field SD units.
// Positive weights push the field up for high-risk subjects. Fields not
// listed are pure nuisance for the label.
struct FieldEffect {
    Rf field;
    double weight;
};

constexpr FieldEffect kFieldEffects[] = {
    {Rf::age, 0.6},
    {Rf::hba1c, 1.0},
    {Rf::bmi, 0.5},
    {Rf::hdl, -0.5},
    {Rf::systolic_bp, 0.7},
    {Rf::diastolic_bp, 0.3},
    {Rf::numeric_memory, -1.0},
    {Rf::fluid_intelligence, -1.1},
    {Rf::tmt_a_duration, 0.8},
    {Rf::tmt_a_errors, 0.5},
    {Rf::tmt_b_duration, 1.0},
    {Rf::tmt_b_errors, 0.7},
    {Rf::depression, 1.2},
    {Rf::sleep_deprivation, 1.0},
    {Rf::alcohol_use, 0.4},
    {Rf::smoking_history, 0.7},
    {Rf::walk_days_per_week, -0.4},
    {Rf::walk_duration, -0.4},
    {Rf::moderate_days_per_week, -0.5},
    {Rf::moderate_duration, -0.4},
    {Rf::vigorous_days_per_week, -0.6},
    {Rf::vigorous_duration, -0.5},
    {Rf::family_visit_frequency, 0.5},
    {Rf::leisure_activity_count, -0.7},
    {Rf::processed_meat_intake, 0.5},
    {Rf::oily_fish_intake, -0.4},
    {Rf::fresh_fruit_intake, -0.4},
    {Rf::cooked_vegetable_intake, -0.3},
    {Rf::water_intake, -0.3},
    {Rf::tea_intake, -0.2},
};

double field_effect(Rf f) {
    for (const auto& e : kFieldEffects)
        if (e.field == f) return e.weight;
    return 0.0;
}

struct NumericGen {
    Rf field;
    double mean;
    double sd;
};

constexpr NumericGen kNumericGens[] = {
    {Rf::age, 57, 8},
    {Rf::bmi, 27, 4.5},
    {Rf::hba1c, 36, 6.5},
    {Rf::hdl, 1.45, 0.35},
    {Rf::systolic_bp, 138, 18},
    {Rf::diastolic_bp, 82, 10},
    {Rf::numeric_memory, 7, 1.5},
    {Rf::fluid_intelligence, 6, 2},
    {Rf::tmt_a_duration, 400, 150},
    {Rf::tmt_a_errors, 1.2, 1.2},
    {Rf::tmt_b_duration, 700, 250},
    {Rf::tmt_b_errors, 3, 2},
    {Rf::cannabis_use, 4, 10},
    {Rf::cannabis_initiation_age, 19, 4},
    {Rf::walk_days_per_week, 4.5, 2},
    {Rf::walk_duration, 45, 30},
    {Rf::moderate_days_per_week, 3.5, 2},
    {Rf::moderate_duration, 50, 35},
    {Rf::vigorous_days_per_week, 1.8, 1.6},
    {Rf::vigorous_duration, 30, 25},
    {Rf::leisure_activity_count, 2.5, 1.2},
    {Rf::cooked_vegetable_intake, 3, 1.5},
    {Rf::raw_vegetable_intake, 2.5, 1.5},
    {Rf::fresh_fruit_intake, 2.8, 1.5},
    {Rf::dried_fruit_intake, 1, 1},
    {Rf::bread_intake, 10, 6},
    {Rf::tea_intake, 3.5, 2.5},
    {Rf::coffee_intake, 2.2, 1.8},
    {Rf::water_intake, 5, 2.5},
};

// Ordinal cutpoints on a standard-normal latent for each categorical field.
struct CategoricalGen {
    Rf field;
    std::vector<double> cutpoints; // size = categories - 1
};

const std::vector<CategoricalGen>& categorical_gens() {
    static const std::vector<CategoricalGen> gens = {
        {Rf::sex, {0.05}},
        {Rf::economic_status, {-0.8, 0.0, 0.8, 1.6}},
        {Rf::ethnic_background, {1.0, 1.3, 1.6, 1.9, 2.2, 2.5}},
        {Rf::employment_status, {0.2, 1.2, 1.8, 2.3}},
        {Rf::depression, {0.8, 1.6, 2.2}},
        {Rf::sleep_deprivation, {0.3, 1.2}},
        {Rf::alcohol_use, {-1.3, -0.7, -0.1, 0.6, 1.3}},
        {Rf::smoking_history, {0.3, 1.5}},
        {Rf::family_visit_frequency, {-1.0, -0.2, 0.7, 1.7}},
        {Rf::oily_fish_intake, {-1.6, -0.8, 0.2, 1.2, 2.0}},
        {Rf::non_oily_fish_intake, {-1.6, -0.8, 0.2, 1.2, 2.0}},
        {Rf::processed_meat_intake, {-1.6, -0.8, 0.2, 1.2, 2.0}},
        {Rf::poultry_intake, {-1.6, -0.8, 0.2, 1.2, 2.0}},
        {Rf::beef_intake, {-1.2, -0.4, 0.6, 1.5, 2.2}},
        {Rf::lamb_intake, {-0.8, 0.0, 0.9, 1.7, 2.4}},
        {Rf::pork_intake, {-1.0, -0.2, 0.8, 1.6, 2.3}},
        {Rf::milk_type, {-0.6, 0.8, 1.7, 2.2}},
        {Rf::spread_type, {0.0, 0.9, 1.8}},
        {Rf::salt_added_to_food, {-0.3, 0.8, 1.8}},
    };
    return gens;
}

// Baseline means, SDs, and latent-risk loadings for the 17 morphometric
// features. Loadings alternate in sign so the planted shift is not a pure
// global offset.
struct MorphoGen {
    double mean;
    double sd;
    double loading;
};

constexpr MorphoGen kMorphoGens[kMorphometryCount] = {
    {0.43, 0.09, 0.9},  // vertical cup-to-disc ratio
    {0.46, 0.09, 0.8},  // horizontal cup-to-disc ratio
    {1.45, 0.06, -0.7}, {0.42, 0.08, -0.5}, {1.08, 0.04, 0.6},
    {1.20, 0.10, 0.5},  {0.55, 0.12, 0.7},
    {1.43, 0.06, -0.6}, {0.45, 0.08, -0.4}, {1.10, 0.04, 0.5},
    {1.25, 0.10, 0.6},  {0.60, 0.12, 0.4},
    {1.48, 0.05, -0.8}, {0.48, 0.07, -0.6}, {1.09, 0.04, 0.7},
    {1.22, 0.09, 0.5},  {0.58, 0.11, 0.6},
};

int bucket(double latent, const std::vector<double>& cutpoints) {
    int cat = 0;
    for (const double c : cutpoints) {
        if (latent > c)
            ++cat;
        else
            break;
    }
    return cat;
}

std::string format_id(std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "S%06zu", i + 1);
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

const std::array<std::string, kMorphometryCount>& morphometry_names() {
    static const std::array<std::string, kMorphometryCount> names = [] {
        std::array<std::string, kMorphometryCount> n;
        n[0] = "vertical_cup_disc_ratio";
        n[1] = "horizontal_cup_disc_ratio";
        const char* vessels[] = {"artery", "vein", "combined"};
        const char* measures[] = {"fractal_dimension", "fractal_density", "distance_tortuosity",
                                  "squared_curvature_tortuosity", "tortuosity_density"};
        std::size_t k = 2;
        for (const char* v : vessels)
            for (const char* m : measures) n[k++] = std::string(v) + "_" + m;
        return n;
    }();
    return names;
}

void validate_morphometry(const MorphometryVector& m) {
    for (std::size_t k = 0; k < kMorphometryCount; ++k) {
        if (!std::isfinite(m[k]) || m[k] <= 0.0)
            throw SchemaError("morphometry feature '" + morphometry_names()[k] +
                              "' must be a positive finite value");
        if (k < 2 && m[k] > 1.0)
            throw SchemaError("cup-to-disc ratio '" + morphometry_names()[k] + "' must be in (0, 1]");
    }
}

void CohortConfig::validate() const {
    if (n_subjects < 10) throw ConfigError("n_subjects must be >= 10");
    if (!(prevalence > 0.0 && prevalence < 0.5)) throw ConfigError("prevalence must be in (0, 0.5)");
    if (!(signal_strength >= 0.0 && signal_strength <= 1.0))
        throw ConfigError("signal_strength must be in [0, 1]");
    if (noise_morphometry < 0 || noise_image < 0 || noise_risk_factors < 0)
        throw ConfigError("noise levels must be nonnegative");
    if (image_dim < 1 || image_nuisance_dims >= image_dim)
        throw ConfigError("image_dim must exceed image_nuisance_dims");
    if (missing_rate < 0.0 || missing_rate > 0.5) throw ConfigError("missing_rate must be in [0, 0.5]");
    if (onset_years_lo < 0.0 || onset_years_hi < onset_years_lo)
        throw ConfigError("onset year range is invalid");
}

std::vector<Subject> generate_cohort(const CohortConfig& config) {
    config.validate();
    const std::size_t n = config.n_subjects;
    const double rho = config.signal_strength;
    Rng root(config.seed);

    // Fixed random map from morphometry space to the image-proxy signal dims.
    const std::size_t sig_dims = config.image_dim - config.image_nuisance_dims;
    Rng map_rng = root.fork("image_map");
    Matrix proxy_map(sig_dims, kMorphometryCount);
    for (double& v : proxy_map.data) v = map_rng.normal() / std::sqrt(double(kMorphometryCount));

    Rng latent_rng = root.fork("latent");
    std::vector<double> z(n);
    for (double& v : z) v = latent_rng.normal();

    // Cases are the top slice of the latent risk distribution.
    const std::size_t n_cases = static_cast<std::size_t>(std::llround(config.prevalence * double(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
    std::vector<bool> is_case(n, false);
    for (std::size_t r = 0; r < n_cases; ++r) is_case[order[r]] = true;

    Rng field_rng = root.fork("fields");
    Rng morpho_rng = root.fork("morphometry");
    Rng onset_rng = root.fork("onset");
    Rng missing_rng = root.fork("missing");

    const auto& catalog = field_catalog();
    std::vector<Subject> subjects(n);
    for (std::size_t i = 0; i < n; ++i) {
        Subject& s = subjects[i];
        s.id = format_id(i);
        s.is_case = is_case[i];
        if (s.is_case) s.years_to_onset = onset_rng.uniform(config.onset_years_lo, config.onset_years_hi);
        const double shift = rho * z[i];

        // Numeric risk-factor fields.
        for (const NumericGen& g : kNumericGens) {
            const FieldSpec& spec = catalog[idx(g.field)];
            double v = g.mean + g.sd * (field_effect(g.field) * shift +
                                        config.noise_risk_factors * field_rng.normal());
            v = std::clamp(v, spec.lo, spec.hi);
            if (spec.decimals == 0)
                v = std::round(v);
            else {
                const double scale = std::pow(10.0, spec.decimals);
                v = std::round(v * scale) / scale;
            }
            FieldValue& fv = s.profile.values[idx(g.field)];
            fv.missing = false;
            fv.numeric = v;
        }
        // Ordinal categorical fields via a shifted standard-normal latent.
        for (const CategoricalGen& g : categorical_gens()) {
            const double effect = g.field == Rf::sex ? 0.0 : field_effect(g.field);
            const double latent = effect * shift + config.noise_risk_factors * field_rng.normal();
            FieldValue& fv = s.profile.values[idx(g.field)];
            fv.missing = false;
            fv.category = bucket(latent, g.cutpoints);
        }

        // Missingness. Age and sex stay complete (they drive control
        // matching); cannabis initiation age is mostly unreported.
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            const double u = missing_rng.uniform();
            if (f == idx(Rf::age) || f == idx(Rf::sex)) continue;
            if (f == idx(Rf::cannabis_initiation_age)) {
                if (u < 0.65) s.profile.values[f].missing = true;
            } else if (u < config.missing_rate) {
                s.profile.values[f].missing = true;
            }
        }

        for (std::size_t k = 0; k < kMorphometryCount; ++k) {
            const MorphoGen& g = kMorphoGens[k];
            double v = g.mean + g.sd * (g.loading * shift + config.noise_morphometry * morpho_rng.normal());
            const double hi = k < 2 ? 1.0 : 1e6;
            s.morphometry[k] = std::clamp(v, 0.02, hi);
        }

        s.image_proxy.assign(config.image_dim, 0.0);
        for (std::size_t d = 0; d < sig_dims; ++d) {
            double acc = 0.0;
            for (std::size_t k = 0; k < kMorphometryCount; ++k) {
                const MorphoGen& g = kMorphoGens[k];
                acc += proxy_map(d, k) * (s.morphometry[k] - g.mean) / g.sd;
            }
            s.image_proxy[d] = acc + config.noise_image * morpho_rng.normal();
        }
        for (std::size_t d = sig_dims; d < config.image_dim; ++d)
            s.image_proxy[d] = morpho_rng.normal();
    }
    return subjects;
}

void SplitConfig::validate() const {
    if (align_train_fraction < 0 || align_val_fraction < 0 ||
        align_train_fraction + align_val_fraction >= 1.0)
        throw ConfigError("alignment fractions must be nonnegative and sum below 1");
    if (!(eval_prevalence > 0.0 && eval_prevalence < 0.5))
        throw ConfigError("eval_prevalence must be in (0, 0.5)");
    if (prevalence_tolerance <= 0.0 || prevalence_tolerance >= eval_prevalence)
        throw ConfigError("prevalence_tolerance is invalid");
    if (!(svm_test_fraction > 0.0 && svm_test_fraction < 1.0))
        throw ConfigError("svm_test_fraction must be in (0, 1)");
}

CohortSplits split_cohort(const std::vector<Subject>& subjects, const SplitConfig& config,
                          std::uint64_t seed) {
    config.validate();
    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < subjects.size(); ++i)
        (subjects[i].is_case ? cases : controls).push_back(i);
    if (cases.empty()) throw NumericError("split_cohort: cohort contains no cases");

    Rng rng(seed);
    Rng assign_rng = rng.fork("align_assign");
    std::vector<std::size_t> shuffled = controls;
    assign_rng.shuffle(shuffled);

    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(config.align_train_fraction * double(controls.size())));
    const std::size_t n_val = static_cast<std::size_t>(
        std::llround(config.align_val_fraction * double(controls.size())));

    CohortSplits splits;
    splits.align_train.assign(shuffled.begin(), shuffled.begin() + n_train);
    splits.align_val.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_val);
    std::vector<std::size_t> pool(shuffled.begin() + n_train + n_val, shuffled.end());

    const double q = config.eval_prevalence;
    const double tol = config.prevalence_tolerance;
    const std::size_t c = cases.size();
    const std::size_t wanted =
        static_cast<std::size_t>(std::llround(double(c) * (1.0 - q) / q));
    // Fewest controls that still keep the realized prevalence inside the
    // tolerance band.
    const std::size_t minimum = static_cast<std::size_t>(
        std::ceil(double(c) * (1.0 - q - tol) / (q + tol)));
    if (pool.size() < minimum)
        throw NumericError("split_cohort: infeasible control matching, need at least " +
                           std::to_string(minimum) + " controls but only " +
                           std::to_string(pool.size()) + " remain (short by " +
                           std::to_string(minimum - pool.size()) + ")");
    const std::size_t n_matched = std::min(wanted, pool.size());

    // Greedy nearest-neighbor matching on (age, sex), cycling over cases so
    // every case contributes to the matched-control distribution.
    auto age_of = [&](std::size_t i) {
        const FieldValue& v = subjects[i].profile.at(Rf::age);
        return v.missing ? 60.0 : v.numeric;
    };
    auto sex_of = [&](std::size_t i) {
        const FieldValue& v = subjects[i].profile.at(Rf::sex);
        return v.missing ? -1 : v.category;
    };
    std::vector<std::size_t> case_order = cases;
    rng.fork("match_order").shuffle(case_order);
    std::vector<bool> used(pool.size(), false);
    std::vector<std::size_t> matched;
    matched.reserve(n_matched);
    std::size_t cursor = 0;
    while (matched.size() < n_matched) {
        const std::size_t case_idx = case_order[cursor % case_order.size()];
        ++cursor;
        double best_dist = 0.0;
        std::ptrdiff_t best = -1;
        for (std::size_t p = 0; p < pool.size(); ++p) {
            if (used[p]) continue;
            const double dist = std::fabs(age_of(case_idx) - age_of(pool[p])) +
                                (sex_of(case_idx) == sex_of(pool[p]) ? 0.0 : 100.0);
            if (best < 0 || dist < best_dist) {
                best = static_cast<std::ptrdiff_t>(p);
                best_dist = dist;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        matched.push_back(pool[static_cast<std::size_t>(best)]);
    }

    splits.eval_pool = cases;
    splits.eval_pool.insert(splits.eval_pool.end(), matched.begin(), matched.end());
    std::sort(splits.eval_pool.begin(), splits.eval_pool.end());

    const double realized = double(c) / double(c + n_matched);
    if (realized < q - tol || realized > q + tol)
        throw NumericError("split_cohort: realized eval prevalence " + std::to_string(realized) +
                           " misses target " + std::to_string(q) + " by more than the tolerance");

    // Stratified 80/20 split of the evaluation pool.
    Rng svm_rng = rng.fork("svm_split");
    auto stratified = [&](const std::vector<std::size_t>& group) {
        std::vector<std::size_t> g = group;
        svm_rng.shuffle(g);
        const std::size_t n_test =
            static_cast<std::size_t>(std::llround(config.svm_test_fraction * double(g.size())));
        for (std::size_t i = 0; i < g.size(); ++i)
            (i < n_test ? splits.svm_test : splits.svm_train).push_back(g[i]);
    };
    stratified(cases);
    stratified(matched);
    std::sort(splits.svm_train.begin(), splits.svm_train.end());
    std::sort(splits.svm_test.begin(), splits.svm_test.end());
    return splits;
}

std::vector<ImputationRecord> impute(std::vector<Subject>& subjects,
                                     const std::vector<std::size_t>& stats_indices) {
    const auto& catalog = field_catalog();
    std::vector<ImputationRecord> log;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        std::size_t missing_count = 0;
        for (const Subject& s : subjects)
            if (s.profile.values[f].missing) ++missing_count;
        if (missing_count == 0) continue;

        FieldValue fill;
        fill.missing = false;
        if (catalog[f].kind == FieldKind::numeric) {
            std::vector<double> observed;
            for (const std::size_t i : stats_indices)
                if (!subjects[i].profile.values[f].missing)
                    observed.push_back(subjects[i].profile.values[f].numeric);
            if (observed.empty())
                throw NumericError(std::string("impute: field '") + catalog[f].name +
                                   "' has no observed value to compute a median from");
            std::sort(observed.begin(), observed.end());
            const std::size_t m = observed.size();
            fill.numeric = m % 2 == 1 ? observed[m / 2]
                                      : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
        } else {
            std::vector<std::size_t> counts(catalog[f].categories.size(), 0);
            std::size_t seen = 0;
            for (const std::size_t i : stats_indices) {
                const FieldValue& v = subjects[i].profile.values[f];
                if (!v.missing) {
                    ++counts[static_cast<std::size_t>(v.category)];
                    ++seen;
                }
            }
            if (seen == 0)
                throw NumericError(std::string("impute: field '") + catalog[f].name +
                                   "' has no observed value to compute a mode from");
            fill.category = static_cast<int>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
        }

        for (Subject& s : subjects)
            if (s.profile.values[f].missing) s.profile.values[f] = fill;
        log.push_back({catalog[f].name, render_field_value(f, fill), missing_count});
    }
    return log;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (const char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::vector<std::string> expected_header(std::size_t image_dim) {
    std::vector<std::string> h = {"id", "label", "years_to_onset"};
    for (const auto& spec : field_catalog()) h.push_back(spec.name);
    for (const auto& name : morphometry_names()) h.push_back(name);
    for (std::size_t d = 0; d < image_dim; ++d) h.push_back("img_" + std::to_string(d));
    return h;
}

} // namespace

void save_cohort_csv(const std::vector<Subject>& subjects, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const std::size_t image_dim = subjects.empty() ? 0 : subjects.front().image_proxy.size();
    const std::vector<std::string> header = expected_header(image_dim);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";

    const auto& catalog = field_catalog();
    for (const Subject& s : subjects) {
        if (s.id.find_first_of(",\n\r") != std::string::npos)
            throw SchemaError("subject id contains a CSV delimiter: " + s.id);
        out << s.id << "," << (s.is_case ? "case" : "control") << ",";
        if (s.years_to_onset) out << format_double(*s.years_to_onset);
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            const FieldValue& v = s.profile.values[f];
            out << ",";
            if (v.missing) continue;
            if (catalog[f].kind == FieldKind::numeric)
                out << format_double(v.numeric);
            else
                out << catalog[f].categories[static_cast<std::size_t>(v.category)];
        }
        for (const double m : s.morphometry) out << "," << format_double(m);
        for (const double v : s.image_proxy) out << "," << format_double(v);
        out << "\n";
    }
}

std::vector<Subject> load_cohort_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open cohort file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("cohort file is empty: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    // Image width is whatever contiguous img_* block the header carries.
    std::size_t image_dim = 0;
    for (const std::string& h : header)
        if (h.rfind("img_", 0) == 0) ++image_dim;
    const std::vector<std::string> expected = expected_header(image_dim);

    std::vector<std::string> missing, unknown;
    for (const std::string& e : expected)
        if (std::find(header.begin(), header.end(), e) == header.end()) missing.push_back(e);
    for (const std::string& h : header)
        if (std::find(expected.begin(), expected.end(), h) == expected.end()) unknown.push_back(h);
    if (!missing.empty() || !unknown.empty()) {
        std::string msg = "cohort schema mismatch in " + path + ":";
        if (!missing.empty()) {
            msg += " missing columns:";
            for (const auto& m : missing) msg += " '" + m + "'";
        }
        if (!unknown.empty()) {
            msg += " unknown columns:";
            for (const auto& u : unknown) msg += " '" + u + "'";
        }
        throw SchemaError(msg);
    }

    std::vector<std::size_t> col_of(expected.size());
    for (std::size_t e = 0; e < expected.size(); ++e)
        col_of[e] = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), expected[e]) - header.begin());

    const auto& catalog = field_catalog();
    auto parse_double = [&](const std::string& cell, std::size_t row, const std::string& col) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            throw SchemaError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                              ", column '" + col + "'");
        }
        if (used != cell.size())
            throw SchemaError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                              ", column '" + col + "'");
        return v;
    };

    std::vector<Subject> subjects;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw SchemaError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(header.size()));
        auto cell = [&](std::size_t e) -> const std::string& { return cells[col_of[e]]; };

        Subject s;
        std::size_t e = 0;
        s.id = cell(e++);
        const std::string& label = cell(e++);
        if (label == "case")
            s.is_case = true;
        else if (label == "control")
            s.is_case = false;
        else
            throw SchemaError("row " + std::to_string(row) + ": label must be case/control, got '" +
                              label + "'");
        const std::string& onset = cell(e++);
        if (s.is_case) {
            if (onset.empty())
                throw SchemaError("row " + std::to_string(row) + ": case without years_to_onset");
            s.years_to_onset = parse_double(onset, row, "years_to_onset");
        } else if (!onset.empty()) {
            throw SchemaError("row " + std::to_string(row) + ": control with years_to_onset");
        }

        for (std::size_t f = 0; f < kFieldCount; ++f, ++e) {
            const std::string& c = cell(e);
            FieldValue& v = s.profile.values[f];
            if (c.empty()) {
                v.missing = true;
                continue;
            }
            v.missing = false;
            if (catalog[f].kind == FieldKind::numeric) {
                v.numeric = parse_double(c, row, catalog[f].name);
            } else {
                const auto& cats = catalog[f].categories;
                const auto it = std::find_if(cats.begin(), cats.end(),
                                             [&](const char* cat) { return c == cat; });
                if (it == cats.end())
                    throw SchemaError("row " + std::to_string(row) + ", column '" + catalog[f].name +
                                      "': unknown category '" + c + "'");
                v.category = static_cast<int>(it - cats.begin());
            }
        }
        for (std::size_t k = 0; k < kMorphometryCount; ++k, ++e)
            s.morphometry[k] = parse_double(cell(e), row, morphometry_names()[k]);
        s.image_proxy.resize(image_dim);
        for (std::size_t d = 0; d < image_dim; ++d, ++e)
            s.image_proxy[d] = parse_double(cell(e), row, "img_" + std::to_string(d));
        subjects.push_back(std::move(s));
    }
    return subjects;
}

Matrix morphometry_matrix(const std::vector<Subject>& subjects,
                          const std::vector<std::size_t>& indices) {
    Matrix m(indices.size(), kMorphometryCount);
    for (std::size_t r = 0; r < indices.size(); ++r)
        for (std::size_t k = 0; k < kMorphometryCount; ++k)
            m(r, k) = subjects[indices[r]].morphometry[k];
    return m;
}

Matrix image_proxy_matrix(const std::vector<Subject>& subjects,
                          const std::vector<std::size_t>& indices) {
    if (indices.empty()) return {};
    Matrix m(indices.size(), subjects[indices.front()].image_proxy.size());
    for (std::size_t r = 0; r < indices.size(); ++r)
        for (std::size_t d = 0; d < m.cols; ++d) m(r, d) = subjects[indices[r]].image_proxy[d];
    return m;
}

} // namespace reveal::cohort
