#include "reveal/narrative.hpp"

#include <cctype>
#include <cmath>

#include "reveal/error.hpp"

namespace reveal::narrative {
namespace {

const char* kTemplate =
    "The subject is <age> years old <ethnic background> <sex>. "
    "The average total household of this subject is in between <economic status>. "
    "The subject has <HbA1C> HbA1C, <HDL> HDL, <BMI> BMI, "
    "<systolic blood pressure> systolic blood pressure, "
    "<diastolic blood pressure> diastolic blood pressure. "
    "For lifestyle, the subject is in <employment status>. "
    "The subject is <smoking history>, has <depression>, "
    "has sleep deprivation <sleep deprivation>, and drinks alcohol <alcohol use>. "
    "The subject had his first cannabis at age <age of cannabis initiation> "
    "and used cannabis <cannabis use> times. "
    "The subject visits family <frequency of family visit>, and <number of leisure activity>. "
    "For physical activity, the subject walks <duration of walked 10+ minutes> minutes "
    "<number of days/week of walked 10+ minutes> days per week, "
    "exercises moderately <duration of moderate activity> minutes for "
    "<number of days/week of moderate activity> days a week, "
    "and exercises vigorously <duration of vigorous exercise> minutes for "
    "<number of days/week of vigorous activity> days a week. "
    "For diet, the subject has <cooked vegetable intake> tablespoons of cooked vegetables, "
    "<raw vegetable intake> tablespoons of raw vegetables, "
    "<fresh fruit intake> tablespoons of fresh fruit, and <dried fruit intake> dried fruit. "
    "In addition, the subject has oily fish <oily fish intake>, "
    "non-oily fish <non oily fish intake>, processed meat <processed meat intake>, "
    "poultry <poultry intake>, beef <beef intake>, lamb <lamb intake>, and pork <pork intake>. "
    "The subject has <bread intake> slices of bread per week, with <spread type>. "
    "The subject drinks <milk type>, <tea intake> cups of tea, <coffee intake> cups of coffee, "
    "<water intake> cups of water per day. "
    "The subject puts <salt added to food> in his diet. "
    "For cognitive function, the subject remembered <numeric memory> digits in the numeric "
    "memory test, scored <fluid intelligence> in a fluid intelligence test, "
    "completed trail #1 in <trail-making test A duration> deciseconds with "
    "<trail-making test A error counts> errors, and completed trail #2 in "
    "<trail-making test B duration> deciseconds with <trail-making test B error counts> errors.";

int placeholder_field(std::string_view ph) {
    const auto& catalog = field_catalog();
    for (std::size_t i = 0; i < kFieldCount; ++i)
        if (ph == catalog[i].placeholder) return static_cast<int>(i);
    return -1;
}

std::uint64_t hash_token(std::string_view token, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    for (const char c : token) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (const char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

} // namespace

const std::string& report_template() {
    static const std::string tpl = kTemplate;
    return tpl;
}

ClinicalReport render_report(const std::string& subject_id, const RiskFactorProfile& profile) {
    const std::string& tpl = report_template();
    std::string out;
    out.reserve(tpl.size() + 128);
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const std::size_t open = tpl.find('<', pos);
        if (open == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            break;
        }
        out.append(tpl, pos, open - pos);
        const std::size_t close = tpl.find('>', open);
        const std::string_view ph(tpl.data() + open + 1, close - open - 1);
        const int field = placeholder_field(ph);
        if (field < 0) throw NumericError("report template has unknown placeholder: " + std::string(ph));
        const FieldValue& v = profile.values[static_cast<std::size_t>(field)];
        if (static_cast<std::size_t>(field) == idx(Rf::cannabis_initiation_age) && v.missing) {
            out.append(kCannabisFallback);
        } else {
            out.append(render_field_value(static_cast<std::size_t>(field), v));
        }
        pos = close + 1;
    }
    return {subject_id, std::move(out)};
}

std::vector<double> embed_text(const std::string& text, const TextFeaturizerConfig& cfg) {
    if (cfg.dim < 16) throw ConfigError("text featurizer dimension must be >= 16");
    const std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) throw NumericError("embed_text: no tokens, zero vector is not normalizable");

    std::vector<double> v(cfg.dim, 0.0);
    auto add = [&](std::string_view tok) {
        const std::uint64_t h = hash_token(tok, cfg.hash_seed);
        const std::size_t bucket = static_cast<std::size_t>(h % cfg.dim);
        // An independent bit of the same hash picks the sign.
        const double sign = ((h >> 61) & 1ULL) ? 1.0 : -1.0;
        v[bucket] += sign;
    };
    for (const auto& t : tokens) add(t);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) add(tokens[i] + "_" + tokens[i + 1]);

    double norm = 0.0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericError("embed_text: hashed counts cancelled to a zero vector");
    for (double& x : v) x /= norm;
    return v;
}

Matrix embed_batch(const std::vector<ClinicalReport>& reports, const TextFeaturizerConfig& cfg) {
    Matrix t(reports.size(), cfg.dim);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::vector<double> row = embed_text(reports[i].text, cfg);
        std::copy(row.begin(), row.end(), t.row(i));
    }
    return t;
}

} // namespace reveal::narrative
