#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <set>

#include "reveal/error.hpp"
#include "reveal/fields.hpp"
#include "reveal/narrative.hpp"

using namespace reveal;
using narrative::TextFeaturizerConfig;

namespace {

// A fully populated profile with fixed, readable values.
RiskFactorProfile full_profile() {
    RiskFactorProfile p;
    const auto& catalog = field_catalog();
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        FieldValue& v = p.values[f];
        v.missing = false;
        if (catalog[f].kind == FieldKind::numeric)
            v.numeric = std::round((catalog[f].lo + catalog[f].hi) / 2.0);
        else
            v.category = 0;
    }
    p.at(Rf::age).numeric = 55;
    p.at(Rf::sex).category = 1;              // male
    p.at(Rf::ethnic_background).category = 0; // British
    p.at(Rf::tea_intake).numeric = 2;
    return p;
}

std::vector<std::string> tokens_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch)))
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

TEST_CASE("template covers all 48 fields exactly once") {
    const std::string& tpl = narrative::report_template();
    const auto& catalog = field_catalog();
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        const std::string slot = std::string("<") + catalog[f].placeholder + ">";
        CHECK_MESSAGE(count_occurrences(tpl, slot) == 1, catalog[f].placeholder);
    }
    // Exactly 48 placeholders in total: every '<' opens a known slot.
    CHECK(count_occurrences(tpl, "<") == kFieldCount);
}

TEST_CASE("rendered report has no unfilled placeholder") {
    const auto report = narrative::render_report("S1", full_profile());
    const auto& catalog = field_catalog();
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        const std::string slot = std::string("<") + catalog[f].placeholder + ">";
        CHECK(report.text.find(slot) == std::string::npos);
    }
}

TEST_CASE("demographic opening sentence renders verbatim") {
    const auto report = narrative::render_report("S1", full_profile());
    CHECK(report.text.rfind("The subject is 55 years old British male.", 0) == 0);
}

TEST_CASE("missing cannabis initiation age uses the exact fallback sentence") {
    RiskFactorProfile p = full_profile();
    p.at(Rf::cannabis_initiation_age).missing = true;
    const auto report = narrative::render_report("S1", p);
    CHECK(report.text.find("No cannabis use was reported at that age") != std::string::npos);
    CHECK(report.text.find("had his first cannabis at age No cannabis use was reported at that age") !=
          std::string::npos);
}

TEST_CASE("other missing fields render as 'not reported'") {
    RiskFactorProfile p = full_profile();
    p.at(Rf::hdl).missing = true;
    const auto report = narrative::render_report("S1", p);
    CHECK(report.text.find("not reported HDL") != std::string::npos);
}

TEST_CASE("rendering is deterministic and local to the changed field") {
    RiskFactorProfile a = full_profile();
    RiskFactorProfile b = full_profile();
    CHECK(narrative::render_report("x", a).text == narrative::render_report("y", b).text);

    b.at(Rf::tea_intake).numeric = 5;
    const std::string ta = narrative::render_report("x", a).text;
    const std::string tb = narrative::render_report("x", b).text;
    const auto tok_a = tokens_of(ta), tok_b = tokens_of(tb);
    REQUIRE(tok_a.size() == tok_b.size());
    std::size_t differing = 0;
    for (std::size_t i = 0; i < tok_a.size(); ++i) {
        if (tok_a[i] != tok_b[i]) {
            ++differing;
            CHECK(tok_a[i] == "2");
            CHECK(tok_b[i] == "5");
        }
    }
    CHECK(differing == 1);

    // The change is a single contiguous splice around the numeral.
    std::size_t prefix = 0;
    while (prefix < ta.size() && prefix < tb.size() && ta[prefix] == tb[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < ta.size() - prefix && suffix < tb.size() - prefix &&
           ta[ta.size() - 1 - suffix] == tb[tb.size() - 1 - suffix])
        ++suffix;
    CHECK(ta.substr(prefix, ta.size() - prefix - suffix) == "2");
    CHECK(tb.substr(prefix, tb.size() - prefix - suffix) == "5");
}

TEST_CASE("embed_text: unit norm and determinism") {
    const TextFeaturizerConfig cfg{256, 42};
    const auto report = narrative::render_report("S1", full_profile());
    const std::vector<double> v1 = narrative::embed_text(report.text, cfg);
    const std::vector<double> v2 = narrative::embed_text(report.text, cfg);
    REQUIRE(v1.size() == 256);
    double norm = 0.0, cos = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        norm += v1[i] * v1[i];
        cos += v1[i] * v2[i];
    }
    CHECK(std::fabs(std::sqrt(norm) - 1.0) < 1e-9);
    CHECK(cos == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed_text: rejects empty text and tiny dimensions") {
    CHECK_THROWS_AS(narrative::embed_text("", {256, 0}), NumericError);
    CHECK_THROWS_AS(narrative::embed_text("...---...", {256, 0}), NumericError);
    CHECK_THROWS_AS(narrative::embed_text("hello", {8, 0}), ConfigError);
}

TEST_CASE("embed_text: disjoint token sets stay nearly orthogonal over hash seeds") {
    const std::string a = "alpha bravo charlie delta echo foxtrot golf hotel "
                          "alpha charlie echo golf bravo delta foxtrot hotel";
    const std::string b = "india juliet kilo lima mike november oscar papa "
                          "india kilo mike oscar juliet lima november papa";
    std::size_t ok = 0;
    const std::size_t trials = 1000;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        const TextFeaturizerConfig cfg{256, seed};
        const auto va = narrative::embed_text(a, cfg);
        const auto vb = narrative::embed_text(b, cfg);
        double cos = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) cos += va[i] * vb[i];
        if (std::fabs(cos) < 0.25) ++ok;
    }
    CHECK(double(ok) / double(trials) >= 0.95);
}

TEST_CASE("embed_batch: per-row purity and unit diagonal") {
    std::vector<narrative::ClinicalReport> reports;
    RiskFactorProfile p = full_profile();
    for (int i = 0; i < 4; ++i) {
        p.at(Rf::age).numeric = 50 + i;
        reports.push_back(narrative::render_report("S" + std::to_string(i), p));
    }
    const TextFeaturizerConfig cfg{128, 7};
    const Matrix t = narrative::embed_batch(reports, cfg);
    REQUIRE(t.rows == 4);
    REQUIRE(t.cols == 128);

    // Gram diagonal is all ones.
    const Matrix gram = matmul_bt(t, t);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(gram(i, i) - 1.0) < 1e-9);

    // Permuting the reports permutes rows identically.
    std::vector<narrative::ClinicalReport> reversed(reports.rbegin(), reports.rend());
    const Matrix tr = narrative::embed_batch(reversed, cfg);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) CHECK(t(i, j) == tr(3 - i, j));

    // Single report: one unit row.
    const Matrix one = narrative::embed_batch({reports[0]}, cfg);
    CHECK(one.rows == 1);
    double n = 0.0;
    for (std::size_t j = 0; j < one.cols; ++j) n += one(0, j) * one(0, j);
    CHECK(std::fabs(std::sqrt(n) - 1.0) < 1e-9);
}
