#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reveal/fields.hpp"
#include "reveal/matrix.hpp"

namespace reveal::narrative {

struct ClinicalReport {
    std::string subject_id;
    std::string text;
};

// The report template with <placeholder> slots, one per risk-factor field.
const std::string& report_template();

// Fallback inserted in the cannabis-initiation-age slot when that field is
// MISSING. Other MISSING fields render as "not reported".
inline constexpr const char* kCannabisFallback = "No cannabis use was reported at that age";

// Fills every placeholder from the profile. Deterministic; never fails on
// MISSING values.
ClinicalReport render_report(const std::string& subject_id, const RiskFactorProfile& profile);

struct TextFeaturizerConfig {
    std::size_t dim = 256;
    std::uint64_t hash_seed = 0;
};

// Signed feature hashing of word unigrams and bigrams, Euclidean-normalized.
// Tokens are lowercased runs of alphanumerics. Throws NumericError when the
// text produces no tokens (a zero vector cannot be normalized).
std::vector<double> embed_text(const std::string& text, const TextFeaturizerConfig& cfg);

// Row i is embed_text(reports[i].text). Rows are unit-norm.
Matrix embed_batch(const std::vector<ClinicalReport>& reports, const TextFeaturizerConfig& cfg);

} // namespace reveal::narrative
