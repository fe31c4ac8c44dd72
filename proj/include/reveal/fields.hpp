#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace reveal {

enum class FieldKind { numeric, categorical };

// One risk-factor variable: CSV column id, narrative placeholder text,
// variable group, and either a plausible numeric range or a category list.
struct FieldSpec {
    const char* name;        // canonical id, used as the CSV column header
    const char* placeholder; // placeholder text inside the report template
    const char* group;
    FieldKind kind;
    double lo = 0.0;
    double hi = 0.0;
    int decimals = 0; // rendering precision for numeric fields
    std::span<const char* const> categories{};
};

inline constexpr std::size_t kFieldCount = 48;

// Stable indices into the field catalog.
enum class Rf : std::size_t {
    age, sex, economic_status, ethnic_background, employment_status,
    bmi, hba1c, hdl, systolic_bp, diastolic_bp, numeric_memory,
    fluid_intelligence, tmt_a_duration, tmt_a_errors, tmt_b_duration, tmt_b_errors,
    depression, sleep_deprivation, alcohol_use, smoking_history,
    cannabis_use, cannabis_initiation_age,
    walk_days_per_week, walk_duration, moderate_days_per_week, moderate_duration,
    vigorous_days_per_week, vigorous_duration,
    family_visit_frequency, leisure_activity_count,
    cooked_vegetable_intake, raw_vegetable_intake, fresh_fruit_intake, dried_fruit_intake,
    oily_fish_intake, non_oily_fish_intake, processed_meat_intake, poultry_intake,
    beef_intake, lamb_intake, pork_intake, milk_type, spread_type, bread_intake,
    salt_added_to_food, tea_intake, coffee_intake, water_intake,
};

inline constexpr std::size_t idx(Rf f) { return static_cast<std::size_t>(f); }

const std::array<FieldSpec, kFieldCount>& field_catalog();

// Index of a field by canonical name, or -1 when unknown.
int field_index(std::string_view name);

// A single field value. Exactly one of the payloads is meaningful,
// determined by the field's kind; `missing` overrides both.
struct FieldValue {
    bool missing = true;
    double numeric = 0.0;
    int category = -1;

    // MISSING compares equal regardless of any stale payload.
    bool operator==(const FieldValue& other) const {
        if (missing != other.missing) return false;
        return missing || (numeric == other.numeric && category == other.category);
    }
};

struct RiskFactorProfile {
    std::array<FieldValue, kFieldCount> values{};

    FieldValue& at(Rf f) { return values[idx(f)]; }
    const FieldValue& at(Rf f) const { return values[idx(f)]; }

    bool operator==(const RiskFactorProfile&) const = default;
};

// Renders a field value the way the narrative and CSV layers show it:
// category label, fixed-precision numeral, or the missing fallback.
std::string render_field_value(std::size_t field, const FieldValue& v,
                               std::string_view missing_text = "not reported");

// Throws SchemaError when a value is outside its plausible range or has the
// wrong payload for its kind. MISSING is always valid.
void validate_profile(const RiskFactorProfile& profile);

} // namespace reveal
