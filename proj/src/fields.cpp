#include "reveal/fields.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "reveal/error.hpp"

namespace reveal {
namespace {

constexpr const char* kSexCats[] = {"female", "male"};
constexpr const char* kEconomicCats[] = {
    "less than 18000", "18000 and 30999", "31000 and 51999",
    "52000 and 100000", "greater than 100000"};
constexpr const char* kEthnicCats[] = {"British", "Irish", "Indian",
                                       "Caribbean", "African", "Chinese", "any other"};
constexpr const char* kEmploymentCats[] = {
    "paid employment", "retirement", "unemployment", "voluntary work",
    "full-time education"};
constexpr const char* kDepressionCats[] = {"no depression", "mild depression",
                                           "moderate depression", "severe depression"};
constexpr const char* kSleepCats[] = {"rarely", "sometimes", "often"};
constexpr const char* kAlcoholCats[] = {
    "never", "on special occasions only", "one to three times a month",
    "once or twice a week", "three or four times a week", "daily or almost daily"};
constexpr const char* kSmokingCats[] = {"a never smoker", "a previous smoker",
                                        "a current smoker"};
constexpr const char* kVisitCats[] = {
    "almost daily", "two to four times a week", "about once a week",
    "about once a month", "never or almost never"};
constexpr const char* kFoodFreqCats[] = {
    "never", "less than once a week", "once a week", "two to four times a week",
    "five or six times a week", "once or more daily"};
constexpr const char* kMilkCats[] = {"full cream milk", "semi-skimmed milk",
                                     "skimmed milk", "soya milk", "no milk"};
constexpr const char* kSpreadCats[] = {"butter spread", "margarine spread",
                                       "olive oil based spread", "no spread"};
constexpr const char* kSaltCats[] = {"no salt", "a little salt", "some salt",
                                     "a lot of salt"};

template <std::size_t N>
constexpr std::span<const char* const> cats(const char* const (&arr)[N]) {
    return {arr, N};
}

const std::array<FieldSpec, kFieldCount> kCatalog = {{
    // Demographic (5)
    {"age", "age", "demographic", FieldKind::numeric, 40, 75, 0},
    {"sex", "sex", "demographic", FieldKind::categorical, 0, 0, 0, cats(kSexCats)},
    {"economic_status", "economic status", "demographic", FieldKind::categorical, 0, 0, 0, cats(kEconomicCats)},
    {"ethnic_background", "ethnic background", "demographic", FieldKind::categorical, 0, 0, 0, cats(kEthnicCats)},
    {"employment_status", "employment status", "demographic", FieldKind::categorical, 0, 0, 0, cats(kEmploymentCats)},
    // General health (11)
    {"BMI", "BMI", "general_health", FieldKind::numeric, 14, 60, 1},
    {"HbA1C", "HbA1C", "general_health", FieldKind::numeric, 15, 120, 1},
    {"HDL", "HDL", "general_health", FieldKind::numeric, 0.3, 4.5, 2},
    {"systolic_bp", "systolic blood pressure", "general_health", FieldKind::numeric, 80, 220, 0},
    {"diastolic_bp", "diastolic blood pressure", "general_health", FieldKind::numeric, 40, 130, 0},
    {"numeric_memory", "numeric memory", "general_health", FieldKind::numeric, 2, 12, 0},
    {"fluid_intelligence", "fluid intelligence", "general_health", FieldKind::numeric, 0, 13, 0},
    {"tmt_a_duration", "trail-making test A duration", "general_health", FieldKind::numeric, 50, 2500, 0},
    {"tmt_a_errors", "trail-making test A error counts", "general_health", FieldKind::numeric, 0, 30, 0},
    {"tmt_b_duration", "trail-making test B duration", "general_health", FieldKind::numeric, 80, 4000, 0},
    {"tmt_b_errors", "trail-making test B error counts", "general_health", FieldKind::numeric, 0, 40, 0},
    // Risk factors (6)
    {"depression", "depression", "risk_factor", FieldKind::categorical, 0, 0, 0, cats(kDepressionCats)},
    {"sleep_deprivation", "sleep deprivation", "risk_factor", FieldKind::categorical, 0, 0, 0, cats(kSleepCats)},
    {"alcohol_use", "alcohol use", "risk_factor", FieldKind::categorical, 0, 0, 0, cats(kAlcoholCats)},
    {"smoking_history", "smoking history", "risk_factor", FieldKind::categorical, 0, 0, 0, cats(kSmokingCats)},
    {"cannabis_use", "cannabis use", "risk_factor", FieldKind::numeric, 0, 200, 0},
    {"cannabis_initiation_age", "age of cannabis initiation", "risk_factor", FieldKind::numeric, 10, 70, 0},
    // Physical activity (6)
    {"walk_days_per_week", "number of days/week of walked 10+ minutes", "physical_activity", FieldKind::numeric, 0, 7, 0},
    {"walk_duration", "duration of walked 10+ minutes", "physical_activity", FieldKind::numeric, 0, 360, 0},
    {"moderate_days_per_week", "number of days/week of moderate activity", "physical_activity", FieldKind::numeric, 0, 7, 0},
    {"moderate_duration", "duration of moderate activity", "physical_activity", FieldKind::numeric, 0, 360, 0},
    {"vigorous_days_per_week", "number of days/week of vigorous activity", "physical_activity", FieldKind::numeric, 0, 7, 0},
    {"vigorous_duration", "duration of vigorous exercise", "physical_activity", FieldKind::numeric, 0, 300, 0},
    // Social and leisure (2)
    {"family_visit_frequency", "frequency of family visit", "social_leisure", FieldKind::categorical, 0, 0, 0, cats(kVisitCats)},
    {"leisure_activity_count", "number of leisure activity", "social_leisure", FieldKind::numeric, 0, 5, 0},
    // Dietary (18)
    {"cooked_vegetable_intake", "cooked vegetable intake", "dietary", FieldKind::numeric, 0, 12, 0},
    {"raw_vegetable_intake", "raw vegetable intake", "dietary", FieldKind::numeric, 0, 12, 0},
    {"fresh_fruit_intake", "fresh fruit intake", "dietary", FieldKind::numeric, 0, 12, 0},
    {"dried_fruit_intake", "dried fruit intake", "dietary", FieldKind::numeric, 0, 12, 0},
    {"oily_fish_intake", "oily fish intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"non_oily_fish_intake", "non oily fish intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"processed_meat_intake", "processed meat intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"poultry_intake", "poultry intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"beef_intake", "beef intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"lamb_intake", "lamb intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"pork_intake", "pork intake", "dietary", FieldKind::categorical, 0, 0, 0, cats(kFoodFreqCats)},
    {"milk_type", "milk type", "dietary", FieldKind::categorical, 0, 0, 0, cats(kMilkCats)},
    {"spread_type", "spread type", "dietary", FieldKind::categorical, 0, 0, 0, cats(kSpreadCats)},
    {"bread_intake", "bread intake", "dietary", FieldKind::numeric, 0, 40, 0},
    {"salt_added_to_food", "salt added to food", "dietary", FieldKind::categorical, 0, 0, 0, cats(kSaltCats)},
    {"tea_intake", "tea intake", "dietary", FieldKind::numeric, 0, 20, 0},
    {"coffee_intake", "coffee intake", "dietary", FieldKind::numeric, 0, 20, 0},
    {"water_intake", "water intake", "dietary", FieldKind::numeric, 0, 20, 0},
}};

} // namespace

const std::array<FieldSpec, kFieldCount>& field_catalog() { return kCatalog; }

int field_index(std::string_view name) {
    static const std::unordered_map<std::string_view, int> lookup = [] {
        std::unordered_map<std::string_view, int> m;
        for (std::size_t i = 0; i < kFieldCount; ++i) m.emplace(kCatalog[i].name, static_cast<int>(i));
        return m;
    }();
    const auto it = lookup.find(name);
    return it == lookup.end() ? -1 : it->second;
}

std::string render_field_value(std::size_t field, const FieldValue& v,
                               std::string_view missing_text) {
    const FieldSpec& spec = kCatalog[field];
    if (v.missing) return std::string(missing_text);
    if (spec.kind == FieldKind::categorical) return spec.categories[static_cast<std::size_t>(v.category)];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", spec.decimals, v.numeric);
    return buf;
}

void validate_profile(const RiskFactorProfile& profile) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        const FieldSpec& spec = kCatalog[i];
        const FieldValue& v = profile.values[i];
        if (v.missing) continue;
        if (spec.kind == FieldKind::numeric) {
            if (!std::isfinite(v.numeric) || v.numeric < spec.lo || v.numeric > spec.hi)
                throw SchemaError(std::string("field '") + spec.name + "' out of range [" +
                                  std::to_string(spec.lo) + ", " + std::to_string(spec.hi) + "]");
        } else {
            if (v.category < 0 || static_cast<std::size_t>(v.category) >= spec.categories.size())
                throw SchemaError(std::string("field '") + spec.name + "' has invalid category index");
        }
    }
}

} // namespace reveal
