#pragma once

#include <json.hpp>

#include "reveal/align.hpp"
#include "reveal/cohort.hpp"
#include "reveal/experiments.hpp"

namespace reveal::align {
nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);
} // namespace reveal::align

namespace reveal::cohort {
nlohmann::json cohort_config_to_json(const CohortConfig& c);
CohortConfig cohort_config_from_json(const nlohmann::json& j);
nlohmann::json split_config_to_json(const SplitConfig& c);
SplitConfig split_config_from_json(const nlohmann::json& j);
} // namespace reveal::cohort

namespace reveal::experiments {
nlohmann::json pipeline_config_to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
} // namespace reveal::experiments
