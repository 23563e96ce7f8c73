#pragma once

#include "json.hpp"
#include "veritab/model.hpp"
#include "veritab/synth.hpp"
#include "veritab/train.hpp"

namespace veritab {

// JSON <-> config structs with full-key validation: any unknown key raises
// ConfigError naming the offender. Missing keys keep their defaults.
nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json synth_config_to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const nlohmann::json& j);

nlohmann::json eval_report_to_json(const EvalReport& r);
nlohmann::json epoch_stats_to_json(const EpochStats& s);

}  // namespace veritab
