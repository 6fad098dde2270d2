#pragma once

#include <json.hpp>

#include "graspeeg/importance.hpp"
#include "graspeeg/models.hpp"
#include "graspeeg/synth.hpp"

namespace graspeeg {

using nlohmann::json;

json hyperparams_to_json(const Hyperparams& hp);
// Missing keys keep `base` values; unknown keys raise ConfigError.
Hyperparams hyperparams_from_json(const json& j, Hyperparams base = {});

json cv_report_to_json(const CvReport& rep);
CvReport cv_report_from_json(const json& j);

json importance_to_json(const ImportanceReport& rep);
ImportanceReport importance_from_json(const json& j);

json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const json& j, SynthConfig base = SynthConfig::default_config());

}  // namespace graspeeg
