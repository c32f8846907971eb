// SPDX-License-Identifier: Apache-2.0
//
// JSON configuration files. A config has optional top-level sections:
//
//   {
//     "seed": 1,
//     "scenario": {
//       "name": "office",
//       "safe_distance": 1.5, "max_people": 6, "person_radius": 0.25,
//       "n_violation_arrangements": 40, "n_compliance_arrangements": 40,
//       "codebook": {"n_tx": 32, "n_rx": 1, "alpha": 1.0, "sidelobe_ratio": 0.01},
//       "environment": {"width": 5, "height": 5,
//                       "obstacles": [[x0, y0, x1, y1]], "walkable": [[x0, y0, x1, y1]]},
//       "devices": [{"id": 0, "position": [0.5, 0.5], "boresight_offset": 0.0,
//                    "desk_mounted": false,
//                    "codebook_tx": {"n_beams": 32, "alpha": 1.0, "sidelobe_ratio": 0.01},
//                    "codebook_rx": {"n_beams": 1, "alpha": 1.0, "sidelobe_ratio": 0.01}}]
//     },
//     "channel":  {"frequency": 6e10, "tx_power_dbm": 10, "noise_floor_dbm": -90,
//                  "reflection_loss_db": 10, "rss_noise_sigma_db": 1, "furniture_loss_db": 0},
//     "protocol": {"beacon_interval": 0.01, "trainings_per_arrangement": 50},
//     "train":    {"batch_size": 1000, "epochs": 30, "learning_rate": 0.001, "beta1": 0.9,
//                  "beta2": 0.999, "epsilon": 1e-8, "hidden_units": 32, "split_mode": "grouped"},
//     "behavior": {"p_react": 0.8, "react_delay": 5, "react_duration": 20, "jitter_sigma": 0.03}
//   }
//
// With "name" set, the named scenario is built first and the other keys
// override it; "environment" and "devices" replace the defaults wholesale.

#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "mmsense/beamtraining.hpp"
#include "mmsense/pipeline.hpp"
#include "mmsense/rl.hpp"

namespace mmsense {

using Json = nlohmann::json;

Json to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const Json& j);

Json to_json(const ChannelParams& p);
void update_from_json(ChannelParams& p, const Json& j);

Json to_json(const ProtocolConfig& p);
void update_from_json(ProtocolConfig& p, const Json& j);

Json to_json(const EvaluationConfig& e);
void update_from_json(EvaluationConfig& e, const Json& j);

Json to_json(const BehaviorModel& b);
void update_from_json(BehaviorModel& b, const Json& j);

/// Stable 64-bit FNV-1a hash of the canonical JSON form of the config.
std::uint64_t scenario_hash(const ScenarioConfig& cfg);

struct ExperimentConfig {
    ScenarioConfig scenario;
    ChannelParams channel;
    ProtocolConfig protocol;
    EvaluationConfig evaluation;
    BehaviorModel behavior;
    std::uint64_t seed = 1;
};

/// Applies every section present in `j` on top of `base`.
ExperimentConfig apply_config(ExperimentConfig base, const Json& j);
Json to_json(const ExperimentConfig& cfg);

Json load_json(const std::filesystem::path& path);

}  // namespace mmsense
