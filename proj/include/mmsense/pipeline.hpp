// SPDX-License-Identifier: Apache-2.0
//
// Dataset generation and the split / standardize / train / evaluate chain
// shared by the CLI, the sweep runner and the RL loop.

#pragma once

#include <cstdint>
#include <vector>

#include "mmsense/beamtraining.hpp"
#include "mmsense/classifier.hpp"
#include "mmsense/features.hpp"

namespace mmsense {

struct GeneratedDataset {
    ScenarioConfig scenario;
    std::vector<AlertArea> areas;
    std::vector<Arrangement> arrangements;  // index == arrangement_id
    SnapshotSet snapshots;
};

/// Samples n_violation + n_compliance arrangements (violations first) and
/// collects trainings_per_arrangement snapshots for each. Arrangement k draws
/// from derive_seed(seed, {arrangement, k}) and its noise from
/// derive_seed(seed, {snapshot, k}); work is spread over `threads` workers
/// (0 = hardware concurrency) and the output order never depends on it.
GeneratedDataset generate_dataset(const ScenarioConfig& scenario, const ProtocolConfig& protocol,
                                  const ChannelParams& channel, std::uint64_t seed, unsigned threads = 0);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Checksum over container header fields, payload and labels.
std::uint64_t dataset_checksum(const SnapshotSet& set);

struct EvaluationConfig {
    int hidden_units = 32;
    TrainConfig train{};
    SplitMode split_mode = SplitMode::grouped;
    std::uint64_t split_seed = 0;
};

struct AreaModel {
    AlertArea area;
    std::vector<std::size_t> columns;
    Standardizer standardizer;
    FFNN model;
    TrainHistory history;
    Metrics validation;
    Metrics test;
};

struct PipelineResult {
    DatasetSplit split;
    std::vector<AreaModel> areas;
    Metrics test;        // pooled over all alert areas
    Metrics validation;  // pooled
};

/// Splits by arrangement (or snapshot), then per alert area fits the
/// standardizer on the training rows, trains one classifier and evaluates it.
PipelineResult train_and_evaluate(const SnapshotSet& set, const std::vector<AlertArea>& areas,
                                  const EvaluationConfig& cfg);

/// Single area covering every pair of an n-device deployment, for data without scene geometry.
AlertArea all_pairs_area(int n_pairs);

}  // namespace mmsense
