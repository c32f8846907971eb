// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration behind the command-line tool: dataset scale
// presets, the accuracy sweep over (scenario, rx beams, alpha, hidden units,
// repetition), run manifests, external trace ingestion and report tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmsense/config.hpp"

namespace mmsense {

inline constexpr int kDeskArrangementsPerClass = 40;
inline constexpr int kDeskTrainings = 50;
inline constexpr int kPaperArrangementsPerClass = 200;
inline constexpr int kPaperTrainings = 200;

/// Desk scale: 40+40 arrangements x 50 trainings. Paper scale: 200+200 x 200.
void apply_scale(ScenarioConfig& scenario, ProtocolConfig& protocol, bool paper_scale);

/// Repetition r of a run with master seed m uses derive_seed(m, {repetition, r}).
std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition);

/// Split seed derive_seed(seed, {split}); training (init and shuffle) seed `seed`.
EvaluationConfig seeded_evaluation(EvaluationConfig base, std::uint64_t seed, int hidden_units);

struct SweepGrid {
    std::vector<std::string> scenarios{"office", "hall", "underground", "station"};
    std::vector<int> n_rx{1, 3, 6};
    int n_tx = 32;
    std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<int> hidden_units{8, 16, 32, 64};
    int repetitions = 3;

    /// Throws std::invalid_argument on empty lists or out-of-range values.
    void validate() const;
};

struct SweepCell {
    std::string scenario;
    int n_rx = 1;
    double alpha = 1.0;
    int hidden_units = 32;
    int repetition = 0;
    std::uint64_t seed = 0;
};

/// Cells in grid order: scenario, n_rx, alpha, hidden_units, repetition (last varies fastest).
std::vector<SweepCell> expand_grid(const SweepGrid& grid, std::uint64_t master_seed);

struct SweepOptions {
    ExperimentConfig base;      // scenario counts, channel, protocol, training; the scenario name is replaced per cell
    bool paper_scale = false;
    bool keep_base_counts = false;  // use the base arrangement counts and trainings instead of a scale preset
    unsigned threads = 0;       // 0 = hardware concurrency
    std::filesystem::path cache_dir;  // empty = no on-disk dataset cache
};

struct CellResult {
    SweepCell cell;
    std::size_t snapshots = 0;
    std::uint64_t dataset_checksum = 0;
    Metrics test;
    Metrics validation;
    double wall_seconds = 0.0;
    std::string dataset_path;   // cache container, when used
    std::string error;          // non-empty when the cell failed
};

/// The dataset for one (scenario, n_rx, alpha, repetition) cell, read from the
/// cache when present and written to it otherwise. Cache files are keyed by a
/// hash of the scenario, protocol, channel and seed.
GeneratedDataset cell_dataset(const SweepCell& cell, const SweepOptions& opt, std::string* cache_path = nullptr);

/// Runs every cell. Cells sharing a dataset (differing only in hidden units)
/// generate it once; datasets are processed by a worker pool and results come
/// back in grid order. A failing cell is recorded and the sweep continues.
std::vector<CellResult> run_sweep(const SweepGrid& grid, const SweepOptions& opt);

// Sweep CSV, one row per cell in grid order:
//   scenario,n_tx,n_rx,alpha,hidden_units,repetition,seed,snapshots,accuracy,
//   val_accuracy,precision_violation,recall_violation,precision_compliance,
//   recall_compliance,cc,cv,vc,vv,status
// cc..vv are confusion counts (true class first, c = compliance, v = violation).
// status is "ok" or the quoted error message. No timing columns, so equal runs give equal bytes.
void write_sweep_csv(std::ostream& os, int n_tx, const std::vector<CellResult>& rows);

struct SweepRow {
    std::string scenario;
    int n_tx = 0;
    int n_rx = 0;
    double alpha = 0.0;
    int hidden_units = 0;
    int repetition = 0;
    double accuracy = 0.0;
    bool ok = true;
};
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Long-format table for plotting:
///   scenario,n_tx,n_rx,alpha,hidden_units,statistic,value
/// with statistic in {mean, std, min, max, n} over the successful repetitions.
void write_report(std::ostream& os, const std::vector<SweepRow>& rows);

/// JSON manifest: experiment config, its hash, the grid, master seed and per-cell records.
Json run_manifest(const SweepGrid& grid, const SweepOptions& opt, std::uint64_t master_seed,
                  const std::vector<CellResult>& rows, const std::filesystem::path& csv_path);

/// Reads an external container + label file. When expected dimensions are
/// given they must match the header. Throws ContainerError on malformed input.
struct IngestedDataset {
    SnapshotSet snapshots;
    std::vector<AlertArea> areas;  // a single all-pairs area
};
IngestedDataset ingest_external(const std::filesystem::path& container, const std::filesystem::path& labels,
                                std::optional<int> expected_n_tx = std::nullopt,
                                std::optional<int> expected_n_rx = std::nullopt,
                                std::optional<int> expected_pairs = std::nullopt);

struct RlExperimentOptions {
    ExperimentConfig base;        // scenario (counts replaced by the scale preset), channel, training, behavior
    bool paper_scale = false;
    RlConfig rl{};                // seed is overwritten from base.seed
    CriticTrainConfig critic{};      // seed is overwritten from base.seed
    int critic_arrangements = 4000;  // fresh simulator arrangements (half violations) for critic pre-training
    int critic_holdout = 400;        // further fresh arrangements scoring the critic
    std::optional<CriticCNN> pretrained_critic;  // used as-is instead of pre-training (cnn mode)
};

struct RlExperimentResult {
    GeneratedDataset data;
    PipelineResult baseline;      // supervised classifier on the same dataset
    double critic_train_accuracy = 0.0;
    double critic_holdout_accuracy = 0.0;
    std::vector<double> critic_loss;
    CriticCNN critic;
    RlResult rl;
};

/// Generates the dataset, trains the supervised baseline (whose first alert
/// area and standardizer the actor shares), pre-trains the critic on
/// simulator-labeled reactions of freshly sampled arrangements unless the
/// oracle critic is selected, and runs the alert episodes from a freshly
/// initialized actor over the dataset's arrangements.
RlExperimentResult run_rl_experiment(const RlExperimentOptions& opt);

}  // namespace mmsense
