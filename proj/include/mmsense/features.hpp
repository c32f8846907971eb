// SPDX-License-Identifier: Apache-2.0
//
// Alert areas, feature extraction, standardization and dataset splitting.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mmsense/beamtraining.hpp"
#include "mmsense/scene.hpp"

namespace mmsense {

struct AlertArea {
    int id = 0;
    std::vector<Vec2> region;         // polygon vertices, counter-clockwise
    std::vector<int> member_pairs;    // indices into ordered_pairs(n_devices)

    /// Point-in-polygon (boundary counts as inside).
    bool contains(Vec2 p) const;
};

/// One area per walkable region, holding every ordered pair whose two devices
/// both lie in (or on the border of) that region. Throws std::invalid_argument
/// when an area would end up without pairs.
std::vector<AlertArea> define_alert_areas(const ScenarioConfig& cfg);

/// Label restricted to the people standing inside the area.
Label area_label(const AlertArea& area, const std::vector<Person>& people, double safe_distance);

/// Snapshot columns feeding an area: for each member pair (in order), all
/// (tx beam, rx beam) entries in row-major order.
std::vector<std::size_t> feature_columns(const AlertArea& area, int n_tx, int n_rx);

/// Row-major feature matrix with integer class labels (1 = violation) and arrangement groups.
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> x;
    std::vector<int> y;
    std::vector<int> groups;

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * dim, dim}; }
    std::span<double> row(std::size_t i) { return {x.data() + i * dim, dim}; }
};

/// Extracts one area's features. area_index < 0 (or a set without area labels)
/// uses the scene-level label.
Dataset area_dataset(const SnapshotSet& set, const std::vector<std::size_t>& columns, int area_index = -1);

/// Every snapshot value as a feature, scene-level labels.
Dataset full_dataset(const SnapshotSet& set);

Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices);

/// Per-feature z-score with population standard deviation; zero-variance features map to 0.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> stddev);

    static Standardizer fit(const Dataset& train);

    void apply(std::span<double> x) const;
    /// Standardizes every row in place.
    void transform(Dataset& d) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }
    std::size_t dim() const { return mean_.size(); }

    /// Text format: one "<mean> <std>" line per feature (%.17g).
    void save(const std::filesystem::path& path) const;
    static Standardizer load(const std::filesystem::path& path);

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

enum class SplitMode {
    grouped,   // whole arrangements go to one subset
    snapshot,  // individual snapshots are shuffled
};

/// Shuffled train/validation/test split. Units (arrangements or snapshots) are
/// interleaved by class before cutting so each subset keeps the class mix;
/// unit counts are round(r0*n), round(r1*n) and the remainder. Indices within
/// each subset are ascending. Throws with fewer than 3 units.
DatasetSplit split_dataset(const std::vector<int>& groups, const std::vector<int>& labels, std::uint64_t seed,
                           SplitMode mode = SplitMode::grouped, std::array<double, 3> ratios = {0.6, 0.2, 0.2});

}  // namespace mmsense
