// SPDX-License-Identifier: Apache-2.0
//
// Periodic beam-training sweeps between fixed devices and the snapshot
// container that stores their RSS outcome.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "mmsense/propagation.hpp"
#include "mmsense/scene.hpp"

namespace mmsense {

struct ProtocolConfig {
    double beacon_interval = 0.010;  // seconds
    int trainings_per_arrangement = 200;

    void validate() const;
};

/// Ordered pair of indices into ScenarioConfig::devices.
struct DevicePair {
    int tx = 0;
    int rx = 0;
    friend bool operator==(DevicePair, DevicePair) = default;
};

/// All ordered pairs (i, j), i != j, in row-major order: (0,1), (0,2), ..., (1,0), (1,2), ...
std::vector<DevicePair> ordered_pairs(int n_devices);

struct SweepResult {
    int best_tx_beam = 0;
    int best_rx_beam = 0;
};

struct PairSweep {
    std::vector<float> rss;  // [tx_beam * n_rx + rx_beam], dBm
    SweepResult best;
};

struct Snapshot {
    int arrangement_id = 0;
    int time_index = 0;
    std::vector<float> measurements;  // (pair, tx beam, rx beam), row-major
};

/// Argmax over a tx-major RSS table; ties go to the lowest (tx, rx) index.
SweepResult best_beam_pair(const std::vector<float>& rss, int n_tx, int n_rx);

/// One sweep over every (tx beam, rx beam) combination of a device pair.
PairSweep run_training(const SceneView& scene, const Device& tx, const Device& rx, const ChannelParams& params,
                       Rng& rng);

/// Noise-free per-pair power tables for a static arrangement, laid out like Snapshot::measurements.
/// Entries are -inf for blocked pairs (the floor clamp is applied when noise is drawn).
std::vector<double> clean_measurements(const ScenarioConfig& cfg, const std::vector<Person>& people,
                                       const ChannelParams& params);

/// Number of values per snapshot: ordered pairs * n_tx * n_rx. Throws if devices disagree on beam counts.
std::size_t snapshot_dim(const ScenarioConfig& cfg);

/// trainings_per_arrangement snapshots of a static arrangement; noise is redrawn per measurement
/// from a stream seeded by `seed`.
std::vector<Snapshot> collect_snapshots(const ScenarioConfig& cfg, const Arrangement& arrangement, int arrangement_id,
                                        const ProtocolConfig& protocol, const ChannelParams& params,
                                        std::uint64_t seed);

/// Labels stored next to each snapshot.
struct SnapshotLabel {
    Label label = Label::compliance;
    int arrangement_id = 0;
    std::vector<Label> area_labels;  // optional, one per alert area
    friend bool operator==(const SnapshotLabel&, const SnapshotLabel&) = default;
};

/// Dense in-memory form of the snapshot container.
struct SnapshotSet {
    std::uint64_t scenario_hash = 0;
    int n_pairs = 0;
    int n_tx = 0;
    int n_rx = 0;
    std::vector<float> values;  // count * dim()
    std::vector<SnapshotLabel> labels;

    std::size_t dim() const {
        return static_cast<std::size_t>(n_pairs) * static_cast<std::size_t>(n_tx) * static_cast<std::size_t>(n_rx);
    }
    std::size_t count() const { return labels.size(); }
    const float* row(std::size_t i) const { return values.data() + i * dim(); }
    void append(const Snapshot& s, const SnapshotLabel& label);
};

class ContainerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Container layout (all header lines are ASCII, '\n' terminated):
//   MMSENSE-SNAPSHOTS 1
//   scenario_hash <16 hex digits>
//   pairs <P>
//   n_tx <N_tx>
//   n_rx <N_rx>
//   count <C>
//   data
// followed by C*P*N_tx*N_rx little-endian IEEE-754 float32 values in
// (snapshot, pair, tx beam, rx beam) order.
//
// Label sidecar: one line per snapshot,
//   <violation|compliance> <arrangement_id> [<area label> ...]
void write_container(const std::filesystem::path& path, const SnapshotSet& set);
void write_labels(const std::filesystem::path& path, const SnapshotSet& set);

/// Reads the container and its label sidecar. Malformed headers and truncated
/// payloads raise ContainerError naming the byte offset; a label count that
/// differs from the snapshot count is rejected.
SnapshotSet read_snapshot_set(const std::filesystem::path& container, const std::filesystem::path& labels);

}  // namespace mmsense
