// SPDX-License-Identifier: Apache-2.0
//
// Received power between two fixed devices: line of sight plus one specular
// bounce off each boundary wall (image sources), sector antenna gains and
// free-space path loss. Any path crossing a person disk or an obstacle is
// absorbed completely.

#pragma once

#include <vector>

#include "mmsense/random.hpp"
#include "mmsense/scene.hpp"

namespace mmsense {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class PathKind { los, reflection };

struct PathContribution {
    PathKind kind = PathKind::los;
    double length = 0.0;
    double departure_angle = 0.0;  // world frame, at the transmitter
    double arrival_angle = 0.0;    // world frame, at the receiver, pointing back along the path
    double extra_loss_db = 0.0;
};

struct ChannelParams {
    double frequency = 60e9;
    double tx_power_dbm = 10.0;
    double noise_floor_dbm = -90.0;
    double reflection_loss_db = 10.0;
    double rss_noise_sigma_db = 1.0;
    double furniture_loss_db = 0.0;

    void validate() const;
};

/// Free-space path loss 20*log10(4*pi*d*f/c) in dB.
double fspl_db(double distance_m, double frequency_hz);

/// Geometric view of a scene: environment, deployment and the people present.
struct SceneView {
    const Environment& environment;
    const std::vector<Person>& people;
};

/// All unblocked paths from tx to rx. Reflections carry reflection_loss_db and
/// every path between a desk-mounted device and any peer also carries
/// furniture_loss_db.
std::vector<PathContribution> trace_paths(const SceneView& scene, const Device& tx, const Device& rx,
                                          const ChannelParams& params);

/// Noise-free received power (dBm) over a precomputed path set, before the floor clamp.
/// Returns -inf when the path list is empty.
double path_power_dbm(const std::vector<PathContribution>& paths, const Device& tx, int tx_beam, const Device& rx,
                      int rx_beam, const ChannelParams& params);

/// Applies dB-domain Gaussian noise and the noise-floor clamp to a noise-free power.
double measured_rss(double clean_dbm, const ChannelParams& params, Rng& rng);

/// One RSS measurement in dBm for a beam pair.
double rss(const SceneView& scene, const Device& tx, int tx_beam, const Device& rx, int rx_beam,
           const ChannelParams& params, Rng& rng);

}  // namespace mmsense
