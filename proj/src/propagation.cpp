// SPDX-License-Identifier: Apache-2.0

#include "mmsense/propagation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmsense {

void ChannelParams::validate() const {
    if (!(frequency > 0.0)) throw std::invalid_argument("channel: frequency must be positive");
    if (!(rss_noise_sigma_db >= 0.0)) throw std::invalid_argument("channel: rss_noise_sigma_db must be >= 0");
}

double fspl_db(double distance_m, double frequency_hz) {
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

namespace {

bool segment_blocked(const SceneView& scene, Vec2 a, Vec2 b) {
    for (const Person& p : scene.people)
        if (segment_hits_disk(a, b, p.center, p.radius)) return true;
    for (const Rect& o : scene.environment.obstacles)
        if (segment_hits_rect(a, b, o)) return true;
    return false;
}

}  // namespace

std::vector<PathContribution> trace_paths(const SceneView& scene, const Device& tx, const Device& rx,
                                          const ChannelParams& params) {
    if (tx.id == rx.id) throw std::invalid_argument("trace_paths: tx and rx must differ");
    const Vec2 a = tx.position;
    const Vec2 b = rx.position;
    const double furniture = (tx.desk_mounted || rx.desk_mounted) ? params.furniture_loss_db : 0.0;
    std::vector<PathContribution> out;

    if (!segment_blocked(scene, a, b))
        out.push_back({PathKind::los, distance(a, b), bearing(a, b), bearing(b, a), furniture});

    // Mirror the receiver across each boundary wall; the bounce point is where
    // the tx->image segment meets the wall.
    const double w = scene.environment.width;
    const double h = scene.environment.height;
    const Vec2 images[4] = {{b.x, -b.y}, {2.0 * w - b.x, b.y}, {b.x, 2.0 * h - b.y}, {-b.x, b.y}};
    for (int wall = 0; wall < 4; ++wall) {
        const Vec2 img = images[wall];
        double t = 0.0;
        switch (wall) {
            case 0: t = a.y / (a.y - img.y); break;
            case 1: t = (w - a.x) / (img.x - a.x); break;
            case 2: t = (h - a.y) / (img.y - a.y); break;
            default: t = a.x / (a.x - img.x); break;
        }
        if (!(t > 0.0 && t < 1.0)) continue;  // device sits on the wall
        const Vec2 bounce = a + t * (img - a);
        if (segment_blocked(scene, a, bounce) || segment_blocked(scene, bounce, b)) continue;
        out.push_back({PathKind::reflection, distance(a, img), bearing(a, bounce), bearing(b, bounce),
                       params.reflection_loss_db + furniture});
    }
    return out;
}

double path_power_dbm(const std::vector<PathContribution>& paths, const Device& tx, int tx_beam, const Device& rx,
                      int rx_beam, const ChannelParams& params) {
    double total_mw = 0.0;
    for (const PathContribution& p : paths) {
        const double gt = tx.codebook_tx.gain(tx_beam, p.departure_angle - tx.boresight_offset);
        const double gr = rx.codebook_rx.gain(rx_beam, p.arrival_angle - rx.boresight_offset);
        const double dbm = params.tx_power_dbm + 10.0 * std::log10(gt) + 10.0 * std::log10(gr) -
                           fspl_db(p.length, params.frequency) - p.extra_loss_db;
        total_mw += std::pow(10.0, dbm / 10.0);
    }
    return total_mw > 0.0 ? 10.0 * std::log10(total_mw) : -std::numeric_limits<double>::infinity();
}

double measured_rss(double clean_dbm, const ChannelParams& params, Rng& rng) {
    // Always consume one draw so the stream layout does not depend on blockage.
    std::normal_distribution<double> noise(0.0, 1.0);
    const double z = noise(rng);
    return std::max(params.noise_floor_dbm, clean_dbm + params.rss_noise_sigma_db * z);
}

double rss(const SceneView& scene, const Device& tx, int tx_beam, const Device& rx, int rx_beam,
           const ChannelParams& params, Rng& rng) {
    const auto paths = trace_paths(scene, tx, rx, params);
    return measured_rss(path_power_dbm(paths, tx, tx_beam, rx, rx_beam, params), params, rng);
}

}  // namespace mmsense
