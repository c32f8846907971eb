// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "mmsense/beamtraining.hpp"
#include "mmsense/harness.hpp"
#include "mmsense/pipeline.hpp"
#include "property_checks.hpp"

using namespace mmsense;

namespace {

SnapshotSet synthetic_set(int n_pairs, int n_tx, int n_rx, int count) {
    SnapshotSet set;
    set.scenario_hash = 0x1234abcdULL;
    set.n_pairs = n_pairs;
    set.n_tx = n_tx;
    set.n_rx = n_rx;
    for (int i = 0; i < count; ++i) {
        Snapshot s{i / 2, i % 2, {}};
        for (std::size_t k = 0; k < set.dim(); ++k) s.measurements.push_back(-60.0F - static_cast<float>((i * 7 + k) % 30));
        set.append(s, SnapshotLabel{i % 3 ? Label::compliance : Label::violation, i / 2, {}});
    }
    return set;
}

}  // namespace

TEST_CASE("ordered pairs") {
    const auto p = ordered_pairs(4);
    REQUIRE(p.size() == 12);
    CHECK(p[0] == DevicePair{0, 1});
    CHECK(p[2] == DevicePair{0, 3});
    CHECK(p[3] == DevicePair{1, 0});
    CHECK(p[11] == DevicePair{3, 2});
}

TEST_CASE("sweep sizes") {
    for (int n_rx : {1, 6}) {
        ScenarioOverrides o;
        o.n_rx = n_rx;
        const ScenarioConfig cfg = build_scenario("office", o);
        const std::vector<Person> nobody;
        Rng rng(1);
        const auto sweep = run_training({cfg.environment, nobody}, cfg.devices[0], cfg.devices[1], ChannelParams{}, rng);
        CHECK(sweep.rss.size() == static_cast<std::size_t>(32 * n_rx));
        CHECK(snapshot_dim(cfg) == static_cast<std::size_t>(12 * 32 * n_rx));
    }
}

TEST_CASE("best tx beam points at the line of sight in an empty room") {
    const Environment env{10.0, 10.0, {}, {{0.0, 0.0, 10.0, 10.0}}};
    const std::vector<Person> nobody;
    ChannelParams ch;
    ch.rss_noise_sigma_db = 0.0;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.5, 9.5);
    for (int trial = 0; trial < 200; ++trial) {
        const Device tx{0, {u(gen), u(gen)}, 0.0, make_codebook(32, 1.0), make_codebook(1, 1.0), false};
        const Device rx{1, {u(gen), u(gen)}, 0.0, make_codebook(32, 1.0), make_codebook(1, 1.0), false};
        Rng rng(trial);
        const auto sweep = run_training({env, nobody}, tx, rx, ch, rng);
        // Brute force: beam whose boresight is angularly closest to the LOS bearing.
        const double los = std::atan2(rx.position.y - tx.position.y, rx.position.x - tx.position.x);
        int best = 0;
        double best_off = 1e9;
        for (int k = 0; k < 32; ++k) {
            double d = std::fmod(std::abs(los - k * 2 * std::numbers::pi / 32), 2 * std::numbers::pi);
            d = std::min(d, 2 * std::numbers::pi - d);
            if (d < best_off) {
                best_off = d;
                best = k;
            }
        }
        CHECK(sweep.best.best_tx_beam == best);
        CHECK(sweep.best.best_rx_beam == 0);
    }
}

TEST_CASE("best pair is invariant under monotone rescaling and ties go low") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<float> u(-90.0F, -40.0F);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<float> v(32 * 3), w;
        for (float& x : v) x = u(gen);
        for (float x : v) w.push_back(2.0F * x + 3.0F);
        const auto a = best_beam_pair(v, 32, 3);
        const auto b = best_beam_pair(w, 32, 3);
        CHECK(a.best_tx_beam == b.best_tx_beam);
        CHECK(a.best_rx_beam == b.best_rx_beam);
    }
    const std::vector<float> flat(12, -70.0F);
    const auto t = best_beam_pair(flat, 4, 3);
    CHECK(t.best_tx_beam == 0);
    CHECK(t.best_rx_beam == 0);
}

TEST_CASE("snapshots of a static arrangement") {
    const ScenarioConfig cfg = build_scenario("office");
    const Arrangement a = sample_arrangement(cfg, Label::violation, 4);
    ProtocolConfig proto;
    proto.trainings_per_arrangement = 200;
    ChannelParams quiet;
    quiet.rss_noise_sigma_db = 0.0;
    const auto snaps = collect_snapshots(cfg, a, 7, proto, quiet, 11);
    REQUIRE(snaps.size() == 200);
    for (const auto& s : snaps) {
        CHECK(s.measurements.size() == 384);
        CHECK(s.arrangement_id == 7);
        CHECK(s.measurements == snaps.front().measurements);
    }
    const auto noisy = collect_snapshots(cfg, a, 7, proto, ChannelParams{}, 11);
    CHECK(noisy[0].measurements != noisy[1].measurements);
}

TEST_CASE("container round trip") {
    const auto dir = testing::scratch_dir("container");
    const auto data = generate_dataset(testing::small_office(3), testing::short_protocol(4), ChannelParams{}, 2, 1);
    write_container(dir / "d.bin", data.snapshots);
    write_labels(dir / "d.labels", data.snapshots);
    const SnapshotSet back = read_snapshot_set(dir / "d.bin", dir / "d.labels");
    CHECK(back.scenario_hash == data.snapshots.scenario_hash);
    CHECK(back.n_pairs == 12);
    CHECK(back.n_tx == 32);
    CHECK(back.n_rx == 1);
    CHECK(back.values == data.snapshots.values);
    CHECK(back.labels == data.snapshots.labels);
    CHECK(dataset_checksum(back) == dataset_checksum(data.snapshots));
    std::filesystem::remove_all(dir);
}

TEST_CASE("36 x 1 four-device container gives 432 features") {
    const auto dir = testing::scratch_dir("ingest36");
    const SnapshotSet set = synthetic_set(12, 36, 1, 10);
    write_container(dir / "c.bin", set);
    write_labels(dir / "c.labels", set);
    const IngestedDataset in = ingest_external(dir / "c.bin", dir / "c.labels", 36, 1, 12);
    CHECK(in.snapshots.dim() == 432);
    REQUIRE(in.areas.size() == 1);
    const Dataset d = area_dataset(in.snapshots, feature_columns(in.areas[0], 36, 1));
    CHECK(d.dim == 432);
    CHECK(d.size() == 10);
    CHECK_THROWS_AS(ingest_external(dir / "c.bin", dir / "c.labels", 32, 1, 12), ContainerError);
    CHECK_THROWS_AS(ingest_external(dir / "c.bin", dir / "c.labels", 36, 3, 12), ContainerError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("truncated container names the byte offset") {
    const auto dir = testing::scratch_dir("truncated");
    const SnapshotSet set = synthetic_set(2, 4, 1, 6);
    write_container(dir / "c.bin", set);
    write_labels(dir / "c.labels", set);
    const auto size = std::filesystem::file_size(dir / "c.bin");
    std::filesystem::resize_file(dir / "c.bin", size - 10);
    std::string message;
    try {
        read_snapshot_set(dir / "c.bin", dir / "c.labels");
    } catch (const ContainerError& e) {
        message = e.what();
    }
    CHECK(message.find("byte offset") != std::string::npos);
    // Cutting inside the header is reported too.
    std::filesystem::resize_file(dir / "c.bin", 20);
    CHECK_THROWS_WITH_AS(read_snapshot_set(dir / "c.bin", dir / "c.labels"), doctest::Contains("byte offset"),
                         ContainerError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed containers are rejected") {
    const auto dir = testing::scratch_dir("malformed");
    const SnapshotSet set = synthetic_set(2, 4, 1, 6);
    write_container(dir / "c.bin", set);
    write_labels(dir / "c.labels", set);
    {
        std::ofstream(dir / "x.bin", std::ios::binary) << "NOT-A-CONTAINER\n";
        CHECK_THROWS_AS(read_snapshot_set(dir / "x.bin", dir / "c.labels"), ContainerError);
    }
    {
        std::ofstream(dir / "c.bin", std::ios::binary | std::ios::app) << "xx";
        CHECK_THROWS_AS(read_snapshot_set(dir / "c.bin", dir / "c.labels"), ContainerError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("label count must match the snapshot count") {
    const auto dir = testing::scratch_dir("labels");
    const SnapshotSet set = synthetic_set(2, 4, 1, 6);
    write_container(dir / "c.bin", set);
    write_labels(dir / "c.labels", set);
    std::ofstream(dir / "c.labels", std::ios::app) << "violation 9\n";
    CHECK_THROWS_AS(read_snapshot_set(dir / "c.bin", dir / "c.labels"), ContainerError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("desk-scale dataset size and determinism") {
    ScenarioConfig sc = build_scenario("office");
    ProtocolConfig proto;
    apply_scale(sc, proto, false);
    const auto a = generate_dataset(sc, proto, ChannelParams{}, 21, 1);
    CHECK(a.snapshots.count() == 4000);
    CHECK(a.arrangements.size() == 80);
    const auto b = generate_dataset(sc, proto, ChannelParams{}, 21, 3);
    CHECK(dataset_checksum(a.snapshots) == dataset_checksum(b.snapshots));
    const auto c = generate_dataset(sc, proto, ChannelParams{}, 22, 1);
    CHECK(dataset_checksum(a.snapshots) != dataset_checksum(c.snapshots));
}

TEST_CASE("paper-scale office container header counts 80000 snapshots") {
    ScenarioConfig sc = build_scenario("office");
    ProtocolConfig proto;
    apply_scale(sc, proto, true);
    const auto data = generate_dataset(sc, proto, ChannelParams{}, 1);
    const auto dir = testing::scratch_dir("paper");
    write_container(dir / "p.bin", data.snapshots);
    std::ifstream in(dir / "p.bin", std::ios::binary);
    std::string line;
    bool found = false;
    while (std::getline(in, line) && line != "data") found = found || line == "count 80000";
    CHECK(found);
    std::filesystem::remove_all(dir);
}
