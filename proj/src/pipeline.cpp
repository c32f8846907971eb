// SPDX-License-Identifier: Apache-2.0

#include "mmsense/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <thread>

#include "mmsense/config.hpp"
#include "mmsense/random.hpp"

namespace mmsense {

GeneratedDataset generate_dataset(const ScenarioConfig& scenario, const ProtocolConfig& protocol,
                                  const ChannelParams& channel, std::uint64_t seed, unsigned threads) {
    scenario.validate();
    protocol.validate();
    channel.validate();
    GeneratedDataset out;
    out.scenario = scenario;
    out.areas = define_alert_areas(scenario);

    const int nv = scenario.n_violation_arrangements;
    const int n = nv + scenario.n_compliance_arrangements;
    out.arrangements.resize(static_cast<std::size_t>(n));
    std::vector<std::vector<Snapshot>> snaps(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < n; k = next++) {
            const Label target = k < nv ? Label::violation : Label::compliance;
            const auto ks = static_cast<std::uint64_t>(k);
            Arrangement a = sample_arrangement(scenario, target, derive_seed(seed, {tag(Stream::arrangement), ks}));
            snaps[static_cast<std::size_t>(k)] =
                collect_snapshots(scenario, a, k, protocol, channel, derive_seed(seed, {tag(Stream::snapshot), ks}));
            out.arrangements[static_cast<std::size_t>(k)] = std::move(a);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SnapshotSet& set = out.snapshots;
    set.scenario_hash = scenario_hash(scenario);
    set.n_pairs = static_cast<int>(ordered_pairs(static_cast<int>(scenario.devices.size())).size());
    set.n_tx = scenario.devices.front().codebook_tx.n_beams;
    set.n_rx = scenario.devices.front().codebook_rx.n_beams;
    set.values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(protocol.trainings_per_arrangement) *
                       snapshot_dim(scenario));
    for (int k = 0; k < n; ++k) {
        const Arrangement& a = out.arrangements[static_cast<std::size_t>(k)];
        SnapshotLabel lab{a.label, k, {}};
        if (out.areas.size() > 1)
            for (const AlertArea& area : out.areas) lab.area_labels.push_back(area_label(area, a.people, scenario.safe_distance));
        for (const Snapshot& s : snaps[static_cast<std::size_t>(k)]) set.append(s, lab);
    }
    return out;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t dataset_checksum(const SnapshotSet& set) {
    std::uint64_t h = fnv1a(&set.scenario_hash, sizeof set.scenario_hash);
    const int dims[3] = {set.n_pairs, set.n_tx, set.n_rx};
    h = fnv1a(dims, sizeof dims, h);
    h = fnv1a(set.values.data(), set.values.size() * sizeof(float), h);
    for (const SnapshotLabel& l : set.labels) {
        const int row[2] = {static_cast<int>(l.label), l.arrangement_id};
        h = fnv1a(row, sizeof row, h);
        for (Label a : l.area_labels) {
            const int v = static_cast<int>(a);
            h = fnv1a(&v, sizeof v, h);
        }
    }
    return h;
}

AlertArea all_pairs_area(int n_pairs) {
    AlertArea a;
    a.member_pairs.resize(static_cast<std::size_t>(n_pairs));
    for (int i = 0; i < n_pairs; ++i) a.member_pairs[static_cast<std::size_t>(i)] = i;
    return a;
}

namespace {

Metrics pooled(const std::vector<Metrics>& parts) {
    std::array<std::array<long, 2>, 2> c{};
    for (const Metrics& m : parts)
        for (std::size_t t = 0; t < 2; ++t)
            for (std::size_t p = 0; p < 2; ++p) c[t][p] += m.confusion[t][p];
    return metrics_from_confusion(c);
}

}  // namespace

PipelineResult train_and_evaluate(const SnapshotSet& set, const std::vector<AlertArea>& areas,
                                  const EvaluationConfig& cfg) {
    PipelineResult res;
    std::vector<int> groups(set.count()), labels(set.count());
    for (std::size_t i = 0; i < set.count(); ++i) {
        groups[i] = set.labels[i].arrangement_id;
        labels[i] = static_cast<int>(set.labels[i].label);
    }
    res.split = split_dataset(groups, labels, cfg.split_seed, cfg.split_mode);

    std::vector<Metrics> val_parts, test_parts;
    for (std::size_t a = 0; a < areas.size(); ++a) {
        AreaModel am;
        am.area = areas[a];
        am.columns = feature_columns(am.area, set.n_tx, set.n_rx);
        const Dataset all = area_dataset(set, am.columns, areas.size() > 1 ? static_cast<int>(a) : -1);
        Dataset tr = subset(all, res.split.train);
        Dataset va = subset(all, res.split.validation);
        Dataset te = subset(all, res.split.test);
        am.standardizer = Standardizer::fit(tr);
        am.standardizer.transform(tr);
        am.standardizer.transform(va);
        am.standardizer.transform(te);

        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.train.seed, {static_cast<std::uint64_t>(a)});
        am.model = FFNN::initialized(static_cast<int>(all.dim), cfg.hidden_units, tc.seed);
        am.history = train(am.model, tr, tc, &va);
        am.validation = evaluate(am.model, va);
        am.test = evaluate(am.model, te);
        val_parts.push_back(am.validation);
        test_parts.push_back(am.test);
        res.areas.push_back(std::move(am));
    }
    res.validation = pooled(val_parts);
    res.test = pooled(test_parts);
    return res;
}

}  // namespace mmsense
