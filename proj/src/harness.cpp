// SPDX-License-Identifier: Apache-2.0

#include "mmsense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mmsense/random.hpp"

namespace mmsense {

void apply_scale(ScenarioConfig& scenario, ProtocolConfig& protocol, bool paper_scale) {
    const int per_class = paper_scale ? kPaperArrangementsPerClass : kDeskArrangementsPerClass;
    scenario.n_violation_arrangements = per_class;
    scenario.n_compliance_arrangements = per_class;
    protocol.trainings_per_arrangement = paper_scale ? kPaperTrainings : kDeskTrainings;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition) {
    return derive_seed(master_seed, {tag(Stream::repetition), static_cast<std::uint64_t>(repetition)});
}

void SweepGrid::validate() const {
    if (scenarios.empty() || n_rx.empty() || alphas.empty() || hidden_units.empty())
        throw std::invalid_argument("sweep grid: every list must be non-empty");
    for (const auto& s : scenarios) {
        const auto& known = scenario_names();
        if (std::find(known.begin(), known.end(), s) == known.end())
            throw std::invalid_argument("sweep grid: unknown scenario '" + s + "'");
    }
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("sweep grid: alpha values must lie in [0, 1]");
    for (int r : n_rx)
        if (r < 1) throw std::invalid_argument("sweep grid: n_rx values must be >= 1");
    for (int h : hidden_units)
        if (h < 1) throw std::invalid_argument("sweep grid: hidden unit counts must be >= 1");
    if (n_tx < 1) throw std::invalid_argument("sweep grid: n_tx must be >= 1");
    if (repetitions < 1) throw std::invalid_argument("sweep grid: repetitions must be >= 1");
}

std::vector<SweepCell> expand_grid(const SweepGrid& grid, std::uint64_t master_seed) {
    grid.validate();
    std::vector<SweepCell> cells;
    for (const auto& s : grid.scenarios)
        for (int rx : grid.n_rx)
            for (double a : grid.alphas)
                for (int h : grid.hidden_units)
                    for (int r = 0; r < grid.repetitions; ++r)
                        cells.push_back({s, rx, a, h, r, repetition_seed(master_seed, r)});
    return cells;
}

namespace {

struct CellSetup {
    ScenarioConfig scenario;
    ProtocolConfig protocol;
};

CellSetup setup_for(const SweepCell& cell, const SweepOptions& opt, int n_tx) {
    ScenarioOverrides ov;
    ov.n_tx = n_tx;
    ov.n_rx = cell.n_rx;
    ov.alpha = cell.alpha;
    ov.safe_distance = opt.base.scenario.safe_distance;
    ov.max_people = opt.base.scenario.max_people;
    ov.person_radius = opt.base.scenario.person_radius;
    if (opt.keep_base_counts) {
        ov.n_violation_arrangements = opt.base.scenario.n_violation_arrangements;
        ov.n_compliance_arrangements = opt.base.scenario.n_compliance_arrangements;
    }
    CellSetup s{build_scenario(cell.scenario, ov), opt.base.protocol};
    if (!opt.keep_base_counts) apply_scale(s.scenario, s.protocol, opt.paper_scale);
    return s;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t cache_key(const ScenarioConfig& sc, const ProtocolConfig& p, const ChannelParams& ch, std::uint64_t seed) {
    Json j = {{"scenario", to_json(sc)}, {"protocol", to_json(p)}, {"channel", to_json(ch)}, {"seed", seed}};
    const std::string s = j.dump();
    return fnv1a(s.data(), s.size());
}

GeneratedDataset dataset_for(const SweepCell& cell, const SweepOptions& opt, int n_tx, std::string* cache_path) {
    const CellSetup s = setup_for(cell, opt, n_tx);
    if (opt.cache_dir.empty()) return generate_dataset(s.scenario, s.protocol, opt.base.channel, cell.seed, 1);

    const std::string stem = hex64(cache_key(s.scenario, s.protocol, opt.base.channel, cell.seed));
    const auto container = opt.cache_dir / (stem + ".bin");
    const auto labels = opt.cache_dir / (stem + ".labels");
    if (cache_path != nullptr) *cache_path = container.string();
    if (std::filesystem::exists(container) && std::filesystem::exists(labels)) {
        GeneratedDataset d;
        d.scenario = s.scenario;
        d.areas = define_alert_areas(s.scenario);
        d.snapshots = read_snapshot_set(container, labels);
        return d;
    }
    GeneratedDataset d = generate_dataset(s.scenario, s.protocol, opt.base.channel, cell.seed, 1);
    std::filesystem::create_directories(opt.cache_dir);
    // Write under temporary names first so a concurrent reader never sees half a file.
    const auto tmp_c = opt.cache_dir / (stem + ".bin.tmp");
    const auto tmp_l = opt.cache_dir / (stem + ".labels.tmp");
    write_container(tmp_c, d.snapshots);
    write_labels(tmp_l, d.snapshots);
    std::filesystem::rename(tmp_l, labels);
    std::filesystem::rename(tmp_c, container);
    return d;
}

}  // namespace

EvaluationConfig seeded_evaluation(EvaluationConfig e, std::uint64_t seed, int hidden_units) {
    e.hidden_units = hidden_units;
    e.split_seed = derive_seed(seed, {tag(Stream::split)});
    e.train.seed = seed;
    return e;
}

GeneratedDataset cell_dataset(const SweepCell& cell, const SweepOptions& opt, std::string* cache_path) {
    return dataset_for(cell, opt, kDefaultTxBeams, cache_path);
}

std::vector<CellResult> run_sweep(const SweepGrid& grid, const SweepOptions& opt) {
    const std::vector<SweepCell> cells = expand_grid(grid, opt.base.seed);
    std::vector<CellResult> results(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) results[i].cell = cells[i];

    // One job per dataset: the hidden-unit cells of a (scenario, n_rx, alpha) block
    // for one repetition are contiguous modulo the repetition stride.
    const std::size_t reps = static_cast<std::size_t>(grid.repetitions);
    const std::size_t per_block = grid.hidden_units.size() * reps;
    std::vector<std::vector<std::size_t>> jobs;
    for (std::size_t block = 0; block < cells.size(); block += per_block)
        for (std::size_t r = 0; r < reps; ++r) {
            std::vector<std::size_t> members;
            for (std::size_t h = 0; h < grid.hidden_units.size(); ++h) members.push_back(block + h * reps + r);
            jobs.push_back(std::move(members));
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            const SweepCell& first = cells[jobs[j].front()];
            GeneratedDataset data;
            std::string path;
            try {
                data = dataset_for(first, opt, grid.n_tx, &path);
            } catch (const std::exception& e) {
                for (std::size_t i : jobs[j]) results[i].error = std::string("dataset: ") + e.what();
                continue;
            }
            const double gen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const std::uint64_t checksum = dataset_checksum(data.snapshots);
            for (std::size_t i : jobs[j]) {
                CellResult& out = results[i];
                const auto t1 = std::chrono::steady_clock::now();
                out.snapshots = data.snapshots.count();
                out.dataset_checksum = checksum;
                out.dataset_path = path;
                try {
                    const PipelineResult r =
                        train_and_evaluate(data.snapshots, data.areas, seeded_evaluation(opt.base.evaluation, out.cell.seed, out.cell.hidden_units));
                    out.test = r.test;
                    out.validation = r.validation;
                } catch (const std::exception& e) {
                    out.error = e.what();
                }
                out.wall_seconds =
                    gen_seconds / static_cast<double>(jobs[j].size()) +
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
            }
        }
    };
    unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, int n_tx, const std::vector<CellResult>& rows) {
    os << "scenario,n_tx,n_rx,alpha,hidden_units,repetition,seed,snapshots,accuracy,val_accuracy,"
          "precision_violation,recall_violation,precision_compliance,recall_compliance,cc,cv,vc,vv,status\n";
    char buf[512];
    for (const CellResult& r : rows) {
        const Metrics& m = r.test;
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.4f,%d,%d,%llu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%ld,%ld,%ld,%ld,",
                      r.cell.scenario.c_str(), n_tx, r.cell.n_rx, r.cell.alpha, r.cell.hidden_units, r.cell.repetition,
                      static_cast<unsigned long long>(r.cell.seed), r.snapshots, m.accuracy, r.validation.accuracy,
                      m.precision[1], m.recall[1], m.precision[0], m.recall[0], m.confusion[0][0], m.confusion[0][1],
                      m.confusion[1][0], m.confusion[1][1]);
        os << buf << (r.error.empty() ? std::string("ok") : csv_quote(r.error)) << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("sweep csv: empty input");
    const auto header = csv_fields(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"scenario", "n_tx", "n_rx", "alpha", "hidden_units", "repetition", "accuracy", "status"})
        if (!col.count(need)) throw std::runtime_error(std::string("sweep csv: missing column '") + need + "'");
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = csv_fields(line);
        if (f.size() != header.size())
            throw std::runtime_error("sweep csv: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        try {
            SweepRow r;
            r.scenario = f[col["scenario"]];
            r.n_tx = std::stoi(f[col["n_tx"]]);
            r.n_rx = std::stoi(f[col["n_rx"]]);
            r.alpha = std::stod(f[col["alpha"]]);
            r.hidden_units = std::stoi(f[col["hidden_units"]]);
            r.repetition = std::stoi(f[col["repetition"]]);
            r.accuracy = std::stod(f[col["accuracy"]]);
            r.ok = f[col["status"]] == "ok";
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw std::runtime_error("sweep csv: line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return rows;
}

void write_report(std::ostream& os, const std::vector<SweepRow>& rows) {
    using Key = std::tuple<std::string, int, int, double, int>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> groups;
    for (const SweepRow& r : rows) {
        const Key k{r.scenario, r.n_tx, r.n_rx, r.alpha, r.hidden_units};
        if (!groups.count(k)) order.push_back(k);
        auto& g = groups[k];
        if (r.ok) g.push_back(r.accuracy);
    }
    os << "scenario,n_tx,n_rx,alpha,hidden_units,statistic,value\n";
    char buf[256];
    for (const Key& k : order) {
        const auto& v = groups[k];
        double mean = 0.0, var = 0.0;
        for (double x : v) mean += x;
        if (!v.empty()) mean /= static_cast<double>(v.size());
        for (double x : v) var += (x - mean) * (x - mean);
        if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
        const double lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
        const double hi = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        const std::pair<const char*, double> stats[] = {
            {"mean", mean}, {"std", std::sqrt(var)}, {"min", lo}, {"max", hi}, {"n", static_cast<double>(v.size())}};
        for (const auto& [name, value] : stats) {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%.4f,%d,%s,%.6f\n", std::get<0>(k).c_str(), std::get<1>(k),
                          std::get<2>(k), std::get<3>(k), std::get<4>(k), name, value);
            os << buf;
        }
    }
}

Json run_manifest(const SweepGrid& grid, const SweepOptions& opt, std::uint64_t master_seed,
                  const std::vector<CellResult>& rows, const std::filesystem::path& csv_path) {
    const Json config = to_json(opt.base);
    const std::string dump = config.dump();
    Json cells = Json::array();
    for (const CellResult& r : rows)
        cells.push_back({{"scenario", r.cell.scenario},
                         {"n_rx", r.cell.n_rx},
                         {"alpha", r.cell.alpha},
                         {"hidden_units", r.cell.hidden_units},
                         {"repetition", r.cell.repetition},
                         {"seed", r.cell.seed},
                         {"snapshots", r.snapshots},
                         {"dataset_checksum", hex64(r.dataset_checksum)},
                         {"accuracy", r.test.accuracy},
                         {"val_accuracy", r.validation.accuracy},
                         {"wall_seconds", r.wall_seconds},
                         {"dataset_path", r.dataset_path},
                         {"error", r.error}});
    return {{"config", config},
            {"config_hash", hex64(fnv1a(dump.data(), dump.size()))},
            {"master_seed", master_seed},
            {"paper_scale", opt.paper_scale},
            {"keep_base_counts", opt.keep_base_counts},
            {"grid",
             {{"scenarios", grid.scenarios},
              {"n_rx", grid.n_rx},
              {"n_tx", grid.n_tx},
              {"alphas", grid.alphas},
              {"hidden_units", grid.hidden_units},
              {"repetitions", grid.repetitions}}},
            {"csv", csv_path.string()},
            {"cells", cells}};
}

IngestedDataset ingest_external(const std::filesystem::path& container, const std::filesystem::path& labels,
                                std::optional<int> expected_n_tx, std::optional<int> expected_n_rx,
                                std::optional<int> expected_pairs) {
    IngestedDataset out;
    out.snapshots = read_snapshot_set(container, labels);
    const SnapshotSet& s = out.snapshots;
    auto check = [&](const char* what, std::optional<int> want, int got) {
        if (want && *want != got)
            throw ContainerError(container.string() + ": " + what + " is " + std::to_string(got) + ", expected " +
                                 std::to_string(*want));
    };
    check("n_tx", expected_n_tx, s.n_tx);
    check("n_rx", expected_n_rx, s.n_rx);
    check("pairs", expected_pairs, s.n_pairs);
    out.areas.push_back(all_pairs_area(s.n_pairs));
    return out;
}

}  // namespace mmsense

namespace mmsense {

RlExperimentResult run_rl_experiment(const RlExperimentOptions& opt) {
    RlExperimentResult out;
    ScenarioConfig scenario = opt.base.scenario;
    ProtocolConfig protocol = opt.base.protocol;
    apply_scale(scenario, protocol, opt.paper_scale);
    const std::uint64_t seed = opt.base.seed;
    out.data = generate_dataset(scenario, protocol, opt.base.channel, seed);
    const EvaluationConfig ev = seeded_evaluation(opt.base.evaluation, seed, opt.base.evaluation.hidden_units);
    out.baseline = train_and_evaluate(out.data.snapshots, out.data.areas, ev);

    const AreaModel& am = out.baseline.areas.front();
    const bool multi_area = out.data.areas.size() > 1;
    const SensingContext ctx{out.data.scenario, opt.base.channel, am.columns, am.standardizer,
                             multi_area ? &am.area : nullptr};

    RlConfig rl = opt.rl;
    rl.seed = derive_seed(seed, {tag(Stream::episode)});
    if (rl.critic_mode == CriticMode::cnn && opt.pretrained_critic) {
        out.critic = *opt.pretrained_critic;
        if (out.critic.series_length() != rl.series_length ||
            out.critic.feature_dim() != static_cast<int>(am.columns.size()))
            throw std::invalid_argument("run_rl_experiment: pretrained critic does not match the alert area");
    } else if (rl.critic_mode == CriticMode::cnn) {
        auto fresh = [&](int count, std::uint64_t stream) {
            std::vector<Arrangement> v;
            for (int k = 0; k < count; ++k)
                v.push_back(sample_arrangement(out.data.scenario, k % 2 ? Label::violation : Label::compliance,
                                               derive_seed(seed, {tag(Stream::critic), stream, static_cast<std::uint64_t>(k)})));
            return v;
        };
        const auto train_ex = make_critic_examples(ctx, fresh(opt.critic_arrangements, 1), opt.base.behavior,
                                                   rl.series_length, derive_seed(seed, {tag(Stream::critic), 2}));
        const auto held_ex = make_critic_examples(ctx, fresh(opt.critic_holdout, 3), opt.base.behavior,
                                                  rl.series_length, derive_seed(seed, {tag(Stream::critic), 4}));
        CriticTrainConfig cc = opt.critic;
        cc.seed = derive_seed(seed, {tag(Stream::critic), 5});
        out.critic = CriticCNN::initialized(rl.series_length, static_cast<int>(am.columns.size()), cc.seed);
        out.critic_loss = train_critic(out.critic, train_ex, cc);
        out.critic_train_accuracy = critic_accuracy(out.critic, train_ex);
        out.critic_holdout_accuracy = held_ex.empty() ? 0.0 : critic_accuracy(out.critic, held_ex);
    } else {
        out.critic = CriticCNN(rl.series_length, static_cast<int>(am.columns.size()));
    }

    const FFNN actor = FFNN::initialized(static_cast<int>(am.columns.size()), ev.hidden_units,
                                         derive_seed(seed, {tag(Stream::init), 1}));
    out.rl = rl_train(actor, out.critic, ctx, out.data.arrangements, opt.base.behavior, rl);
    return out;
}

}  // namespace mmsense
