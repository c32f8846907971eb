// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "doctest.h"
#include "mmsense/config.hpp"
#include "mmsense/harness.hpp"
#include "property_checks.hpp"

using namespace mmsense;
using doctest::Approx;

namespace {

SweepGrid tiny_grid() {
    SweepGrid g;
    g.scenarios = {"office"};
    g.n_rx = {1};
    g.alphas = {0.0, 1.0};
    g.hidden_units = {4, 8};
    g.repetitions = 2;
    return g;
}

SweepOptions tiny_options() {
    SweepOptions o;
    o.base.scenario = testing::small_office(6);
    o.base.protocol = testing::short_protocol(4);
    o.base.evaluation.train.epochs = 2;
    o.base.seed = 12;
    o.keep_base_counts = true;
    o.threads = 1;
    return o;
}

std::string csv_of(const SweepGrid& g, const std::vector<CellResult>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, g.n_tx, rows);
    return os.str();
}

}  // namespace

TEST_CASE("default grid expands in documented order") {
    const SweepGrid g;
    const auto cells = expand_grid(g, 1);
    CHECK(cells.size() == 4U * 3U * 5U * 4U * 3U);
    CHECK(cells[0].scenario == "office");
    CHECK(cells[0].repetition == 0);
    CHECK(cells[1].repetition == 1);
    CHECK(cells[3].hidden_units == 16);
    CHECK(cells[12].alpha == 0.25);
    CHECK(cells[60].n_rx == 3);
    CHECK(cells.back().scenario == "station");
    // The same repetition index shares its seed across the grid, so cells are paired.
    std::map<int, std::set<std::uint64_t>> seeds;
    for (const SweepCell& c : cells) seeds[c.repetition].insert(c.seed);
    for (const auto& [r, s] : seeds) {
        CHECK(s.size() == 1);
        CHECK(*s.begin() == repetition_seed(1, r));
    }
    CHECK(repetition_seed(1, 0) != repetition_seed(1, 1));
    CHECK(repetition_seed(1, 0) != repetition_seed(2, 0));
}

TEST_CASE("grid validation") {
    SweepGrid g;
    g.alphas = {};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.scenarios = {"garage"};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.alphas = {1.5};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.repetitions = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("scale presets") {
    ScenarioConfig sc = build_scenario("hall");
    ProtocolConfig p;
    apply_scale(sc, p, false);
    CHECK(sc.n_violation_arrangements == 40);
    CHECK(sc.n_compliance_arrangements == 40);
    CHECK(p.trainings_per_arrangement == 50);
    apply_scale(sc, p, true);
    CHECK(sc.n_violation_arrangements == 200);
    CHECK(p.trainings_per_arrangement == 200);
}

TEST_CASE("seeded evaluation derives the split seed") {
    const EvaluationConfig e = seeded_evaluation(EvaluationConfig{}, 77, 16);
    CHECK(e.hidden_units == 16);
    CHECK(e.train.seed == 77);
    CHECK(e.split_seed == derive_seed(77, {tag(Stream::split)}));
}

TEST_CASE("sweep CSV is stable and documented") {
    const SweepGrid g = tiny_grid();
    const auto rows = run_sweep(g, tiny_options());
    REQUIRE(rows.size() == 8);
    const std::string csv = csv_of(g, rows);
    CHECK(csv.rfind("scenario,n_tx,n_rx,alpha,hidden_units,repetition,seed,snapshots,accuracy,val_accuracy,"
                    "precision_violation,recall_violation,precision_compliance,recall_compliance,cc,cv,vc,vv,status\n",
                    0) == 0);
    for (const CellResult& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.snapshots == 12U * 4U);
        CHECK(r.test.total > 0);
    }
    // Cells that differ only in hidden units share their dataset.
    CHECK(rows[0].dataset_checksum == rows[2].dataset_checksum);
    CHECK(rows[0].dataset_checksum != rows[1].dataset_checksum);

    std::istringstream is(csv);
    const auto parsed = read_sweep_csv(is);
    REQUIRE(parsed.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].scenario == rows[i].cell.scenario);
        CHECK(parsed[i].hidden_units == rows[i].cell.hidden_units);
        CHECK(parsed[i].accuracy == Approx(rows[i].test.accuracy).epsilon(1e-6));
        CHECK(parsed[i].ok);
    }
}

TEST_CASE("identical master seed gives identical containers and CSV bytes") {
    const auto r = testing::check_pipeline_determinism();
    INFO(r.summary());
    CHECK(r.ok());
}

TEST_CASE("cached and regenerated datasets give identical metrics") {
    const SweepGrid g = tiny_grid();
    SweepOptions o = tiny_options();
    const std::string fresh = csv_of(g, run_sweep(g, o));
    o.cache_dir = testing::scratch_dir("cache");
    const std::string first = csv_of(g, run_sweep(g, o));  // fills the cache
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(o.cache_dir)) files += e.path().extension() == ".bin";
    CHECK(files == 4);
    const std::string second = csv_of(g, run_sweep(g, o));  // reads it back
    CHECK(first == fresh);
    CHECK(second == fresh);
    std::filesystem::remove_all(o.cache_dir);
}

TEST_CASE("a failing cell is recorded and the sweep continues") {
    const SweepGrid g = tiny_grid();
    SweepOptions o = tiny_options();
    o.base.scenario.max_people = 1;  // violations cannot be sampled
    const auto rows = run_sweep(g, o);
    REQUIRE(rows.size() == 8);
    for (const CellResult& r : rows) CHECK_FALSE(r.error.empty());
    std::istringstream is(csv_of(g, rows));
    for (const SweepRow& r : read_sweep_csv(is)) CHECK_FALSE(r.ok);
}

TEST_CASE("report statistics") {
    std::vector<SweepRow> rows;
    const double acc[] = {0.8, 0.9, 0.7};
    for (int r = 0; r < 3; ++r) rows.push_back({"office", 32, 1, 1.0, 32, r, acc[r], true});
    rows.push_back({"office", 32, 1, 1.0, 32, 3, 0.1, false});  // failed cells are ignored
    rows.push_back({"hall", 32, 6, 0.5, 8, 0, 0.6, true});
    std::ostringstream os;
    write_report(os, rows);
    std::map<std::tuple<std::string, std::string>, double> stat;
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "scenario,n_tx,n_rx,alpha,hidden_units,statistic,value");
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
        REQUIRE(f.size() == 7);
        stat[{f[0], f[5]}] = std::stod(f[6]);
    }
    const double mean = (0.8 + 0.9 + 0.7) / 3.0;
    const double sd = std::sqrt(((0.8 - mean) * (0.8 - mean) + (0.9 - mean) * (0.9 - mean) + (0.7 - mean) * (0.7 - mean)) / 2.0);
    CHECK(stat[{"office", "mean"}] == Approx(mean).epsilon(1e-6));
    CHECK(stat[{"office", "std"}] == Approx(sd).epsilon(1e-5));
    CHECK(stat[{"office", "min"}] == Approx(0.7));
    CHECK(stat[{"office", "max"}] == Approx(0.9));
    CHECK(stat[{"office", "n"}] == 3.0);
    CHECK(stat[{"hall", "n"}] == 1.0);
}

TEST_CASE("manifest holds one record per cell and repetition") {
    const SweepGrid g = tiny_grid();
    const SweepOptions o = tiny_options();
    const auto rows = run_sweep(g, o);
    const Json m = run_manifest(g, o, o.base.seed, rows, "out.csv");
    REQUIRE(m["cells"].size() == rows.size());
    std::set<std::tuple<double, int, int>> seen;
    for (const auto& c : m["cells"])
        CHECK(seen.insert({c["alpha"].get<double>(), c["hidden_units"].get<int>(), c["repetition"].get<int>()}).second);
    CHECK(m["master_seed"].get<std::uint64_t>() == 12);
    CHECK(m.contains("config_hash"));
}

TEST_CASE("re-ingested export gives bit-identical downstream metrics") {
    const auto dir = testing::scratch_dir("roundtrip");
    const auto data = generate_dataset(testing::small_office(10), testing::short_protocol(5), ChannelParams{}, 4, 1);
    write_container(dir / "d.bin", data.snapshots);
    write_labels(dir / "d.labels", data.snapshots);
    const IngestedDataset in = ingest_external(dir / "d.bin", dir / "d.labels");
    const EvaluationConfig ev = seeded_evaluation(EvaluationConfig{}, 4, 8);
    const auto a = train_and_evaluate(data.snapshots, {all_pairs_area(12)}, ev);
    const auto b = train_and_evaluate(in.snapshots, in.areas, ev);
    CHECK(a.test.confusion == b.test.confusion);
    CHECK(std::memcmp(&a.test.accuracy, &b.test.accuracy, sizeof(double)) == 0);
    CHECK(a.areas[0].model.params == b.areas[0].model.params);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config JSON round trip and hashing") {
    ExperimentConfig cfg;
    cfg.scenario = build_scenario("station");
    cfg.seed = 5;
    cfg.channel.furniture_loss_db = 3.0;
    cfg.evaluation.split_mode = SplitMode::snapshot;
    const Json j = to_json(cfg);
    const ExperimentConfig back = apply_config(ExperimentConfig{}, j);
    CHECK(to_json(back) == j);
    CHECK(scenario_hash(back.scenario) == scenario_hash(cfg.scenario));
    ScenarioConfig other = cfg.scenario;
    other.safe_distance = 2.0;
    CHECK(scenario_hash(other) != scenario_hash(cfg.scenario));

    const ExperimentConfig partial = apply_config(ExperimentConfig{}, Json::parse(R"({"scenario": {"name": "hall", "safe_distance": 1.8}, "train": {"hidden_units": 16}})"));
    CHECK(partial.scenario.name == "hall");
    CHECK(partial.scenario.safe_distance == 1.8);
    CHECK(partial.scenario.devices.size() == 4);
    CHECK(partial.evaluation.hidden_units == 16);
}
