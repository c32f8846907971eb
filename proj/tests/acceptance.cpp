// SPDX-License-Identifier: Apache-2.0
//
// Acceptance report: one PASS/FAIL line per criterion, with indented note
// lines carrying the numbers behind each verdict. Exits 0 once every
// criterion has been evaluated; --strict turns any FAIL into exit status 1.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmsense/harness.hpp"
#include "property_checks.hpp"

using namespace mmsense;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Verdicts {
    int passed = 0;
    int failed = 0;
    void line(int id, bool ok, const std::string& title, const std::string& detail) {
        std::printf("[%s] criterion %d: %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
        std::fflush(stdout);
        (ok ? passed : failed)++;
    }
};

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
    std::printf("    ");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig base_config(SplitMode mode) {
    ExperimentConfig cfg;
    cfg.scenario = build_scenario("office");
    cfg.evaluation.split_mode = mode;
    cfg.evaluation.hidden_units = 32;
    cfg.seed = kMasterSeed;
    return cfg;
}

struct CellOutcome {
    PipelineResult result;
    double seconds = 0.0;
};

// Office, 32 x 1 beams, alpha 1, H = 32, repetition 0 of the master seed.
CellOutcome office_cell(SplitMode mode, bool paper_scale) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig sc = build_scenario("office");
    ProtocolConfig proto;
    apply_scale(sc, proto, paper_scale);
    const std::uint64_t seed = repetition_seed(kMasterSeed, 0);
    const auto data = generate_dataset(sc, proto, ChannelParams{}, seed);
    EvaluationConfig ev;
    ev.split_mode = mode;
    CellOutcome out{train_and_evaluate(data.snapshots, data.areas, seeded_evaluation(ev, seed, 32)), 0.0};
    out.seconds = seconds_since(t0);
    return out;
}

// Mean test accuracy keyed by (scenario, n_rx, alpha).
using MeanTable = std::map<std::tuple<std::string, int, double>, double>;

MeanTable sweep_means(const SweepGrid& grid, SplitMode mode) {
    SweepOptions opt;
    opt.base = base_config(mode);
    const auto rows = run_sweep(grid, opt);
    std::map<std::tuple<std::string, int, double>, std::vector<double>> acc;
    for (const CellResult& r : rows) {
        if (!r.error.empty()) {
            note("cell %s rx=%d alpha=%.2f rep=%d failed: %s", r.cell.scenario.c_str(), r.cell.n_rx, r.cell.alpha,
                 r.cell.repetition, r.error.c_str());
            continue;
        }
        acc[{r.cell.scenario, r.cell.n_rx, r.cell.alpha}].push_back(r.test.accuracy);
    }
    MeanTable out;
    for (const auto& [k, v] : acc) {
        double s = 0.0;
        for (double x : v) s += x;
        out[k] = s / static_cast<double>(v.size());
    }
    return out;
}

SweepGrid grid_of(std::vector<std::string> scenarios, std::vector<int> n_rx, std::vector<double> alphas) {
    SweepGrid g;
    g.scenarios = std::move(scenarios);
    g.n_rx = std::move(n_rx);
    g.alphas = std::move(alphas);
    g.hidden_units = {32};
    g.repetitions = 3;
    return g;
}

void criterion1(Verdicts& v, double& desk_baseline) {
    const CellOutcome desk = office_cell(SplitMode::snapshot, false);
    desk_baseline = desk.result.test.accuracy;
    const CellOutcome grouped = office_cell(SplitMode::grouped, false);
    const CellOutcome paper = office_cell(SplitMode::snapshot, true);
    const bool ok = desk.result.test.accuracy >= 0.90 && desk.seconds < 300.0 && paper.result.test.accuracy >= 0.97;
    char buf[256];
    std::snprintf(buf, sizeof buf, "desk %.4f (>= 0.90, %.1f s < 300 s), paper scale %.4f (>= 0.97)",
                  desk.result.test.accuracy, desk.seconds, paper.result.test.accuracy);
    v.line(1, ok, "office high-directionality accuracy", buf);
    note("snapshot-level split; paper-scale cell took %.1f s", paper.seconds);
    note("grouped-by-arrangement split at desk scale: %.4f (held-out arrangements)", grouped.result.test.accuracy);
}

void criteria2and4(Verdicts& v) {
    const SweepGrid grid = grid_of({"office", "hall", "underground", "station"}, {1}, {0.0, 1.0});
    const MeanTable m = sweep_means(grid, SplitMode::snapshot);
    const MeanTable grouped = sweep_means(grid, SplitMode::grouped);
    bool ok2 = true;
    std::string detail;
    char buf[160];
    for (const auto& s : grid.scenarios) {
        const double gap = m.at({s, 1, 1.0}) - m.at({s, 1, 0.0});
        ok2 = ok2 && gap >= 0.10;
        std::snprintf(buf, sizeof buf, "%s%s %+.1f", detail.empty() ? "" : ", ", s.c_str(), 100.0 * gap);
        detail += buf;
    }
    v.line(2, ok2, "directionality trend (alpha 1 minus alpha 0, points, need >= +10)", detail);
    for (const auto& s : grid.scenarios)
        note("%-11s alpha=0 %.4f  alpha=1 %.4f  | grouped split: alpha=0 %.4f  alpha=1 %.4f", s.c_str(),
             m.at({s, 1, 0.0}), m.at({s, 1, 1.0}), grouped.at({s, 1, 0.0}), grouped.at({s, 1, 1.0}));

    const double office = m.at({"office", 1, 1.0});
    const double station = m.at({"station", 1, 1.0});
    std::snprintf(buf, sizeof buf, "office %.4f vs station %.4f (need office >= station + 0.05)", office, station);
    v.line(4, office >= station + 0.05, "area-size trend", buf);
    note("alpha=0: office %.4f vs station %.4f", m.at({"office", 1, 0.0}), m.at({"station", 1, 0.0}));
}

void criterion3(Verdicts& v) {
    const SweepGrid grid = grid_of({"office", "hall"}, {1, 6}, {0.5, 1.0});
    const MeanTable m = sweep_means(grid, SplitMode::snapshot);
    bool ok = true;
    std::string detail;
    char buf[160];
    for (const auto& s : grid.scenarios)
        for (double a : grid.alphas) {
            const double one = m.at({s, 1, a});
            const double six = m.at({s, 6, a});
            ok = ok && six >= one - 0.02;
            std::snprintf(buf, sizeof buf, "%s%s a=%.1f %.4f vs %.4f", detail.empty() ? "" : ", ", s.c_str(), a, six, one);
            detail += buf;
        }
    v.line(3, ok, "receive-beam trend (6 rx vs 1 rx, need >= 1 rx - 0.02)", detail);
}

void criterion5(Verdicts& v) {
    struct Item {
        const char* name;
        testing::PropertyReport report;
    };
    std::vector<Item> items;
    items.push_back({"beam width closed form", testing::check_beam_width_grid()});
    items.push_back({"gain integral", testing::check_gain_integral_grid()});
    items.push_back({"segment-disk blockage", testing::check_segment_disk_blockage()});
    items.push_back({"FFNN gradients", testing::check_ffnn_gradients()});
    items.push_back({"critic gradients", testing::check_critic_gradients()});
    items.push_back({"standardized training split", testing::check_standardized_training_split()});
    items.push_back({"pipeline determinism", testing::check_pipeline_determinism()});
    bool ok = true;
    long failures = 0;
    for (const Item& i : items) {
        ok = ok && i.report.ok();
        failures += i.report.failures;
    }
    v.line(5, ok, "property suite", std::to_string(items.size()) + " properties, " + std::to_string(failures) + " failures");
    for (const Item& i : items) note("%-28s %s", i.name, i.report.summary().c_str());
}

void criterion6(Verdicts& v, double desk_baseline) {
    RlExperimentOptions opt;
    opt.base = base_config(SplitMode::snapshot);
    opt.base.seed = repetition_seed(kMasterSeed, 0);
    opt.base.behavior.p_react = 1.0;
    opt.rl.episodes = 5000;
    const auto t0 = std::chrono::steady_clock::now();
    const RlExperimentResult react = run_rl_experiment(opt);
    const double t_react = seconds_since(t0);
    const auto& curve = react.rl.accuracy_curve;
    const auto window = static_cast<std::size_t>(opt.rl.window);
    const double best = curve.size() > window ? *std::max_element(curve.begin() + static_cast<long>(window) - 1, curve.end()) : 0.0;

    opt.base.behavior.p_react = 0.0;
    opt.pretrained_critic = react.critic;
    const RlExperimentResult silent = run_rl_experiment(opt);
    const double final_alert = silent.rl.alert_rate.back();

    const bool part1 = best >= desk_baseline - 0.05;
    const bool part2 = final_alert < 0.05;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "p_react=1: best moving accuracy %.4f vs baseline %.4f (need >= %.4f); p_react=0: final alert rate %.4f (need < 0.05)",
                  best, desk_baseline, desk_baseline - 0.05, final_alert);
    v.line(6, part1 && part2, "RL convergence", buf);
    note("critic held-out separation %.4f (train %.4f); supervised baseline in the RL run %.4f; %.1f s",
         react.critic_holdout_accuracy, react.critic_train_accuracy, react.baseline.test.accuracy, t_react);
    note("p_react=1 final moving accuracy %.4f, final alert rate %.4f", curve.back(), react.rl.alert_rate.back());

    opt.base.behavior.p_react = 1.0;
    opt.pretrained_critic.reset();
    opt.rl.critic_mode = CriticMode::oracle;
    const RlExperimentResult oracle = run_rl_experiment(opt);
    const auto& oc = oracle.rl.accuracy_curve;
    note("ground-truth reward instead of the CNN critic: best moving accuracy %.4f, final %.4f",
         *std::max_element(oc.begin() + static_cast<long>(window) - 1, oc.end()), oc.back());
}

void criterion7(Verdicts& v) {
    const auto dir = testing::scratch_dir("acceptance-ingest");
    ScenarioConfig sc = build_scenario("office");
    ProtocolConfig proto;
    apply_scale(sc, proto, false);
    const std::uint64_t seed = repetition_seed(kMasterSeed, 0);
    const auto data = generate_dataset(sc, proto, ChannelParams{}, seed);
    write_container(dir / "export.bin", data.snapshots);
    write_labels(dir / "export.labels", data.snapshots);
    const IngestedDataset in = ingest_external(dir / "export.bin", dir / "export.labels", 32, 1, 12);

    bool ok = true;
    std::string detail;
    for (SplitMode mode : {SplitMode::snapshot, SplitMode::grouped}) {
        EvaluationConfig ev;
        ev.split_mode = mode;
        ev = seeded_evaluation(ev, seed, 32);
        const auto a = train_and_evaluate(data.snapshots, {all_pairs_area(12)}, ev);
        const auto b = train_and_evaluate(in.snapshots, in.areas, ev);
        const bool same = a.test.confusion == b.test.confusion && a.validation.confusion == b.validation.confusion &&
                          std::memcmp(&a.test.accuracy, &b.test.accuracy, sizeof(double)) == 0 &&
                          a.areas[0].model.params == b.areas[0].model.params;
        ok = ok && same;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s split: accuracy %.4f vs %.4f (%s)", detail.empty() ? "" : "; ",
                      mode == SplitMode::snapshot ? "snapshot" : "grouped", a.test.accuracy, b.test.accuracy,
                      same ? "bit-identical" : "differs");
        detail += buf;
    }
    ok = ok && dataset_checksum(in.snapshots) == dataset_checksum(data.snapshots);
    v.line(7, ok, "ingestion round trip", detail);
    std::filesystem::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance report"};
    bool strict = false;
    std::vector<int> only;
    app.add_flag("--strict", strict, "Exit with status 1 when any criterion fails");
    app.add_option("--only", only, "Evaluate only these criteria (1-7)");
    CLI11_PARSE(app, argc, argv);
    auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    const auto t0 = std::chrono::steady_clock::now();
    Verdicts v;
    double desk_baseline = 0.0;
    try {
        if (want(1) || want(6)) criterion1(v, desk_baseline);
        if (want(2) || want(4)) criteria2and4(v);
        if (want(3)) criterion3(v);
        if (want(5)) criterion5(v);
        if (want(6)) criterion6(v, desk_baseline);
        if (want(7)) criterion7(v);
    } catch (const std::exception& e) {
        std::printf("acceptance report aborted: %s\n", e.what());
        return 2;
    }
    std::printf("summary: %d passed, %d failed (%.0f s)\n", v.passed, v.failed, seconds_since(t0));
    return strict && v.failed > 0 ? 1 : 0;
}
