// SPDX-License-Identifier: Apache-2.0
//
// mmsense command-line tool.
//
//   mmsense scenario --name office                 print the full experiment config as JSON
//   mmsense gen --scenario office --out-dir d      simulate a snapshot dataset
//   mmsense train --dataset-dir d --out-dir m      split, standardize, train, report test metrics
//   mmsense eval --model-dir m --dataset-dir d     evaluate saved models
//   mmsense sweep --out sweep.csv                  accuracy grid
//   mmsense rl-train --out-dir r                   alert episodes with the critic reward
//   mmsense ingest --container c --labels l        validate (and optionally evaluate) external traces
//   mmsense report --in sweep.csv --out table.csv  long-format summary table
//
// The master seed comes from --seed, else MMSENSE_SEED, else 1. A --config
// JSON file is applied after the flags, so its values win.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "mmsense/harness.hpp"

using namespace mmsense;

namespace {

struct Common {
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string config;
    bool paper_scale = false;
    unsigned threads = 0;
};

std::uint64_t env_seed() {
    if (const char* s = std::getenv("MMSENSE_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("MMSENSE_SEED is not an unsigned integer: '") + s + "'");
        }
    }
    return 1;
}

ExperimentConfig finish(ExperimentConfig cfg, const Common& c) {
    cfg.seed = c.seed_given ? c.seed : env_seed();
    if (!c.config.empty()) cfg = apply_config(cfg, load_json(c.config));
    return cfg;
}

SplitMode parse_split(const std::string& s) {
    if (s == "grouped") return SplitMode::grouped;
    if (s == "snapshot") return SplitMode::snapshot;
    throw std::invalid_argument("split mode must be 'grouped' or 'snapshot'");
}

const char* split_name(SplitMode m) { return m == SplitMode::grouped ? "grouped" : "snapshot"; }

void print_metrics(const char* what, const Metrics& m) {
    std::printf("%s: accuracy %.4f  precision(v) %.4f  recall(v) %.4f  confusion [[%ld %ld] [%ld %ld]]  n=%ld\n", what,
                m.accuracy, m.precision[1], m.recall[1], m.confusion[0][0], m.confusion[0][1], m.confusion[1][0],
                m.confusion[1][1], m.total);
}

Json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"precision", {m.precision[0], m.precision[1]}},
            {"recall", {m.recall[0], m.recall[1]}},
            {"confusion", {{m.confusion[0][0], m.confusion[0][1]}, {m.confusion[1][0], m.confusion[1][1]}}},
            {"total", m.total}};
}

void write_json(const std::filesystem::path& p, const Json& j) {
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    os << j.dump(2) << '\n';
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Scenario flags shared by scenario/gen/rl-train.
struct ScenarioFlags {
    std::string name = "office";
    std::optional<int> n_tx, n_rx;
    std::optional<double> alpha, safe_distance;
    std::optional<int> max_people;

    void add(CLI::App* app) {
        app->add_option("--scenario,--name", name, "office | hall | underground | station")->capture_default_str();
        app->add_option("--n-tx", n_tx, "transmit beams per device (default 32)");
        app->add_option("--n-rx", n_rx, "receive beams per device (default 1)");
        app->add_option("--alpha", alpha, "beam directionality in [0, 1] (default 1)");
        app->add_option("--safe-distance", safe_distance, "meters (default 1.5)");
        app->add_option("--max-people", max_people, "people per arrangement (default 6)");
    }
    ScenarioConfig build(bool paper_scale, ProtocolConfig& protocol) const {
        ScenarioOverrides ov;
        ov.n_tx = n_tx;
        ov.n_rx = n_rx;
        ov.alpha = alpha;
        ov.safe_distance = safe_distance;
        ov.max_people = max_people;
        ScenarioConfig sc = build_scenario(name, ov);
        apply_scale(sc, protocol, paper_scale);
        return sc;
    }
};

struct TrainFlags {
    int hidden = 32;
    int epochs = 30;
    int batch = 1000;
    double lr = 0.001;
    std::string split = "grouped";

    void add(CLI::App* app) {
        app->add_option("--hidden", hidden, "hidden units")->capture_default_str();
        app->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        app->add_option("--batch-size", batch, "mini-batch size")->capture_default_str();
        app->add_option("--learning-rate", lr, "Adam step size")->capture_default_str();
        app->add_option("--split-mode", split, "grouped (by arrangement) | snapshot")->capture_default_str();
    }
    void apply(EvaluationConfig& e) const {
        e.hidden_units = hidden;
        e.train.epochs = epochs;
        e.train.batch_size = batch;
        e.train.adam.learning_rate = lr;
        e.split_mode = parse_split(split);
    }
};

struct DataFlags {
    std::string dataset_dir, container, labels;
    void add(CLI::App* app) {
        app->add_option("--dataset-dir", dataset_dir, "directory written by 'gen'");
        app->add_option("--container", container, "snapshot container (instead of --dataset-dir)");
        app->add_option("--labels", labels, "label sidecar for --container");
    }
    // Snapshots plus alert areas: from the saved scenario when available, else one all-pairs area.
    std::pair<SnapshotSet, std::vector<AlertArea>> load() const {
        std::filesystem::path c = container, l = labels;
        std::vector<AlertArea> areas;
        if (!dataset_dir.empty()) {
            const std::filesystem::path d = dataset_dir;
            c = d / "dataset.bin";
            l = d / "dataset.labels";
            if (std::filesystem::exists(d / "config.json"))
                areas = define_alert_areas(scenario_from_json(load_json(d / "config.json").at("scenario")));
        }
        if (c.empty() || l.empty()) throw std::invalid_argument("give --dataset-dir or both --container and --labels");
        SnapshotSet set = read_snapshot_set(c, l);
        if (areas.empty()) areas.push_back(all_pairs_area(set.n_pairs));
        return {std::move(set), std::move(areas)};
    }
};

int cmd_scenario(const Common& c, const ScenarioFlags& sf, const std::string& out) {
    ExperimentConfig cfg;
    cfg.scenario = sf.build(c.paper_scale, cfg.protocol);
    cfg = finish(cfg, c);
    const std::string text = to_json(cfg).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + out + "' for writing");
        os << text;
    }
    return 0;
}

int cmd_gen(const Common& c, const ScenarioFlags& sf, const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.scenario = sf.build(c.paper_scale, cfg.protocol);
    cfg = finish(cfg, c);
    const GeneratedDataset d = generate_dataset(cfg.scenario, cfg.protocol, cfg.channel, cfg.seed, c.threads);
    const std::filesystem::path dir = out_dir;
    std::filesystem::create_directories(dir);
    write_container(dir / "dataset.bin", d.snapshots);
    write_labels(dir / "dataset.labels", d.snapshots);
    {
        std::ofstream os(dir / "arrangements.txt", std::ios::trunc);
        for (const Arrangement& a : d.arrangements) write_arrangement(os, a);
        if (!os) throw std::runtime_error("write failed for '" + (dir / "arrangements.txt").string() + "'");
    }
    write_json(dir / "config.json", to_json(cfg));
    std::printf("%s: %zu snapshots x %zu values (%d pairs x %d tx x %d rx), %zu arrangements, %zu alert area(s)\n",
                cfg.scenario.name.c_str(), d.snapshots.count(), d.snapshots.dim(), d.snapshots.n_pairs,
                d.snapshots.n_tx, d.snapshots.n_rx, d.arrangements.size(), d.areas.size());
    std::printf("checksum %s  scenario_hash %s  seed %llu\n", hex(dataset_checksum(d.snapshots)).c_str(),
                hex(d.snapshots.scenario_hash).c_str(), static_cast<unsigned long long>(cfg.seed));
    return 0;
}

int cmd_train(const Common& c, const TrainFlags& tf, const DataFlags& df, const std::string& out_dir) {
    ExperimentConfig cfg;
    tf.apply(cfg.evaluation);
    cfg = finish(cfg, c);
    auto [set, areas] = df.load();
    const EvaluationConfig ev = seeded_evaluation(cfg.evaluation, cfg.seed, cfg.evaluation.hidden_units);
    const PipelineResult r = train_and_evaluate(set, areas, ev);
    for (std::size_t a = 0; a < r.areas.size(); ++a) {
        const std::string name = "area " + std::to_string(a) + " test";
        print_metrics(name.c_str(), r.areas[a].test);
    }
    print_metrics("pooled validation", r.validation);
    print_metrics("pooled test", r.test);
    if (!out_dir.empty()) {
        const std::filesystem::path dir = out_dir;
        std::filesystem::create_directories(dir);
        Json models = Json::array();
        for (std::size_t a = 0; a < r.areas.size(); ++a) {
            const std::string stem = "area" + std::to_string(a);
            r.areas[a].standardizer.save(dir / (stem + ".std"));
            save_checkpoint(dir / (stem + ".ffnn"), r.areas[a].model, stem + ".std");
            models.push_back({{"checkpoint", stem + ".ffnn"},
                              {"standardizer", stem + ".std"},
                              {"member_pairs", r.areas[a].area.member_pairs},
                              {"validation", metrics_json(r.areas[a].validation)},
                              {"test", metrics_json(r.areas[a].test)},
                              {"loss", r.areas[a].history.loss}});
        }
        write_json(dir / "models.json", {{"seed", cfg.seed},
                                         {"split_seed", ev.split_seed},
                                         {"split_mode", split_name(ev.split_mode)},
                                         {"train", to_json(cfg.evaluation)},
                                         {"models", models},
                                         {"validation", metrics_json(r.validation)},
                                         {"test", metrics_json(r.test)}});
    }
    return 0;
}

int cmd_eval(const DataFlags& df, const std::string& model_dir, const std::string& subset_name) {
    const std::filesystem::path dir = model_dir;
    const Json manifest = load_json(dir / "models.json");
    auto [set, areas] = df.load();
    const auto& models = manifest.at("models");
    if (models.size() != areas.size())
        throw std::runtime_error("model directory holds " + std::to_string(models.size()) + " area model(s), dataset has " +
                                 std::to_string(areas.size()) + " alert area(s)");
    std::vector<int> groups(set.count()), labels(set.count());
    for (std::size_t i = 0; i < set.count(); ++i) {
        groups[i] = set.labels[i].arrangement_id;
        labels[i] = static_cast<int>(set.labels[i].label);
    }
    std::vector<std::size_t> rows;
    if (subset_name == "all") {
        rows.resize(set.count());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    } else {
        const DatasetSplit split = split_dataset(groups, labels, manifest.at("split_seed").get<std::uint64_t>(),
                                                 parse_split(manifest.at("split_mode").get<std::string>()));
        if (subset_name == "test") rows = split.test;
        else if (subset_name == "validation") rows = split.validation;
        else if (subset_name == "train") rows = split.train;
        else throw std::invalid_argument("--subset must be train, validation, test or all");
    }
    std::array<std::array<long, 2>, 2> pooled{};
    for (std::size_t a = 0; a < areas.size(); ++a) {
        const FFNN model = load_checkpoint(dir / models[a].at("checkpoint").get<std::string>());
        const Standardizer st = Standardizer::load(dir / models[a].at("standardizer").get<std::string>());
        const auto columns = feature_columns(areas[a], set.n_tx, set.n_rx);
        Dataset d = subset(area_dataset(set, columns, areas.size() > 1 ? static_cast<int>(a) : -1), rows);
        st.transform(d);
        const Metrics m = evaluate(model, d);
        const std::string name = "area " + std::to_string(a) + " " + subset_name;
        print_metrics(name.c_str(), m);
        for (std::size_t t = 0; t < 2; ++t)
            for (std::size_t p = 0; p < 2; ++p) pooled[t][p] += m.confusion[t][p];
    }
    const std::string name = "pooled " + subset_name;
    print_metrics(name.c_str(), metrics_from_confusion(pooled));
    return 0;
}

int cmd_sweep(const Common& c, SweepGrid grid, const TrainFlags& tf, const std::string& out,
              const std::string& manifest, const std::string& cache_dir) {
    SweepOptions opt;
    tf.apply(opt.base.evaluation);
    opt.base = finish(opt.base, c);
    opt.paper_scale = c.paper_scale;
    opt.threads = c.threads;
    opt.cache_dir = cache_dir;
    const auto rows = run_sweep(grid, opt);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += !r.error.empty();
    if (out.empty() || out == "-") {
        write_sweep_csv(std::cout, grid.n_tx, rows);
    } else {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + out + "' for writing");
        write_sweep_csv(os, grid.n_tx, rows);
    }
    if (!manifest.empty()) write_json(manifest, run_manifest(grid, opt, opt.base.seed, rows, out));
    std::fprintf(stderr, "%zu cell(s), %zu failed\n", rows.size(), failed);
    return failed == 0 ? 0 : 3;
}

int cmd_rl(const Common& c, const ScenarioFlags& sf, const TrainFlags& tf, RlExperimentOptions opt,
           const std::string& critic_mode, const std::string& critic_file, const std::string& out_dir,
           std::optional<double> p_react) {
    opt.base.scenario = sf.build(c.paper_scale, opt.base.protocol);
    tf.apply(opt.base.evaluation);
    if (p_react) opt.base.behavior.p_react = *p_react;
    opt.base = finish(opt.base, c);
    opt.paper_scale = c.paper_scale;
    if (critic_mode == "cnn") opt.rl.critic_mode = CriticMode::cnn;
    else if (critic_mode == "oracle") opt.rl.critic_mode = CriticMode::oracle;
    else throw std::invalid_argument("--critic must be 'cnn' or 'oracle'");
    if (!critic_file.empty()) opt.pretrained_critic = load_critic(critic_file);

    const RlExperimentResult r = run_rl_experiment(opt);
    print_metrics("supervised baseline test", r.baseline.test);
    if (opt.rl.critic_mode == CriticMode::cnn)
        std::printf("critic accuracy: train %.4f  held-out %.4f\n", r.critic_train_accuracy, r.critic_holdout_accuracy);
    double best = 0.0;
    for (std::size_t i = static_cast<std::size_t>(std::max(0, opt.rl.window - 1)); i < r.rl.accuracy_curve.size(); ++i)
        best = std::max(best, r.rl.accuracy_curve[i]);
    if (!r.rl.accuracy_curve.empty())
        std::printf("episodes %zu  final moving accuracy %.4f  best %.4f  final alert rate %.4f\n", r.rl.episodes.size(),
                    r.rl.accuracy_curve.back(), best, r.rl.alert_rate.back());

    if (!out_dir.empty()) {
        const std::filesystem::path dir = out_dir;
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir / "curve.csv", std::ios::trunc);
            os << "episode,accuracy,alert_rate,reward\n";
            char buf[128];
            for (std::size_t i = 0; i < r.rl.accuracy_curve.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%g\n", i, r.rl.accuracy_curve[i], r.rl.alert_rate[i],
                              r.rl.episodes[i].reward);
                os << buf;
            }
        }
        const AreaModel& am = r.baseline.areas.front();
        const SnapshotSet& s = r.data.snapshots;
        write_episode_log(dir / "episodes.bin", dir / "episodes.labels", dir / "episodes.index", r.rl.episodes,
                          s.scenario_hash, static_cast<int>(am.area.member_pairs.size()), s.n_tx, s.n_rx);
        save_checkpoint(dir / "actor.ffnn", r.rl.actor, "standardizer.std");
        am.standardizer.save(dir / "standardizer.std");
        if (opt.rl.critic_mode == CriticMode::cnn) save_critic(dir / "critic.bin", r.critic);
        write_json(dir / "rl.json", {{"config", to_json(opt.base)},
                                     {"episodes", opt.rl.episodes},
                                     {"critic", critic_mode},
                                     {"baseline_test_accuracy", r.baseline.test.accuracy},
                                     {"critic_holdout_accuracy", r.critic_holdout_accuracy},
                                     {"best_moving_accuracy", best}});
    }
    return 0;
}

int cmd_ingest(const Common& c, const TrainFlags& tf, const std::string& container, const std::string& labels,
               std::optional<int> n_tx, std::optional<int> n_rx, std::optional<int> pairs, bool run_eval) {
    const IngestedDataset d = ingest_external(container, labels, n_tx, n_rx, pairs);
    const SnapshotSet& s = d.snapshots;
    std::size_t violations = 0;
    std::set<int> arrangements;
    for (const auto& l : s.labels) {
        violations += l.label == Label::violation;
        arrangements.insert(l.arrangement_id);
    }
    std::printf("%zu snapshots, %zu features (%d pairs x %d tx x %d rx), %zu arrangements, %zu violation snapshots\n",
                s.count(), s.dim(), s.n_pairs, s.n_tx, s.n_rx, arrangements.size(), violations);
    std::printf("checksum %s\n", hex(dataset_checksum(s)).c_str());
    if (run_eval) {
        ExperimentConfig cfg;
        tf.apply(cfg.evaluation);
        cfg = finish(cfg, c);
        const PipelineResult r =
            train_and_evaluate(s, d.areas, seeded_evaluation(cfg.evaluation, cfg.seed, cfg.evaluation.hidden_units));
        print_metrics("test", r.test);
    }
    return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
    std::ifstream is(in);
    if (!is) throw std::runtime_error("cannot open '" + in + "'");
    const auto rows = read_sweep_csv(is);
    if (out.empty() || out == "-") {
        write_report(std::cout, rows);
    } else {
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + out + "' for writing");
        write_report(os, rows);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passive social-distance sensing from mmWave beam-training measurements"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    auto* seed_opt = app.add_option("--seed", c.seed, "master seed (default: $MMSENSE_SEED, else 1)");
    app.add_option("--config", c.config, "JSON config applied after the flags");
    app.add_flag("--paper-scale", c.paper_scale, "200+200 arrangements x 200 trainings instead of 40+40 x 50");
    app.add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();

    ScenarioFlags sf;
    TrainFlags tf;
    DataFlags df;

    auto* scen = app.add_subcommand("scenario", "print the experiment configuration as JSON");
    sf.add(scen);
    std::string scen_out;
    scen->add_option("--out", scen_out, "output file (default stdout)");

    auto* gen = app.add_subcommand("gen", "simulate a snapshot dataset");
    sf.add(gen);
    std::string gen_out;
    gen->add_option("--out-dir", gen_out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train and test one classifier per alert area");
    tf.add(train);
    df.add(train);
    std::string train_out;
    train->add_option("--out-dir", train_out, "directory for checkpoints, standardizers and models.json");

    auto* ev = app.add_subcommand("eval", "evaluate saved models on a dataset");
    DataFlags ev_df;
    ev_df.add(ev);
    std::string model_dir, subset_name = "test";
    ev->add_option("--model-dir", model_dir, "directory written by 'train --out-dir'")->required();
    ev->add_option("--subset", subset_name, "train | validation | test | all")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "accuracy over scenarios, rx beams, alpha and hidden units");
    SweepGrid grid;
    TrainFlags sweep_tf;
    sweep_tf.add(sweep);
    std::string sweep_out, sweep_manifest, cache_dir;
    sweep->add_option("--scenarios", grid.scenarios, "scenario list")->delimiter(',')->capture_default_str();
    sweep->add_option("--n-rx", grid.n_rx, "receive beam counts")->delimiter(',')->capture_default_str();
    sweep->add_option("--n-tx", grid.n_tx, "transmit beams")->capture_default_str();
    sweep->add_option("--alphas", grid.alphas, "directionality values")->delimiter(',')->capture_default_str();
    sweep->add_option("--hidden-units", grid.hidden_units, "hidden layer sizes")->delimiter(',')->capture_default_str();
    sweep->add_option("--repetitions", grid.repetitions, "seeds per cell")->capture_default_str();
    sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
    sweep->add_option("--manifest", sweep_manifest, "JSON run manifest");
    sweep->add_option("--cache-dir", cache_dir, "reuse generated datasets from this directory");

    auto* rl = app.add_subcommand("rl-train", "train an actor from alert outcomes");
    ScenarioFlags rl_sf;
    TrainFlags rl_tf;
    rl_sf.add(rl);
    rl_tf.add(rl);
    RlExperimentOptions rl_opt;
    std::string critic_mode = "cnn", critic_file, rl_out;
    std::optional<double> p_react;
    rl->add_option("--episodes", rl_opt.rl.episodes, "episode budget")->capture_default_str();
    rl->add_option("--p-react", p_react, "probability a warned violating group disperses (default 0.8)");
    rl->add_option("--critic", critic_mode, "cnn | oracle")->capture_default_str();
    rl->add_flag("--joint-critic", rl_opt.rl.joint_critic, "keep training the critic during the episodes (experimental)");
    rl->add_option("--series-length", rl_opt.rl.series_length, "post-alert snapshots")->capture_default_str();
    rl->add_option("--critic-arrangements", rl_opt.critic_arrangements, "arrangements for critic pre-training")
        ->capture_default_str();
    rl->add_option("--critic-holdout", rl_opt.critic_holdout, "further arrangements scoring the critic")
        ->capture_default_str();
    rl->add_option("--critic-file", critic_file, "reuse a saved critic (critic.bin) instead of pre-training");
    rl->add_option("--window", rl_opt.rl.window, "moving-average window")->capture_default_str();
    rl->add_option("--out-dir", rl_out, "curve, episode log, actor and critic");

    auto* ingest = app.add_subcommand("ingest", "read an external snapshot container");
    TrainFlags ing_tf;
    ing_tf.add(ingest);
    std::string ing_c, ing_l;
    std::optional<int> ing_tx, ing_rx, ing_pairs;
    bool ing_eval = false;
    ingest->add_option("--container", ing_c, "snapshot container")->required();
    ingest->add_option("--labels", ing_l, "label sidecar")->required();
    ingest->add_option("--expect-n-tx", ing_tx, "reject unless the header has this many tx beams");
    ingest->add_option("--expect-n-rx", ing_rx, "reject unless the header has this many rx beams");
    ingest->add_option("--expect-pairs", ing_pairs, "reject unless the header has this many pairs");
    ingest->add_flag("--evaluate", ing_eval, "train and test a classifier on the ingested data");

    auto* rep = app.add_subcommand("report", "summarize a sweep CSV as a long-format table");
    std::string rep_in, rep_out;
    rep->add_option("--in", rep_in, "sweep CSV")->required();
    rep->add_option("--out", rep_out, "output (default stdout)");

    CLI11_PARSE(app, argc, argv);
    c.seed_given = seed_opt->count() > 0;

    try {
        if (*scen) return cmd_scenario(c, sf, scen_out);
        if (*gen) return cmd_gen(c, sf, gen_out);
        if (*train) return cmd_train(c, tf, df, train_out);
        if (*ev) return cmd_eval(ev_df, model_dir, subset_name);
        if (*sweep) return cmd_sweep(c, grid, sweep_tf, sweep_out, sweep_manifest, cache_dir);
        if (*rl) return cmd_rl(c, rl_sf, rl_tf, rl_opt, critic_mode, critic_file, rl_out, p_react);
        if (*ingest) return cmd_ingest(c, ing_tf, ing_c, ing_l, ing_tx, ing_rx, ing_pairs, ing_eval);
        if (*rep) return cmd_report(rep_in, rep_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
