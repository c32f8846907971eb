// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. Configurations cross the boundary as JSON text in the
// same schema the CLI reads; snapshot data comes back as NumPy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmsense/config.hpp"
#include "mmsense/harness.hpp"

namespace py = pybind11;
using namespace mmsense;

namespace {

struct PyDataset {
    SnapshotSet snapshots;
    std::vector<AlertArea> areas;
    ScenarioConfig scenario;  // empty name for ingested data
};

// Like the CLI, a config without a scenario section runs the office.
ExperimentConfig parse_config(const std::string& text) {
    Json j = text.empty() ? Json::object() : Json::parse(text);
    if (!j.contains("scenario")) j["scenario"] = {{"name", "office"}};
    return apply_config(ExperimentConfig{}, j);
}

// "desk" and "paper" replace the arrangement counts and trainings; "config" keeps them.
void apply_scale_name(const std::string& scale, ExperimentConfig& cfg) {
    if (scale == "desk" || scale == "paper") apply_scale(cfg.scenario, cfg.protocol, scale == "paper");
    else if (scale != "config") throw std::invalid_argument("scale must be 'desk', 'paper' or 'config'");
}

Json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"precision", {{"compliance", m.precision[0]}, {"violation", m.precision[1]}}},
            {"recall", {{"compliance", m.recall[0]}, {"violation", m.recall[1]}}},
            {"confusion", m.confusion},
            {"total", m.total}};
}

py::array_t<float> values_array(const SnapshotSet& s) {
    py::array_t<float> out({static_cast<py::ssize_t>(s.count()), static_cast<py::ssize_t>(s.dim())});
    if (!s.values.empty()) std::memcpy(out.mutable_data(), s.values.data(), s.values.size() * sizeof(float));
    return out;
}

template <class F>
py::array_t<int> int_column(const SnapshotSet& s, F&& f) {
    std::vector<int> col(s.count());
    for (std::size_t i = 0; i < s.count(); ++i) col[i] = f(s.labels[i]);
    return py::array_t<int>(static_cast<py::ssize_t>(col.size()), col.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mmWave beam-training crowd sensing: simulator, classifier and alert learning";

    py::register_exception<ContainerError>(m, "ContainerError", PyExc_ValueError);
    py::register_exception<SamplingError>(m, "SamplingError", PyExc_RuntimeError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

    m.def("beam_width", &beam_width, py::arg("n_beams"), py::arg("alpha"));
    m.def("scenario_names", &scenario_names);
    m.def(
        "derive_seed",
        [](std::uint64_t parent, const std::vector<std::uint64_t>& tags) { return derive_seed(parent, tags); },
        py::arg("parent"), py::arg("tags"));
    m.def("repetition_seed", &repetition_seed, py::arg("master_seed"), py::arg("repetition"));

    m.def(
        "resolve_config",
        [](const std::string& config_json) { return to_json(parse_config(config_json)).dump(); },
        py::arg("config_json") = "", "Full experiment config (JSON) after applying the given sections to the defaults.");

    py::class_<PyDataset>(m, "Dataset")
        .def_property_readonly("n_pairs", [](const PyDataset& d) { return d.snapshots.n_pairs; })
        .def_property_readonly("n_tx", [](const PyDataset& d) { return d.snapshots.n_tx; })
        .def_property_readonly("n_rx", [](const PyDataset& d) { return d.snapshots.n_rx; })
        .def_property_readonly("dim", [](const PyDataset& d) { return d.snapshots.dim(); })
        .def_property_readonly("scenario_hash", [](const PyDataset& d) { return d.snapshots.scenario_hash; })
        .def_property_readonly("checksum", [](const PyDataset& d) { return dataset_checksum(d.snapshots); })
        .def_property_readonly("n_areas", [](const PyDataset& d) { return d.areas.size(); })
        .def("__len__", [](const PyDataset& d) { return d.snapshots.count(); })
        .def("values", [](const PyDataset& d) { return values_array(d.snapshots); },
             "RSS values in dBm, shape (snapshots, pairs * n_tx * n_rx).")
        .def("labels", [](const PyDataset& d) {
            return int_column(d.snapshots, [](const SnapshotLabel& l) { return static_cast<int>(l.label); });
        }, "1 = violation, 0 = compliance.")
        .def("arrangement_ids", [](const PyDataset& d) {
            return int_column(d.snapshots, [](const SnapshotLabel& l) { return l.arrangement_id; });
        })
        .def("area_columns", [](const PyDataset& d, int area) {
            return feature_columns(d.areas.at(static_cast<std::size_t>(area)), d.snapshots.n_tx, d.snapshots.n_rx);
        }, py::arg("area"))
        .def("write", [](const PyDataset& d, const std::filesystem::path& container, const std::filesystem::path& labels) {
            write_container(container, d.snapshots);
            write_labels(labels, d.snapshots);
        }, py::arg("container"), py::arg("labels"));

    m.def(
        "generate",
        [](const std::string& config_json, const std::string& scale, unsigned threads) {
            ExperimentConfig cfg = parse_config(config_json);
            apply_scale_name(scale, cfg);
            py::gil_scoped_release release;
            GeneratedDataset g = generate_dataset(cfg.scenario, cfg.protocol, cfg.channel, cfg.seed, threads);
            return PyDataset{std::move(g.snapshots), std::move(g.areas), std::move(g.scenario)};
        },
        py::arg("config_json") = "", py::arg("scale") = "desk", py::arg("threads") = 0U);

    m.def(
        "ingest",
        [](const std::filesystem::path& container, const std::filesystem::path& labels, std::optional<int> n_tx,
           std::optional<int> n_rx, std::optional<int> pairs) {
            IngestedDataset in = ingest_external(container, labels, n_tx, n_rx, pairs);
            return PyDataset{std::move(in.snapshots), std::move(in.areas), ScenarioConfig{}};
        },
        py::arg("container"), py::arg("labels"), py::arg("n_tx") = py::none(), py::arg("n_rx") = py::none(),
        py::arg("pairs") = py::none());

    m.def(
        "evaluate",
        [](const PyDataset& d, const std::string& config_json) {
            const ExperimentConfig cfg = parse_config(config_json);
            const EvaluationConfig ev = seeded_evaluation(cfg.evaluation, cfg.seed, cfg.evaluation.hidden_units);
            PipelineResult r;
            {
                py::gil_scoped_release release;
                r = train_and_evaluate(d.snapshots, d.areas, ev);
            }
            Json areas = Json::array();
            for (const AreaModel& a : r.areas)
                areas.push_back({{"id", a.area.id}, {"features", a.columns.size()}, {"test", metrics_json(a.test)},
                                 {"validation", metrics_json(a.validation)}, {"loss", a.history.loss}});
            return Json{{"test", metrics_json(r.test)},
                        {"validation", metrics_json(r.validation)},
                        {"split", {{"train", r.split.train.size()}, {"validation", r.split.validation.size()}, {"test", r.split.test.size()}}},
                        {"areas", areas}}
                .dump();
        },
        py::arg("dataset"), py::arg("config_json") = "");

    m.def(
        "sweep",
        [](const std::string& grid_json, const std::string& config_json, const std::string& scale, unsigned threads,
           const std::string& cache_dir) {
            const Json gj = grid_json.empty() ? Json::object() : Json::parse(grid_json);
            SweepGrid grid;
            if (gj.contains("scenarios")) grid.scenarios = gj["scenarios"].get<std::vector<std::string>>();
            if (gj.contains("n_rx")) grid.n_rx = gj["n_rx"].get<std::vector<int>>();
            if (gj.contains("n_tx")) grid.n_tx = gj["n_tx"].get<int>();
            if (gj.contains("alphas")) grid.alphas = gj["alphas"].get<std::vector<double>>();
            if (gj.contains("hidden_units")) grid.hidden_units = gj["hidden_units"].get<std::vector<int>>();
            if (gj.contains("repetitions")) grid.repetitions = gj["repetitions"].get<int>();
            SweepOptions opt;
            opt.base = parse_config(config_json);
            opt.paper_scale = scale == "paper";
            opt.keep_base_counts = scale == "config";
            if (scale != "desk" && scale != "paper" && scale != "config")
                throw std::invalid_argument("scale must be 'desk', 'paper' or 'config'");
            opt.threads = threads;
            opt.cache_dir = cache_dir;
            std::ostringstream os;
            {
                py::gil_scoped_release release;
                write_sweep_csv(os, grid.n_tx, run_sweep(grid, opt));
            }
            return os.str();
        },
        py::arg("grid_json") = "", py::arg("config_json") = "", py::arg("scale") = "desk", py::arg("threads") = 0U,
        py::arg("cache_dir") = "");

    m.def(
        "report",
        [](const std::string& csv) {
            std::istringstream is(csv);
            std::ostringstream os;
            write_report(os, read_sweep_csv(is));
            return os.str();
        },
        py::arg("csv"));

    m.def(
        "rl_experiment",
        [](const std::string& config_json, const std::string& scale, int episodes, const std::string& critic,
           int critic_arrangements, int critic_holdout, int series_length, int window) {
            RlExperimentOptions opt;
            opt.base = parse_config(config_json);
            if (scale != "desk" && scale != "paper") throw std::invalid_argument("scale must be 'desk' or 'paper'");
            opt.paper_scale = scale == "paper";
            opt.rl.episodes = episodes;
            opt.rl.series_length = series_length;
            opt.rl.window = window;
            if (critic == "cnn") opt.rl.critic_mode = CriticMode::cnn;
            else if (critic == "oracle") opt.rl.critic_mode = CriticMode::oracle;
            else throw std::invalid_argument("critic must be 'cnn' or 'oracle'");
            opt.critic_arrangements = critic_arrangements;
            opt.critic_holdout = critic_holdout;
            RlExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_rl_experiment(opt);
            }
            long alerts = 0;
            for (const EpisodeRecord& e : r.rl.episodes) alerts += e.action;
            return Json{{"baseline", metrics_json(r.baseline.test)},
                        {"critic_train_accuracy", r.critic_train_accuracy},
                        {"critic_holdout_accuracy", r.critic_holdout_accuracy},
                        {"accuracy_curve", r.rl.accuracy_curve},
                        {"alert_rate", r.rl.alert_rate},
                        {"alerts", alerts}}
                .dump();
        },
        py::arg("config_json") = "", py::arg("scale") = "desk", py::arg("episodes") = 5000, py::arg("critic") = "cnn",
        py::arg("critic_arrangements") = 4000, py::arg("critic_holdout") = 400, py::arg("series_length") = 30,
        py::arg("window") = 200);
}
