// SPDX-License-Identifier: Apache-2.0

#include "mmsense/config.hpp"

#include <fstream>

namespace mmsense {

namespace {

Json rect_json(const Rect& r) { return Json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect rect_from(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("config: rectangle must be [x0, y0, x1, y1]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json codebook_json(const Codebook& c) {
    return {{"n_beams", c.n_beams}, {"alpha", c.alpha}, {"sidelobe_ratio", c.sidelobe_ratio}};
}

Codebook codebook_from(const Json& j, const Codebook& fallback) {
    return make_codebook(j.value("n_beams", fallback.n_beams), j.value("alpha", fallback.alpha),
                         j.value("sidelobe_ratio", fallback.sidelobe_ratio));
}

template <typename T>
void maybe(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Json to_json(const ScenarioConfig& cfg) {
    Json env = {{"width", cfg.environment.width}, {"height", cfg.environment.height}};
    env["obstacles"] = Json::array();
    env["walkable"] = Json::array();
    for (const Rect& r : cfg.environment.obstacles) env["obstacles"].push_back(rect_json(r));
    for (const Rect& r : cfg.environment.walkable) env["walkable"].push_back(rect_json(r));
    Json devices = Json::array();
    for (const Device& d : cfg.devices)
        devices.push_back({{"id", d.id},
                           {"position", {d.position.x, d.position.y}},
                           {"boresight_offset", d.boresight_offset},
                           {"desk_mounted", d.desk_mounted},
                           {"codebook_tx", codebook_json(d.codebook_tx)},
                           {"codebook_rx", codebook_json(d.codebook_rx)}});
    return {{"name", cfg.name},
            {"safe_distance", cfg.safe_distance},
            {"max_people", cfg.max_people},
            {"person_radius", cfg.person_radius},
            {"n_violation_arrangements", cfg.n_violation_arrangements},
            {"n_compliance_arrangements", cfg.n_compliance_arrangements},
            {"environment", env},
            {"devices", devices}};
}

ScenarioConfig scenario_from_json(const Json& j) {
    ScenarioOverrides ov;
    if (j.contains("safe_distance")) ov.safe_distance = j.at("safe_distance").get<double>();
    if (j.contains("max_people")) ov.max_people = j.at("max_people").get<int>();
    if (j.contains("person_radius")) ov.person_radius = j.at("person_radius").get<double>();
    if (j.contains("n_violation_arrangements")) ov.n_violation_arrangements = j.at("n_violation_arrangements").get<int>();
    if (j.contains("n_compliance_arrangements")) ov.n_compliance_arrangements = j.at("n_compliance_arrangements").get<int>();
    const Json cb = j.value("codebook", Json::object());
    if (cb.contains("n_tx")) ov.n_tx = cb.at("n_tx").get<int>();
    if (cb.contains("n_rx")) ov.n_rx = cb.at("n_rx").get<int>();
    if (cb.contains("alpha")) ov.alpha = cb.at("alpha").get<double>();
    if (cb.contains("sidelobe_ratio")) ov.sidelobe_ratio = cb.at("sidelobe_ratio").get<double>();

    ScenarioConfig cfg;
    if (j.contains("name") && j.at("name").get<std::string>() != "custom" &&
        !(j.contains("environment") && j.contains("devices"))) {
        cfg = build_scenario(j.at("name").get<std::string>(), ov);
    } else {
        // Free-form scene: everything comes from the file.
        cfg.name = j.value("name", std::string("custom"));
        cfg.safe_distance = ov.safe_distance.value_or(cfg.safe_distance);
        cfg.max_people = ov.max_people.value_or(cfg.max_people);
        cfg.person_radius = ov.person_radius.value_or(cfg.person_radius);
        cfg.n_violation_arrangements = ov.n_violation_arrangements.value_or(cfg.n_violation_arrangements);
        cfg.n_compliance_arrangements = ov.n_compliance_arrangements.value_or(cfg.n_compliance_arrangements);
        if (!j.contains("environment") || !j.contains("devices"))
            throw std::invalid_argument("config: a scenario without a known name needs 'environment' and 'devices'");
    }

    const Codebook tx_default = make_codebook(ov.n_tx.value_or(kDefaultTxBeams), ov.alpha.value_or(1.0),
                                              ov.sidelobe_ratio.value_or(0.01));
    const Codebook rx_default = make_codebook(ov.n_rx.value_or(kDefaultRxBeams), ov.alpha.value_or(1.0),
                                              ov.sidelobe_ratio.value_or(0.01));
    if (j.contains("environment")) {
        const Json& e = j.at("environment");
        Environment env;
        env.width = e.at("width").get<double>();
        env.height = e.at("height").get<double>();
        for (const Json& r : e.value("obstacles", Json::array())) env.obstacles.push_back(rect_from(r));
        for (const Json& r : e.value("walkable", Json::array())) env.walkable.push_back(rect_from(r));
        cfg.environment = env;
    }
    if (j.contains("devices")) {
        cfg.devices.clear();
        for (const Json& d : j.at("devices")) {
            Device dev;
            dev.id = d.value("id", static_cast<int>(cfg.devices.size()));
            const Json& p = d.at("position");
            dev.position = {p.at(0).get<double>(), p.at(1).get<double>()};
            dev.boresight_offset = d.value("boresight_offset", 0.0);
            dev.desk_mounted = d.value("desk_mounted", false);
            dev.codebook_tx = d.contains("codebook_tx") ? codebook_from(d.at("codebook_tx"), tx_default) : tx_default;
            dev.codebook_rx = d.contains("codebook_rx") ? codebook_from(d.at("codebook_rx"), rx_default) : rx_default;
            cfg.devices.push_back(dev);
        }
    }
    cfg.validate();
    return cfg;
}

Json to_json(const ChannelParams& p) {
    return {{"frequency", p.frequency},
            {"tx_power_dbm", p.tx_power_dbm},
            {"noise_floor_dbm", p.noise_floor_dbm},
            {"reflection_loss_db", p.reflection_loss_db},
            {"rss_noise_sigma_db", p.rss_noise_sigma_db},
            {"furniture_loss_db", p.furniture_loss_db}};
}

void update_from_json(ChannelParams& p, const Json& j) {
    maybe(j, "frequency", p.frequency);
    maybe(j, "tx_power_dbm", p.tx_power_dbm);
    maybe(j, "noise_floor_dbm", p.noise_floor_dbm);
    maybe(j, "reflection_loss_db", p.reflection_loss_db);
    maybe(j, "rss_noise_sigma_db", p.rss_noise_sigma_db);
    maybe(j, "furniture_loss_db", p.furniture_loss_db);
    p.validate();
}

Json to_json(const ProtocolConfig& p) {
    return {{"beacon_interval", p.beacon_interval}, {"trainings_per_arrangement", p.trainings_per_arrangement}};
}

void update_from_json(ProtocolConfig& p, const Json& j) {
    maybe(j, "beacon_interval", p.beacon_interval);
    maybe(j, "trainings_per_arrangement", p.trainings_per_arrangement);
    p.validate();
}

Json to_json(const EvaluationConfig& e) {
    return {{"batch_size", e.train.batch_size},
            {"epochs", e.train.epochs},
            {"learning_rate", e.train.adam.learning_rate},
            {"beta1", e.train.adam.beta1},
            {"beta2", e.train.adam.beta2},
            {"epsilon", e.train.adam.epsilon},
            {"hidden_units", e.hidden_units},
            {"split_mode", e.split_mode == SplitMode::grouped ? "grouped" : "snapshot"}};
}

void update_from_json(EvaluationConfig& e, const Json& j) {
    maybe(j, "batch_size", e.train.batch_size);
    maybe(j, "epochs", e.train.epochs);
    maybe(j, "learning_rate", e.train.adam.learning_rate);
    maybe(j, "beta1", e.train.adam.beta1);
    maybe(j, "beta2", e.train.adam.beta2);
    maybe(j, "epsilon", e.train.adam.epsilon);
    maybe(j, "hidden_units", e.hidden_units);
    if (j.contains("split_mode")) {
        const auto m = j.at("split_mode").get<std::string>();
        if (m == "grouped") e.split_mode = SplitMode::grouped;
        else if (m == "snapshot") e.split_mode = SplitMode::snapshot;
        else throw std::invalid_argument("config: split_mode must be 'grouped' or 'snapshot'");
    }
    e.train.validate();
}

Json to_json(const BehaviorModel& b) {
    return {{"p_react", b.p_react},
            {"react_delay", b.react_delay},
            {"react_duration", b.react_duration},
            {"jitter_sigma", b.jitter_sigma},
            {"margin", b.margin}};
}

void update_from_json(BehaviorModel& b, const Json& j) {
    maybe(j, "p_react", b.p_react);
    maybe(j, "react_delay", b.react_delay);
    maybe(j, "react_duration", b.react_duration);
    maybe(j, "jitter_sigma", b.jitter_sigma);
    maybe(j, "margin", b.margin);
    b.validate();
}

std::uint64_t scenario_hash(const ScenarioConfig& cfg) {
    const std::string s = to_json(cfg).dump();
    return fnv1a(s.data(), s.size());
}

ExperimentConfig apply_config(ExperimentConfig base, const Json& j) {
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scenario")) {
        Json s = j.at("scenario");
        if (!s.contains("name") && !(s.contains("environment") && s.contains("devices"))) s["name"] = base.scenario.name;
        base.scenario = scenario_from_json(s);
    }
    if (j.contains("channel")) update_from_json(base.channel, j.at("channel"));
    if (j.contains("protocol")) update_from_json(base.protocol, j.at("protocol"));
    if (j.contains("train")) update_from_json(base.evaluation, j.at("train"));
    if (j.contains("behavior")) update_from_json(base.behavior, j.at("behavior"));
    return base;
}

Json to_json(const ExperimentConfig& cfg) {
    return {{"seed", cfg.seed},
            {"scenario", to_json(cfg.scenario)},
            {"channel", to_json(cfg.channel)},
            {"protocol", to_json(cfg.protocol)},
            {"train", to_json(cfg.evaluation)},
            {"behavior", to_json(cfg.behavior)}};
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config '" + path.string() + "'");
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error("config '" + path.string() + "': " + e.what());
    }
}

}  // namespace mmsense
