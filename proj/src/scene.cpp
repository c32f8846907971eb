// SPDX-License-Identifier: Apache-2.0

#include "mmsense/scene.hpp"

#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "mmsense/random.hpp"

namespace mmsense {

std::string_view to_string(Label l) { return l == Label::violation ? "violation" : "compliance"; }

Label parse_label(std::string_view s) {
    if (s == "violation" || s == "1") return Label::violation;
    if (s == "compliance" || s == "0") return Label::compliance;
    throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

void Environment::validate() const {
    if (!(width > 0.0 && height > 0.0)) throw std::invalid_argument("environment: width and height must be positive");
    const Rect b = bounds();
    for (const Rect& w : walkable) {
        if (!w.valid()) throw std::invalid_argument("environment: degenerate walkable rectangle");
        if (!b.contains_rect(w)) throw std::invalid_argument("environment: walkable rectangle exceeds bounds");
        for (const Rect& o : obstacles)
            if (w.overlaps(o)) throw std::invalid_argument("environment: walkable region overlaps an obstacle");
    }
    for (const Rect& o : obstacles)
        if (!o.valid()) throw std::invalid_argument("environment: degenerate obstacle rectangle");
}

void ScenarioConfig::validate() const {
    environment.validate();
    if (!(safe_distance > 0.0)) throw std::invalid_argument("scenario: safe_distance must be positive");
    if (max_people < 1) throw std::invalid_argument("scenario: max_people must be >= 1");
    if (!(person_radius > 0.0)) throw std::invalid_argument("scenario: person_radius must be positive");
    if (n_violation_arrangements < 0 || n_compliance_arrangements < 0)
        throw std::invalid_argument("scenario: arrangement counts must be non-negative");
    std::set<int> ids;
    const Rect b = environment.bounds();
    for (const Device& d : devices) {
        if (!ids.insert(d.id).second) throw std::invalid_argument("scenario: duplicate device id " + std::to_string(d.id));
        if (!b.contains(d.position)) throw std::invalid_argument("scenario: device outside environment bounds");
    }
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"office", "hall", "underground", "station"};
    return names;
}

namespace {

constexpr double kInset = 0.5;

std::vector<Vec2> corner_layout(double w, double h) {
    return {{kInset, kInset}, {w - kInset, kInset}, {w - kInset, h - kInset}, {kInset, h - kInset}};
}

// Devices spaced along a platform's long (y) axis, alternating long edges.
std::vector<Vec2> platform_layout(const Rect& platform, int count, bool first_on_low_edge) {
    std::vector<Vec2> out;
    for (int i = 0; i < count; ++i) {
        const double y = platform.y0 + platform.height() * (i + 1) / (count + 1);
        const bool low = (i % 2 == 0) == first_on_low_edge;
        out.push_back({low ? platform.x0 + kInset : platform.x1 - kInset, y});
    }
    return out;
}

}  // namespace

ScenarioConfig build_scenario(std::string_view name, const ScenarioOverrides& ov) {
    ScenarioConfig cfg;
    cfg.name = std::string(name);
    std::vector<Vec2> positions;
    if (name == "office" || name == "hall") {
        const double side = name == "office" ? 5.0 : 10.0;
        cfg.environment = {side, side, {}, {{0.0, 0.0, side, side}}};
        positions = corner_layout(side, side);
    } else if (name == "underground") {
        const Rect platform{0.0, 0.0, 5.0, 20.0};
        cfg.environment = {10.0, 20.0, {}, {platform}};
        positions = platform_layout(platform, 4, true);
    } else if (name == "station") {
        const Rect west{0.0, 0.0, 5.0, 20.0};
        const Rect east{15.0, 0.0, 20.0, 20.0};
        cfg.environment = {20.0, 20.0, {{5.0, 0.0, 15.0, 20.0}}, {west, east}};
        positions = platform_layout(west, 2, true);
        for (Vec2 p : platform_layout(east, 2, false)) positions.push_back(p);
    } else {
        throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
    }

    if (ov.safe_distance) cfg.safe_distance = *ov.safe_distance;
    if (ov.max_people) cfg.max_people = *ov.max_people;
    if (ov.person_radius) cfg.person_radius = *ov.person_radius;
    if (ov.n_violation_arrangements) cfg.n_violation_arrangements = *ov.n_violation_arrangements;
    if (ov.n_compliance_arrangements) cfg.n_compliance_arrangements = *ov.n_compliance_arrangements;

    const double alpha = ov.alpha.value_or(1.0);
    const double rho = ov.sidelobe_ratio.value_or(0.01);
    const Codebook tx = make_codebook(ov.n_tx.value_or(kDefaultTxBeams), alpha, rho);
    const Codebook rx = make_codebook(ov.n_rx.value_or(kDefaultRxBeams), alpha, rho);
    for (std::size_t i = 0; i < positions.size(); ++i)
        cfg.devices.push_back(Device{static_cast<int>(i), positions[i], 0.0, tx, rx, false});

    cfg.validate();
    return cfg;
}

double min_pair_distance(const std::vector<Person>& people) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < people.size(); ++i)
        for (std::size_t j = i + 1; j < people.size(); ++j)
            best = std::min(best, distance(people[i].center, people[j].center));
    return best;
}

Label label_of(const std::vector<Person>& people, double safe_distance) {
    return min_pair_distance(people) < safe_distance ? Label::violation : Label::compliance;
}

bool placement_valid(const Environment& env, const Person& p) {
    bool inside = false;
    for (const Rect& w : env.walkable) inside = inside || w.contains_disk(p.center, p.radius);
    if (!inside) return false;
    for (const Rect& o : env.obstacles)
        if (disk_overlaps_rect(p.center, p.radius, o)) return false;
    return true;
}

Arrangement sample_arrangement(const ScenarioConfig& cfg, Label target, std::uint64_t rng_seed, int max_attempts) {
    const Environment& env = cfg.environment;
    const double r = cfg.person_radius;
    const int min_people = target == Label::violation ? 2 : 1;
    if (cfg.max_people < min_people)
        throw SamplingError("sample_arrangement: max_people too small for a violation");

    // Regions usable for a disk of radius r, weighted by their usable area.
    std::vector<Rect> regions;
    std::vector<double> weights;
    for (const Rect& w : env.walkable) {
        const Rect inner{w.x0 + r, w.y0 + r, w.x1 - r, w.y1 - r};
        if (inner.x1 >= inner.x0 && inner.y1 >= inner.y0) {
            regions.push_back(inner);
            weights.push_back(std::max(inner.width() * inner.height(), 1e-12));
        }
    }
    if (regions.empty()) throw SamplingError("sample_arrangement: no walkable region fits a person");

    Rng rng(rng_seed);
    std::uniform_int_distribution<int> count_dist(min_people, cfg.max_people);
    std::discrete_distribution<std::size_t> region_dist(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = count_dist(rng);

    auto draw_point = [&]() {
        const Rect& reg = regions[region_dist(rng)];
        return Vec2{reg.x0 + unit(rng) * reg.width(), reg.y0 + unit(rng) * reg.height()};
    };

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Person> people;
        people.reserve(static_cast<std::size_t>(n));
        bool failed = false;
        for (int k = 0; k < n && !failed; ++k) {
            bool placed = false;
            for (int tries = 0; tries < 1000 && !placed; ++tries) {
                const Person cand{draw_point(), r};
                if (!placement_valid(env, cand)) continue;
                bool clear = true;
                for (const Person& q : people) clear = clear && distance(q.center, cand.center) >= 2.0 * r;
                if (clear) {
                    people.push_back(cand);
                    placed = true;
                }
            }
            failed = !placed;
        }
        if (failed) continue;
        if (label_of(people, cfg.safe_distance) == target) return Arrangement{std::move(people), target, rng_seed};
    }
    throw SamplingError("sample_arrangement: budget of " + std::to_string(max_attempts) + " attempts exhausted for " +
                        std::string(to_string(target)) + " with " + std::to_string(n) + " people");
}

void write_arrangement(std::ostream& os, const Arrangement& a) {
    os << "arrangement " << to_string(a.label) << ' ' << a.seed << ' ' << a.people.size() << '\n';
    char buf[96];
    for (const Person& p : a.people) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.center.x, p.center.y, p.radius);
        os << buf;
    }
}

Arrangement read_arrangement(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_arrangement: missing header line");
    std::istringstream hs(line);
    std::string magic, label;
    Arrangement a;
    std::size_t count = 0;
    if (!(hs >> magic >> label >> a.seed >> count) || magic != "arrangement")
        throw std::runtime_error("read_arrangement: malformed header '" + line + "'");
    a.label = parse_label(label);
    for (std::size_t i = 0; i < count; ++i) {
        Person p;
        if (!std::getline(is, line)) throw std::runtime_error("read_arrangement: expected " + std::to_string(count) + " people");
        std::istringstream ps(line);
        if (!(ps >> p.center.x >> p.center.y >> p.radius))
            throw std::runtime_error("read_arrangement: malformed person line '" + line + "'");
        a.people.push_back(p);
    }
    return a;
}

}  // namespace mmsense
