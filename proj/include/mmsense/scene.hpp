// SPDX-License-Identifier: Apache-2.0
//
// Environments, fixed device deployments and labeled people arrangements.
//
// The world is a horizontal plane. People are disks, obstacles are fully
// absorbing axis-aligned rectangles, and people may only stand inside the
// walkable rectangles. A group violates the safe distance when any two
// centers are strictly closer than the threshold.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmsense/codebook.hpp"
#include "mmsense/geometry.hpp"

namespace mmsense {

enum class Label : int { compliance = 0, violation = 1 };

std::string_view to_string(Label l);
Label parse_label(std::string_view s);

struct Environment {
    double width = 0.0;
    double height = 0.0;
    std::vector<Rect> obstacles;
    std::vector<Rect> walkable;

    Rect bounds() const { return {0.0, 0.0, width, height}; }
    /// Throws std::invalid_argument when an invariant does not hold.
    void validate() const;
};

struct Device {
    int id = 0;
    Vec2 position;
    double boresight_offset = 0.0;
    Codebook codebook_tx;
    Codebook codebook_rx;
    // Emulates furniture between this device and its peers (extra loss on every pair it joins).
    bool desk_mounted = false;
};

struct Person {
    Vec2 center;
    double radius = 0.25;
};

struct Arrangement {
    std::vector<Person> people;
    Label label = Label::compliance;
    std::uint64_t seed = 0;
};

struct ScenarioConfig {
    std::string name;
    Environment environment;
    std::vector<Device> devices;
    double safe_distance = 1.5;
    int max_people = 6;
    double person_radius = 0.25;
    int n_violation_arrangements = 200;
    int n_compliance_arrangements = 200;

    void validate() const;
};

/// Partial configuration applied on top of a named scenario.
struct ScenarioOverrides {
    std::optional<double> safe_distance;
    std::optional<int> max_people;
    std::optional<double> person_radius;
    std::optional<int> n_violation_arrangements;
    std::optional<int> n_compliance_arrangements;
    std::optional<int> n_tx;
    std::optional<int> n_rx;
    std::optional<double> alpha;
    std::optional<double> sidelobe_ratio;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultTxBeams = 32;
inline constexpr int kDefaultRxBeams = 1;

/// Builds one of "office", "hall", "underground", "station".
///
/// Default deployments: office/hall put one device in each corner, inset 0.5 m.
/// Underground spaces 4 devices evenly along the platform, alternating between
/// the two long edges (0.5 m inset). Station puts 2 devices per platform at 1/3
/// and 2/3 of its length, on opposite long edges.
ScenarioConfig build_scenario(std::string_view name, const ScenarioOverrides& overrides = {});

/// Names accepted by build_scenario.
const std::vector<std::string>& scenario_names();

/// Violation iff some pair of centers is strictly closer than safe_distance.
Label label_of(const std::vector<Person>& people, double safe_distance);

/// Minimum center-to-center distance, +inf with fewer than two people.
double min_pair_distance(const std::vector<Person>& people);

/// True when the person disk sits inside a walkable rectangle and clear of every obstacle.
bool placement_valid(const Environment& env, const Person& p);

/// Rejection-samples a placement whose label equals target.
///
/// The head count is drawn once, uniformly from 1..max_people (compliance) or
/// 2..max_people (violation). People are dropped uniformly over the walkable
/// area without overlapping each other; whole placements are redrawn until the
/// label matches. Throws SamplingError when the attempt budget runs out.
Arrangement sample_arrangement(const ScenarioConfig& cfg, Label target, std::uint64_t rng_seed,
                               int max_attempts = 200000);

// Line-oriented arrangement format:
//   arrangement <label> <seed> <count>
//   <x> <y> <radius>        (count lines, %.17g)
void write_arrangement(std::ostream& os, const Arrangement& a);
Arrangement read_arrangement(std::istream& is);

}  // namespace mmsense
