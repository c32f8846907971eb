// SPDX-License-Identifier: Apache-2.0
//
// Alert-driven reinforcement learning. The classifier (actor) decides whether
// to raise an alert; a simulated crowd reacts to correct alerts by spreading
// out; a 1-D convolutional critic watches the post-alert snapshots and rewards
// the actor when it sees people move.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mmsense/adam.hpp"
#include "mmsense/beamtraining.hpp"
#include "mmsense/classifier.hpp"
#include "mmsense/features.hpp"

namespace mmsense {

struct BehaviorModel {
    double p_react = 0.8;        // probability a violating group rearranges after an alert
    int react_delay = 5;         // snapshots before people start moving
    int react_duration = 20;     // snapshots to complete the rearrangement
    double jitter_sigma = 0.03;  // m, per-coordinate jitter of people who stay put
    double margin = 0.1;         // m, extra spacing beyond the safe distance after reacting

    void validate() const;
};

/// Positions of everyone, one entry per post-alert snapshot.
using Trajectory = std::vector<std::vector<Person>>;

struct ReactionOutcome {
    Trajectory frames;
    bool reacted = false;
};

/// Final spread-out placement: people closer than safe_distance + margin are pushed
/// apart along the line joining them (clamped to their walkable region) until
/// every pair clears it.
std::vector<Person> dispersed_positions(const ScenarioConfig& cfg, const std::vector<Person>& people, double margin,
                                        Rng& rng);

/// Post-alert trajectory over n_frames snapshots.
///
/// A true violation that receives an alert reacts with probability p_react:
/// people hold still for react_delay frames, then move linearly to the
/// dispersed placement over react_duration frames and stay there. In every
/// other case (no alert, false alert, no reaction) positions stay fixed up to
/// Gaussian jitter, truncated at 3 sigma per coordinate and clamped to the walkable area.
ReactionOutcome simulate_reaction(const ScenarioConfig& cfg, const Arrangement& arrangement, bool alert_issued,
                                  const BehaviorModel& behavior, int n_frames, Rng& rng);

/// Two valid 1-D convolutions over time (kernel 5, 16 then 32 channels, relu),
/// global average pooling, and a dense layer to a sigmoid "reaction" probability.
///
/// Flat parameter layout: conv1 weights [16][5][F], conv1 bias [16],
/// conv2 weights [32][5][16], conv2 bias [32], dense weights [32], dense bias.
class CriticCNN {
public:
    static constexpr int kKernel = 5;
    static constexpr int kChannels1 = 16;
    static constexpr int kChannels2 = 32;

    CriticCNN() = default;
    /// Zero-initialized critic for T x F inputs (T >= 9).
    CriticCNN(int series_length, int feature_dim);
    /// He-uniform weights, zero biases.
    static CriticCNN initialized(int series_length, int feature_dim, std::uint64_t seed);

    int series_length() const { return t_; }
    int feature_dim() const { return f_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    /// Input is row-major [time][feature]. Throws std::invalid_argument on a size mismatch.
    double logit(std::span<const double> series) const;
    double score(std::span<const double> series) const;

    /// Binary cross-entropy against `target` (0 or 1) and its gradient w.r.t. params.
    double loss_and_gradient(std::span<const double> series, double target, std::vector<double>& grad) const;

private:
    std::size_t c1w() const { return 0; }
    std::size_t c1b() const { return c1w() + static_cast<std::size_t>(kChannels1 * f_ * kKernel); }
    std::size_t c2w() const { return c1b() + kChannels1; }
    std::size_t c2b() const { return c2w() + static_cast<std::size_t>(kChannels2 * kChannels1 * kKernel); }
    std::size_t dw() const { return c2b() + kChannels2; }
    std::size_t db() const { return dw() + kChannels2; }

    struct Activations;
    double run(std::span<const double> series, Activations* keep) const;

    int t_ = 0;
    int f_ = 0;
    std::vector<double> params_;
};

/// Forward pass of the critic on a post-alert feature series.
double critic_score(const CriticCNN& critic, std::span<const double> series);

/// Everything needed to turn arrangements into standardized model inputs.
struct SensingContext {
    const ScenarioConfig& scenario;
    const ChannelParams& channel;
    const std::vector<std::size_t>& columns;  // alert-area feature columns
    const Standardizer& standardizer;
    const AlertArea* area = nullptr;  // when set, labels and reactions are restricted to this area
};

/// One standardized feature vector measured for a set of people positions.
std::vector<double> sense(const SensingContext& ctx, const std::vector<Person>& people, Rng& rng,
                          std::vector<float>* raw = nullptr);

/// Standardized post-alert series, row-major [time][feature].
std::vector<double> sense_series(const SensingContext& ctx, const Trajectory& frames, Rng& rng,
                                 std::vector<float>* raw = nullptr);

struct CriticExample {
    std::vector<double> series;
    int reacted = 0;
};

/// Simulator-labeled episodes for critic pre-training: for each arrangement,
/// violations get an alert with a forced reaction (label 1) and one with no
/// reaction (label 0); compliant arrangements get a false alert (label 0).
/// Each arrangement contributes `repeats` such rounds with fresh noise and jitter.
std::vector<CriticExample> make_critic_examples(const SensingContext& ctx, const std::vector<Arrangement>& arrangements,
                                                const BehaviorModel& behavior, int series_length, std::uint64_t seed,
                                                int repeats = 1);

struct CriticTrainConfig {
    int epochs = 30;
    int batch_size = 16;
    AdamConfig adam{0.003};
    std::uint64_t seed = 0;
};

/// Mini-batch Adam on binary cross-entropy. Returns the mean loss per epoch.
std::vector<double> train_critic(CriticCNN& critic, const std::vector<CriticExample>& examples,
                                 const CriticTrainConfig& cfg);

/// Fraction of examples whose score falls on the correct side of 0.5.
double critic_accuracy(const CriticCNN& critic, const std::vector<CriticExample>& examples);

/// +1 when an alert is followed by a detected reaction, -1 when it is not, 0 without an alert.
double episode_reward(bool alert_issued, double critic_score, double threshold = 0.5);

enum class CriticMode {
    cnn,     // reward from the CNN critic
    oracle,  // reward from the simulator's ground truth (did people react)
};

struct RlConfig {
    int episodes = 5000;
    double epsilon_start = 0.2;
    double epsilon_end = 0.01;
    AdamConfig adam{};
    int series_length = 30;
    int window = 200;  // moving-average window for the learning curves
    double critic_threshold = 0.5;
    CriticMode critic_mode = CriticMode::cnn;
    bool joint_critic = false;  // experimental: keep training the critic on its own observations
    std::uint64_t seed = 0;
};

struct EpisodeRecord {
    int arrangement_id = 0;
    Label true_label = Label::compliance;
    int greedy_action = 0;
    int action = 0;
    bool explored = false;
    bool reacted = false;
    double critic_score = 0.0;
    double reward = 0.0;
    std::vector<float> pre_alert;    // raw snapshot values for the alert area
    std::vector<float> post_alert;   // raw [time][feature] values, empty without an alert
};

struct RlResult {
    FFNN actor;
    std::vector<double> accuracy_curve;  // moving average of greedy-decision correctness
    std::vector<double> alert_rate;      // moving average of alerts actually issued
    std::vector<EpisodeRecord> episodes;
};

/// Policy-gradient update for one episode: ascends reward * grad log pi(action | x)
/// with the given optimizer. No-op for zero reward.
void apply_episode_update(FFNN& actor, Adam& optimizer, std::span<const double> x, int action, double reward);

/// Runs `cfg.episodes` alert episodes over arrangements drawn uniformly from `pool`.
/// Exploration is epsilon-greedy with epsilon decaying linearly from
/// epsilon_start to epsilon_end across the budget. Throws DivergenceError when
/// the actor's parameters stop being finite.
RlResult rl_train(const FFNN& actor, CriticCNN& critic, const SensingContext& ctx,
                  const std::vector<Arrangement>& pool, const BehaviorModel& behavior, const RlConfig& cfg);

/// Re-applies the logged updates in order, starting from `actor`.
FFNN rl_replay(const FFNN& actor, const std::vector<EpisodeRecord>& episodes, const Standardizer& standardizer,
               const AdamConfig& adam);

// Episode log: a snapshot container holding the alert area's measurements
// (its member pairs x n_tx x n_rx per row), one row for each episode's
// pre-alert snapshot followed by its post-alert series, plus an index file
// with one line per episode:
//   <arrangement_id> <true label> <greedy> <action> <explored> <reacted> <critic score %.17g> <reward> <first row> <rows>
void write_episode_log(const std::filesystem::path& container, const std::filesystem::path& labels,
                       const std::filesystem::path& index, const std::vector<EpisodeRecord>& episodes,
                       std::uint64_t scenario_hash, int n_pairs, int n_tx, int n_rx);
std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& container,
                                            const std::filesystem::path& labels,
                                            const std::filesystem::path& index);

void save_critic(const std::filesystem::path& path, const CriticCNN& critic);
CriticCNN load_critic(const std::filesystem::path& path);

}  // namespace mmsense
