// SPDX-License-Identifier: Apache-2.0

#include "mmsense/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "mmsense/random.hpp"

namespace mmsense {

void BehaviorModel::validate() const {
    if (!(p_react >= 0.0 && p_react <= 1.0)) throw std::invalid_argument("behavior: p_react must lie in [0, 1]");
    if (react_delay < 0 || react_duration < 0) throw std::invalid_argument("behavior: delays must be >= 0");
    if (!(jitter_sigma >= 0.0) || !(margin >= 0.0)) throw std::invalid_argument("behavior: jitter and margin must be >= 0");
}

namespace {

// Walkable rectangle holding the person (the first one containing the center).
const Rect* home_region(const Environment& env, Vec2 c) {
    for (const Rect& w : env.walkable)
        if (w.contains(c)) return &w;
    return env.walkable.empty() ? nullptr : &env.walkable.front();
}

Vec2 clamp_into(const Rect* region, Vec2 c, double r) {
    if (region == nullptr) return c;
    return {std::clamp(c.x, region->x0 + r, std::max(region->x0 + r, region->x1 - r)),
            std::clamp(c.y, region->y0 + r, std::max(region->y0 + r, region->y1 - r))};
}

}  // namespace

std::vector<Person> dispersed_positions(const ScenarioConfig& cfg, const std::vector<Person>& people, double margin,
                                        Rng& rng) {
    const double target = cfg.safe_distance + margin;
    std::vector<Person> out = people;
    std::vector<const Rect*> homes;
    for (const Person& p : people) homes.push_back(home_region(cfg.environment, p.center));

    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (int iter = 0; iter < 2000; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = i + 1; j < out.size(); ++j) {
                Vec2 d = out[j].center - out[i].center;
                double len = norm(d);
                if (len >= target) continue;
                if (len < 1e-9) {
                    const double a = angle(rng);
                    d = {std::cos(a), std::sin(a)};
                    len = 1.0;
                } else {
                    d = (1.0 / len) * d;
                }
                // Split the deficit (plus a hair) between both people along their joining line.
                const double push = 0.5 * (target - norm(out[j].center - out[i].center)) + 1e-3;
                out[i].center = clamp_into(homes[i], out[i].center - push * d, out[i].radius);
                out[j].center = clamp_into(homes[j], out[j].center + push * d, out[j].radius);
                moved = true;
            }
        if (!moved) return out;
    }
    // Crowded corner: redraw the people involved in remaining conflicts until the group clears the target.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        bool clear = true;
        for (std::size_t i = 0; i < out.size() && clear; ++i)
            for (std::size_t j = i + 1; j < out.size() && clear; ++j)
                if (distance(out[i].center, out[j].center) < target) {
                    const Rect* h = homes[j];
                    if (h == nullptr) break;
                    const double r = out[j].radius;
                    out[j].center = {h->x0 + r + unit(rng) * std::max(0.0, h->width() - 2 * r),
                                     h->y0 + r + unit(rng) * std::max(0.0, h->height() - 2 * r)};
                    clear = false;
                }
        if (clear) return out;
    }
    throw SamplingError("dispersed_positions: could not spread the group out");
}

ReactionOutcome simulate_reaction(const ScenarioConfig& cfg, const Arrangement& arrangement, bool alert_issued,
                                  const BehaviorModel& behavior, int n_frames, Rng& rng) {
    behavior.validate();
    ReactionOutcome out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Always draw, so the stream layout is the same for every branch.
    const double draw = unit(rng);
    out.reacted = alert_issued && arrangement.label == Label::violation && draw < behavior.p_react;

    const std::vector<Person>& start = arrangement.people;
    if (out.reacted) {
        const std::vector<Person> end = dispersed_positions(cfg, start, behavior.margin, rng);
        for (int t = 0; t < n_frames; ++t) {
            double s = 1.0;
            if (behavior.react_duration > 0)
                s = std::clamp(static_cast<double>(t - behavior.react_delay + 1) / behavior.react_duration, 0.0, 1.0);
            else if (t < behavior.react_delay)
                s = 0.0;
            std::vector<Person> frame = start;
            for (std::size_t i = 0; i < frame.size(); ++i)
                frame[i].center = start[i].center + s * (end[i].center - start[i].center);
            out.frames.push_back(std::move(frame));
        }
        return out;
    }

    std::normal_distribution<double> jitter(0.0, 1.0);
    const double cap = 3.0;
    for (int t = 0; t < n_frames; ++t) {
        std::vector<Person> frame = start;
        for (Person& p : frame) {
            const double dx = std::clamp(jitter(rng), -cap, cap) * behavior.jitter_sigma;
            const double dy = std::clamp(jitter(rng), -cap, cap) * behavior.jitter_sigma;
            p.center = clamp_into(home_region(cfg.environment, p.center), p.center + Vec2{dx, dy}, p.radius);
        }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Critic

struct CriticCNN::Activations {
    std::vector<double> z1;  // [c1][t1] pre-activation
    std::vector<double> a1;
    std::vector<double> z2;  // [c2][t2]
    std::vector<double> a2;
    std::array<double, kChannels2> pool{};
};

CriticCNN::CriticCNN(int series_length, int feature_dim) : t_(series_length), f_(feature_dim) {
    if (series_length < 2 * (kKernel - 1) + 1) throw std::invalid_argument("CriticCNN: series too short for two convolutions");
    if (feature_dim < 1) throw std::invalid_argument("CriticCNN: feature_dim must be positive");
    params_.assign(db() + 1, 0.0);
}

CriticCNN CriticCNN::initialized(int series_length, int feature_dim, std::uint64_t seed) {
    CriticCNN c(series_length, feature_dim);
    Rng rng(derive_seed(seed, {tag(Stream::critic)}));
    auto fill = [&](std::size_t from, std::size_t to, double fan_in) {
        std::uniform_real_distribution<double> u(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
        for (std::size_t i = from; i < to; ++i) c.params_[i] = u(rng);
    };
    fill(c.c1w(), c.c1b(), static_cast<double>(kKernel * feature_dim));
    fill(c.c2w(), c.c2b(), static_cast<double>(kKernel * kChannels1));
    fill(c.dw(), c.db(), static_cast<double>(kChannels2));
    return c;
}

double CriticCNN::run(std::span<const double> x, Activations* keep) const {
    if (x.size() != static_cast<std::size_t>(t_) * static_cast<std::size_t>(f_))
        throw std::invalid_argument("CriticCNN: series has " + std::to_string(x.size()) + " values, expected " +
                                    std::to_string(t_) + " x " + std::to_string(f_));
    const int t1 = t_ - (kKernel - 1);
    const int t2 = t1 - (kKernel - 1);
    const auto F = static_cast<std::size_t>(f_);
    const double* p = params_.data();

    Activations local;
    Activations& a = keep != nullptr ? *keep : local;
    a.z1.assign(static_cast<std::size_t>(kChannels1 * t1), 0.0);
    a.a1.assign(a.z1.size(), 0.0);
    for (int c = 0; c < kChannels1; ++c)
        for (int t = 0; t < t1; ++t) {
            double acc = p[c1b() + static_cast<std::size_t>(c)];
            for (int k = 0; k < kKernel; ++k) {
                const double* w = p + c1w() + (static_cast<std::size_t>(c) * kKernel + static_cast<std::size_t>(k)) * F;
                const double* xr = x.data() + static_cast<std::size_t>(t + k) * F;
                for (std::size_t f = 0; f < F; ++f) acc += w[f] * xr[f];
            }
            const auto i = static_cast<std::size_t>(c * t1 + t);
            a.z1[i] = acc;
            a.a1[i] = acc > 0.0 ? acc : 0.0;
        }

    a.z2.assign(static_cast<std::size_t>(kChannels2 * t2), 0.0);
    a.a2.assign(a.z2.size(), 0.0);
    for (int c = 0; c < kChannels2; ++c)
        for (int t = 0; t < t2; ++t) {
            double acc = p[c2b() + static_cast<std::size_t>(c)];
            for (int k = 0; k < kKernel; ++k)
                for (int ci = 0; ci < kChannels1; ++ci)
                    acc += p[c2w() + static_cast<std::size_t>((c * kKernel + k) * kChannels1 + ci)] *
                           a.a1[static_cast<std::size_t>(ci * t1 + t + k)];
            const auto i = static_cast<std::size_t>(c * t2 + t);
            a.z2[i] = acc;
            a.a2[i] = acc > 0.0 ? acc : 0.0;
        }

    double logit = p[db()];
    for (int c = 0; c < kChannels2; ++c) {
        double s = 0.0;
        for (int t = 0; t < t2; ++t) s += a.a2[static_cast<std::size_t>(c * t2 + t)];
        a.pool[static_cast<std::size_t>(c)] = s / t2;
        logit += p[dw() + static_cast<std::size_t>(c)] * a.pool[static_cast<std::size_t>(c)];
    }
    return logit;
}

double CriticCNN::logit(std::span<const double> series) const { return run(series, nullptr); }

double CriticCNN::score(std::span<const double> series) const {
    const double z = logit(series);
    return 1.0 / (1.0 + std::exp(-z));
}

double CriticCNN::loss_and_gradient(std::span<const double> x, double target, std::vector<double>& grad) const {
    Activations a;
    const double z = run(x, &a);
    const int t1 = t_ - (kKernel - 1);
    const int t2 = t1 - (kKernel - 1);
    const auto F = static_cast<std::size_t>(f_);
    const double* p = params_.data();
    grad.assign(params_.size(), 0.0);

    const double loss = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
    const double g = 1.0 / (1.0 + std::exp(-z)) - target;

    grad[db()] = g;
    std::vector<double> dz2(a.z2.size(), 0.0);
    for (int c = 0; c < kChannels2; ++c) {
        grad[dw() + static_cast<std::size_t>(c)] = g * a.pool[static_cast<std::size_t>(c)];
        const double dpool = g * p[dw() + static_cast<std::size_t>(c)] / t2;
        for (int t = 0; t < t2; ++t) {
            const auto i = static_cast<std::size_t>(c * t2 + t);
            dz2[i] = a.z2[i] > 0.0 ? dpool : 0.0;
        }
    }

    std::vector<double> da1(a.a1.size(), 0.0);
    for (int c = 0; c < kChannels2; ++c)
        for (int t = 0; t < t2; ++t) {
            const double d = dz2[static_cast<std::size_t>(c * t2 + t)];
            if (d == 0.0) continue;
            grad[c2b() + static_cast<std::size_t>(c)] += d;
            for (int k = 0; k < kKernel; ++k)
                for (int ci = 0; ci < kChannels1; ++ci) {
                    const auto wi = c2w() + static_cast<std::size_t>((c * kKernel + k) * kChannels1 + ci);
                    const auto ai = static_cast<std::size_t>(ci * t1 + t + k);
                    grad[wi] += d * a.a1[ai];
                    da1[ai] += d * p[wi];
                }
        }

    for (int c = 0; c < kChannels1; ++c)
        for (int t = 0; t < t1; ++t) {
            const auto i = static_cast<std::size_t>(c * t1 + t);
            if (a.z1[i] <= 0.0 || da1[i] == 0.0) continue;
            const double d = da1[i];
            grad[c1b() + static_cast<std::size_t>(c)] += d;
            for (int k = 0; k < kKernel; ++k) {
                double* gw = grad.data() + c1w() + (static_cast<std::size_t>(c) * kKernel + static_cast<std::size_t>(k)) * F;
                const double* xr = x.data() + static_cast<std::size_t>(t + k) * F;
                for (std::size_t f = 0; f < F; ++f) gw[f] += d * xr[f];
            }
        }
    return loss;
}

double critic_score(const CriticCNN& critic, std::span<const double> series) { return critic.score(series); }

// ---------------------------------------------------------------------------
// Sensing

std::vector<double> sense(const SensingContext& ctx, const std::vector<Person>& people, Rng& rng,
                          std::vector<float>* raw) {
    const std::vector<double> clean = clean_measurements(ctx.scenario, people, ctx.channel);
    std::vector<double> x(ctx.columns.size());
    for (std::size_t c = 0; c < ctx.columns.size(); ++c) {
        const auto v = static_cast<float>(measured_rss(clean[ctx.columns[c]], ctx.channel, rng));
        if (raw != nullptr) raw->push_back(v);
        x[c] = static_cast<double>(v);
    }
    ctx.standardizer.apply(x);
    return x;
}

std::vector<double> sense_series(const SensingContext& ctx, const Trajectory& frames, Rng& rng,
                                 std::vector<float>* raw) {
    std::vector<double> out;
    out.reserve(frames.size() * ctx.columns.size());
    for (const auto& people : frames) {
        const auto x = sense(ctx, people, rng, raw);
        out.insert(out.end(), x.begin(), x.end());
    }
    return out;
}

namespace {

Label context_label(const SensingContext& ctx, const Arrangement& a) {
    return ctx.area != nullptr ? area_label(*ctx.area, a.people, ctx.scenario.safe_distance) : a.label;
}

// Reaction restricted to the alert area: people outside it stay where they are.
ReactionOutcome react_in_area(const SensingContext& ctx, const Arrangement& a, bool alert, const BehaviorModel& behavior,
                              int n_frames, Rng& rng) {
    if (ctx.area == nullptr) return simulate_reaction(ctx.scenario, a, alert, behavior, n_frames, rng);
    Arrangement inside{{}, context_label(ctx, a), a.seed};
    std::vector<Person> outside;
    for (const Person& p : a.people) (ctx.area->contains(p.center) ? inside.people : outside).push_back(p);
    ReactionOutcome r = simulate_reaction(ctx.scenario, inside, alert, behavior, n_frames, rng);
    for (auto& frame : r.frames) frame.insert(frame.end(), outside.begin(), outside.end());
    return r;
}

}  // namespace

std::vector<CriticExample> make_critic_examples(const SensingContext& ctx, const std::vector<Arrangement>& arrangements,
                                                const BehaviorModel& behavior, int series_length, std::uint64_t seed,
                                                int repeats) {
    BehaviorModel always = behavior;
    always.p_react = 1.0;
    BehaviorModel never = behavior;
    never.p_react = 0.0;
    std::vector<CriticExample> out;
    for (std::size_t i = 0; i < arrangements.size(); ++i) {
        const Arrangement& a = arrangements[i];
        const bool violation = context_label(ctx, a) == Label::violation;
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng(derive_seed(seed, {tag(Stream::critic), static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(rep)}));
            if (violation) {
                const auto moved = react_in_area(ctx, a, true, always, series_length, rng);
                out.push_back({sense_series(ctx, moved.frames, rng), 1});
                const auto stayed = react_in_area(ctx, a, true, never, series_length, rng);
                out.push_back({sense_series(ctx, stayed.frames, rng), 0});
            } else {
                const auto stayed = react_in_area(ctx, a, true, behavior, series_length, rng);
                out.push_back({sense_series(ctx, stayed.frames, rng), 0});
            }
        }
    }
    return out;
}

std::vector<double> train_critic(CriticCNN& critic, const std::vector<CriticExample>& examples,
                                 const CriticTrainConfig& cfg) {
    if (examples.empty()) throw std::invalid_argument("train_critic: no examples");
    if (cfg.batch_size < 1) throw std::invalid_argument("train_critic: batch_size must be >= 1");
    Adam opt(critic.params().size(), cfg.adam);
    std::vector<std::size_t> order(examples.size());
    std::vector<double> g, acc;
    std::vector<double> losses;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, {tag(Stream::shuffle), static_cast<std::uint64_t>(epoch)}));
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            acc.assign(critic.params().size(), 0.0);
            for (std::size_t k = start; k < end; ++k) {
                const CriticExample& ex = examples[order[k]];
                total += critic.loss_and_gradient(ex.series, ex.reacted, g);
                for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (double& v : acc) v *= inv;
            opt.step(critic.params(), acc);
        }
        const double mean = total / static_cast<double>(order.size());
        if (!std::isfinite(mean)) throw DivergenceError("train_critic: non-finite loss at epoch " + std::to_string(epoch));
        losses.push_back(mean);
    }
    return losses;
}

double critic_accuracy(const CriticCNN& critic, const std::vector<CriticExample>& examples) {
    if (examples.empty()) return 0.0;
    std::size_t ok = 0;
    for (const CriticExample& ex : examples) ok += (critic.score(ex.series) > 0.5) == (ex.reacted == 1);
    return static_cast<double>(ok) / static_cast<double>(examples.size());
}

double episode_reward(bool alert_issued, double score, double threshold) {
    if (!alert_issued) return 0.0;
    return score > threshold ? 1.0 : -1.0;
}

// ---------------------------------------------------------------------------
// Actor training

void apply_episode_update(FFNN& actor, Adam& optimizer, std::span<const double> x, int action, double reward) {
    if (reward == 0.0) return;
    std::vector<double> g;
    log_prob_gradient(actor, x, action, g);
    // Adam minimizes, so feed the negated ascent direction.
    for (double& v : g) v *= -reward;
    optimizer.step(actor.params, g);
    for (double v : actor.params)
        if (!std::isfinite(v)) throw DivergenceError("rl: actor parameters became non-finite");
}

RlResult rl_train(const FFNN& actor, CriticCNN& critic, const SensingContext& ctx, const std::vector<Arrangement>& pool,
                  const BehaviorModel& behavior, const RlConfig& cfg) {
    behavior.validate();
    RlResult res;
    res.actor = actor;
    if (cfg.episodes <= 0) return res;
    if (pool.empty()) throw std::invalid_argument("rl_train: empty arrangement pool");
    if (cfg.critic_mode == CriticMode::cnn &&
        (critic.series_length() != cfg.series_length || critic.feature_dim() != static_cast<int>(ctx.columns.size())))
        throw std::invalid_argument("rl_train: critic dimensions do not match the series");

    Adam opt(res.actor.n_params(), cfg.adam);
    Adam critic_opt(critic.params().size(), cfg.adam);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double correct_sum = 0.0;
    double alert_sum = 0.0;
    std::vector<double> g;

    for (int e = 0; e < cfg.episodes; ++e) {
        Rng rng(derive_seed(cfg.seed, {tag(Stream::episode), static_cast<std::uint64_t>(e)}));
        EpisodeRecord rec;
        const std::size_t idx = pick(rng);
        const Arrangement& arr = pool[idx];
        rec.arrangement_id = static_cast<int>(idx);
        rec.true_label = context_label(ctx, arr);

        const std::vector<double> x = sense(ctx, arr.people, rng, &rec.pre_alert);
        rec.greedy_action = predict(res.actor, x);
        const double frac = cfg.episodes > 1 ? static_cast<double>(e) / (cfg.episodes - 1) : 1.0;
        const double eps = cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
        rec.explored = unit(rng) < eps;
        const double coin = unit(rng);
        rec.action = rec.explored ? (coin < 0.5 ? 1 : 0) : rec.greedy_action;

        if (rec.action == 1) {
            const auto outcome = react_in_area(ctx, arr, true, behavior, cfg.series_length, rng);
            rec.reacted = outcome.reacted;
            const std::vector<double> series = sense_series(ctx, outcome.frames, rng, &rec.post_alert);
            if (cfg.critic_mode == CriticMode::oracle) {
                rec.critic_score = rec.reacted ? 1.0 : 0.0;
            } else {
                rec.critic_score = critic.score(series);
                if (cfg.joint_critic) {
                    critic.loss_and_gradient(series, rec.reacted ? 1.0 : 0.0, g);
                    critic_opt.step(critic.params(), g);
                }
            }
        }
        rec.reward = episode_reward(rec.action == 1, rec.critic_score, cfg.critic_threshold);
        apply_episode_update(res.actor, opt, x, rec.action, rec.reward);

        correct_sum += rec.greedy_action == static_cast<int>(rec.true_label);
        alert_sum += rec.action;
        const auto w = static_cast<std::size_t>(std::max(1, cfg.window));
        if (res.episodes.size() >= w) {
            const EpisodeRecord& old = res.episodes[res.episodes.size() - w];
            correct_sum -= old.greedy_action == static_cast<int>(old.true_label);
            alert_sum -= old.action;
        }
        const double n = static_cast<double>(std::min(w, res.episodes.size() + 1));
        res.accuracy_curve.push_back(correct_sum / n);
        res.alert_rate.push_back(alert_sum / n);
        res.episodes.push_back(std::move(rec));
    }
    return res;
}

FFNN rl_replay(const FFNN& actor, const std::vector<EpisodeRecord>& episodes, const Standardizer& standardizer,
               const AdamConfig& adam) {
    FFNN out = actor;
    Adam opt(out.n_params(), adam);
    std::vector<double> x;
    for (const EpisodeRecord& rec : episodes) {
        x.assign(rec.pre_alert.begin(), rec.pre_alert.end());
        standardizer.apply(x);
        apply_episode_update(out, opt, x, rec.action, rec.reward);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

void write_episode_log(const std::filesystem::path& container, const std::filesystem::path& labels,
                       const std::filesystem::path& index, const std::vector<EpisodeRecord>& episodes,
                       std::uint64_t scenario_hash, int n_pairs, int n_tx, int n_rx) {
    SnapshotSet set;
    set.scenario_hash = scenario_hash;
    set.n_pairs = n_pairs;
    set.n_tx = n_tx;
    set.n_rx = n_rx;
    const std::size_t dim = set.dim();
    std::ofstream os(index, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + index.string() + "' for writing");
    char score[40];
    for (const EpisodeRecord& r : episodes) {
        if (r.pre_alert.size() != dim || r.post_alert.size() % dim != 0)
            throw std::invalid_argument("write_episode_log: episode rows do not match the container dimensions");
        const std::size_t first = set.count();
        const SnapshotLabel lab{r.true_label, r.arrangement_id, {}};
        set.values.insert(set.values.end(), r.pre_alert.begin(), r.pre_alert.end());
        set.labels.push_back(lab);
        for (std::size_t k = 0; k < r.post_alert.size() / dim; ++k) {
            set.values.insert(set.values.end(), r.post_alert.begin() + static_cast<std::ptrdiff_t>(k * dim),
                              r.post_alert.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim));
            set.labels.push_back(lab);
        }
        std::snprintf(score, sizeof score, "%.17g", r.critic_score);
        os << r.arrangement_id << ' ' << to_string(r.true_label) << ' ' << r.greedy_action << ' ' << r.action << ' '
           << r.explored << ' ' << r.reacted << ' ' << score << ' ' << r.reward << ' ' << first << ' '
           << set.count() - first << '\n';
    }
    if (!os) throw std::runtime_error("write failed for '" + index.string() + "'");
    write_container(container, set);
    write_labels(labels, set);
}

std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& container,
                                            const std::filesystem::path& labels,
                                            const std::filesystem::path& index) {
    const SnapshotSet set = read_snapshot_set(container, labels);
    std::ifstream is(index);
    if (!is) throw std::runtime_error("cannot open '" + index.string() + "'");
    std::vector<EpisodeRecord> out;
    std::string line, lab;
    std::size_t line_no = 0;
    const std::size_t dim = set.dim();
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        EpisodeRecord r;
        std::size_t first = 0, rows = 0;
        int explored = 0, reacted = 0;
        if (!(ss >> r.arrangement_id >> lab >> r.greedy_action >> r.action >> explored >> reacted >> r.critic_score >>
              r.reward >> first >> rows) ||
            rows < 1 || first + rows > set.count())
            throw std::runtime_error(index.string() + ":" + std::to_string(line_no) + ": malformed episode line");
        r.true_label = parse_label(lab);
        r.explored = explored != 0;
        r.reacted = reacted != 0;
        r.pre_alert.assign(set.row(first), set.row(first) + dim);
        if (rows > 1) r.post_alert.assign(set.row(first + 1), set.row(first + 1) + (rows - 1) * dim);
        out.push_back(std::move(r));
    }
    return out;
}

void save_critic(const std::filesystem::path& path, const CriticCNN& critic) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << "MMSENSE-CRITIC 1\n"
       << "series_length " << critic.series_length() << '\n'
       << "feature_dim " << critic.feature_dim() << '\n'
       << "params " << critic.params().size() << '\n'
       << "data\n";
    detail::write_f64_blob(os, critic.params());
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

CriticCNN load_critic(const std::filesystem::path& path) {
    const std::string file = path.string();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + file + "'");
    std::size_t offset = 0;
    const auto f = detail::read_header(is, "MMSENSE-CRITIC 1", file, offset);
    CriticCNN c(static_cast<int>(detail::header_int(f, "series_length", file)),
                static_cast<int>(detail::header_int(f, "feature_dim", file)));
    const auto n = static_cast<std::size_t>(detail::header_int(f, "params", file));
    if (n != c.params().size()) throw std::runtime_error(file + ": parameter count does not match dimensions");
    c.params() = detail::read_f64_blob(is, n, file, offset);
    return c;
}

}  // namespace mmsense
