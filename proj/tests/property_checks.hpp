// SPDX-License-Identifier: Apache-2.0
//
// Randomized property checks shared by the unit tests and the acceptance
// report. Every check compares library output against an oracle written
// independently here.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmsense/codebook.hpp"
#include "mmsense/geometry.hpp"
#include "mmsense/harness.hpp"
#include "mmsense/pipeline.hpp"
#include "mmsense/rl.hpp"

namespace mmsense::testing {

struct PropertyReport {
    long cases = 0;
    long failures = 0;
    std::string first_failure;

    void fail(const std::string& what) {
        if (failures++ == 0) first_failure = what;
    }
    bool ok() const { return cases > 0 && failures == 0; }
    std::string summary() const {
        std::ostringstream os;
        os << cases << " cases, " << failures << " failures";
        if (failures) os << " (first: " << first_failure << ")";
        return os.str();
    }
};

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mmsense-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// The (N, alpha) grid: N = 1..20, alpha = k/19 for k = 0..19.
template <class F>
void for_each_codebook_cell(F&& f) {
    for (int n = 1; n <= 20; ++n)
        for (int k = 0; k < 20; ++k) f(n, k / 19.0);
}

inline PropertyReport check_beam_width_grid() {
    PropertyReport r;
    for_each_codebook_cell([&](int n, double alpha) {
        ++r.cases;
        const double expect = 2.0 * std::numbers::pi * (1.0 - (1.0 - 1.0 / n) * alpha);
        const double got = beam_width(n, alpha);
        if (std::abs(got - expect) > 1e-12)
            r.fail("N=" + std::to_string(n) + " alpha=" + std::to_string(alpha));
    });
    return r;
}

// Integrates a piecewise-constant pattern exactly: coarse samples locate the
// intervals holding a jump, bisection pins each jump to machine precision.
inline double integrate_piecewise_constant(const Codebook& cb, int beam) {
    constexpr int kIntervals = 720;
    const double step = 2.0 * std::numbers::pi / kIntervals;
    double total = 0.0;
    for (int i = 0; i < kIntervals; ++i) {
        const double a = i * step;
        const double b = (i + 1) * step;
        const double ga = cb.gain(beam, a);
        const double gb = cb.gain(beam, std::nextafter(b, a));
        if (ga == gb) {
            total += ga * (b - a);
            continue;
        }
        double lo = a;
        double hi = b;
        for (int it = 0; it < 200 && std::nextafter(lo, hi) < hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (cb.gain(beam, mid) == ga) lo = mid; else hi = mid;
        }
        total += ga * (hi - a) + gb * (b - hi);
    }
    return total;
}

inline PropertyReport check_gain_integral_grid() {
    PropertyReport r;
    const double two_pi = 2.0 * std::numbers::pi;
    for_each_codebook_cell([&](int n, double alpha) {
        const Codebook cb = make_codebook(n, alpha);
        for (int beam = 0; beam < n; ++beam) {
            ++r.cases;
            const double integral = integrate_piecewise_constant(cb, beam);
            if (std::abs(integral - two_pi) > 1e-6 * two_pi)
                r.fail("N=" + std::to_string(n) + " alpha=" + std::to_string(alpha) + " beam=" +
                       std::to_string(beam) + " integral=" + std::to_string(integral));
        }
    });
    return r;
}

// Dense sampling along the segment; any sample inside the disk counts as a hit.
inline bool sampled_segment_hits_disk(Vec2 a, Vec2 b, Vec2 c, double radius) {
    constexpr int kSamples = 20000;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = static_cast<double>(i) / kSamples;
        const double x = a.x + t * (b.x - a.x);
        const double y = a.y + t * (b.y - a.y);
        if ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) < radius * radius) return true;
    }
    return false;
}

inline PropertyReport check_segment_disk_blockage(int n_cases = 10000, std::uint64_t seed = 7) {
    PropertyReport r;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    std::uniform_real_distribution<double> rad(0.1, 1.5);
    long hits = 0;
    for (int i = 0; i < n_cases; ++i) {
        const Vec2 a{coord(rng), coord(rng)};
        const Vec2 b{coord(rng), coord(rng)};
        // Half the disks are centered near the segment so both outcomes are well represented.
        const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Vec2 near{a.x + t * (b.x - a.x) + rad(rng) - 0.8, a.y + t * (b.y - a.y) + rad(rng) - 0.8};
        const Vec2 c = i % 2 ? near : Vec2{coord(rng), coord(rng)};
        const double radius = rad(rng);
        ++r.cases;
        const bool expect = sampled_segment_hits_disk(a, b, c, radius);
        hits += expect;
        if (segment_hits_disk(a, b, c, radius) != expect) r.fail("case " + std::to_string(i));
    }
    if (hits == 0 || hits == n_cases) r.fail("degenerate case mix");
    return r;
}

// Accepts |analytic - numeric| <= tol * max(|analytic|, |numeric|, 1e-3);
// the floor keeps near-zero components from amplifying rounding noise.
inline bool gradients_agree(double analytic, double numeric, double tol = 1e-5) {
    return std::abs(analytic - numeric) <= tol * std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

inline PropertyReport check_ffnn_gradients(int instances = 100, std::uint64_t seed = 11) {
    PropertyReport r;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(1, 6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    constexpr double h = 1e-6;
    for (int inst = 0; inst < instances; ++inst) {
        const int dim = small(rng);
        const int hidden = small(rng);
        const int rows = small(rng);
        FFNN m(dim, hidden);
        for (double& p : m.params) p = gauss(rng);
        Dataset d;
        d.dim = static_cast<std::size_t>(dim);
        for (int i = 0; i < rows * dim; ++i) d.x.push_back(gauss(rng));
        for (int i = 0; i < rows; ++i) {
            d.y.push_back(static_cast<int>(rng() & 1U));
            d.groups.push_back(i);
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(rows));
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::vector<double> grad;
        loss_and_gradient(m, d, idx, grad);
        // Loss oracle: mean cross-entropy from the forward pass.
        auto loss = [&](const FFNN& model) {
            double s = 0.0;
            for (int i = 0; i < rows; ++i) s -= std::log(forward(model, d.row(static_cast<std::size_t>(i)))[static_cast<std::size_t>(d.y[static_cast<std::size_t>(i)])]);
            return s / rows;
        };
        for (std::size_t k = 0; k < m.params.size(); ++k) {
            ++r.cases;
            FFNN plus = m, minus = m;
            plus.params[k] += h;
            minus.params[k] -= h;
            const double numeric = (loss(plus) - loss(minus)) / (2 * h);
            if (!gradients_agree(grad[k], numeric))
                r.fail("loss instance " + std::to_string(inst) + " param " + std::to_string(k));
        }
        // log pi(action | x) for the policy-gradient path.
        const int action = static_cast<int>(rng() & 1U);
        log_prob_gradient(m, d.row(0), action, grad);
        for (std::size_t k = 0; k < m.params.size(); ++k) {
            ++r.cases;
            FFNN plus = m, minus = m;
            plus.params[k] += h;
            minus.params[k] -= h;
            const double numeric = (std::log(forward(plus, d.row(0))[static_cast<std::size_t>(action)]) -
                                    std::log(forward(minus, d.row(0))[static_cast<std::size_t>(action)])) / (2 * h);
            if (!gradients_agree(grad[k], numeric))
                r.fail("log-prob instance " + std::to_string(inst) + " param " + std::to_string(k));
        }
    }
    return r;
}

inline PropertyReport check_critic_gradients(int instances = 100, std::uint64_t seed = 13) {
    PropertyReport r;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    constexpr double h = 1e-6;
    constexpr int kCoordinates = 120;
    for (int inst = 0; inst < instances; ++inst) {
        const int t = 9 + static_cast<int>(rng() % 4);
        const int f = 1 + static_cast<int>(rng() % 3);
        CriticCNN c = CriticCNN::initialized(t, f, rng());
        for (double& p : c.params()) p += 0.05 * gauss(rng);
        std::vector<double> series(static_cast<std::size_t>(t * f));
        for (double& v : series) v = gauss(rng);
        const double target = static_cast<double>(rng() & 1U);
        std::vector<double> grad;
        c.loss_and_gradient(series, target, grad);
        // BCE oracle from the logit.
        auto loss = [&](const CriticCNN& m) {
            const double z = m.logit(series);
            const double p = 1.0 / (1.0 + std::exp(-z));
            return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
        };
        const std::size_t n = c.params().size();
        std::vector<std::size_t> coords;
        for (int k = 0; k < kCoordinates; ++k) coords.push_back(static_cast<std::size_t>(rng() % n));
        for (std::size_t k = n - 34; k < n; ++k) coords.push_back(k);  // every dense weight and bias
        for (std::size_t k : coords) {
            ++r.cases;
            CriticCNN plus = c, minus = c;
            plus.params()[k] += h;
            minus.params()[k] -= h;
            const double numeric = (loss(plus) - loss(minus)) / (2 * h);
            if (!gradients_agree(grad[k], numeric))
                r.fail("instance " + std::to_string(inst) + " param " + std::to_string(k));
        }
    }
    return r;
}

inline ScenarioConfig small_office(int per_class = 10) {
    ScenarioOverrides o;
    o.n_violation_arrangements = per_class;
    o.n_compliance_arrangements = per_class;
    return build_scenario("office", o);
}

inline ProtocolConfig short_protocol(int trainings = 10) {
    ProtocolConfig p;
    p.trainings_per_arrangement = trainings;
    return p;
}

inline PropertyReport check_standardized_training_split(std::uint64_t seed = 5) {
    PropertyReport r;
    for (const char* name : {"office", "station"}) {
        ScenarioOverrides o;
        o.n_violation_arrangements = 10;
        o.n_compliance_arrangements = 10;
        const auto data = generate_dataset(build_scenario(name, o), short_protocol(), ChannelParams{}, seed, 1);
        for (SplitMode mode : {SplitMode::grouped, SplitMode::snapshot}) {
            const Dataset full = full_dataset(data.snapshots);
            const DatasetSplit split = split_dataset(full.groups, full.y, seed, mode);
            Dataset train = subset(full, split.train);
            const Standardizer st = Standardizer::fit(train);
            st.transform(train);
            for (std::size_t j = 0; j < train.dim; ++j) {
                if (st.stddev()[j] == 0.0) continue;
                ++r.cases;
                double mean = 0.0;
                for (std::size_t i = 0; i < train.size(); ++i) mean += train.row(i)[j];
                mean /= static_cast<double>(train.size());
                double var = 0.0;
                for (std::size_t i = 0; i < train.size(); ++i) var += (train.row(i)[j] - mean) * (train.row(i)[j] - mean);
                const double sd = std::sqrt(var / static_cast<double>(train.size()));
                if (std::abs(mean) > 1e-6 || std::abs(sd - 1.0) > 1e-6)
                    r.fail(std::string(name) + " feature " + std::to_string(j));
            }
        }
    }
    return r;
}

// Generates twice from the same master seed and compares the written
// containers, label files and sweep CSVs byte for byte.
inline PropertyReport check_pipeline_determinism(std::uint64_t seed = 3) {
    PropertyReport r;
    const auto dir = scratch_dir("determinism");
    std::vector<std::string> containers, labels;
    for (int run = 0; run < 2; ++run) {
        const auto data = generate_dataset(small_office(), short_protocol(), ChannelParams{}, seed, run == 0 ? 1 : 2);
        const auto c = dir / ("run" + std::to_string(run) + ".bin");
        const auto l = dir / ("run" + std::to_string(run) + ".labels");
        write_container(c, data.snapshots);
        write_labels(l, data.snapshots);
        containers.push_back(file_bytes(c));
        labels.push_back(file_bytes(l));
    }
    ++r.cases;
    if (containers[0].empty() || containers[0] != containers[1]) r.fail("dataset container bytes differ");
    ++r.cases;
    if (labels[0].empty() || labels[0] != labels[1]) r.fail("label file bytes differ");

    SweepGrid grid;
    grid.scenarios = {"office", "station"};
    grid.n_rx = {1};
    grid.alphas = {0.0, 1.0};
    grid.hidden_units = {8};
    grid.repetitions = 2;
    SweepOptions opt;
    opt.base.scenario = small_office();
    opt.base.protocol = short_protocol();
    opt.keep_base_counts = true;
    opt.base.evaluation.train.epochs = 3;
    std::vector<std::string> csv;
    for (unsigned threads : {1U, 2U}) {
        opt.threads = threads;
        std::ostringstream os;
        write_sweep_csv(os, grid.n_tx, run_sweep(grid, opt));
        csv.push_back(os.str());
    }
    ++r.cases;
    if (csv[0].empty() || csv[0] != csv[1]) r.fail("sweep CSV bytes differ");
    std::filesystem::remove_all(dir);
    return r;
}

}  // namespace mmsense::testing
