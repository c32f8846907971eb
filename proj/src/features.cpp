// SPDX-License-Identifier: Apache-2.0

#include "mmsense/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "mmsense/random.hpp"

namespace mmsense {

bool AlertArea::contains(Vec2 p) const {
    // Winding test with an on-edge check.
    const std::size_t n = region.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = region[i];
        const Vec2 b = region[j];
        if (point_segment_distance(p, a, b) < 1e-12) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

std::vector<AlertArea> define_alert_areas(const ScenarioConfig& cfg) {
    const auto pairs = ordered_pairs(static_cast<int>(cfg.devices.size()));
    std::vector<AlertArea> out;
    for (const Rect& w : cfg.environment.walkable) {
        AlertArea area;
        area.id = static_cast<int>(out.size());
        area.region = {{w.x0, w.y0}, {w.x1, w.y0}, {w.x1, w.y1}, {w.x0, w.y1}};
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const Device& a = cfg.devices[static_cast<std::size_t>(pairs[k].tx)];
            const Device& b = cfg.devices[static_cast<std::size_t>(pairs[k].rx)];
            if (w.contains(a.position) && w.contains(b.position)) area.member_pairs.push_back(static_cast<int>(k));
        }
        if (area.member_pairs.empty())
            throw std::invalid_argument("define_alert_areas: walkable region " + std::to_string(area.id) +
                                        " has no device pairs available");
        out.push_back(std::move(area));
    }
    if (out.empty()) throw std::invalid_argument("define_alert_areas: scene has no walkable region");
    return out;
}

Label area_label(const AlertArea& area, const std::vector<Person>& people, double safe_distance) {
    std::vector<Person> inside;
    for (const Person& p : people)
        if (area.contains(p.center)) inside.push_back(p);
    return label_of(inside, safe_distance);
}

std::vector<std::size_t> feature_columns(const AlertArea& area, int n_tx, int n_rx) {
    const auto block = static_cast<std::size_t>(n_tx) * static_cast<std::size_t>(n_rx);
    std::vector<std::size_t> cols;
    cols.reserve(area.member_pairs.size() * block);
    for (int p : area.member_pairs)
        for (std::size_t k = 0; k < block; ++k) cols.push_back(static_cast<std::size_t>(p) * block + k);
    return cols;
}

Dataset area_dataset(const SnapshotSet& set, const std::vector<std::size_t>& columns, int area_index) {
    Dataset d;
    d.dim = columns.size();
    const std::size_t n = set.count();
    d.x.resize(n * d.dim);
    d.y.resize(n);
    d.groups.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float* src = set.row(i);
        double* dst = d.x.data() + i * d.dim;
        for (std::size_t c = 0; c < d.dim; ++c) dst[c] = static_cast<double>(src[columns[c]]);
        const SnapshotLabel& l = set.labels[i];
        Label lab = l.label;
        if (area_index >= 0 && !l.area_labels.empty()) lab = l.area_labels.at(static_cast<std::size_t>(area_index));
        d.y[i] = static_cast<int>(lab);
        d.groups[i] = l.arrangement_id;
    }
    return d;
}

Dataset full_dataset(const SnapshotSet& set) {
    std::vector<std::size_t> cols(set.dim());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    return area_dataset(set, cols, -1);
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.dim = d.dim;
    out.x.reserve(indices.size() * d.dim);
    for (std::size_t i : indices) {
        const auto r = d.row(i);
        out.x.insert(out.x.end(), r.begin(), r.end());
        out.y.push_back(d.y[i]);
        out.groups.push_back(d.groups[i]);
    }
    return out;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), std_(std::move(stddev)) {
    if (mean_.size() != std_.size()) throw std::invalid_argument("Standardizer: mean/std size mismatch");
}

Standardizer Standardizer::fit(const Dataset& train) {
    const std::size_t n = train.size();
    if (n == 0) throw std::invalid_argument("Standardizer::fit: empty training set");
    std::vector<double> mean(train.dim, 0.0);
    std::vector<double> var(train.dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = train.row(i);
        for (std::size_t c = 0; c < train.dim; ++c) mean[c] += r[c];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = train.row(i);
        for (std::size_t c = 0; c < train.dim; ++c) {
            const double dlt = r[c] - mean[c];
            var[c] += dlt * dlt;
        }
    }
    std::vector<double> sd(train.dim);
    for (std::size_t c = 0; c < train.dim; ++c) sd[c] = std::sqrt(var[c] / static_cast<double>(n));
    return Standardizer(std::move(mean), std::move(sd));
}

void Standardizer::apply(std::span<double> x) const {
    if (x.size() != mean_.size())
        throw std::invalid_argument("Standardizer::apply: vector has " + std::to_string(x.size()) + " entries, expected " +
                                    std::to_string(mean_.size()));
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = std_[c] > 0.0 ? (x[c] - mean_[c]) / std_[c] : 0.0;
}

void Standardizer::transform(Dataset& d) const {
    for (std::size_t i = 0; i < d.size(); ++i) apply(d.row(i));
}

void Standardizer::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    char buf[96];
    for (std::size_t c = 0; c < mean_.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", mean_[c], std_[c]);
        os << buf;
    }
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Standardizer Standardizer::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<double> mean, sd;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double m = 0.0, s = 0.0;
        if (!(ss >> m >> s) || s < 0.0)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed standardizer line");
        mean.push_back(m);
        sd.push_back(s);
    }
    return Standardizer(std::move(mean), std::move(sd));
}

DatasetSplit split_dataset(const std::vector<int>& groups, const std::vector<int>& labels, std::uint64_t seed,
                           SplitMode mode, std::array<double, 3> ratios) {
    if (groups.size() != labels.size()) throw std::invalid_argument("split_dataset: groups/labels size mismatch");
    const double rsum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(rsum - 1.0) > 1e-9 || ratios[0] < 0.0 || ratios[1] < 0.0 || ratios[2] < 0.0)
        throw std::invalid_argument("split_dataset: ratios must be non-negative and sum to 1");

    // Units: arrangement ids (grouped) or snapshot indices, each with one class.
    std::vector<int> unit_of(groups.size());
    std::vector<int> unit_class;
    if (mode == SplitMode::grouped) {
        std::map<int, int> index;
        for (int g : groups) index.emplace(g, 0);
        int k = 0;
        for (auto& [g, idx] : index) idx = k++;
        unit_class.assign(index.size(), 0);
        for (std::size_t i = 0; i < groups.size(); ++i) {
            unit_of[i] = index[groups[i]];
            unit_class[static_cast<std::size_t>(unit_of[i])] = std::max(unit_class[static_cast<std::size_t>(unit_of[i])], labels[i]);
        }
    } else {
        std::iota(unit_of.begin(), unit_of.end(), 0);
        unit_class = labels;
    }
    const std::size_t n_units = unit_class.size();
    if (n_units < 3)
        throw std::invalid_argument("split_dataset: need at least 3 " +
                                    std::string(mode == SplitMode::grouped ? "arrangements" : "snapshots") + ", got " +
                                    std::to_string(n_units));

    // Shuffle each class, then interleave by relative rank so every prefix keeps the class mix.
    Rng rng(derive_seed(seed, {tag(Stream::split)}));
    std::map<int, std::vector<int>> by_class;
    for (std::size_t u = 0; u < n_units; ++u) by_class[unit_class[u]].push_back(static_cast<int>(u));
    std::vector<std::pair<double, int>> keyed;
    for (auto& [cls, units] : by_class) {
        std::shuffle(units.begin(), units.end(), rng);
        for (std::size_t r = 0; r < units.size(); ++r)
            keyed.emplace_back((static_cast<double>(r) + 0.5) / static_cast<double>(units.size()), units[r]);
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(n_units)));
    const auto n_val = std::min(n_units - n_train,
                                static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(n_units))));
    std::vector<int> subset_of(n_units, 2);
    for (std::size_t k = 0; k < keyed.size(); ++k) {
        const auto u = static_cast<std::size_t>(keyed[k].second);
        subset_of[u] = k < n_train ? 0 : (k < n_train + n_val ? 1 : 2);
    }

    DatasetSplit split;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        switch (subset_of[static_cast<std::size_t>(unit_of[i])]) {
            case 0: split.train.push_back(i); break;
            case 1: split.validation.push_back(i); break;
            default: split.test.push_back(i); break;
        }
    }
    return split;
}

}  // namespace mmsense
