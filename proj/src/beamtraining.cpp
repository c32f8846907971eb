// SPDX-License-Identifier: Apache-2.0

#include "mmsense/beamtraining.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mmsense {

void ProtocolConfig::validate() const {
    if (!(beacon_interval > 0.0)) throw std::invalid_argument("protocol: beacon_interval must be positive");
    if (trainings_per_arrangement < 0) throw std::invalid_argument("protocol: trainings_per_arrangement must be >= 0");
}

std::vector<DevicePair> ordered_pairs(int n_devices) {
    std::vector<DevicePair> out;
    for (int i = 0; i < n_devices; ++i)
        for (int j = 0; j < n_devices; ++j)
            if (i != j) out.push_back({i, j});
    return out;
}

SweepResult best_beam_pair(const std::vector<float>& rss, int n_tx, int n_rx) {
    SweepResult best;
    float best_val = rss.at(0);
    for (int t = 0; t < n_tx; ++t)
        for (int r = 0; r < n_rx; ++r) {
            const float v = rss[static_cast<std::size_t>(t * n_rx + r)];
            if (v > best_val) {
                best_val = v;
                best = {t, r};
            }
        }
    return best;
}

PairSweep run_training(const SceneView& scene, const Device& tx, const Device& rx, const ChannelParams& params,
                       Rng& rng) {
    const int n_tx = tx.codebook_tx.n_beams;
    const int n_rx = rx.codebook_rx.n_beams;
    const auto paths = trace_paths(scene, tx, rx, params);
    PairSweep out;
    out.rss.reserve(static_cast<std::size_t>(n_tx * n_rx));
    for (int t = 0; t < n_tx; ++t)
        for (int r = 0; r < n_rx; ++r)
            out.rss.push_back(
                static_cast<float>(measured_rss(path_power_dbm(paths, tx, t, rx, r, params), params, rng)));
    out.best = best_beam_pair(out.rss, n_tx, n_rx);
    return out;
}

std::size_t snapshot_dim(const ScenarioConfig& cfg) {
    if (cfg.devices.size() < 2) return 0;
    const int n_tx = cfg.devices.front().codebook_tx.n_beams;
    const int n_rx = cfg.devices.front().codebook_rx.n_beams;
    for (const Device& d : cfg.devices)
        if (d.codebook_tx.n_beams != n_tx || d.codebook_rx.n_beams != n_rx)
            throw std::invalid_argument("snapshot_dim: all devices must share tx/rx beam counts");
    const std::size_t n = cfg.devices.size();
    return n * (n - 1) * static_cast<std::size_t>(n_tx) * static_cast<std::size_t>(n_rx);
}

std::vector<double> clean_measurements(const ScenarioConfig& cfg, const std::vector<Person>& people,
                                       const ChannelParams& params) {
    const SceneView view{cfg.environment, people};
    std::vector<double> out;
    out.reserve(snapshot_dim(cfg));
    for (DevicePair p : ordered_pairs(static_cast<int>(cfg.devices.size()))) {
        const Device& tx = cfg.devices[static_cast<std::size_t>(p.tx)];
        const Device& rx = cfg.devices[static_cast<std::size_t>(p.rx)];
        const auto paths = trace_paths(view, tx, rx, params);
        for (int t = 0; t < tx.codebook_tx.n_beams; ++t)
            for (int r = 0; r < rx.codebook_rx.n_beams; ++r) out.push_back(path_power_dbm(paths, tx, t, rx, r, params));
    }
    return out;
}

std::vector<Snapshot> collect_snapshots(const ScenarioConfig& cfg, const Arrangement& arrangement, int arrangement_id,
                                        const ProtocolConfig& protocol, const ChannelParams& params,
                                        std::uint64_t seed) {
    protocol.validate();
    params.validate();
    // The scene is static within an arrangement, so the paths are traced once.
    const std::vector<double> clean = clean_measurements(cfg, arrangement.people, params);
    Rng rng(seed);
    std::vector<Snapshot> out;
    out.reserve(static_cast<std::size_t>(protocol.trainings_per_arrangement));
    for (int k = 0; k < protocol.trainings_per_arrangement; ++k) {
        Snapshot s{arrangement_id, k, {}};
        s.measurements.reserve(clean.size());
        for (double c : clean) s.measurements.push_back(static_cast<float>(measured_rss(c, params, rng)));
        out.push_back(std::move(s));
    }
    return out;
}

void SnapshotSet::append(const Snapshot& s, const SnapshotLabel& label) {
    if (s.measurements.size() != dim())
        throw std::invalid_argument("SnapshotSet::append: snapshot has " + std::to_string(s.measurements.size()) +
                                    " values, expected " + std::to_string(dim()));
    values.insert(values.end(), s.measurements.begin(), s.measurements.end());
    labels.push_back(label);
}

namespace {

constexpr const char* kMagic = "MMSENSE-SNAPSHOTS 1";

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

}  // namespace

void write_container(const std::filesystem::path& path, const SnapshotSet& set) {
    if (set.values.size() != set.count() * set.dim())
        throw std::invalid_argument("write_container: value count does not match count * dim");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    std::ostringstream hdr;
    hdr << kMagic << '\n'
        << "scenario_hash " << std::hex << std::setw(16) << std::setfill('0') << set.scenario_hash << std::dec << '\n'
        << "pairs " << set.n_pairs << '\n'
        << "n_tx " << set.n_tx << '\n'
        << "n_rx " << set.n_rx << '\n'
        << "count " << set.count() << '\n'
        << "data\n";
    const std::string h = hdr.str();
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    std::vector<std::uint32_t> raw(set.values.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_le(std::bit_cast<std::uint32_t>(set.values[i]));
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_labels(const std::filesystem::path& path, const SnapshotSet& set) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    for (const SnapshotLabel& l : set.labels) {
        os << to_string(l.label) << ' ' << l.arrangement_id;
        for (Label a : l.area_labels) os << ' ' << to_string(a);
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

// Reads one '\n'-terminated header line, tracking the byte offset.
std::string header_line(std::istream& is, std::size_t& offset, const std::string& file) {
    std::string line;
    const std::size_t start = offset;
    if (!std::getline(is, line))
        throw ContainerError(file + ": truncated header at byte offset " + std::to_string(start));
    offset += line.size() + 1;
    return line;
}

long long header_field(const std::string& line, const std::string& key, std::size_t offset, const std::string& file) {
    std::istringstream ss(line);
    std::string k;
    long long v = -1;
    if (!(ss >> k >> v) || k != key || v < 0)
        throw ContainerError(file + ": malformed header field at byte offset " + std::to_string(offset) +
                             " (expected '" + key + " <n>', got '" + line + "')");
    return v;
}

}  // namespace

SnapshotSet read_snapshot_set(const std::filesystem::path& container, const std::filesystem::path& labels) {
    const std::string file = container.string();
    std::ifstream is(container, std::ios::binary);
    if (!is) throw ContainerError("cannot open '" + file + "'");
    std::size_t offset = 0;
    if (header_line(is, offset, file) != kMagic)
        throw ContainerError(file + ": bad magic at byte offset 0");

    SnapshotSet set;
    std::size_t at = offset;
    {
        const std::string line = header_line(is, offset, file);
        std::istringstream ss(line);
        std::string k, hex;
        if (!(ss >> k >> hex) || k != "scenario_hash" || hex.size() != 16)
            throw ContainerError(file + ": malformed scenario_hash at byte offset " + std::to_string(at));
        try {
            set.scenario_hash = std::stoull(hex, nullptr, 16);
        } catch (const std::exception&) {
            throw ContainerError(file + ": malformed scenario_hash at byte offset " + std::to_string(at));
        }
    }
    at = offset;
    set.n_pairs = static_cast<int>(header_field(header_line(is, offset, file), "pairs", at, file));
    at = offset;
    set.n_tx = static_cast<int>(header_field(header_line(is, offset, file), "n_tx", at, file));
    at = offset;
    set.n_rx = static_cast<int>(header_field(header_line(is, offset, file), "n_rx", at, file));
    at = offset;
    const auto count = static_cast<std::size_t>(header_field(header_line(is, offset, file), "count", at, file));
    at = offset;
    if (header_line(is, offset, file) != "data")
        throw ContainerError(file + ": expected 'data' marker at byte offset " + std::to_string(at));
    if (set.n_pairs < 1 || set.n_tx < 1 || set.n_rx < 1)
        throw ContainerError(file + ": pairs, n_tx and n_rx must be positive");

    const std::size_t n_values = count * set.dim();
    std::vector<std::uint32_t> raw(n_values);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n_values * sizeof(std::uint32_t)));
    const auto got = static_cast<std::size_t>(is.gcount());
    if (got != n_values * sizeof(std::uint32_t))
        throw ContainerError(file + ": truncated payload at byte offset " + std::to_string(offset + got) + " (expected " +
                             std::to_string(n_values * sizeof(std::uint32_t)) + " payload bytes from offset " +
                             std::to_string(offset) + ")");
    if (is.peek() != std::char_traits<char>::eof())
        throw ContainerError(file + ": trailing bytes after payload at byte offset " +
                             std::to_string(offset + n_values * sizeof(std::uint32_t)));
    set.values.resize(n_values);
    for (std::size_t i = 0; i < n_values; ++i) set.values[i] = std::bit_cast<float>(to_le(raw[i]));

    std::ifstream ls(labels);
    if (!ls) throw ContainerError("cannot open '" + labels.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ls, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string lab;
        SnapshotLabel sl;
        if (!(ss >> lab >> sl.arrangement_id))
            throw ContainerError(labels.string() + ":" + std::to_string(line_no) + ": malformed label line");
        try {
            sl.label = parse_label(lab);
            while (ss >> lab) sl.area_labels.push_back(parse_label(lab));
        } catch (const std::invalid_argument& e) {
            throw ContainerError(labels.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        set.labels.push_back(std::move(sl));
    }
    if (set.labels.size() != count)
        throw ContainerError(labels.string() + ": " + std::to_string(set.labels.size()) + " labels for " +
                             std::to_string(count) + " snapshots");
    return set;
}

}  // namespace mmsense
