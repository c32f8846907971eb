// SPDX-License-Identifier: Apache-2.0
//
// Little-endian float64 blobs behind a short ASCII header, shared by the model checkpoints.

#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmsense::detail {

inline std::uint64_t le64(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
        return r;
    }
    return v;
}

inline void write_f64_blob(std::ostream& os, const std::vector<double>& values) {
    std::vector<std::uint64_t> raw(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) raw[i] = le64(std::bit_cast<std::uint64_t>(values[i]));
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
}

inline std::vector<double> read_f64_blob(std::istream& is, std::size_t n, const std::string& file, std::size_t offset) {
    std::vector<std::uint64_t> raw(n);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 8));
    if (static_cast<std::size_t>(is.gcount()) != n * 8)
        throw std::runtime_error(file + ": truncated parameter blob at byte offset " +
                                 std::to_string(offset + static_cast<std::size_t>(is.gcount())));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::bit_cast<double>(le64(raw[i]));
    return out;
}

/// Reads "key value" lines up to a "data" line. Returns the fields and the byte offset after the marker.
inline std::map<std::string, std::string> read_header(std::istream& is, const std::string& magic,
                                                      const std::string& file, std::size_t& offset) {
    std::string line;
    offset = 0;
    if (!std::getline(is, line) || line != magic) throw std::runtime_error(file + ": bad magic at byte offset 0");
    offset += line.size() + 1;
    std::map<std::string, std::string> fields;
    while (true) {
        const std::size_t at = offset;
        if (!std::getline(is, line)) throw std::runtime_error(file + ": truncated header at byte offset " + std::to_string(at));
        offset += line.size() + 1;
        if (line == "data") break;
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw std::runtime_error(file + ": malformed header line at byte offset " + std::to_string(at));
        fields[line.substr(0, sp)] = line.substr(sp + 1);
    }
    return fields;
}

inline long long header_int(const std::map<std::string, std::string>& f, const std::string& key, const std::string& file) {
    const auto it = f.find(key);
    if (it == f.end()) throw std::runtime_error(file + ": header field '" + key + "' missing");
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw std::runtime_error(file + ": header field '" + key + "' is not an integer");
    }
}

}  // namespace mmsense::detail
