// SPDX-License-Identifier: Apache-2.0

#include "mmsense/codebook.hpp"

#include <stdexcept>
#include <string>

#include "mmsense/geometry.hpp"

namespace mmsense {

double beam_width(int n_beams, double alpha) {
    if (n_beams < 1) throw std::invalid_argument("beam_width: n_beams must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("beam_width: alpha must lie in [0, 1], got " + std::to_string(alpha));
    return kTwoPi * (1.0 - (1.0 - 1.0 / n_beams) * alpha);
}

Codebook make_codebook(int n_beams, double alpha, double sidelobe_ratio) {
    if (!(sidelobe_ratio >= 0.0 && sidelobe_ratio <= 1.0))
        throw std::invalid_argument("make_codebook: sidelobe_ratio must lie in [0, 1]");
    Codebook cb;
    cb.n_beams = n_beams;
    cb.alpha = alpha;
    cb.half_power_width = beam_width(n_beams, alpha);
    cb.sidelobe_ratio = sidelobe_ratio;
    cb.beam_directions.resize(static_cast<std::size_t>(n_beams));
    for (int k = 0; k < n_beams; ++k) cb.beam_directions[static_cast<std::size_t>(k)] = k * kTwoPi / n_beams;
    return cb;
}

double Codebook::main_lobe_gain() const {
    const double w = half_power_width;
    return kTwoPi / (w + sidelobe_ratio * (kTwoPi - w));
}

double Codebook::gain(int beam_index, double angle) const {
    if (beam_index < 0 || beam_index >= n_beams)
        throw std::out_of_range("Codebook::gain: beam index " + std::to_string(beam_index) + " out of range");
    const double g = main_lobe_gain();
    if (half_power_width >= kTwoPi) return g;
    const double off = angular_offset(angle, beam_directions[static_cast<std::size_t>(beam_index)]);
    return off <= half_power_width / 2.0 ? g : sidelobe_ratio * g;
}

}  // namespace mmsense
