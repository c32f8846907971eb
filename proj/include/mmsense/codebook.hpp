// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace mmsense {

/// Half-power beam width for an N-beam codebook with directionality alpha:
/// W = 2*pi * (1 - (1 - 1/N) * alpha). alpha = 1 gives 2*pi/N, alpha = 0 is omnidirectional.
/// Throws std::invalid_argument for alpha outside [0, 1] or n_beams < 1.
double beam_width(int n_beams, double alpha);

/// Set of N azimuthal sector beams with evenly spaced boresights k * 2*pi / N.
///
/// Each beam is a flat main lobe of width W with a flat side-lobe floor at
/// sidelobe_ratio times the main-lobe gain. The main-lobe gain is chosen so
/// the pattern averages to unity over the circle.
struct Codebook {
    int n_beams = 1;
    double alpha = 1.0;
    double half_power_width = 0.0;
    double sidelobe_ratio = 0.01;
    std::vector<double> beam_directions;

    double main_lobe_gain() const;
    double side_lobe_gain() const { return sidelobe_ratio * main_lobe_gain(); }

    /// Linear gain of beam `beam_index` toward `angle` (radians, device frame).
    double gain(int beam_index, double angle) const;
};

Codebook make_codebook(int n_beams, double alpha, double sidelobe_ratio = 0.01);

}  // namespace mmsense
