// SPDX-License-Identifier: Apache-2.0
//
// Single-hidden-layer feed-forward classifier (relu hidden layer, 2-way
// softmax output) trained with mini-batch Adam on mean cross-entropy.
// Class 1 is "violation", class 0 is "compliance".

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmsense/adam.hpp"
#include "mmsense/features.hpp"

namespace mmsense {

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters live in one flat vector: W1 (hidden x input, row-major), b1,
/// W2 (2 x hidden, row-major), b2.
struct FFNN {
    int input_dim = 0;
    int hidden = 0;
    std::uint64_t seed = 0;
    std::vector<double> params;

    FFNN() = default;
    FFNN(int input_dim, int hidden);

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static FFNN initialized(int input_dim, int hidden, std::uint64_t seed);

    std::size_t n_params() const { return params.size(); }
    std::size_t w1_offset() const { return 0; }
    std::size_t b1_offset() const { return static_cast<std::size_t>(hidden) * static_cast<std::size_t>(input_dim); }
    std::size_t w2_offset() const { return b1_offset() + static_cast<std::size_t>(hidden); }
    std::size_t b2_offset() const { return w2_offset() + 2 * static_cast<std::size_t>(hidden); }

    /// Pre-softmax outputs.
    std::array<double, 2> logits(std::span<const double> x) const;
};

std::array<double, 2> softmax(std::array<double, 2> z);

/// Class probabilities {compliance, violation}. Throws std::invalid_argument on a dimension mismatch.
std::array<double, 2> forward(const FFNN& model, std::span<const double> x);

/// Argmax decision; an exact tie goes to violation.
int predict(const FFNN& model, std::span<const double> x);

/// Mean cross-entropy over `rows` of `data` and its gradient (same layout as params).
/// Sums run in row order, so results are bit-reproducible.
double loss_and_gradient(const FFNN& model, const Dataset& data, std::span<const std::size_t> rows,
                         std::vector<double>& grad);

/// Gradient of log pi(action | x) for one input, where pi is the softmax output.
void log_prob_gradient(const FFNN& model, std::span<const double> x, int action, std::vector<double>& grad);

struct TrainConfig {
    int batch_size = 1000;
    int epochs = 30;
    AdamConfig adam{};
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainHistory {
    std::vector<double> loss;               // mean training loss per epoch
    std::vector<double> train_accuracy;
    std::vector<double> validation_accuracy;  // empty without a validation set
};

/// Mini-batch Adam; rows are reshuffled each epoch from a seed-derived stream.
/// A batch size larger than the training set gives one full-batch step per epoch.
/// Throws std::invalid_argument on an empty dataset and DivergenceError on a non-finite loss.
TrainHistory train(FFNN& model, const Dataset& train_set, const TrainConfig& cfg,
                   const Dataset* validation = nullptr);

struct Metrics {
    std::array<std::array<long, 2>, 2> confusion{};  // [true class][predicted class]
    double accuracy = 0.0;
    std::array<double, 2> precision{};
    std::array<double, 2> recall{};
    long total = 0;
};

Metrics metrics_from_confusion(const std::array<std::array<long, 2>, 2>& confusion);
Metrics metrics_from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted);
Metrics evaluate(const FFNN& model, const Dataset& data);

// Checkpoint layout (ASCII header lines, then the parameter blob):
//   MMSENSE-FFNN 1
//   input_dim <D>
//   hidden <H>
//   seed <S>
//   standardizer <path or ->
//   params <n>
//   data
// followed by n little-endian IEEE-754 float64 values.
void save_checkpoint(const std::filesystem::path& path, const FFNN& model, const std::string& standardizer_ref = "-");
FFNN load_checkpoint(const std::filesystem::path& path, std::string* standardizer_ref = nullptr);

}  // namespace mmsense
