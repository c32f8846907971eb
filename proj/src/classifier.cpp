// SPDX-License-Identifier: Apache-2.0

#include "mmsense/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.hpp"
#include "mmsense/random.hpp"

namespace mmsense {

FFNN::FFNN(int input_dim_, int hidden_) : input_dim(input_dim_), hidden(hidden_) {
    if (input_dim < 1 || hidden < 1) throw std::invalid_argument("FFNN: dimensions must be positive");
    params.assign(b2_offset() + 2, 0.0);
}

FFNN FFNN::initialized(int input_dim, int hidden, std::uint64_t seed) {
    FFNN m(input_dim, hidden);
    m.seed = seed;
    Rng rng(derive_seed(seed, {tag(Stream::init)}));
    const double lim1 = std::sqrt(6.0 / (input_dim + hidden));
    const double lim2 = std::sqrt(6.0 / (hidden + 2));
    std::uniform_real_distribution<double> u1(-lim1, lim1);
    std::uniform_real_distribution<double> u2(-lim2, lim2);
    for (std::size_t i = m.w1_offset(); i < m.b1_offset(); ++i) m.params[i] = u1(rng);
    for (std::size_t i = m.w2_offset(); i < m.b2_offset(); ++i) m.params[i] = u2(rng);
    return m;
}

namespace {

// Hidden activations (post-relu) for one input.
void hidden_layer(const FFNN& m, const double* x, double* h) {
    const auto d = static_cast<std::size_t>(m.input_dim);
    const double* w1 = m.params.data() + m.w1_offset();
    const double* b1 = m.params.data() + m.b1_offset();
    for (int j = 0; j < m.hidden; ++j) {
        const double* w = w1 + static_cast<std::size_t>(j) * d;
        double acc = b1[j];
        for (std::size_t c = 0; c < d; ++c) acc += w[c] * x[c];
        h[j] = acc > 0.0 ? acc : 0.0;
    }
}

std::array<double, 2> output_layer(const FFNN& m, const double* h) {
    const double* w2 = m.params.data() + m.w2_offset();
    const double* b2 = m.params.data() + m.b2_offset();
    std::array<double, 2> z{b2[0], b2[1]};
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < m.hidden; ++j) z[static_cast<std::size_t>(k)] += w2[k * m.hidden + j] * h[j];
    return z;
}

// Accumulates d(loss)/d(params) for one input given d(loss)/d(logits).
void backprop(const FFNN& m, const double* x, const double* h, std::array<double, 2> dz, double* g) {
    const auto d = static_cast<std::size_t>(m.input_dim);
    const double* w2 = m.params.data() + m.w2_offset();
    double* gw1 = g + m.w1_offset();
    double* gb1 = g + m.b1_offset();
    double* gw2 = g + m.w2_offset();
    double* gb2 = g + m.b2_offset();
    for (int k = 0; k < 2; ++k) {
        gb2[k] += dz[static_cast<std::size_t>(k)];
        for (int j = 0; j < m.hidden; ++j) gw2[k * m.hidden + j] += dz[static_cast<std::size_t>(k)] * h[j];
    }
    for (int j = 0; j < m.hidden; ++j) {
        if (h[j] <= 0.0) continue;
        const double dh = dz[0] * w2[j] + dz[1] * w2[m.hidden + j];
        gb1[j] += dh;
        double* gw = gw1 + static_cast<std::size_t>(j) * d;
        for (std::size_t c = 0; c < d; ++c) gw[c] += dh * x[c];
    }
}

void check_dim(const FFNN& m, std::size_t n) {
    if (n != static_cast<std::size_t>(m.input_dim))
        throw std::invalid_argument("FFNN: input has " + std::to_string(n) + " features, model expects " +
                                    std::to_string(m.input_dim));
}

}  // namespace

std::array<double, 2> FFNN::logits(std::span<const double> x) const {
    check_dim(*this, x.size());
    std::vector<double> h(static_cast<std::size_t>(hidden));
    hidden_layer(*this, x.data(), h.data());
    return output_layer(*this, h.data());
}

std::array<double, 2> softmax(std::array<double, 2> z) {
    const double m = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - m);
    const double e1 = std::exp(z[1] - m);
    const double s = e0 + e1;
    return {e0 / s, e1 / s};
}

std::array<double, 2> forward(const FFNN& model, std::span<const double> x) { return softmax(model.logits(x)); }

int predict(const FFNN& model, std::span<const double> x) {
    const auto z = model.logits(x);
    return z[1] >= z[0] ? 1 : 0;
}

double loss_and_gradient(const FFNN& model, const Dataset& data, std::span<const std::size_t> rows,
                         std::vector<double>& grad) {
    check_dim(model, data.dim);
    grad.assign(model.n_params(), 0.0);
    if (rows.empty()) return 0.0;
    std::vector<double> h(static_cast<std::size_t>(model.hidden));
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
        const double* x = data.x.data() + r * data.dim;
        hidden_layer(model, x, h.data());
        const auto z = output_layer(model, h.data());
        const auto p = softmax(z);
        const int y = data.y[r];
        // log-softmax for a stable loss
        const double m = std::max(z[0], z[1]);
        const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
        loss -= z[static_cast<std::size_t>(y)] - lse;
        std::array<double, 2> dz{p[0] * inv_n, p[1] * inv_n};
        dz[static_cast<std::size_t>(y)] -= inv_n;
        backprop(model, x, h.data(), dz, grad.data());
    }
    return loss * inv_n;
}

void log_prob_gradient(const FFNN& model, std::span<const double> x, int action, std::vector<double>& grad) {
    check_dim(model, x.size());
    grad.assign(model.n_params(), 0.0);
    std::vector<double> h(static_cast<std::size_t>(model.hidden));
    hidden_layer(model, x.data(), h.data());
    const auto p = softmax(output_layer(model, h.data()));
    // d log p_a / d z_k = 1[k == a] - p_k
    std::array<double, 2> dz{-p[0], -p[1]};
    dz[static_cast<std::size_t>(action)] += 1.0;
    backprop(model, x.data(), h.data(), dz, grad.data());
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be positive");
}

TrainHistory train(FFNN& model, const Dataset& train_set, const TrainConfig& cfg, const Dataset* validation) {
    cfg.validate();
    if (train_set.size() == 0) throw std::invalid_argument("train: empty dataset");
    check_dim(model, train_set.dim);

    Adam opt(model.n_params(), cfg.adam);
    std::vector<std::size_t> order(train_set.size());
    std::vector<double> grad;
    TrainHistory hist;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, {tag(Stream::shuffle), static_cast<std::uint64_t>(epoch)}));
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t len = std::min(batch, order.size() - start);
            const std::span<const std::size_t> rows(order.data() + start, len);
            const double loss = loss_and_gradient(model, train_set, rows, grad);
            if (!std::isfinite(loss))
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting " +
                                      std::to_string(start));
            opt.step(model.params, grad);
            epoch_loss += loss * static_cast<double>(len);
        }
        hist.loss.push_back(epoch_loss / static_cast<double>(order.size()));
        hist.train_accuracy.push_back(evaluate(model, train_set).accuracy);
        if (validation != nullptr && validation->size() > 0)
            hist.validation_accuracy.push_back(evaluate(model, *validation).accuracy);
    }
    return hist;
}

Metrics metrics_from_confusion(const std::array<std::array<long, 2>, 2>& confusion) {
    Metrics m;
    m.confusion = confusion;
    m.total = confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
    const long correct = confusion[0][0] + confusion[1][1];
    m.accuracy = m.total > 0 ? static_cast<double>(correct) / static_cast<double>(m.total) : 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
        const long tp = confusion[c][c];
        const long pred = confusion[0][c] + confusion[1][c];
        const long actual = confusion[c][0] + confusion[c][1];
        m.precision[c] = pred > 0 ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
        m.recall[c] = actual > 0 ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    }
    return m;
}

Metrics metrics_from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("metrics: size mismatch");
    std::array<std::array<long, 2>, 2> c{};
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++c[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    return metrics_from_confusion(c);
}

Metrics evaluate(const FFNN& model, const Dataset& data) {
    std::vector<int> pred(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) pred[i] = predict(model, data.row(i));
    return metrics_from_predictions(data.y, pred);
}

void save_checkpoint(const std::filesystem::path& path, const FFNN& model, const std::string& standardizer_ref) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << "MMSENSE-FFNN 1\n"
       << "input_dim " << model.input_dim << '\n'
       << "hidden " << model.hidden << '\n'
       << "seed " << model.seed << '\n'
       << "standardizer " << (standardizer_ref.empty() ? "-" : standardizer_ref) << '\n'
       << "params " << model.n_params() << '\n'
       << "data\n";
    detail::write_f64_blob(os, model.params);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

FFNN load_checkpoint(const std::filesystem::path& path, std::string* standardizer_ref) {
    const std::string file = path.string();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + file + "'");
    std::size_t offset = 0;
    const auto f = detail::read_header(is, "MMSENSE-FFNN 1", file, offset);
    FFNN m(static_cast<int>(detail::header_int(f, "input_dim", file)), static_cast<int>(detail::header_int(f, "hidden", file)));
    m.seed = f.count("seed") ? std::stoull(f.at("seed")) : 0;
    const auto n = static_cast<std::size_t>(detail::header_int(f, "params", file));
    if (n != m.n_params())
        throw std::runtime_error(file + ": parameter count " + std::to_string(n) + " does not match dimensions");
    m.params = detail::read_f64_blob(is, n, file, offset);
    if (standardizer_ref != nullptr) *standardizer_ref = f.count("standardizer") ? f.at("standardizer") : "-";
    return m;
}

}  // namespace mmsense
