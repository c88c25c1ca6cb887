#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gmmn/autoencoder.hpp"
#include "gmmn/layers.hpp"

namespace gmmn {

inline constexpr std::size_t kGeneratorRawLen = 81;
inline constexpr std::size_t kDefaultNoiseDim = 100;

/// Scenario generator: dense noise_dim->128 (ReLU), reshape to 32 channels of
/// length 4, then transposed convolutions 32->32 (k4 s3), 32->16 (k4 s3) and
/// 16->1 (k3 s2, tanh), giving lengths 4 -> 13 -> 40 -> 81. The raw 81-value
/// output is truncated to the first 72.
struct ScenarioGenerator {
    nn::Network net;  // dense, reshape, tconv x3, flatten to [B,81]
    std::size_t noise_dim = kDefaultNoiseDim;
    bool trained = false;
};

// Builds the generator and structurally verifies the 4-13-40-81 length chain.
ScenarioGenerator make_generator(std::size_t noise_dim, std::uint64_t seed);

// Upsampling lengths produced by the three transposed convolutions for a
// given starting length; used by structural checks.
std::vector<std::size_t> generator_length_chain(const ScenarioGenerator& gen);

// i.i.d. standard normal noise, deterministic per seed. Shape [count, dim].
Tensor sample_noise(std::size_t count, std::size_t noise_dim, std::uint64_t seed);

// Forward pass; keeps the first 72 of the 81 raw outputs. Shape [B,72],
// entries in (-1,1) (normalized space).
Tensor generate(const ScenarioGenerator& gen, const Tensor& noise);

// exp(-|x-y|^2 / (2*bandwidth)).
double gaussian_kernel(const Tensor& x, const Tensor& y, double bandwidth);

// Squared maximum mean discrepancy, biased V-statistic (diagonal terms
// included) between row populations of equal size. Tiny negative rounding
// residue is clamped to zero.
double mmd2(const Tensor& gen_rows, const Tensor& real_rows, double bandwidth);

// d(mmd2)/d(gen_rows); real_rows treated as constants.
Tensor mmd2_grad(const Tensor& gen_rows, const Tensor& real_rows, double bandwidth);

// Median of the pairwise squared Euclidean distances between rows. Errors if
// the median is zero (all-identical rows).
double median_bandwidth(const Tensor& rows);

struct GenTrainOptions {
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    // Kernel bandwidth; unset selects the median heuristic on the encoded
    // training set, computed once before the loop.
    std::optional<double> bandwidth;
};

struct GenTrainResult {
    std::vector<double> loss_history;  // epoch-mean MMD^2
    double bandwidth = 0.0;            // the value actually used
};

// Trains the generator against the frozen encoder's latent space. The
// encoder is read-only throughout; fresh noise is drawn per batch and both
// populations in each MMD evaluation have the batch's size.
GenTrainResult train_generator(ScenarioGenerator& gen, const AutoEncoder& frozen_encoder,
                               const Tensor& train_rows, const GenTrainOptions& opts);

}  // namespace gmmn
