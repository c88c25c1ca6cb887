#pragma once

#include <cstdint>
#include <vector>

#include "gmmn/layers.hpp"

namespace gmmn {

inline constexpr std::size_t kLatentDim = 16;

/// Dimensionality-reduction network. Encoder 72-64-32-16 (ReLU), decoder
/// 16-16-32-64-72 (ReLU with a tanh head). The trained encoder defines the
/// latent space in which the scenario generator's MMD loss is computed.
struct AutoEncoder {
    nn::Network encoder;  // 3 dense layers
    nn::Network decoder;  // 4 dense layers
    bool trained = false;
};

AutoEncoder make_autoencoder(std::uint64_t seed);

Tensor encode(const AutoEncoder& ae, const Tensor& batch);    // [B,72] -> [B,16]
Tensor decode(const AutoEncoder& ae, const Tensor& latents);  // [B,16] -> [B,72]

// Mean over all entries of the squared difference.
double mse_loss(const Tensor& reconstructed, const Tensor& target);
// d(mse_loss)/d(reconstructed).
Tensor mse_loss_grad(const Tensor& reconstructed, const Tensor& target);

struct AeTrainOptions {
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
};

// Adam on shuffled mini-batches (last short batch allowed). Returns the
// epoch-mean loss history, length == epochs, and sets ae.trained.
std::vector<double> train_autoencoder(AutoEncoder& ae, const Tensor& train_rows,
                                      const AeTrainOptions& opts);

}  // namespace gmmn
