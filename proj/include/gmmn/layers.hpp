#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "gmmn/tensor.hpp"

namespace gmmn::nn {

enum class Activation { kIdentity, kRelu, kTanh };

/// Fully connected layer: out = act(input * weights + bias).
struct DenseLayer {
    Tensor weights;  // [in_dim, out_dim]
    Tensor bias;     // [out_dim]
    Activation activation = Activation::kIdentity;

    std::size_t in_dim() const { return weights.dim(0); }
    std::size_t out_dim() const { return weights.dim(1); }
};

/// 1-D transposed convolution. Input [batch, in_ch, L], each input position i
/// scatters kernel-weighted contributions at output offset i*stride, so
/// L_out = (L - 1) * stride + kernel_len. No padding, no cropping.
struct TConv1dLayer {
    Tensor kernels;  // [in_ch, out_ch, kernel_len]
    Tensor bias;     // [out_ch]
    std::size_t stride = 1;
    Activation activation = Activation::kIdentity;

    std::size_t in_channels() const { return kernels.dim(0); }
    std::size_t out_channels() const { return kernels.dim(1); }
    std::size_t kernel_len() const { return kernels.dim(2); }
    std::size_t output_len(std::size_t input_len) const {
        return (input_len - 1) * stride + kernel_len();
    }
};

/// Parameter-free relabeling of the non-batch dimensions.
struct ReshapeLayer {
    std::vector<std::size_t> tail;  // output shape is [batch, tail...]
};

using Layer = std::variant<DenseLayer, TConv1dLayer, ReshapeLayer>;
using Network = std::vector<Layer>;

// Glorot-uniform weight matrix [in_dim, out_dim], entries in
// [-sqrt(6/(in+out)), +sqrt(6/(in+out))]. Deterministic per seed.
Tensor glorot_init(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

// Same bound computed from explicit fan sizes, for convolution kernels.
Tensor glorot_init_shape(std::vector<std::size_t> shape, std::size_t fan_in, std::size_t fan_out,
                         std::uint64_t seed);

DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation act, std::uint64_t seed);
TConv1dLayer make_tconv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel_len,
                          std::size_t stride, Activation act, std::uint64_t seed);

Tensor dense_forward(const DenseLayer& layer, const Tensor& input);
Tensor tconv1d_forward(const TConv1dLayer& layer, const Tensor& input);
Tensor reshape_forward(const ReshapeLayer& layer, const Tensor& input);

Tensor layer_forward(const Layer& layer, const Tensor& input);
Tensor network_forward(const Network& net, const Tensor& input);

/// Parameter gradients for one layer; empty tensors for parameter-free layers.
struct LayerGrads {
    Tensor weights;
    Tensor bias;
    bool has_params = false;
};

/// Exact reverse-mode gradients for a whole network. `layers[i]` aligns with
/// `net[i]`; `input` is the gradient w.r.t. the network input (used to pass
/// generator gradients through the frozen encoder).
struct BackpropResult {
    std::vector<LayerGrads> layers;
    Tensor input;
};

BackpropResult backprop(const Network& net, const Tensor& input, const Tensor& output_grad);

// Mutable views of all parameter tensors, layer order, weights before bias.
std::vector<Tensor*> parameters(Network& net);
std::vector<const Tensor*> parameters(const Network& net);

// Gradient tensors from a BackpropResult in the same order as parameters().
std::vector<const Tensor*> parameter_grads(const BackpropResult& grads);

}  // namespace gmmn::nn
