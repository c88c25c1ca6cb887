#include "gmmn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "gmmn/rng.hpp"

namespace gmmn::nn {

namespace {

double activate(Activation act, double z) {
    switch (act) {
        case Activation::kRelu:
            return z > 0.0 ? z : 0.0;
        case Activation::kTanh:
            return std::tanh(z);
        case Activation::kIdentity:
            return z;
    }
    return z;
}

// Derivative expressed in terms of the pre-activation z.
double activate_grad(Activation act, double z) {
    switch (act) {
        case Activation::kRelu:
            return z > 0.0 ? 1.0 : 0.0;
        case Activation::kTanh: {
            double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::kIdentity:
            return 1.0;
    }
    return 1.0;
}

// Pre-activation of a dense layer: input [B, in] * weights [in, out] + bias.
Tensor dense_preactivation(const DenseLayer& layer, const Tensor& input) {
    if (input.rank() != 2 || input.dim(1) != layer.in_dim()) {
        throw std::invalid_argument("dense_forward: input " + input.shape_str() +
                                    " does not match layer in_dim " + std::to_string(layer.in_dim()));
    }
    if (layer.bias.rank() != 1 || layer.bias.dim(0) != layer.out_dim()) {
        throw std::invalid_argument("dense_forward: bias shape inconsistent with weights");
    }
    const std::size_t batch = input.dim(0);
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    Tensor z({batch, out});
    for (std::size_t b = 0; b < batch; ++b) {
        double* zrow = &z.data()[b * out];
        for (std::size_t o = 0; o < out; ++o) zrow[o] = layer.bias[o];
        const double* xrow = &input.data()[b * in];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xrow[i];
            const double* wrow = &layer.weights.data()[i * out];
            for (std::size_t o = 0; o < out; ++o) zrow[o] += xi * wrow[o];
        }
    }
    return z;
}

void check_tconv_input(const TConv1dLayer& layer, const Tensor& input) {
    if (input.rank() != 3 || input.dim(1) != layer.in_channels()) {
        throw std::invalid_argument("tconv1d_forward: input " + input.shape_str() +
                                    " does not match kernel channels " +
                                    std::to_string(layer.in_channels()));
    }
    if (layer.stride == 0) {
        throw std::invalid_argument("tconv1d_forward: stride must be positive");
    }
    if (layer.bias.rank() != 1 || layer.bias.dim(0) != layer.out_channels()) {
        throw std::invalid_argument("tconv1d_forward: bias shape inconsistent with kernels");
    }
}

Tensor tconv1d_preactivation(const TConv1dLayer& layer, const Tensor& input) {
    check_tconv_input(layer, input);
    const std::size_t batch = input.dim(0);
    const std::size_t in_ch = layer.in_channels();
    const std::size_t out_ch = layer.out_channels();
    const std::size_t klen = layer.kernel_len();
    const std::size_t l_in = input.dim(2);
    const std::size_t l_out = layer.output_len(l_in);

    Tensor z({batch, out_ch, l_out});
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < out_ch; ++co) {
            for (std::size_t j = 0; j < l_out; ++j) z.at(b, co, j) = layer.bias[co];
        }
        for (std::size_t ci = 0; ci < in_ch; ++ci) {
            for (std::size_t i = 0; i < l_in; ++i) {
                const double x = input.at(b, ci, i);
                if (x == 0.0) continue;
                const std::size_t base = i * layer.stride;
                for (std::size_t co = 0; co < out_ch; ++co) {
                    const double* k = &layer.kernels.data()[(ci * out_ch + co) * klen];
                    double* zrow = &z.data()[(b * out_ch + co) * l_out + base];
                    for (std::size_t t = 0; t < klen; ++t) zrow[t] += x * k[t];
                }
            }
        }
    }
    return z;
}

Tensor apply_activation(Activation act, Tensor z) {
    for (double& v : z.data()) v = activate(act, v);
    return z;
}

std::vector<std::size_t> reshape_out_shape(const ReshapeLayer& layer, const Tensor& input) {
    std::size_t tail_size = 1;
    for (std::size_t d : layer.tail) tail_size *= d;
    std::size_t in_tail = input.size() / input.dim(0);
    if (layer.tail.empty() || tail_size != in_tail) {
        throw std::invalid_argument("reshape_forward: cannot reshape " + input.shape_str());
    }
    std::vector<std::size_t> out_shape{input.dim(0)};
    out_shape.insert(out_shape.end(), layer.tail.begin(), layer.tail.end());
    return out_shape;
}

struct LayerBackward {
    Tensor input_grad;
    LayerGrads params;
};

LayerBackward dense_backward(const DenseLayer& layer, const Tensor& input,
                             const Tensor& output_grad) {
    const std::size_t batch = input.dim(0);
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    if (output_grad.rank() != 2 || output_grad.dim(0) != batch || output_grad.dim(1) != out) {
        throw std::invalid_argument("backprop: dense output grad shape mismatch");
    }

    Tensor z = dense_preactivation(layer, input);
    Tensor dz({batch, out});
    for (std::size_t i = 0; i < dz.size(); ++i) {
        dz[i] = output_grad[i] * activate_grad(layer.activation, z[i]);
    }

    LayerBackward r;
    r.params.has_params = true;
    r.params.weights = Tensor({in, out});
    r.params.bias = Tensor({out});
    r.input_grad = Tensor({batch, in});

    for (std::size_t b = 0; b < batch; ++b) {
        const double* xrow = &input.data()[b * in];
        const double* drow = &dz.data()[b * out];
        for (std::size_t o = 0; o < out; ++o) r.params.bias[o] += drow[o];
        for (std::size_t i = 0; i < in; ++i) {
            double* wrow = &r.params.weights.data()[i * out];
            const double xi = xrow[i];
            const double* lw = &layer.weights.data()[i * out];
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) {
                wrow[o] += xi * drow[o];
                acc += lw[o] * drow[o];
            }
            r.input_grad.at(b, i) = acc;
        }
    }
    return r;
}

LayerBackward tconv1d_backward(const TConv1dLayer& layer, const Tensor& input,
                               const Tensor& output_grad) {
    const std::size_t batch = input.dim(0);
    const std::size_t in_ch = layer.in_channels();
    const std::size_t out_ch = layer.out_channels();
    const std::size_t klen = layer.kernel_len();
    const std::size_t l_in = input.dim(2);
    const std::size_t l_out = layer.output_len(l_in);
    if (output_grad.rank() != 3 || output_grad.dim(0) != batch || output_grad.dim(1) != out_ch ||
        output_grad.dim(2) != l_out) {
        throw std::invalid_argument("backprop: tconv output grad shape mismatch");
    }

    Tensor z = tconv1d_preactivation(layer, input);
    Tensor dz({batch, out_ch, l_out});
    for (std::size_t i = 0; i < dz.size(); ++i) {
        dz[i] = output_grad[i] * activate_grad(layer.activation, z[i]);
    }

    LayerBackward r;
    r.params.has_params = true;
    r.params.weights = Tensor({in_ch, out_ch, klen});
    r.params.bias = Tensor({out_ch});
    r.input_grad = Tensor({batch, in_ch, l_in});

    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < out_ch; ++co) {
            const double* drow = &dz.data()[(b * out_ch + co) * l_out];
            double acc = 0.0;
            for (std::size_t j = 0; j < l_out; ++j) acc += drow[j];
            r.params.bias[co] += acc;
        }
        for (std::size_t ci = 0; ci < in_ch; ++ci) {
            for (std::size_t i = 0; i < l_in; ++i) {
                const double x = input.at(b, ci, i);
                const std::size_t base = i * layer.stride;
                double xgrad = 0.0;
                for (std::size_t co = 0; co < out_ch; ++co) {
                    const double* k = &layer.kernels.data()[(ci * out_ch + co) * klen];
                    double* kg = &r.params.weights.data()[(ci * out_ch + co) * klen];
                    const double* drow = &dz.data()[(b * out_ch + co) * l_out + base];
                    for (std::size_t t = 0; t < klen; ++t) {
                        kg[t] += x * drow[t];
                        xgrad += k[t] * drow[t];
                    }
                }
                r.input_grad.at(b, ci, i) = xgrad;
            }
        }
    }
    return r;
}

LayerBackward reshape_backward(const Tensor& input, const Tensor& output_grad) {
    LayerBackward r;
    r.input_grad = output_grad.reshaped(input.shape());
    return r;
}

}  // namespace

Tensor glorot_init(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
    return glorot_init_shape({in_dim, out_dim}, in_dim, out_dim, seed);
}

Tensor glorot_init_shape(std::vector<std::size_t> shape, std::size_t fan_in, std::size_t fan_out,
                         std::uint64_t seed) {
    if (fan_in == 0 || fan_out == 0) {
        throw std::invalid_argument("glorot_init: dimensions must be positive");
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (double& v : t.data()) v = rng.uniform(-limit, limit);
    return t;
}

DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation act, std::uint64_t seed) {
    DenseLayer layer;
    layer.weights = glorot_init(in_dim, out_dim, seed);
    layer.bias = Tensor({out_dim});
    layer.activation = act;
    return layer;
}

TConv1dLayer make_tconv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel_len,
                          std::size_t stride, Activation act, std::uint64_t seed) {
    if (stride == 0) {
        throw std::invalid_argument("make_tconv1d: stride must be positive");
    }
    TConv1dLayer layer;
    layer.kernels = glorot_init_shape({in_ch, out_ch, kernel_len}, in_ch * kernel_len,
                                      out_ch * kernel_len, seed);
    layer.bias = Tensor({out_ch});
    layer.stride = stride;
    layer.activation = act;
    return layer;
}

Tensor dense_forward(const DenseLayer& layer, const Tensor& input) {
    Tensor out = apply_activation(layer.activation, dense_preactivation(layer, input));
    require_finite(out, "dense_forward");
    return out;
}

Tensor tconv1d_forward(const TConv1dLayer& layer, const Tensor& input) {
    Tensor out = apply_activation(layer.activation, tconv1d_preactivation(layer, input));
    require_finite(out, "tconv1d_forward");
    return out;
}

Tensor reshape_forward(const ReshapeLayer& layer, const Tensor& input) {
    return input.reshaped(reshape_out_shape(layer, input));
}

Tensor layer_forward(const Layer& layer, const Tensor& input) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) return dense_forward(*d, input);
    if (const auto* c = std::get_if<TConv1dLayer>(&layer)) return tconv1d_forward(*c, input);
    return reshape_forward(std::get<ReshapeLayer>(layer), input);
}

Tensor network_forward(const Network& net, const Tensor& input) {
    Tensor x = input;
    for (const Layer& layer : net) x = layer_forward(layer, x);
    return x;
}

BackpropResult backprop(const Network& net, const Tensor& input, const Tensor& output_grad) {
    // Forward pass caching each layer's input.
    std::vector<Tensor> inputs;
    inputs.reserve(net.size());
    Tensor x = input;
    for (const Layer& layer : net) {
        inputs.push_back(x);
        x = layer_forward(layer, x);
    }
    if (!output_grad.same_shape(x)) {
        throw std::invalid_argument("backprop: loss gradient shape " + output_grad.shape_str() +
                                    " does not match network output " + x.shape_str());
    }

    BackpropResult result;
    result.layers.resize(net.size());
    Tensor grad = output_grad;
    for (std::size_t idx = net.size(); idx-- > 0;) {
        const Layer& layer = net[idx];
        LayerBackward lb;
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            lb = dense_backward(*d, inputs[idx], grad);
        } else if (const auto* c = std::get_if<TConv1dLayer>(&layer)) {
            lb = tconv1d_backward(*c, inputs[idx], grad);
        } else {
            lb = reshape_backward(inputs[idx], grad);
        }
        result.layers[idx] = std::move(lb.params);
        grad = std::move(lb.input_grad);
        if (result.layers[idx].has_params) {
            require_finite(result.layers[idx].weights, "backprop");
            require_finite(result.layers[idx].bias, "backprop");
        }
    }
    require_finite(grad, "backprop");
    result.input = std::move(grad);
    return result;
}

std::vector<Tensor*> parameters(Network& net) {
    std::vector<Tensor*> out;
    for (Layer& layer : net) {
        if (auto* d = std::get_if<DenseLayer>(&layer)) {
            out.push_back(&d->weights);
            out.push_back(&d->bias);
        } else if (auto* c = std::get_if<TConv1dLayer>(&layer)) {
            out.push_back(&c->kernels);
            out.push_back(&c->bias);
        }
    }
    return out;
}

std::vector<const Tensor*> parameters(const Network& net) {
    std::vector<const Tensor*> out;
    for (const Layer& layer : net) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            out.push_back(&d->weights);
            out.push_back(&d->bias);
        } else if (const auto* c = std::get_if<TConv1dLayer>(&layer)) {
            out.push_back(&c->kernels);
            out.push_back(&c->bias);
        }
    }
    return out;
}

std::vector<const Tensor*> parameter_grads(const BackpropResult& grads) {
    std::vector<const Tensor*> out;
    for (const LayerGrads& g : grads.layers) {
        if (g.has_params) {
            out.push_back(&g.weights);
            out.push_back(&g.bias);
        }
    }
    return out;
}

}  // namespace gmmn::nn
