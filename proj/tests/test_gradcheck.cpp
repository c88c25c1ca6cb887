#include <doctest.h>

#include <cmath>
#include <functional>

#include "gmmn/autoencoder.hpp"
#include "gmmn/generator.hpp"
#include "gmmn/gradcheck.hpp"
#include "gmmn/rng.hpp"

using namespace gmmn;
using namespace gmmn::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double scale = 1.0) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (double& v : t.data()) v = scale * rng.normal();
    return t;
}

// Biases start at zero, which parks ReLU pre-activations exactly on the
// kink where central differences are undefined. Nudge every parameter off
// the kink before checking.
void randomize_biases(Network& net, std::uint64_t seed) {
    Rng rng(seed);
    for (Layer& layer : net) {
        Tensor* bias = nullptr;
        if (auto* d = std::get_if<DenseLayer>(&layer)) bias = &d->bias;
        if (auto* c = std::get_if<TConv1dLayer>(&layer)) bias = &c->bias;
        if (bias) {
            for (double& v : bias->data()) v = 0.2 * rng.normal();
        }
    }
}

// Finite-difference error for one parameter tensor of a network under a
// scalar loss of the network output.
double check_param(const Network& net, const Tensor& input,
                   const std::function<double(const Tensor&)>& loss,
                   const std::function<Tensor(const Tensor&)>& loss_grad, std::size_t param_idx) {
    Tensor out = network_forward(net, input);
    BackpropResult grads = backprop(net, input, loss_grad(out));
    const Tensor* analytic = parameter_grads(grads)[param_idx];
    const Tensor* current = parameters(net)[param_idx];

    auto loss_at = [&](const Tensor& candidate) {
        Network probe = net;
        *parameters(probe)[param_idx] = candidate;
        return loss(network_forward(probe, input));
    };
    return gradient_check(loss_at, *current, *analytic);
}

double sum_loss(const Tensor& out) {
    double acc = 0.0;
    for (double v : out.data()) acc += v;
    return acc;
}

Tensor sum_loss_grad(const Tensor& out) {
    Tensor g(out.shape());
    for (double& v : g.data()) v = 1.0;
    return g;
}

}  // namespace

TEST_CASE("quadratic loss gradient is exact up to rounding") {
    Tensor p = random_tensor({6}, 77);
    auto loss = [](const Tensor& t) {
        double acc = 0.0;
        for (double v : t.data()) acc += 0.5 * v * v;
        return acc;
    };
    CHECK(gradient_check(loss, p, p) < 1e-8);
}

TEST_CASE("gradient_check rejects a NaN loss") {
    Tensor p({2}, {1.0, 2.0});
    auto loss = [](const Tensor&) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS(gradient_check(loss, p, p));
}

TEST_CASE("dense layer gradients pass finite differences for every activation") {
    for (Activation act : {Activation::kIdentity, Activation::kRelu, Activation::kTanh}) {
        Network net{make_dense(3, 4, act, 51)};
        randomize_biases(net, 53);
        Tensor x = random_tensor({2, 3}, 52);
        for (std::size_t p = 0; p < 2; ++p) {
            CHECK(check_param(net, x, sum_loss, sum_loss_grad, p) < 1e-4);
        }
    }
}

TEST_CASE("tconv layer gradients pass finite differences for every activation") {
    for (Activation act : {Activation::kIdentity, Activation::kRelu, Activation::kTanh}) {
        Network net{make_tconv1d(2, 2, 3, 2, act, 61)};
        randomize_biases(net, 63);
        Tensor x = random_tensor({2, 2, 3}, 62);
        for (std::size_t p = 0; p < 2; ++p) {
            CHECK(check_param(net, x, sum_loss, sum_loss_grad, p) < 1e-4);
        }
    }
}

TEST_CASE("gradients flow correctly through reshape layers") {
    Network net;
    net.push_back(make_dense(3, 8, Activation::kTanh, 71));
    net.push_back(ReshapeLayer{{2, 4}});
    net.push_back(make_tconv1d(2, 1, 2, 2, Activation::kTanh, 72));
    net.push_back(ReshapeLayer{{8}});
    randomize_biases(net, 74);
    Tensor x = random_tensor({2, 3}, 73);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(check_param(net, x, sum_loss, sum_loss_grad, p) < 1e-4);
    }
}

TEST_CASE("input gradient matches finite differences") {
    Network net;
    net.push_back(make_dense(3, 5, Activation::kRelu, 81));
    net.push_back(make_dense(5, 2, Activation::kTanh, 82));
    Tensor x = random_tensor({2, 3}, 83);
    Tensor out = network_forward(net, x);
    BackpropResult grads = backprop(net, x, sum_loss_grad(out));
    auto loss_at = [&](const Tensor& candidate) {
        return sum_loss(network_forward(net, candidate));
    };
    CHECK(gradient_check(loss_at, x, grads.input) < 1e-4);
}

TEST_CASE("reconstruction loss gradients pass on a 4-dim toy auto-encoder") {
    // 4 -> 3 -> 2 -> 3 -> 4, same activation plan as the real model.
    Network net;
    net.push_back(make_dense(4, 3, Activation::kRelu, 91));
    net.push_back(make_dense(3, 2, Activation::kRelu, 92));
    net.push_back(make_dense(2, 3, Activation::kRelu, 93));
    net.push_back(make_dense(3, 4, Activation::kTanh, 94));
    randomize_biases(net, 96);
    Tensor x = random_tensor({3, 4}, 95, 0.5);

    auto loss = [&](const Tensor& out) { return mse_loss(out, x); };
    auto grad = [&](const Tensor& out) { return mse_loss_grad(out, x); };
    for (std::size_t p = 0; p < 8; ++p) {
        CHECK(check_param(net, x, loss, grad, p) < 1e-4);
    }
}

TEST_CASE("squared-MMD loss gradients pass through generator and frozen encoder") {
    // Toy chain with the production layer kinds: dense -> reshape -> two
    // transposed convolutions -> truncate -> dense encoder -> MMD against a
    // fixed real population. Every parameter tensor has <= 16 entries.
    Network gen;
    gen.push_back(make_dense(2, 4, Activation::kRelu, 101));
    gen.push_back(ReshapeLayer{{2, 2}});
    gen.push_back(make_tconv1d(2, 2, 2, 1, Activation::kRelu, 102));
    gen.push_back(make_tconv1d(2, 1, 2, 1, Activation::kTanh, 103));
    gen.push_back(ReshapeLayer{{4}});  // raw length 4, truncate to 3 below
    randomize_biases(gen, 107);

    Network encoder{make_dense(3, 2, Activation::kRelu, 104)};
    randomize_biases(encoder, 108);

    const std::size_t population = 3;
    const std::size_t raw_len = 4;
    const std::size_t data_len = 3;
    Tensor noise = random_tensor({population, 2}, 105);
    Tensor real = random_tensor({population, data_len}, 106, 0.5);
    const double bandwidth = 0.7;

    auto truncate = [&](const Tensor& raw) {
        Tensor out({population, data_len});
        for (std::size_t b = 0; b < population; ++b) {
            for (std::size_t i = 0; i < data_len; ++i) out.at(b, i) = raw.data()[b * raw_len + i];
        }
        return out;
    };

    Tensor real_latents = network_forward(encoder, real);

    auto full_loss = [&](const Network& g) {
        Tensor raw = network_forward(g, noise);
        Tensor gen_latents = network_forward(encoder, truncate(raw));
        return mmd2(gen_latents, real_latents, bandwidth);
    };

    // Analytic chain.
    Tensor raw = network_forward(gen, noise);
    Tensor gen_data = truncate(raw);
    Tensor gen_latents = network_forward(encoder, gen_data);
    Tensor latent_grad = mmd2_grad(gen_latents, real_latents, bandwidth);
    BackpropResult enc_grads = backprop(encoder, gen_data, latent_grad);
    Tensor raw_grad({population, raw_len});
    for (std::size_t b = 0; b < population; ++b) {
        for (std::size_t i = 0; i < data_len; ++i) {
            raw_grad.data()[b * raw_len + i] = enc_grads.input.at(b, i);
        }
    }
    BackpropResult gen_grads = backprop(gen, noise, raw_grad);

    std::vector<const Tensor*> analytic = parameter_grads(gen_grads);
    for (std::size_t p = 0; p < analytic.size(); ++p) {
        Network probe = gen;
        const Tensor* current = parameters(gen)[p];
        auto loss_at = [&](const Tensor& candidate) {
            *parameters(probe)[p] = candidate;
            return full_loss(probe);
        };
        CHECK(gradient_check(loss_at, *current, *analytic[p]) < 1e-4);
    }

    // Also check the gradient that the frozen encoder hands back to the
    // generator output.
    auto loss_at_data = [&](const Tensor& candidate) {
        Tensor latents = network_forward(encoder, candidate);
        return mmd2(latents, real_latents, bandwidth);
    };
    CHECK(gradient_check(loss_at_data, gen_data, enc_grads.input) < 1e-4);
}

TEST_CASE("mmd2_grad itself passes finite differences") {
    Tensor a = random_tensor({3, 2}, 111);
    Tensor b = random_tensor({3, 2}, 112);
    const double bandwidth = 1.3;
    Tensor analytic = mmd2_grad(a, b, bandwidth);
    auto loss = [&](const Tensor& candidate) { return mmd2(candidate, b, bandwidth); };
    CHECK(gradient_check(loss, a, analytic) < 1e-6);
}
