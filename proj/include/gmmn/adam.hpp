#pragma once

#include <vector>

#include "gmmn/layers.hpp"
#include "gmmn/tensor.hpp"

namespace gmmn::nn {

/// Per-parameter Adam state. Moments share the parameter's shape;
/// step_count advances by exactly one per update.
struct AdamState {
    Tensor first_moment;
    Tensor second_moment;
    std::size_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 0.001;

    AdamState() = default;
    AdamState(std::vector<std::size_t> shape, double lr)
        : first_moment(shape), second_moment(shape), learning_rate(lr) {}
};

// One bias-corrected Adam update, in place. Rejects non-finite gradients
// with a diagnostic (divergence_error).
void adam_step(Tensor& param, const Tensor& grad, AdamState& state);

/// Adam states for every parameter of a network, in parameters() order.
class AdamOptimizer {
public:
    AdamOptimizer(const Network& net, double lr);

    // Applies one update to each parameter from the matching gradients.
    void step(Network& net, const BackpropResult& grads);

private:
    std::vector<AdamState> states_;
};

}  // namespace gmmn::nn
