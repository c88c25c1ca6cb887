#include "gmmn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "gmmn/errors.hpp"

namespace gmmn::nn {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state) {
    require_same_shape(param, grad, "adam_step");
    require_same_shape(param, state.first_moment, "adam_step: first moment");
    require_same_shape(param, state.second_moment, "adam_step: second moment");
    for (double g : grad.data()) {
        if (!std::isfinite(g)) {
            throw divergence_error("adam_step: non-finite gradient at step " +
                                   std::to_string(state.step_count + 1));
        }
    }

    state.step_count += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));

    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        param[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    require_finite(param, "adam_step");
}

AdamOptimizer::AdamOptimizer(const Network& net, double lr) {
    for (const Tensor* p : parameters(net)) {
        states_.emplace_back(p->shape(), lr);
    }
}

void AdamOptimizer::step(Network& net, const BackpropResult& grads) {
    std::vector<Tensor*> params = parameters(net);
    std::vector<const Tensor*> gs = parameter_grads(grads);
    if (params.size() != gs.size() || params.size() != states_.size()) {
        throw std::invalid_argument("AdamOptimizer::step: gradient list does not match network");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        adam_step(*params[i], *gs[i], states_[i]);
    }
}

}  // namespace gmmn::nn
