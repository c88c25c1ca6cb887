#include "gmmn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmmn::nn {

double gradient_check(const std::function<double(const Tensor&)>& loss_fn, const Tensor& params,
                      const Tensor& analytic_grad, double eps) {
    if (eps <= 0.0) {
        throw std::invalid_argument("gradient_check: eps must be positive");
    }
    require_same_shape(params, analytic_grad, "gradient_check");

    Tensor probe = params;
    double max_err = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + eps;
        const double up = loss_fn(probe);
        probe[i] = saved - eps;
        const double down = loss_fn(probe);
        probe[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw std::runtime_error("gradient_check: loss function returned a non-finite value");
        }
        const double numeric = (up - down) / (2.0 * eps);
        const double analytic = analytic_grad[i];
        const double err =
            std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic) + std::abs(numeric));
        max_err = std::max(max_err, err);
    }
    return max_err;
}

}  // namespace gmmn::nn
