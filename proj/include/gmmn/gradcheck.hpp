#pragma once

#include <functional>

#include "gmmn/tensor.hpp"

namespace gmmn::nn {

// Central finite-difference verification of an analytic gradient.
//
// `loss_fn` evaluates the scalar loss at a candidate parameter tensor;
// `analytic_grad` is the gradient under test, evaluated at `params`.
// Returns the max over coordinates of
//   |analytic - numeric| / max(1, |analytic| + |numeric|).
// Throws if loss_fn produces a non-finite value.
double gradient_check(const std::function<double(const Tensor&)>& loss_fn, const Tensor& params,
                      const Tensor& analytic_grad, double eps = 1e-5);

}  // namespace gmmn::nn
