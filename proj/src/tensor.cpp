#include "gmmn/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmmn {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& shape) {
    if (shape.empty()) {
        throw std::invalid_argument("Tensor: empty shape");
    }
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) {
            throw std::invalid_argument("Tensor: zero-sized dimension");
        }
        n *= d;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    data_.assign(checked_size(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_size(shape_) != data_.size()) {
        throw std::invalid_argument("Tensor: shape " + shape_str() + " does not match data length " +
                                    std::to_string(data_.size()));
    }
}

Tensor Tensor::row(std::vector<double> values) {
    std::vector<std::size_t> shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
    if (checked_size(new_shape) != data_.size()) {
        throw std::invalid_argument("Tensor::reshaped: incompatible total size");
    }
    return Tensor(std::move(new_shape), data_);
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << ",";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

void require_finite(const Tensor& t, const char* what) {
    for (double v : t.data()) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(std::string(what) + ": non-finite value " + std::to_string(v));
        }
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                                    b.shape_str());
    }
}

}  // namespace gmmn
