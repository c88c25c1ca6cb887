#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gmmn {

/// Dense n-dimensional array of doubles, row-major.
///
/// The carrier for activations, parameters and gradients. Every public
/// operation in the library keeps entries finite; require_finite() is the
/// enforcement hook.
class Tensor {
public:
    Tensor() = default;

    // Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    // 1-D convenience.
    static Tensor row(std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // Row-major element access for rank 2 and 3.
    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Relabels the shape; total size must be preserved.
    Tensor reshaped(std::vector<std::size_t> new_shape) const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Throws if any entry is NaN or infinite. `what` names the operation for the
// diagnostic.
void require_finite(const Tensor& t, const char* what);

// Throws std::invalid_argument unless the shapes match.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace gmmn
