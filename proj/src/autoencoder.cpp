#include "gmmn/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gmmn/adam.hpp"
#include "gmmn/dataset.hpp"
#include "gmmn/errors.hpp"
#include "gmmn/rng.hpp"

namespace gmmn {

using nn::Activation;
using nn::Network;

AutoEncoder make_autoencoder(std::uint64_t seed) {
    AutoEncoder ae;
    ae.encoder.push_back(nn::make_dense(72, 64, Activation::kRelu, derive_seed(seed, 0)));
    ae.encoder.push_back(nn::make_dense(64, 32, Activation::kRelu, derive_seed(seed, 1)));
    ae.encoder.push_back(nn::make_dense(32, kLatentDim, Activation::kRelu, derive_seed(seed, 2)));
    ae.decoder.push_back(nn::make_dense(kLatentDim, 16, Activation::kRelu, derive_seed(seed, 3)));
    ae.decoder.push_back(nn::make_dense(16, 32, Activation::kRelu, derive_seed(seed, 4)));
    ae.decoder.push_back(nn::make_dense(32, 64, Activation::kRelu, derive_seed(seed, 5)));
    ae.decoder.push_back(nn::make_dense(64, 72, Activation::kTanh, derive_seed(seed, 6)));
    return ae;
}

Tensor encode(const AutoEncoder& ae, const Tensor& batch) {
    return nn::network_forward(ae.encoder, batch);
}

Tensor decode(const AutoEncoder& ae, const Tensor& latents) {
    return nn::network_forward(ae.decoder, latents);
}

double mse_loss(const Tensor& reconstructed, const Tensor& target) {
    require_same_shape(reconstructed, target, "mse_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < reconstructed.size(); ++i) {
        const double d = reconstructed[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(reconstructed.size());
}

Tensor mse_loss_grad(const Tensor& reconstructed, const Tensor& target) {
    require_same_shape(reconstructed, target, "mse_loss_grad");
    Tensor grad(reconstructed.shape());
    const double scale = 2.0 / static_cast<double>(reconstructed.size());
    for (std::size_t i = 0; i < reconstructed.size(); ++i) {
        grad[i] = scale * (reconstructed[i] - target[i]);
    }
    return grad;
}

namespace {

Tensor take_rows(const Tensor& rows, const std::vector<std::size_t>& idx, std::size_t begin,
                 std::size_t end) {
    const std::size_t dim = rows.dim(1);
    Tensor out({end - begin, dim});
    for (std::size_t r = begin; r < end; ++r) {
        const double* src = &rows.data()[idx[r] * dim];
        std::copy(src, src + dim, out.data().begin() + (r - begin) * dim);
    }
    return out;
}

}  // namespace

std::vector<double> train_autoencoder(AutoEncoder& ae, const Tensor& train_rows,
                                      const AeTrainOptions& opts) {
    if (train_rows.rank() != 2 || train_rows.dim(1) != data::kSampleDim) {
        throw std::invalid_argument("train_autoencoder: expected [n,72] training matrix");
    }
    const std::size_t n = train_rows.dim(0);
    if (n == 0) {
        throw data_error("train_autoencoder: empty training set");
    }
    if (opts.batch_size == 0 || opts.epochs == 0) {
        throw std::invalid_argument("train_autoencoder: epochs and batch_size must be positive");
    }

    // Encoder and decoder are updated jointly; view them as one stack.
    Network net = ae.encoder;
    net.insert(net.end(), ae.decoder.begin(), ae.decoder.end());
    nn::AdamOptimizer optimizer(net, opts.learning_rate);

    Rng shuffle_rng(derive_seed(opts.seed, 100));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);

    std::vector<double> history;
    history.reserve(opts.epochs);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        shuffle_rng.shuffle(idx);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += opts.batch_size) {
            const std::size_t stop = std::min(n, start + opts.batch_size);
            Tensor batch = take_rows(train_rows, idx, start, stop);
            Tensor out = nn::network_forward(net, batch);
            loss_sum += mse_loss(out, batch) * static_cast<double>(stop - start);
            nn::BackpropResult grads = nn::backprop(net, batch, mse_loss_grad(out, batch));
            optimizer.step(net, grads);
        }
        const double epoch_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw divergence_error("train_autoencoder: non-finite loss at epoch " +
                                   std::to_string(epoch + 1));
        }
        history.push_back(epoch_loss);
    }

    // Write the trained stack back into the encoder/decoder split.
    std::copy(net.begin(), net.begin() + ae.encoder.size(), ae.encoder.begin());
    std::copy(net.begin() + ae.encoder.size(), net.end(), ae.decoder.begin());
    ae.trained = true;
    return history;
}

}  // namespace gmmn
