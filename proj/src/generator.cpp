#include "gmmn/generator.hpp"

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

ScenarioGenerator make_generator(std::size_t noise_dim, std::uint64_t seed) {
    if (noise_dim == 0) {
        throw std::invalid_argument("make_generator: noise_dim must be positive");
    }
    ScenarioGenerator gen;
    gen.noise_dim = noise_dim;
    gen.net.push_back(nn::make_dense(noise_dim, 128, Activation::kRelu, derive_seed(seed, 10)));
    gen.net.push_back(nn::ReshapeLayer{{32, 4}});
    gen.net.push_back(nn::make_tconv1d(32, 32, 4, 3, Activation::kRelu, derive_seed(seed, 11)));
    gen.net.push_back(nn::make_tconv1d(32, 16, 4, 3, Activation::kRelu, derive_seed(seed, 12)));
    gen.net.push_back(nn::make_tconv1d(16, 1, 3, 2, Activation::kTanh, derive_seed(seed, 13)));
    gen.net.push_back(nn::ReshapeLayer{{kGeneratorRawLen}});

    const auto chain = generator_length_chain(gen);
    if (chain != std::vector<std::size_t>{4, 13, 40, 81}) {
        throw std::logic_error("make_generator: upsampling chain is not 4-13-40-81");
    }
    return gen;
}

std::vector<std::size_t> generator_length_chain(const ScenarioGenerator& gen) {
    std::vector<std::size_t> chain;
    std::size_t len = 0;
    for (const nn::Layer& layer : gen.net) {
        if (const auto* r = std::get_if<nn::ReshapeLayer>(&layer)) {
            if (r->tail.size() == 2) {
                len = r->tail[1];
                chain.push_back(len);
            }
        } else if (const auto* c = std::get_if<nn::TConv1dLayer>(&layer)) {
            len = c->output_len(len);
            chain.push_back(len);
        }
    }
    return chain;
}

Tensor sample_noise(std::size_t count, std::size_t noise_dim, std::uint64_t seed) {
    if (count == 0 || noise_dim == 0) {
        throw std::invalid_argument("sample_noise: count and noise_dim must be positive");
    }
    Tensor noise({count, noise_dim});
    Rng rng(seed);
    for (double& v : noise.data()) v = rng.normal();
    return noise;
}

Tensor generate(const ScenarioGenerator& gen, const Tensor& noise) {
    if (noise.rank() != 2 || noise.dim(1) != gen.noise_dim) {
        throw std::invalid_argument("generate: noise shape " + noise.shape_str() +
                                    " does not match noise_dim " + std::to_string(gen.noise_dim));
    }
    Tensor raw = nn::network_forward(gen.net, noise);  // [B, 81]
    const std::size_t batch = raw.dim(0);
    Tensor out({batch, data::kSampleDim});
    for (std::size_t b = 0; b < batch; ++b) {
        const double* src = &raw.data()[b * kGeneratorRawLen];
        std::copy(src, src + data::kSampleDim, out.data().begin() + b * data::kSampleDim);
    }
    return out;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

void check_bandwidth(double bandwidth) {
    if (!(bandwidth > 0.0)) {
        throw std::invalid_argument("gaussian kernel: bandwidth must be positive");
    }
}

}  // namespace

double gaussian_kernel(const Tensor& x, const Tensor& y, double bandwidth) {
    check_bandwidth(bandwidth);
    require_same_shape(x, y, "gaussian_kernel");
    return std::exp(-sq_dist(x.data().data(), y.data().data(), x.size()) / (2.0 * bandwidth));
}

double mmd2(const Tensor& gen_rows, const Tensor& real_rows, double bandwidth) {
    check_bandwidth(bandwidth);
    if (gen_rows.rank() != 2 || real_rows.rank() != 2 || gen_rows.dim(1) != real_rows.dim(1)) {
        throw std::invalid_argument("mmd2: expected [N,d] and [M,d] populations");
    }
    const std::size_t n = gen_rows.dim(0);
    const std::size_t m = real_rows.dim(0);
    if (n != m) {
        throw std::invalid_argument("mmd2: populations must be the same size (N == M)");
    }
    const std::size_t d = gen_rows.dim(1);
    const double* g = gen_rows.data().data();
    const double* r = real_rows.data().data();
    const double inv_2bw = 1.0 / (2.0 * bandwidth);

    // Off-diagonal same-population terms come in symmetric pairs; diagonal
    // terms of the V-statistic are k(x,x) = 1.
    double gg = static_cast<double>(n);
    double rr = static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            gg += 2.0 * std::exp(-sq_dist(g + i * d, g + j * d, d) * inv_2bw);
            rr += 2.0 * std::exp(-sq_dist(r + i * d, r + j * d, d) * inv_2bw);
        }
    }
    double gr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            gr += std::exp(-sq_dist(g + i * d, r + j * d, d) * inv_2bw);
        }
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double m2 = static_cast<double>(m) * static_cast<double>(m);
    double value = gg / n2 - 2.0 * gr / (static_cast<double>(n) * static_cast<double>(m)) + rr / m2;
    if (value < 0.0) value = 0.0;
    return value;
}

Tensor mmd2_grad(const Tensor& gen_rows, const Tensor& real_rows, double bandwidth) {
    check_bandwidth(bandwidth);
    if (gen_rows.rank() != 2 || real_rows.rank() != 2 || gen_rows.dim(1) != real_rows.dim(1)) {
        throw std::invalid_argument("mmd2_grad: expected [N,d] and [M,d] populations");
    }
    const std::size_t n = gen_rows.dim(0);
    const std::size_t m = real_rows.dim(0);
    if (n != m) {
        throw std::invalid_argument("mmd2_grad: populations must be the same size (N == M)");
    }
    const std::size_t d = gen_rows.dim(1);
    const double* g = gen_rows.data().data();
    const double* r = real_rows.data().data();
    const double inv_bw = 1.0 / bandwidth;
    const double inv_2bw = 0.5 * inv_bw;

    Tensor grad({n, d});
    for (std::size_t a = 0; a < n; ++a) {
        double* out = &grad.data()[a * d];
        const double* ga = g + a * d;
        // Same-population term: both index positions of k(g_a, g_j) contribute.
        for (std::size_t j = 0; j < n; ++j) {
            if (j == a) continue;
            const double* gj = g + j * d;
            const double k = std::exp(-sq_dist(ga, gj, d) * inv_2bw);
            const double coef = -2.0 * k * inv_bw / (static_cast<double>(n) * static_cast<double>(n));
            for (std::size_t t = 0; t < d; ++t) out[t] += coef * (ga[t] - gj[t]);
        }
        // Cross term.
        for (std::size_t j = 0; j < m; ++j) {
            const double* rj = r + j * d;
            const double k = std::exp(-sq_dist(ga, rj, d) * inv_2bw);
            const double coef = 2.0 * k * inv_bw / (static_cast<double>(n) * static_cast<double>(m));
            for (std::size_t t = 0; t < d; ++t) out[t] += coef * (ga[t] - rj[t]);
        }
    }
    require_finite(grad, "mmd2_grad");
    return grad;
}

double median_bandwidth(const Tensor& rows) {
    if (rows.rank() != 2 || rows.dim(0) < 2) {
        throw std::invalid_argument("median_bandwidth: need at least 2 rows");
    }
    const std::size_t k = rows.dim(0);
    const std::size_t d = rows.dim(1);
    const double* p = rows.data().data();
    std::vector<double> dists;
    dists.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            dists.push_back(sq_dist(p + i * d, p + j * d, d));
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t half = dists.size() / 2;
    const double median =
        dists.size() % 2 ? dists[half] : 0.5 * (dists[half - 1] + dists[half]);
    if (!(median > 0.0)) {
        throw data_error("median_bandwidth: median pairwise distance is zero (degenerate rows)");
    }
    return median;
}

GenTrainResult train_generator(ScenarioGenerator& gen, const AutoEncoder& frozen_encoder,
                               const Tensor& train_rows, const GenTrainOptions& opts) {
    if (!frozen_encoder.trained) {
        throw std::invalid_argument("train_generator: encoder must be trained first");
    }
    if (train_rows.rank() != 2 || train_rows.dim(1) != data::kSampleDim) {
        throw std::invalid_argument("train_generator: expected [n,72] training matrix");
    }
    const std::size_t n = train_rows.dim(0);
    if (n == 0) {
        throw data_error("train_generator: empty training set");
    }
    if (opts.batch_size == 0 || opts.epochs == 0) {
        throw std::invalid_argument("train_generator: epochs and batch_size must be positive");
    }

    GenTrainResult result;
    if (opts.bandwidth) {
        if (!(*opts.bandwidth > 0.0)) {
            throw std::invalid_argument("train_generator: bandwidth must be positive");
        }
        result.bandwidth = *opts.bandwidth;
    } else {
        result.bandwidth = median_bandwidth(encode(frozen_encoder, train_rows));
    }

    nn::AdamOptimizer optimizer(gen.net, opts.learning_rate);
    Rng shuffle_rng(derive_seed(opts.seed, 200));
    std::uint64_t noise_stream = 0;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);

    result.loss_history.reserve(opts.epochs);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        shuffle_rng.shuffle(idx);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += opts.batch_size) {
            const std::size_t stop = std::min(n, start + opts.batch_size);
            const std::size_t nb = stop - start;

            Tensor real({nb, data::kSampleDim});
            for (std::size_t r = start; r < stop; ++r) {
                const double* src = &train_rows.data()[idx[r] * data::kSampleDim];
                std::copy(src, src + data::kSampleDim,
                          real.data().begin() + (r - start) * data::kSampleDim);
            }

            Tensor noise =
                sample_noise(nb, gen.noise_dim, derive_seed(opts.seed, 300 + noise_stream++));
            Tensor raw = nn::network_forward(gen.net, noise);  // [nb, 81]
            Tensor gen72({nb, data::kSampleDim});
            for (std::size_t b = 0; b < nb; ++b) {
                const double* src = &raw.data()[b * kGeneratorRawLen];
                std::copy(src, src + data::kSampleDim,
                          gen72.data().begin() + b * data::kSampleDim);
            }

            Tensor gen_latents = encode(frozen_encoder, gen72);
            Tensor real_latents = encode(frozen_encoder, real);
            loss_sum += mmd2(gen_latents, real_latents, result.bandwidth) * static_cast<double>(nb);

            // Chain: d(mmd2)/d(latents) -> frozen encoder input grad -> zero-pad
            // the truncated tail -> generator parameters.
            Tensor latent_grad = mmd2_grad(gen_latents, real_latents, result.bandwidth);
            nn::BackpropResult enc_grads = nn::backprop(frozen_encoder.encoder, gen72, latent_grad);
            Tensor raw_grad({nb, kGeneratorRawLen});
            for (std::size_t b = 0; b < nb; ++b) {
                const double* src = &enc_grads.input.data()[b * data::kSampleDim];
                std::copy(src, src + data::kSampleDim,
                          raw_grad.data().begin() + b * kGeneratorRawLen);
            }
            nn::BackpropResult gen_grads = nn::backprop(gen.net, noise, raw_grad);
            optimizer.step(gen.net, gen_grads);
        }
        const double epoch_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw divergence_error("train_generator: non-finite loss at epoch " +
                                   std::to_string(epoch + 1));
        }
        result.loss_history.push_back(epoch_loss);
    }
    gen.trained = true;
    return result;
}

}  // namespace gmmn
