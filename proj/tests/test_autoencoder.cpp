#include <doctest.h>

#include <cmath>

#include "gmmn/autoencoder.hpp"
#include "gmmn/dataset.hpp"
#include "gmmn/errors.hpp"
#include "gmmn/generator.hpp"
#include "gmmn/rng.hpp"

using namespace gmmn;
using namespace gmmn::nn;

namespace {

Tensor rows_of(std::size_t n, std::uint64_t seed, double scale = 0.6) {
    Tensor t({n, data::kSampleDim});
    Rng rng(seed);
    for (double& v : t.data()) v = scale * rng.uniform(-1.0, 1.0);
    return t;
}

std::vector<const Tensor*> all_params(const AutoEncoder& ae) {
    std::vector<const Tensor*> out = parameters(ae.encoder);
    auto dec = parameters(ae.decoder);
    out.insert(out.end(), dec.begin(), dec.end());
    return out;
}

}  // namespace

TEST_CASE("architecture: encoder 72-64-32-16, decoder 16-16-32-64-72, tanh head") {
    AutoEncoder ae = make_autoencoder(1);
    REQUIRE(ae.encoder.size() == 3);
    REQUIRE(ae.decoder.size() == 4);
    const std::size_t enc_dims[][2] = {{72, 64}, {64, 32}, {32, 16}};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& d = std::get<DenseLayer>(ae.encoder[i]);
        CHECK(d.in_dim() == enc_dims[i][0]);
        CHECK(d.out_dim() == enc_dims[i][1]);
        CHECK(d.activation == Activation::kRelu);
    }
    const std::size_t dec_dims[][2] = {{16, 16}, {16, 32}, {32, 64}, {64, 72}};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& d = std::get<DenseLayer>(ae.decoder[i]);
        CHECK(d.in_dim() == dec_dims[i][0]);
        CHECK(d.out_dim() == dec_dims[i][1]);
        CHECK(d.activation == (i == 3 ? Activation::kTanh : Activation::kRelu));
    }
    CHECK(kLatentDim == 16);
    CHECK_FALSE(ae.trained);
}

TEST_CASE("encode output shape is [B,16] for any batch") {
    AutoEncoder ae = make_autoencoder(2);
    for (std::size_t b : {1u, 3u, 32u}) {
        Tensor latents = encode(ae, rows_of(b, b));
        CHECK(latents.shape() == std::vector<std::size_t>{b, kLatentDim});
    }
}

TEST_CASE("all-zero weights give all-zero latents") {
    AutoEncoder ae = make_autoencoder(3);
    for (Tensor* p : parameters(ae.encoder)) {
        for (double& v : p->data()) v = 0.0;
    }
    Tensor latents = encode(ae, rows_of(4, 5));
    for (double v : latents.data()) CHECK(v == 0.0);
}

TEST_CASE("identical rows encode to identical latents") {
    AutoEncoder ae = make_autoencoder(4);
    Tensor row = rows_of(1, 6);
    Tensor batch({3, data::kSampleDim});
    for (std::size_t b = 0; b < 3; ++b) {
        std::copy(row.data().begin(), row.data().end(),
                  batch.data().begin() + b * data::kSampleDim);
    }
    Tensor latents = encode(ae, batch);
    for (std::size_t b = 1; b < 3; ++b) {
        for (std::size_t j = 0; j < kLatentDim; ++j) {
            CHECK(latents.at(b, j) == latents.at(0, j));
        }
    }
}

TEST_CASE("decode outputs [B,72] strictly inside (-1,1)") {
    AutoEncoder ae = make_autoencoder(7);
    Rng rng(8);
    Tensor latents({5, kLatentDim});
    for (double& v : latents.data()) v = rng.normal();
    Tensor out = decode(ae, latents);
    CHECK(out.shape() == std::vector<std::size_t>{5, data::kSampleDim});
    for (double v : out.data()) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("mse_loss examples") {
    CHECK(mse_loss(Tensor({2}, {1, 2}), Tensor({2}, {1, 2})) == 0.0);
    CHECK(mse_loss(Tensor({2}, {1, 2}), Tensor({2}, {1, 4})) == 2.0);
    // Permuting batch order leaves the loss unchanged.
    Tensor a({2, 2}, {1, 2, 3, 4});
    Tensor b({2, 2}, {0, 1, 5, 2});
    Tensor a_swapped({2, 2}, {3, 4, 1, 2});
    Tensor b_swapped({2, 2}, {5, 2, 0, 1});
    CHECK(mse_loss(a, b) == mse_loss(a_swapped, b_swapped));
    CHECK_THROWS_AS(mse_loss(Tensor({2}), Tensor({3})), std::invalid_argument);
}

TEST_CASE("training reduces the loss and records one value per epoch") {
    AutoEncoder ae = make_autoencoder(10);
    Tensor rows = rows_of(48, 11);
    AeTrainOptions opts;
    opts.epochs = 30;
    opts.batch_size = 16;
    opts.seed = 12;
    std::vector<double> history = train_autoencoder(ae, rows, opts);
    REQUIRE(history.size() == 30);
    for (double v : history) CHECK(std::isfinite(v));
    CHECK(history.back() < history.front());
    CHECK(ae.trained);
}

TEST_CASE("training is bitwise deterministic per seed") {
    Tensor rows = rows_of(40, 21);
    AeTrainOptions opts;
    opts.epochs = 8;
    opts.batch_size = 8;
    opts.seed = 22;

    AutoEncoder a = make_autoencoder(20);
    AutoEncoder b = make_autoencoder(20);
    std::vector<double> ha = train_autoencoder(a, rows, opts);
    std::vector<double> hb = train_autoencoder(b, rows, opts);
    CHECK(ha == hb);
    auto pa = all_params(a);
    auto pb = all_params(b);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->data() == pb[i]->data());
}

TEST_CASE("training rejects an empty set and never touches other models") {
    AutoEncoder ae = make_autoencoder(30);
    AeTrainOptions opts;
    opts.epochs = 2;
    CHECK_THROWS(train_autoencoder(ae, Tensor({1, 16}), opts));

    // A bystander generator must be bit-identical across AE training.
    ScenarioGenerator gen = make_generator(kDefaultNoiseDim, 31);
    std::vector<std::vector<double>> before;
    for (const Tensor* p : parameters(gen.net)) before.push_back(p->data());
    Tensor rows = rows_of(32, 32);
    opts.epochs = 3;
    opts.seed = 33;
    train_autoencoder(ae, rows, opts);
    auto after = parameters(gen.net);
    for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i]->data() == before[i]);
}

TEST_CASE("overfitting a single repeated sample reconstructs it") {
    // One sample repeated: rank-1 data, so the 16-dim bottleneck is ample.
    Rng rng(40);
    Tensor row({1, data::kSampleDim});
    for (double& v : row.data()) v = 0.7 * rng.uniform(-1.0, 1.0);
    Tensor rows({24, data::kSampleDim});
    for (std::size_t b = 0; b < 24; ++b) {
        std::copy(row.data().begin(), row.data().end(),
                  rows.data().begin() + b * data::kSampleDim);
    }
    AutoEncoder ae = make_autoencoder(41);
    AeTrainOptions opts;
    opts.epochs = 400;
    opts.batch_size = 24;
    opts.seed = 42;
    std::vector<double> history = train_autoencoder(ae, rows, opts);
    CHECK(history.back() < 1e-4);
    Tensor rec = decode(ae, encode(ae, row));
    CHECK(mse_loss(rec, row) < 1e-4);
}

TEST_CASE("compression sanity: low-rank data compresses, white noise cannot") {
    // 16-dim bottleneck: rank-1 structured data reaches far lower loss than
    // full-rank noise under the same budget.
    Rng rng(50);
    Tensor basis({1, data::kSampleDim});
    for (double& v : basis.data()) v = rng.uniform(-0.8, 0.8);
    Tensor low_rank({64, data::kSampleDim});
    for (std::size_t b = 0; b < 64; ++b) {
        const double coef = 0.2 + 0.8 * rng.uniform01();
        for (std::size_t i = 0; i < data::kSampleDim; ++i) {
            low_rank.at(b, i) = coef * basis[0 * data::kSampleDim + i];
        }
    }
    Tensor noise({64, data::kSampleDim});
    for (double& v : noise.data()) v = rng.uniform(-0.8, 0.8);

    AeTrainOptions opts;
    opts.epochs = 300;
    opts.batch_size = 32;
    opts.seed = 51;
    AutoEncoder ae_low = make_autoencoder(52);
    AutoEncoder ae_noise = make_autoencoder(52);
    const double low_final = train_autoencoder(ae_low, low_rank, opts).back();
    const double noise_final = train_autoencoder(ae_noise, noise, opts).back();

    CHECK(low_final < 1e-4);
    CHECK(noise_final > 1e-3);
    CHECK(noise_final > 50.0 * low_final);
}

TEST_CASE("encode-decode of any input stays in (-1,1)") {
    AutoEncoder ae = make_autoencoder(60);
    Tensor rows = rows_of(16, 61, 3.0);  // even out-of-range inputs
    Tensor rec = decode(ae, encode(ae, rows));
    for (double v : rec.data()) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
    }
}
