#include "gmmn/archive.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gmmn/errors.hpp"
#include "gmmn/fileio.hpp"

namespace gmmn {

namespace {

constexpr char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const unsigned char* bytes, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int chunk = bytes[i] << 16;
        if (i + 1 < len) chunk |= bytes[i + 1] << 8;
        if (i + 2 < len) chunk |= bytes[i + 2];
        out.push_back(kB64Chars[(chunk >> 18) & 63]);
        out.push_back(kB64Chars[(chunk >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64Chars[(chunk >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kB64Chars[chunk & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) {
        throw data_error("archive: base64 payload length not a multiple of 4");
    }
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && k >= 2) {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = value_of(c);
                if (vals[k] < 0 || pad > 0) {
                    throw data_error("archive: invalid base64 payload");
                }
            }
        }
        const unsigned int chunk = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back((chunk >> 16) & 0xFF);
        if (pad < 2) out.push_back((chunk >> 8) & 0xFF);
        if (pad < 1) out.push_back(chunk & 0xFF);
    }
    return out;
}

nlohmann::json tensor_json(const Tensor& t) {
    nlohmann::json j;
    j["shape"] = t.shape();
    j["data_b64"] = base64_encode(reinterpret_cast<const unsigned char*>(t.data().data()),
                                  t.data().size() * sizeof(double));
    return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
    std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
    std::vector<unsigned char> bytes = base64_decode(j.at("data_b64").get<std::string>());
    if (bytes.size() % sizeof(double) != 0) {
        throw data_error("archive: tensor payload is not a whole number of doubles");
    }
    std::vector<double> values(bytes.size() / sizeof(double));
    std::memcpy(values.data(), bytes.data(), bytes.size());
    return Tensor(std::move(shape), std::move(values));
}

nlohmann::json network_params_json(const nn::Network& net) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Tensor* p : nn::parameters(net)) {
        arr.push_back(tensor_json(*p));
    }
    return arr;
}

void load_network_params(nn::Network& net, const nlohmann::json& arr, const char* what) {
    std::vector<Tensor*> params = nn::parameters(net);
    if (!arr.is_array() || arr.size() != params.size()) {
        throw data_error(std::string("archive: wrong parameter count for ") + what);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor t = tensor_from_json(arr[i]);
        if (!t.same_shape(*params[i])) {
            throw data_error(std::string("archive: parameter shape mismatch in ") + what + ": " +
                             t.shape_str() + " vs " + params[i]->shape_str());
        }
        *params[i] = std::move(t);
    }
}

}  // namespace

void save_archive(const ModelArchive& archive, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["format_version"] = kArchiveFormatVersion;
    doc["architecture"] = {{"sample_dim", data::kSampleDim},
                           {"latent_dim", kLatentDim},
                           {"noise_dim", archive.gen.noise_dim},
                           {"generator_raw_len", kGeneratorRawLen}};
    doc["normalizer"] = {{"x_min", archive.normalizer.x_min}, {"x_max", archive.normalizer.x_max}};
    doc["parameters"] = {{"encoder", network_params_json(archive.ae.encoder)},
                         {"decoder", network_params_json(archive.ae.decoder)},
                         {"generator", network_params_json(archive.gen.net)}};
    doc["training"] = {{"seed", archive.seed},
                       {"split_fraction", archive.split_fraction},
                       {"test_dates", archive.test_dates},
                       {"ae", {{"epochs", archive.ae_epochs},
                               {"batch", archive.ae_batch},
                               {"lr", archive.ae_lr},
                               {"final_loss", archive.ae_final_loss},
                               {"trained", archive.ae.trained}}},
                       {"gen", {{"epochs", archive.gen_epochs},
                                {"batch", archive.gen_batch},
                                {"lr", archive.gen_lr},
                                {"bandwidth", archive.bandwidth},
                                {"final_loss", archive.gen_final_loss},
                                {"trained", archive.gen.trained}}}};
    atomic_write_text(path, doc.dump(2) + "\n");
}

ModelArchive load_archive(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("load_archive: cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("load_archive: invalid JSON in " + path.string() + ": " + e.what());
    }

    try {
        if (doc.at("format_version").get<int>() != kArchiveFormatVersion) {
            throw data_error("load_archive: unsupported format_version");
        }
        ModelArchive archive;
        const auto noise_dim = doc.at("architecture").at("noise_dim").get<std::size_t>();
        archive.ae = make_autoencoder(0);
        archive.gen = make_generator(noise_dim, 0);

        const auto& norm = doc.at("normalizer");
        archive.normalizer.x_min = norm.at("x_min").get<std::array<double, data::kNumClasses>>();
        archive.normalizer.x_max = norm.at("x_max").get<std::array<double, data::kNumClasses>>();

        const auto& params = doc.at("parameters");
        load_network_params(archive.ae.encoder, params.at("encoder"), "encoder");
        load_network_params(archive.ae.decoder, params.at("decoder"), "decoder");
        load_network_params(archive.gen.net, params.at("generator"), "generator");

        const auto& training = doc.at("training");
        archive.seed = training.at("seed").get<std::uint64_t>();
        archive.split_fraction = training.at("split_fraction").get<double>();
        archive.test_dates = training.at("test_dates").get<std::vector<std::string>>();
        const auto& ae_meta = training.at("ae");
        archive.ae_epochs = ae_meta.at("epochs").get<std::size_t>();
        archive.ae_batch = ae_meta.at("batch").get<std::size_t>();
        archive.ae_lr = ae_meta.at("lr").get<double>();
        archive.ae_final_loss = ae_meta.at("final_loss").get<double>();
        archive.ae.trained = ae_meta.at("trained").get<bool>();
        const auto& gen_meta = training.at("gen");
        archive.gen_epochs = gen_meta.at("epochs").get<std::size_t>();
        archive.gen_batch = gen_meta.at("batch").get<std::size_t>();
        archive.gen_lr = gen_meta.at("lr").get<double>();
        archive.bandwidth = gen_meta.at("bandwidth").get<double>();
        archive.gen_final_loss = gen_meta.at("final_loss").get<double>();
        archive.gen.trained = gen_meta.at("trained").get<bool>();
        return archive;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("load_archive: corrupt archive " + path.string() + ": " + e.what());
    }
}

}  // namespace gmmn
