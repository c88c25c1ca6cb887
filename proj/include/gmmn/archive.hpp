#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gmmn/autoencoder.hpp"
#include "gmmn/dataset.hpp"
#include "gmmn/generator.hpp"

namespace gmmn {

inline constexpr int kArchiveFormatVersion = 1;

/// The serializable training artifact: both networks, the normalization
/// statistics, and enough metadata to reproduce the split and audit the run.
struct ModelArchive {
    AutoEncoder ae;
    ScenarioGenerator gen;
    data::Normalizer normalizer;

    std::uint64_t seed = 0;
    double split_fraction = 0.8;
    std::vector<std::string> test_dates;  // YYYY-MM-DD of the held-out days

    std::size_t ae_epochs = 0;
    std::size_t gen_epochs = 0;
    std::size_t ae_batch = 0;
    std::size_t gen_batch = 0;
    double ae_lr = 0.0;
    double gen_lr = 0.0;
    double bandwidth = 0.0;
    double ae_final_loss = 0.0;
    double gen_final_loss = 0.0;
};

// Single self-describing JSON container; tensor payloads are base64 of raw
// little-endian doubles so a round trip is bitwise. Written atomically.
void save_archive(const ModelArchive& archive, const std::filesystem::path& path);

// Throws data_error on unreadable, unparsable, or shape-inconsistent input.
ModelArchive load_archive(const std::filesystem::path& path);

}  // namespace gmmn
