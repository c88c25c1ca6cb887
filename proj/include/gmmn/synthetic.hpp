#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gmmn/dataset.hpp"

namespace gmmn::data {

/// Designed statistics of the synthetic load dataset, written alongside the
/// CSV so downstream checks know what the generator aimed for.
struct SyntheticTargets {
    // Off-diagonal cross-class Pearson targets (signs are the contract;
    // magnitudes land inside [0.5, 0.95]).
    double cool_heat = -0.70;
    double cool_power = 0.80;
    double heat_power = -0.55;
    double min_lag1_autocorr = 0.8;  // per-class daily-profile persistence
};

// Hourly cooling/heating/power records for `days` consecutive days starting
// 2011-07-17: smooth seasonal daily profiles driven by a shared weather
// factor plus AR(1) hourly noise. Deterministic per seed.
std::vector<LoadRecord> synthetic_records(std::size_t days, std::uint64_t seed);

// Writes the CSV (schema `timestamp,cooling,heating,power`) and a
// `<path>.targets.json` sidecar documenting the designed correlations.
// Requires days >= 64.
void make_synthetic_dataset(const std::filesystem::path& csv_path, std::size_t days,
                            std::uint64_t seed);

}  // namespace gmmn::data
