#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gmmn/tensor.hpp"

namespace gmmn::data {

inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::size_t kSampleDim = kHoursPerDay * kNumClasses;  // 72

enum class LoadClass : std::size_t { kCooling = 0, kHeating = 1, kPower = 2 };
inline constexpr std::array<const char*, kNumClasses> kClassNames{"cooling", "heating", "power"};

// Offset of a class's 24-hour block inside the 72-dim sample layout
// [cooling h0..h23 | heating h0..h23 | power h0..h23].
inline constexpr std::size_t class_offset(LoadClass c) {
    return static_cast<std::size_t>(c) * kHoursPerDay;
}

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
    std::string to_string() const;  // YYYY-MM-DD
};

struct DateTime {
    Date date;
    int hour = 0;

    auto operator<=>(const DateTime&) const = default;
};

struct LoadRecord {
    DateTime timestamp;
    double cooling = 0.0;
    double heating = 0.0;
    double power = 0.0;
};

/// One day's joint curve, the 72-dim training unit.
struct LoadSample {
    Tensor values;  // shape [72]
    Date date;
};

struct CsvLoadResult {
    std::vector<LoadRecord> records;
    std::size_t dropped_rows = 0;  // rows skipped for missing/invalid fields
};

// Parses the `timestamp,cooling,heating,power` schema. Rows with missing or
// non-numeric fields are dropped and counted; out-of-order timestamps are a
// hard error naming the offending line. Throws data_error on unreadable
// files, a bad header, or zero valid rows.
CsvLoadResult load_csv(const std::filesystem::path& path);

struct AssembleResult {
    std::vector<LoadSample> samples;
    std::size_t skipped_days = 0;  // days without all 24 hours
};

AssembleResult assemble_daily_samples(const std::vector<LoadRecord>& records);

/// Per-class min/max statistics. to_unit maps physical values to [0,1] over
/// the fitted (training) range; the network-facing transform composes this
/// with x -> 2x-1 so the tanh output heads can cover the data. Values outside
/// the fitted range map outside the nominal interval without clipping.
struct Normalizer {
    std::array<double, kNumClasses> x_min{};
    std::array<double, kNumClasses> x_max{};

    double to_unit(double x, LoadClass c) const {
        const auto i = static_cast<std::size_t>(c);
        return (x - x_min[i]) / (x_max[i] - x_min[i]);
    }
    double from_unit(double u, LoadClass c) const {
        const auto i = static_cast<std::size_t>(c);
        return x_min[i] + u * (x_max[i] - x_min[i]);
    }
    double to_net(double x, LoadClass c) const { return 2.0 * to_unit(x, c) - 1.0; }
    double from_net(double v, LoadClass c) const { return from_unit(0.5 * (v + 1.0), c); }
};

// Global per-class min/max over all hours of the given samples. Rejects a
// degenerate class (max == min).
Normalizer fit_normalizer(const std::vector<LoadSample>& train_samples);

// Physical [72] -> network space [-1,1]^72 (train range) and back.
Tensor normalize(const Tensor& sample_values, const Normalizer& norm);
Tensor denormalize(const Tensor& net_values, const Normalizer& norm);

// Rows = samples, normalized to network space. Shape [n, 72].
Tensor normalize_matrix(const std::vector<LoadSample>& samples, const Normalizer& norm);

// Uniform random partition, deterministic per seed; both sides non-empty.
std::pair<std::vector<LoadSample>, std::vector<LoadSample>> split_train_test(
    const std::vector<LoadSample>& samples, double fraction, std::uint64_t seed);

}  // namespace gmmn::data
