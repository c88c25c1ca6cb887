#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmmn/dataset.hpp"
#include "gmmn/tensor.hpp"

namespace gmmn::eval {

// Normalized autocorrelation over lags 0..max_lag. Mean and variance are
// taken over the whole series; each lag averages its T-tau valid products.
// Rejects series with zero variance.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

// One-sided periodogram at unit sampling interval: |DFT|^2 / T with interior
// bins doubled so that sum(psd)/T equals the mean square of the series.
// Returns floor(T/2)+1 bins.
std::vector<double> psd_periodogram(std::span<const double> series);

// Values sorted descending; the curve's area equals the day's energy.
std::vector<double> duration_curve(std::span<const double> day);

// Product-moment correlation; rejects zero variance in either input.
double pearson(std::span<const double> x, std::span<const double> y);

// Entry (i,j) correlates hour-i values with hour-j values across samples.
// Exactly symmetric with exact unit diagonal. Input shape [n_samples, 24].
Tensor temporal_corr_matrix(const Tensor& day_rows);

// Pearson between flattened per-class series of [n,72] scenario rows.
// Exactly symmetric with exact unit diagonal.
Tensor cross_load_matrix(const Tensor& scenario_rows);
Tensor cross_load_matrix(const std::vector<data::LoadSample>& samples);

// Density-normalized histogram over [0,1]; out-of-range values are clipped
// into the end bins. Entries are >= 0 and sum to 1/bin_width.
std::vector<double> pdf_histogram(std::span<const double> values, std::size_t bins = 50);

// sqrt(sum((a-b)^2) * bin_width), bin_width = 1/len for the [0,1] grid.
double pdf_distance(std::span<const double> pdf_a, std::span<const double> pdf_b);

struct NearestMatch {
    std::size_t index = 0;
    double distance = 0.0;
};

// Closest row of `real_rows` ([n,72]) under Euclidean distance; ties break
// toward the lowest index.
NearestMatch nearest_real_match(std::span<const double> generated, const Tensor& real_rows);

/// Set-level curves for one load class: averages of the per-day metrics plus
/// the distribution summaries used for real-vs-generated comparison.
struct ClassProfile {
    std::vector<double> autocorrelation;   // lags 0..max_lag, mean over days
    std::vector<double> psd;               // mean periodogram over days
    std::vector<double> duration_curve;    // mean of per-day sorted curves
    Tensor temporal_corr;                  // [24,24]
    std::vector<double> pdf;               // histogram in Eq.-(8) unit space
    std::size_t skipped_constant_days = 0; // days excluded from autocorrelation
};

/// The full evaluation battery for a (real, generated) pair of scenario sets.
struct MetricReport {
    std::array<ClassProfile, data::kNumClasses> real;
    std::array<ClassProfile, data::kNumClasses> generated;
    std::array<double, data::kNumClasses> pdf_distance{};
    Tensor cross_real;       // [3,3]
    Tensor cross_generated;  // [3,3]
    double max_cross_error = 0.0;
    // Mean daily energy (sum over 24 h, physical units) per class.
    std::array<double, data::kNumClasses> energy_real{};
    std::array<double, data::kNumClasses> energy_generated{};
    std::size_t real_count = 0;
    std::size_t generated_count = 0;
};

struct EvalOptions {
    std::size_t bins = 50;
    std::size_t max_lag = 23;
};

// Both inputs are [n,72] matrices in physical units; the normalizer supplies
// the unit-interval mapping for the PDFs.
MetricReport evaluate_sets(const Tensor& real_rows, const Tensor& generated_rows,
                           const data::Normalizer& norm, const EvalOptions& opts);

// report.json plus per-metric plot CSVs and nearest_match.csv in out_dir.
void write_report_files(const MetricReport& report, const Tensor& real_rows,
                        const Tensor& generated_rows, const std::filesystem::path& out_dir);

// One-page plain-text summary (cross-load error, pdf distances, energy).
std::string report_summary(const MetricReport& report);

}  // namespace gmmn::eval
