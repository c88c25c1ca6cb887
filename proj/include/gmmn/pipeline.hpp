#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmmn/archive.hpp"
#include "gmmn/evaluation.hpp"

namespace gmmn::cli {

/// Everything a training run needs; defaults follow the reference setup.
struct RunConfig {
    std::filesystem::path data_path;
    std::uint64_t seed = 42;
    double split_fraction = 0.8;
    struct {
        std::size_t epochs = 500;
        std::size_t batch = 32;
        double lr = 0.001;
    } ae;
    struct {
        std::size_t epochs = 500;
        std::size_t batch = 32;
        double lr = 0.001;
        std::size_t noise_dim = kDefaultNoiseDim;
        std::optional<double> bandwidth;  // unset = median heuristic
    } gen;
    struct {
        std::size_t bins = 50;
        std::size_t max_lag = 23;
    } eval;
    std::filesystem::path output_dir = "out";

    void validate() const;  // throws config_error
};

// Flat key=value file (e.g. `ae.epochs=500`); unknown keys are rejected.
// Values already present in `config` are overwritten.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

struct TrainResult {
    ModelArchive archive;
    std::vector<double> ae_loss;
    std::vector<double> gen_loss;
    std::filesystem::path archive_path;
};

// Steps 1-3: normalize, train the auto-encoder, freeze its encoder, train
// the scenario generator. Writes model.json, ae_loss.csv and gen_loss.csv
// into output_dir; on failure no partial outputs remain.
TrainResult cmd_train(const RunConfig& config);

// Feeds seeded Gaussian noise to the archived generator and de-normalizes.
// Writes `count` scenario rows (physical units) to out_csv; returns them.
Tensor cmd_generate(const std::filesystem::path& archive_path, std::size_t count,
                    std::uint64_t seed, const std::filesystem::path& out_csv);

// Compares generated scenarios with the archive's held-out test days (the
// training split is never used as the reference). Writes report.json, the
// plot CSVs and summary.txt into out_dir.
eval::MetricReport cmd_evaluate(const std::filesystem::path& archive_path,
                                const std::filesystem::path& real_csv,
                                const std::filesystem::path& generated_csv,
                                const std::filesystem::path& out_dir,
                                const eval::EvalOptions& opts);

// Scenario CSV: 72 named columns cooling_00..power_23, one scenario per row.
std::string scenario_csv_header();
void write_scenario_csv(const Tensor& rows, const std::filesystem::path& path);
Tensor read_scenario_csv(const std::filesystem::path& path);

// The gmmn command-line entry point; returns the process exit code
// (0 ok, 1 usage/config, 2 data, 3 training divergence).
int cli_main(const std::vector<std::string>& args);

}  // namespace gmmn::cli
