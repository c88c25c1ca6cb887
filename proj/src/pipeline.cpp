#include "gmmn/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gmmn/errors.hpp"
#include "gmmn/fileio.hpp"
#include "gmmn/rng.hpp"
#include "gmmn/synthetic.hpp"

namespace gmmn::cli {

void RunConfig::validate() const {
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw config_error("config: split_fraction must be in (0,1)");
    }
    for (double lr : {ae.lr, gen.lr}) {
        if (!(lr > 0.0 && lr <= 0.01)) {
            throw config_error("config: learning rates must be in (0, 0.01]");
        }
    }
    if (ae.epochs == 0 || gen.epochs == 0 || ae.batch == 0 || gen.batch == 0) {
        throw config_error("config: epochs and batch sizes must be positive");
    }
    if (gen.noise_dim == 0) {
        throw config_error("config: noise_dim must be positive");
    }
    if (gen.bandwidth && !(*gen.bandwidth > 0.0)) {
        throw config_error("config: bandwidth must be positive");
    }
    if (eval.bins < 2) {
        throw config_error("config: eval.bins must be at least 2");
    }
    if (eval.max_lag < 1 || eval.max_lag >= data::kHoursPerDay) {
        throw config_error("config: eval.max_lag must be in [1, 23]");
    }
}

namespace {

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    std::uint64_t out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw config_error("config: invalid integer for " + key + ": '" + v + "'");
    }
    return out;
}

double parse_f64(const std::string& v, const std::string& key) {
    double out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw config_error("config: invalid number for " + key + ": '" + v + "'");
    }
    return out;
}

}  // namespace

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("config: cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos || line[start] == '#') continue;
        const std::size_t eq = line.find('=', start);
        if (eq == std::string::npos) {
            throw config_error("config: expected key=value at line " + std::to_string(line_no) +
                               " of " + path.string());
        }
        const std::string key = line.substr(start, eq - start);
        const std::string value = line.substr(eq + 1);

        if (key == "data_path") config.data_path = value;
        else if (key == "seed") config.seed = parse_u64(value, key);
        else if (key == "split_fraction") config.split_fraction = parse_f64(value, key);
        else if (key == "ae.epochs") config.ae.epochs = parse_u64(value, key);
        else if (key == "ae.batch") config.ae.batch = parse_u64(value, key);
        else if (key == "ae.lr") config.ae.lr = parse_f64(value, key);
        else if (key == "gen.epochs") config.gen.epochs = parse_u64(value, key);
        else if (key == "gen.batch") config.gen.batch = parse_u64(value, key);
        else if (key == "gen.lr") config.gen.lr = parse_f64(value, key);
        else if (key == "gen.noise_dim") config.gen.noise_dim = parse_u64(value, key);
        else if (key == "gen.bandwidth") {
            if (value == "auto") config.gen.bandwidth.reset();
            else config.gen.bandwidth = parse_f64(value, key);
        }
        else if (key == "eval.bins") config.eval.bins = parse_u64(value, key);
        else if (key == "eval.max_lag") config.eval.max_lag = parse_u64(value, key);
        else if (key == "output_dir") config.output_dir = value;
        else throw config_error("config: unknown key '" + key + "' at line " +
                                std::to_string(line_no) + " of " + path.string());
    }
}

namespace {

std::string loss_csv(const std::vector<double>& losses) {
    std::string out = "epoch,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_double(losses[i]) + "\n";
    }
    return out;
}

std::vector<data::LoadSample> load_samples(const std::filesystem::path& path) {
    data::CsvLoadResult csv = data::load_csv(path);
    if (csv.dropped_rows > 0) {
        std::cerr << "warning: dropped " << csv.dropped_rows << " invalid rows from "
                  << path.string() << "\n";
    }
    data::AssembleResult days = data::assemble_daily_samples(csv.records);
    if (days.skipped_days > 0) {
        std::cerr << "warning: skipped " << days.skipped_days << " incomplete days in "
                  << path.string() << "\n";
    }
    if (days.samples.empty()) {
        throw data_error("no complete days in " + path.string());
    }
    return days.samples;
}

}  // namespace

TrainResult cmd_train(const RunConfig& config) {
    config.validate();
    std::vector<data::LoadSample> samples = load_samples(config.data_path);

    auto [train, test] = data::split_train_test(samples, config.split_fraction,
                                                derive_seed(config.seed, 1000));
    const data::Normalizer norm = data::fit_normalizer(train);
    const Tensor train_rows = data::normalize_matrix(train, norm);

    TrainResult result;
    result.archive.ae = make_autoencoder(derive_seed(config.seed, 2000));
    AeTrainOptions ae_opts{config.ae.epochs, config.ae.batch, config.ae.lr,
                           derive_seed(config.seed, 3000)};
    result.ae_loss = train_autoencoder(result.archive.ae, train_rows, ae_opts);

    result.archive.gen = make_generator(config.gen.noise_dim, derive_seed(config.seed, 4000));
    GenTrainOptions gen_opts;
    gen_opts.epochs = config.gen.epochs;
    gen_opts.batch_size = config.gen.batch;
    gen_opts.learning_rate = config.gen.lr;
    gen_opts.seed = derive_seed(config.seed, 5000);
    gen_opts.bandwidth = config.gen.bandwidth;
    GenTrainResult gen_result =
        train_generator(result.archive.gen, result.archive.ae, train_rows, gen_opts);
    result.gen_loss = std::move(gen_result.loss_history);

    result.archive.normalizer = norm;
    result.archive.seed = config.seed;
    result.archive.split_fraction = config.split_fraction;
    for (const data::LoadSample& s : test) result.archive.test_dates.push_back(s.date.to_string());
    result.archive.ae_epochs = config.ae.epochs;
    result.archive.ae_batch = config.ae.batch;
    result.archive.ae_lr = config.ae.lr;
    result.archive.gen_epochs = config.gen.epochs;
    result.archive.gen_batch = config.gen.batch;
    result.archive.gen_lr = config.gen.lr;
    result.archive.bandwidth = gen_result.bandwidth;
    result.archive.ae_final_loss = result.ae_loss.back();
    result.archive.gen_final_loss = result.gen_loss.back();

    // All outputs land after training succeeds; clean up whatever was
    // already renamed in place if a later write fails.
    result.archive_path = config.output_dir / "model.json";
    const std::filesystem::path ae_loss_path = config.output_dir / "ae_loss.csv";
    const std::filesystem::path gen_loss_path = config.output_dir / "gen_loss.csv";
    try {
        save_archive(result.archive, result.archive_path);
        atomic_write_text(ae_loss_path, loss_csv(result.ae_loss));
        atomic_write_text(gen_loss_path, loss_csv(result.gen_loss));
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(result.archive_path, ec);
        std::filesystem::remove(ae_loss_path, ec);
        std::filesystem::remove(gen_loss_path, ec);
        throw;
    }
    return result;
}

std::string scenario_csv_header() {
    std::string header;
    for (std::size_t c = 0; c < data::kNumClasses; ++c) {
        for (std::size_t h = 0; h < data::kHoursPerDay; ++h) {
            if (!header.empty()) header += ",";
            char buf[16];
            std::snprintf(buf, sizeof buf, "%s_%02zu", data::kClassNames[c], h);
            header += buf;
        }
    }
    return header;
}

void write_scenario_csv(const Tensor& rows, const std::filesystem::path& path) {
    if (rows.rank() != 2 || rows.dim(1) != data::kSampleDim) {
        throw std::invalid_argument("write_scenario_csv: expected [n,72] matrix");
    }
    std::string out = scenario_csv_header() + "\n";
    for (std::size_t r = 0; r < rows.dim(0); ++r) {
        for (std::size_t i = 0; i < data::kSampleDim; ++i) {
            if (i) out += ",";
            out += format_double(rows.at(r, i));
        }
        out += "\n";
    }
    atomic_write_text(path, out);
}

Tensor read_scenario_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("read_scenario_csv: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw data_error("read_scenario_csv: empty file " + path.string());
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != scenario_csv_header()) {
        throw data_error("read_scenario_csv: unexpected header in " + path.string());
    }
    std::vector<double> values;
    std::size_t n = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::size_t count = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            const char* comma = std::find(p, end, ',');
            double v;
            auto [q, ec] = std::from_chars(p, comma, v);
            if (ec != std::errc() || q != comma) {
                throw data_error("read_scenario_csv: bad value at line " + std::to_string(line_no) +
                                 " of " + path.string());
            }
            values.push_back(v);
            ++count;
            p = comma < end ? comma + 1 : end;
        }
        if (count != data::kSampleDim) {
            throw data_error("read_scenario_csv: expected 72 columns at line " +
                             std::to_string(line_no) + " of " + path.string());
        }
        ++n;
    }
    if (n == 0) {
        // An empty scenario file is valid output of `generate --count 0` but
        // cannot be evaluated.
        throw data_error("read_scenario_csv: no scenario rows in " + path.string());
    }
    return Tensor({n, data::kSampleDim}, std::move(values));
}

Tensor cmd_generate(const std::filesystem::path& archive_path, std::size_t count,
                    std::uint64_t seed, const std::filesystem::path& out_csv) {
    ModelArchive archive = load_archive(archive_path);
    if (count == 0) {
        atomic_write_text(out_csv, scenario_csv_header() + "\n");
        return Tensor({1, data::kSampleDim});  // placeholder, no rows written
    }
    Tensor noise = sample_noise(count, archive.gen.noise_dim, seed);
    Tensor normalized = generate(archive.gen, noise);
    Tensor physical({count, data::kSampleDim});
    for (std::size_t r = 0; r < count; ++r) {
        Tensor row({data::kSampleDim});
        std::copy(normalized.data().begin() + r * data::kSampleDim,
                  normalized.data().begin() + (r + 1) * data::kSampleDim, row.data().begin());
        Tensor phys = data::denormalize(row, archive.normalizer);
        std::copy(phys.data().begin(), phys.data().end(),
                  physical.data().begin() + r * data::kSampleDim);
    }
    write_scenario_csv(physical, out_csv);
    return physical;
}

eval::MetricReport cmd_evaluate(const std::filesystem::path& archive_path,
                                const std::filesystem::path& real_csv,
                                const std::filesystem::path& generated_csv,
                                const std::filesystem::path& out_dir,
                                const eval::EvalOptions& opts) {
    ModelArchive archive = load_archive(archive_path);
    std::vector<data::LoadSample> samples = load_samples(real_csv);

    // Only the archived held-out days count as "real"; training days must
    // never leak into the reference set.
    std::set<std::string> test_dates(archive.test_dates.begin(), archive.test_dates.end());
    std::vector<data::LoadSample> test;
    for (const data::LoadSample& s : samples) {
        if (test_dates.count(s.date.to_string())) test.push_back(s);
    }
    if (test.size() != test_dates.size()) {
        throw data_error("cmd_evaluate: " + real_csv.string() + " provides " +
                         std::to_string(test.size()) + " of the " +
                         std::to_string(test_dates.size()) + " archived test days");
    }
    Tensor real_rows({test.size(), data::kSampleDim});
    for (std::size_t r = 0; r < test.size(); ++r) {
        std::copy(test[r].values.data().begin(), test[r].values.data().end(),
                  real_rows.data().begin() + r * data::kSampleDim);
    }

    Tensor generated_rows = read_scenario_csv(generated_csv);
    eval::MetricReport report =
        eval::evaluate_sets(real_rows, generated_rows, archive.normalizer, opts);
    eval::write_report_files(report, real_rows, generated_rows, out_dir);
    return report;
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"GMMN scenario generation for cooling, heating, and power loads"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Write a synthetic load dataset");
    std::size_t synth_days = 320;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "synthetic.csv";
    synth->add_option("--days", synth_days, "Number of days (>= 64)");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--out", synth_out, "Output CSV path")->required();

    auto* train = app.add_subcommand("train", "Train the auto-encoder and scenario generator");
    std::string train_config;
    std::string train_data;
    std::string train_out_dir;
    std::optional<std::uint64_t> train_seed;
    std::optional<double> train_split;
    std::optional<std::size_t> ae_epochs, ae_batch, gen_epochs, gen_batch, noise_dim;
    std::optional<double> ae_lr, gen_lr;
    std::string bandwidth_str;
    train->add_option("--config", train_config, "Flat key=value config file");
    train->add_option("--data", train_data, "Input load CSV");
    train->add_option("--out-dir", train_out_dir, "Output directory");
    train->add_option("--seed", train_seed, "Master seed");
    train->add_option("--split-fraction", train_split, "Training fraction (0,1)");
    train->add_option("--ae-epochs", ae_epochs, "Auto-encoder epochs");
    train->add_option("--ae-batch", ae_batch, "Auto-encoder batch size");
    train->add_option("--ae-lr", ae_lr, "Auto-encoder learning rate");
    train->add_option("--gen-epochs", gen_epochs, "Generator epochs");
    train->add_option("--gen-batch", gen_batch, "Generator batch size");
    train->add_option("--gen-lr", gen_lr, "Generator learning rate");
    train->add_option("--noise-dim", noise_dim, "Generator noise dimension");
    train->add_option("--bandwidth", bandwidth_str, "Kernel bandwidth ('auto' or a number)");

    auto* generate = app.add_subcommand("generate", "Generate scenarios from a trained model");
    std::string gen_model, gen_out;
    std::size_t gen_count = 2000;
    std::uint64_t gen_seed = 1;
    generate->add_option("--model", gen_model, "model.json path")->required();
    generate->add_option("--count", gen_count, "Number of scenarios");
    generate->add_option("--seed", gen_seed, "Noise seed");
    generate->add_option("--out", gen_out, "Output scenario CSV")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Compare generated scenarios with test data");
    std::string eval_model, eval_real, eval_gen, eval_out_dir;
    std::optional<std::size_t> eval_bins, eval_max_lag;
    evaluate->add_option("--model", eval_model, "model.json path")->required();
    evaluate->add_option("--real", eval_real, "Historical load CSV")->required();
    evaluate->add_option("--generated", eval_gen, "Generated scenario CSV")->required();
    evaluate->add_option("--out-dir", eval_out_dir, "Report directory")->required();
    evaluate->add_option("--bins", eval_bins, "PDF histogram bins");
    evaluate->add_option("--max-lag", eval_max_lag, "Autocorrelation max lag");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            data::make_synthetic_dataset(synth_out, synth_days, synth_seed);
            std::cout << "wrote " << synth_out << " (" << synth_days << " days)\n";
            return 0;
        }
        if (train->parsed()) {
            RunConfig config;
            if (!train_config.empty()) apply_config_file(config, train_config);
            if (!train_data.empty()) config.data_path = train_data;
            if (!train_out_dir.empty()) config.output_dir = train_out_dir;
            if (train_seed) config.seed = *train_seed;
            if (train_split) config.split_fraction = *train_split;
            if (ae_epochs) config.ae.epochs = *ae_epochs;
            if (ae_batch) config.ae.batch = *ae_batch;
            if (ae_lr) config.ae.lr = *ae_lr;
            if (gen_epochs) config.gen.epochs = *gen_epochs;
            if (gen_batch) config.gen.batch = *gen_batch;
            if (gen_lr) config.gen.lr = *gen_lr;
            if (noise_dim) config.gen.noise_dim = *noise_dim;
            if (!bandwidth_str.empty()) {
                if (bandwidth_str == "auto") config.gen.bandwidth.reset();
                else config.gen.bandwidth = parse_f64(bandwidth_str, "--bandwidth");
            }
            if (config.data_path.empty()) {
                throw config_error("train: --data (or data_path in the config file) is required");
            }
            TrainResult result = cmd_train(config);
            std::cout << "wrote " << result.archive_path.string()
                      << " (ae loss " << result.ae_loss.back() << ", mmd loss "
                      << result.gen_loss.back() << ")\n";
            return 0;
        }
        if (generate->parsed()) {
            cmd_generate(gen_model, gen_count, gen_seed, gen_out);
            std::cout << "wrote " << gen_out << " (" << gen_count << " scenarios)\n";
            return 0;
        }
        if (evaluate->parsed()) {
            eval::EvalOptions opts;
            if (eval_bins) opts.bins = *eval_bins;
            if (eval_max_lag) opts.max_lag = *eval_max_lag;
            eval::MetricReport report =
                cmd_evaluate(eval_model, eval_real, eval_gen, eval_out_dir, opts);
            std::cout << eval::report_summary(report);
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const divergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace gmmn::cli
