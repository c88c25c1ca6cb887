#include "gmmn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gmmn/errors.hpp"
#include "gmmn/fileio.hpp"

namespace gmmn::eval {

using data::kHoursPerDay;
using data::kNumClasses;
using data::kSampleDim;

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
    const std::size_t t_len = series.size();
    if (t_len < 2) {
        throw std::invalid_argument("autocorrelation: series must have at least 2 points");
    }
    if (max_lag >= t_len) {
        throw std::invalid_argument("autocorrelation: max_lag must be below series length");
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(t_len);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t_len);
    if (!(var > 0.0)) {
        throw std::invalid_argument("autocorrelation: series has zero variance");
    }

    std::vector<double> r(max_lag + 1);
    for (std::size_t tau = 0; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (std::size_t t = 0; t + tau < t_len; ++t) {
            acc += (series[t] - mean) * (series[t + tau] - mean);
        }
        r[tau] = acc / static_cast<double>(t_len - tau) / var;
    }
    return r;
}

std::vector<double> psd_periodogram(std::span<const double> series) {
    const std::size_t t_len = series.size();
    if (t_len < 2) {
        throw std::invalid_argument("psd_periodogram: series must have at least 2 points");
    }
    const std::size_t bins = t_len / 2 + 1;
    std::vector<double> psd(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t t = 0; t < t_len; ++t) {
            const double phase = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                                 static_cast<double>(t_len);
            re += series[t] * std::cos(phase);
            im += series[t] * std::sin(phase);
        }
        double p = (re * re + im * im) / static_cast<double>(t_len);
        // Double the interior bins; DC and (for even T) Nyquist appear once.
        const bool interior = k > 0 && (t_len % 2 == 1 || k < t_len / 2);
        if (interior) p *= 2.0;
        psd[k] = p;
    }
    return psd;
}

std::vector<double> duration_curve(std::span<const double> day) {
    std::vector<double> curve(day.begin(), day.end());
    std::sort(curve.begin(), curve.end(), std::greater<>());
    return curve;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) {
        throw std::invalid_argument("pearson: inputs must be non-empty and equal length");
    }
    const std::size_t n = x.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw std::invalid_argument("pearson: zero variance input");
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::span<const double> matrix_row(const Tensor& rows, std::size_t r) {
    return {rows.data().data() + r * rows.dim(1), rows.dim(1)};
}

std::span<const double> class_slice(const Tensor& rows, std::size_t r, std::size_t cls) {
    return {rows.data().data() + r * kSampleDim + cls * kHoursPerDay, kHoursPerDay};
}

}  // namespace

Tensor temporal_corr_matrix(const Tensor& day_rows) {
    if (day_rows.rank() != 2 || day_rows.dim(0) < 2) {
        throw std::invalid_argument("temporal_corr_matrix: need a [n>=2, hours] matrix");
    }
    const std::size_t n = day_rows.dim(0);
    const std::size_t hours = day_rows.dim(1);
    // Hour columns.
    std::vector<std::vector<double>> col(hours, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t h = 0; h < hours; ++h) col[h][r] = day_rows.at(r, h);
    }
    Tensor m({hours, hours});
    for (std::size_t i = 0; i < hours; ++i) {
        m.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < hours; ++j) {
            const double r = pearson(col[i], col[j]);
            m.at(i, j) = r;
            m.at(j, i) = r;
        }
    }
    return m;
}

Tensor cross_load_matrix(const Tensor& scenario_rows) {
    if (scenario_rows.rank() != 2 || scenario_rows.dim(1) != kSampleDim ||
        scenario_rows.dim(0) < 2) {
        throw std::invalid_argument("cross_load_matrix: need a [n>=2, 72] matrix");
    }
    const std::size_t n = scenario_rows.dim(0);
    std::array<std::vector<double>, kNumClasses> flat;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        flat[c].reserve(n * kHoursPerDay);
        for (std::size_t r = 0; r < n; ++r) {
            auto s = class_slice(scenario_rows, r, c);
            flat[c].insert(flat[c].end(), s.begin(), s.end());
        }
    }
    Tensor m({kNumClasses, kNumClasses});
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        m.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < kNumClasses; ++j) {
            const double r = pearson(flat[i], flat[j]);
            m.at(i, j) = r;
            m.at(j, i) = r;
        }
    }
    return m;
}

Tensor cross_load_matrix(const std::vector<data::LoadSample>& samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("cross_load_matrix: need at least 2 samples");
    }
    Tensor rows({samples.size(), kSampleDim});
    for (std::size_t r = 0; r < samples.size(); ++r) {
        std::copy(samples[r].values.data().begin(), samples[r].values.data().end(),
                  rows.data().begin() + r * kSampleDim);
    }
    return cross_load_matrix(rows);
}

std::vector<double> pdf_histogram(std::span<const double> values, std::size_t bins) {
    if (values.empty()) {
        throw std::invalid_argument("pdf_histogram: no values");
    }
    if (bins < 1) {
        throw std::invalid_argument("pdf_histogram: bins must be positive");
    }
    std::vector<double> pdf(bins, 0.0);
    const double bin_width = 1.0 / static_cast<double>(bins);
    for (double v : values) {
        auto b = static_cast<long long>(std::floor(v * static_cast<double>(bins)));
        b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
        pdf[static_cast<std::size_t>(b)] += 1.0;
    }
    const double scale = 1.0 / (static_cast<double>(values.size()) * bin_width);
    for (double& p : pdf) p *= scale;
    return pdf;
}

double pdf_distance(std::span<const double> pdf_a, std::span<const double> pdf_b) {
    if (pdf_a.size() != pdf_b.size() || pdf_a.empty()) {
        throw std::invalid_argument("pdf_distance: length mismatch");
    }
    const double bin_width = 1.0 / static_cast<double>(pdf_a.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pdf_a.size(); ++i) {
        const double d = pdf_a[i] - pdf_b[i];
        acc += d * d;
    }
    return std::sqrt(acc * bin_width);
}

NearestMatch nearest_real_match(std::span<const double> generated, const Tensor& real_rows) {
    if (real_rows.rank() != 2 || real_rows.dim(0) == 0 || real_rows.dim(1) != generated.size()) {
        throw std::invalid_argument("nearest_real_match: incompatible real set");
    }
    NearestMatch best;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < real_rows.dim(0); ++r) {
        auto row = matrix_row(real_rows, r);
        double acc = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double d = generated[i] - row[i];
            acc += d * d;
        }
        if (acc < best_sq) {
            best_sq = acc;
            best.index = r;
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

namespace {

ClassProfile class_profile(const Tensor& rows, std::size_t cls, const data::Normalizer& norm,
                           const EvalOptions& opts) {
    const std::size_t n = rows.dim(0);
    ClassProfile p;
    p.autocorrelation.assign(opts.max_lag + 1, 0.0);
    p.psd.assign(kHoursPerDay / 2 + 1, 0.0);
    p.duration_curve.assign(kHoursPerDay, 0.0);

    std::size_t ac_days = 0;
    for (std::size_t r = 0; r < n; ++r) {
        auto day = class_slice(rows, r, cls);
        // Constant days have no defined autocorrelation; skip and count them.
        double mn = day[0];
        double mx = day[0];
        for (double v : day) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mx > mn) {
            std::vector<double> ac = autocorrelation(day, opts.max_lag);
            for (std::size_t l = 0; l < ac.size(); ++l) p.autocorrelation[l] += ac[l];
            ++ac_days;
        } else {
            ++p.skipped_constant_days;
        }
        std::vector<double> psd = psd_periodogram(day);
        for (std::size_t k = 0; k < psd.size(); ++k) p.psd[k] += psd[k];
        std::vector<double> dc = duration_curve(day);
        for (std::size_t h = 0; h < dc.size(); ++h) p.duration_curve[h] += dc[h];
    }
    if (ac_days == 0) {
        throw data_error(std::string("evaluate: every ") + data::kClassNames[cls] +
                         " day is constant; autocorrelation undefined");
    }
    for (double& v : p.autocorrelation) v /= static_cast<double>(ac_days);
    for (double& v : p.psd) v /= static_cast<double>(n);
    for (double& v : p.duration_curve) v /= static_cast<double>(n);

    Tensor day_rows({n, kHoursPerDay});
    for (std::size_t r = 0; r < n; ++r) {
        auto day = class_slice(rows, r, cls);
        std::copy(day.begin(), day.end(), day_rows.data().begin() + r * kHoursPerDay);
    }
    p.temporal_corr = temporal_corr_matrix(day_rows);

    std::vector<double> unit_values;
    unit_values.reserve(n * kHoursPerDay);
    for (std::size_t r = 0; r < n; ++r) {
        for (double v : class_slice(rows, r, cls)) {
            unit_values.push_back(norm.to_unit(v, static_cast<data::LoadClass>(cls)));
        }
    }
    p.pdf = pdf_histogram(unit_values, opts.bins);
    return p;
}

double mean_daily_energy(const Tensor& rows, std::size_t cls) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows.dim(0); ++r) {
        for (double v : class_slice(rows, r, cls)) acc += v;
    }
    return acc / static_cast<double>(rows.dim(0));
}

}  // namespace

MetricReport evaluate_sets(const Tensor& real_rows, const Tensor& generated_rows,
                           const data::Normalizer& norm, const EvalOptions& opts) {
    if (real_rows.rank() != 2 || real_rows.dim(1) != kSampleDim || generated_rows.rank() != 2 ||
        generated_rows.dim(1) != kSampleDim) {
        throw std::invalid_argument("evaluate_sets: expected [n,72] matrices");
    }
    MetricReport report;
    report.real_count = real_rows.dim(0);
    report.generated_count = generated_rows.dim(0);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        report.real[c] = class_profile(real_rows, c, norm, opts);
        report.generated[c] = class_profile(generated_rows, c, norm, opts);
        report.pdf_distance[c] = pdf_distance(report.generated[c].pdf, report.real[c].pdf);
        report.energy_real[c] = mean_daily_energy(real_rows, c);
        report.energy_generated[c] = mean_daily_energy(generated_rows, c);
    }
    report.cross_real = cross_load_matrix(real_rows);
    report.cross_generated = cross_load_matrix(generated_rows);
    double max_err = 0.0;
    for (std::size_t i = 0; i < kNumClasses * kNumClasses; ++i) {
        max_err = std::max(max_err, std::abs(report.cross_real[i] - report.cross_generated[i]));
    }
    report.max_cross_error = max_err;
    return report;
}

namespace {

nlohmann::json matrix_json(const Tensor& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.dim(0); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.dim(1); ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_line(std::initializer_list<std::string> fields) {
    std::string line;
    for (const std::string& f : fields) {
        if (!line.empty()) line += ",";
        line += f;
    }
    line += "\n";
    return line;
}

}  // namespace

void write_report_files(const MetricReport& report, const Tensor& real_rows,
                        const Tensor& generated_rows, const std::filesystem::path& out_dir) {
    nlohmann::json doc;
    doc["classes"] = nlohmann::json::object();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        nlohmann::json cls;
        cls["autocorrelation"] = {{"real", report.real[c].autocorrelation},
                                  {"generated", report.generated[c].autocorrelation}};
        cls["psd"] = {{"real", report.real[c].psd}, {"generated", report.generated[c].psd}};
        cls["duration_curve"] = {{"real", report.real[c].duration_curve},
                                 {"generated", report.generated[c].duration_curve}};
        cls["temporal_corr"] = {{"real", matrix_json(report.real[c].temporal_corr)},
                                {"generated", matrix_json(report.generated[c].temporal_corr)}};
        cls["pdf"] = {{"real", report.real[c].pdf}, {"generated", report.generated[c].pdf}};
        cls["pdf_distance"] = report.pdf_distance[c];
        cls["mean_daily_energy"] = {{"real", report.energy_real[c]},
                                    {"generated", report.energy_generated[c]}};
        doc["classes"][data::kClassNames[c]] = std::move(cls);
    }
    doc["cross_corr"] = {{"real", matrix_json(report.cross_real)},
                         {"generated", matrix_json(report.cross_generated)}};
    doc["max_cross_error"] = report.max_cross_error;
    doc["meta"] = {{"real_samples", report.real_count},
                   {"generated_samples", report.generated_count}};
    atomic_write_text(out_dir / "report.json", doc.dump(2) + "\n");

    // Plot CSVs: one file per metric, real and generated side by side.
    std::string ac = "class,lag,real,generated\n";
    std::string psd = "class,frequency,real,generated\n";
    std::string dc = "class,rank,real,generated\n";
    std::string pdf = "class,bin_center,real,generated\n";
    std::string tc = "class,hour_i,hour_j,real,generated\n";
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const std::string name = data::kClassNames[c];
        const ClassProfile& r = report.real[c];
        const ClassProfile& g = report.generated[c];
        for (std::size_t l = 0; l < r.autocorrelation.size(); ++l) {
            ac += csv_line({name, std::to_string(l), format_double(r.autocorrelation[l]),
                            format_double(g.autocorrelation[l])});
        }
        for (std::size_t k = 0; k < r.psd.size(); ++k) {
            psd += csv_line({name, format_double(static_cast<double>(k) / kHoursPerDay),
                             format_double(r.psd[k]), format_double(g.psd[k])});
        }
        for (std::size_t h = 0; h < r.duration_curve.size(); ++h) {
            dc += csv_line({name, std::to_string(h + 1), format_double(r.duration_curve[h]),
                            format_double(g.duration_curve[h])});
        }
        const std::size_t bins = r.pdf.size();
        for (std::size_t b = 0; b < bins; ++b) {
            const double center = (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
            pdf += csv_line({name, format_double(center), format_double(r.pdf[b]),
                             format_double(g.pdf[b])});
        }
        for (std::size_t i = 0; i < kHoursPerDay; ++i) {
            for (std::size_t j = 0; j < kHoursPerDay; ++j) {
                tc += csv_line({name, std::to_string(i), std::to_string(j),
                                format_double(r.temporal_corr.at(i, j)),
                                format_double(g.temporal_corr.at(i, j))});
            }
        }
    }
    atomic_write_text(out_dir / "autocorrelation.csv", ac);
    atomic_write_text(out_dir / "psd.csv", psd);
    atomic_write_text(out_dir / "duration_curve.csv", dc);
    atomic_write_text(out_dir / "pdf.csv", pdf);
    atomic_write_text(out_dir / "temporal_corr.csv", tc);

    std::string cross = "class_i,class_j,real,generated\n";
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        for (std::size_t j = 0; j < kNumClasses; ++j) {
            cross += csv_line({data::kClassNames[i], data::kClassNames[j],
                               format_double(report.cross_real.at(i, j)),
                               format_double(report.cross_generated.at(i, j))});
        }
    }
    atomic_write_text(out_dir / "cross_corr.csv", cross);

    std::string nm = "generated_index,real_index,distance\n";
    for (std::size_t r = 0; r < generated_rows.dim(0); ++r) {
        NearestMatch match = nearest_real_match(matrix_row(generated_rows, r), real_rows);
        nm += csv_line({std::to_string(r), std::to_string(match.index),
                        format_double(match.distance)});
    }
    atomic_write_text(out_dir / "nearest_match.csv", nm);

    atomic_write_text(out_dir / "summary.txt", report_summary(report));
}

std::string report_summary(const MetricReport& report) {
    std::ostringstream os;
    os << "Scenario evaluation summary\n";
    os << "===========================\n";
    os << "real samples:      " << report.real_count << "\n";
    os << "generated samples: " << report.generated_count << "\n\n";
    os << "cross-load Pearson matrices (cooling/heating/power)\n";
    auto print_matrix = [&os](const Tensor& m) {
        for (std::size_t i = 0; i < kNumClasses; ++i) {
            os << "  ";
            for (std::size_t j = 0; j < kNumClasses; ++j) {
                char buf[16];
                std::snprintf(buf, sizeof buf, "% .3f ", m.at(i, j));
                os << buf;
            }
            os << "\n";
        }
    };
    os << " real:\n";
    print_matrix(report.cross_real);
    os << " generated:\n";
    print_matrix(report.cross_generated);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max cross-load error: %.3f\n\n", report.max_cross_error);
    os << buf;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double er = report.energy_real[c];
        const double eg = report.energy_generated[c];
        std::snprintf(buf, sizeof buf,
                      "%-8s pdf distance %.4f | mean daily energy real %.1f gen %.1f (%+.1f%%)\n",
                      data::kClassNames[c], report.pdf_distance[c], er, eg,
                      100.0 * (eg - er) / er);
        os << buf;
        if (report.real[c].skipped_constant_days + report.generated[c].skipped_constant_days > 0) {
            std::snprintf(buf, sizeof buf,
                          "%-8s constant days skipped in autocorrelation: real %zu, generated %zu\n",
                          "", report.real[c].skipped_constant_days,
                          report.generated[c].skipped_constant_days);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace gmmn::eval
