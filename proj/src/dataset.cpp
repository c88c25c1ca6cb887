#include "gmmn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string_view>

#include "gmmn/errors.hpp"
#include "gmmn/rng.hpp"

namespace gmmn::data {

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

bool valid_date(const Date& d) {
    return d.year >= 1 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= days_in_month(d.year, d.month);
}

// YYYY-MM-DDTHH:MM with MM == 00 (hourly resolution).
std::optional<DateTime> parse_timestamp(const std::string& s) {
    int y, mo, d, h, mi;
    char t;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d", &y, &mo, &d, &t, &h, &mi) != 6) {
        return std::nullopt;
    }
    if (t != 'T' && t != ' ') return std::nullopt;
    DateTime dt{{y, mo, d}, h};
    if (!valid_date(dt.date) || h < 0 || h > 23 || mi != 0) return std::nullopt;
    return dt;
}

std::optional<double> parse_number(std::string_view s) {
    // Trim surrounding blanks; the whole remainder must be a finite number.
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    double value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

}  // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

CsvLoadResult load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("load_csv: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw data_error("load_csv: empty file " + path.string());
    }
    if (trimmed(line) != "timestamp,cooling,heating,power") {
        throw data_error("load_csv: malformed header in " + path.string() + ": expected "
                         "'timestamp,cooling,heating,power'");
    }

    CsvLoadResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 4) {
            ++result.dropped_rows;
            continue;
        }
        auto ts = parse_timestamp(trimmed(fields[0]));
        auto cooling = parse_number(fields[1]);
        auto heating = parse_number(fields[2]);
        auto power = parse_number(fields[3]);
        if (!ts || !cooling || !heating || !power || *cooling < 0.0 || *heating < 0.0 ||
            *power < 0.0) {
            ++result.dropped_rows;
            continue;
        }
        if (!result.records.empty() && !(result.records.back().timestamp < *ts)) {
            throw data_error("load_csv: timestamps not strictly increasing at line " +
                             std::to_string(line_no) + " of " + path.string());
        }
        result.records.push_back({*ts, *cooling, *heating, *power});
    }
    if (result.records.empty()) {
        throw data_error("load_csv: no valid rows in " + path.string());
    }
    return result;
}

AssembleResult assemble_daily_samples(const std::vector<LoadRecord>& records) {
    AssembleResult result;
    std::size_t i = 0;
    while (i < records.size()) {
        const Date day = records[i].timestamp.date;
        std::size_t j = i;
        while (j < records.size() && records[j].timestamp.date == day) ++j;

        // Strictly increasing timestamps make hours within a day unique, so a
        // complete day is exactly 24 records spanning hours 0..23.
        bool complete = (j - i == kHoursPerDay);
        if (complete) {
            for (std::size_t k = 0; k < kHoursPerDay; ++k) {
                if (records[i + k].timestamp.hour != static_cast<int>(k)) {
                    complete = false;
                    break;
                }
            }
        }
        if (complete) {
            Tensor values({kSampleDim});
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                const LoadRecord& r = records[i + h];
                values[class_offset(LoadClass::kCooling) + h] = r.cooling;
                values[class_offset(LoadClass::kHeating) + h] = r.heating;
                values[class_offset(LoadClass::kPower) + h] = r.power;
            }
            result.samples.push_back({std::move(values), day});
        } else {
            ++result.skipped_days;
        }
        i = j;
    }
    return result;
}

Normalizer fit_normalizer(const std::vector<LoadSample>& train_samples) {
    if (train_samples.empty()) {
        throw data_error("fit_normalizer: no training samples");
    }
    Normalizer norm;
    norm.x_min.fill(std::numeric_limits<double>::infinity());
    norm.x_max.fill(-std::numeric_limits<double>::infinity());
    for (const LoadSample& s : train_samples) {
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                const double v = s.values[c * kHoursPerDay + h];
                norm.x_min[c] = std::min(norm.x_min[c], v);
                norm.x_max[c] = std::max(norm.x_max[c], v);
            }
        }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        if (!(norm.x_max[c] > norm.x_min[c])) {
            throw data_error(std::string("fit_normalizer: degenerate ") + kClassNames[c] +
                             " class (max == min)");
        }
    }
    return norm;
}

Tensor normalize(const Tensor& sample_values, const Normalizer& norm) {
    if (sample_values.size() != kSampleDim) {
        throw std::invalid_argument("normalize: expected a 72-dim sample");
    }
    Tensor out = sample_values;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            std::size_t i = c * kHoursPerDay + h;
            out[i] = norm.to_net(sample_values[i], static_cast<LoadClass>(c));
        }
    }
    return out;
}

Tensor denormalize(const Tensor& net_values, const Normalizer& norm) {
    if (net_values.size() != kSampleDim) {
        throw std::invalid_argument("denormalize: expected a 72-dim sample");
    }
    Tensor out = net_values;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            std::size_t i = c * kHoursPerDay + h;
            out[i] = norm.from_net(net_values[i], static_cast<LoadClass>(c));
        }
    }
    return out;
}

Tensor normalize_matrix(const std::vector<LoadSample>& samples, const Normalizer& norm) {
    if (samples.empty()) {
        throw data_error("normalize_matrix: no samples");
    }
    Tensor out({samples.size(), kSampleDim});
    for (std::size_t r = 0; r < samples.size(); ++r) {
        Tensor row = normalize(samples[r].values, norm);
        std::copy(row.data().begin(), row.data().end(), out.data().begin() + r * kSampleDim);
    }
    return out;
}

std::pair<std::vector<LoadSample>, std::vector<LoadSample>> split_train_test(
    const std::vector<LoadSample>& samples, double fraction, std::uint64_t seed) {
    if (samples.size() < 2) {
        throw data_error("split_train_test: need at least 2 samples");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_train_test: fraction must be in (0,1)");
    }
    const std::size_t n = samples.size();
    auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);

    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + n_train);
    std::vector<std::size_t> test_idx(idx.begin() + n_train, idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    std::pair<std::vector<LoadSample>, std::vector<LoadSample>> out;
    for (std::size_t i : train_idx) out.first.push_back(samples[i]);
    for (std::size_t i : test_idx) out.second.push_back(samples[i]);
    return out;
}

}  // namespace gmmn::data
