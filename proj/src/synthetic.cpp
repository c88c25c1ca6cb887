#include "gmmn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "gmmn/errors.hpp"
#include "gmmn/fileio.hpp"
#include "gmmn/rng.hpp"

namespace gmmn::data {

namespace {

constexpr Date kStartDate{2011, 7, 17};

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

Date next_day(Date d) {
    if (++d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

int day_of_year(const Date& d) {
    int doy = d.day;
    for (int m = 1; m < d.month; ++m) doy += days_in_month(d.year, m);
    return doy;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Smooth 24-hour bump peaking at `peak`; sharper for larger exponent.
double bump(int hour, double peak, double sharpness) {
    const double c = 0.5 + 0.5 * std::cos(2.0 * M_PI * (hour - peak) / 24.0);
    return std::pow(c, sharpness);
}

double cooling_shape(int h) { return 0.30 + 0.70 * bump(h, 15.0, 1.5); }
double heating_shape(int h) { return 0.30 + 0.45 * bump(h, 7.0, 3.0) + 0.40 * bump(h, 20.0, 3.0); }
double power_shape(int h) { return 0.40 + 0.60 * bump(h, 14.0, 1.2); }

constexpr double kCoolingScale = 900.0;
constexpr double kHeatingScale = 800.0;
constexpr double kPowerScale = 1200.0;

}  // namespace

std::vector<LoadRecord> synthetic_records(std::size_t days, std::uint64_t seed) {
    Rng day_rng(derive_seed(seed, 1));
    Rng hour_rng(derive_seed(seed, 2));

    std::vector<LoadRecord> records;
    records.reserve(days * kHoursPerDay);

    // Weather anomaly: slow AR(1) around the seasonal cycle. The shared
    // driver is what couples the three classes.
    double weather = day_rng.normal();
    // Per-class hourly AR(1) noise, continuous across day boundaries.
    const double rho = 0.85;
    const double hour_sigma = 0.06 * std::sqrt(1.0 - rho * rho);
    double ar[3] = {0.0, 0.0, 0.0};

    Date date = kStartDate;
    for (std::size_t d = 0; d < days; ++d) {
        if (d > 0) weather = 0.7 * weather + 0.3 * day_rng.normal();
        const double season = std::cos(2.0 * M_PI * (day_of_year(date) - 198) / 365.25);
        const double theta = 0.75 * season + 0.5 * weather;

        const double cool_level = 0.15 + 0.85 * sigmoid(2.2 * theta);
        const double heat_level = 0.15 + 0.85 * sigmoid(-2.2 * theta);
        const double power_level =
            std::max(0.1, 0.45 + 0.45 * sigmoid(2.2 * theta) + 0.10 * day_rng.normal());

        for (int h = 0; h < static_cast<int>(kHoursPerDay); ++h) {
            for (double& a : ar) a = rho * a + hour_sigma * hour_rng.normal();
            const double wiggle[3] = {std::max(-0.5, ar[0]), std::max(-0.5, ar[1]),
                                      std::max(-0.5, ar[2])};
            LoadRecord r;
            r.timestamp = {date, h};
            r.cooling = kCoolingScale * cool_level * cooling_shape(h) * (1.0 + wiggle[0]);
            r.heating = kHeatingScale * heat_level * heating_shape(h) * (1.0 + wiggle[1]);
            r.power = kPowerScale * power_level * power_shape(h) * (1.0 + wiggle[2]);
            records.push_back(r);
        }
        date = next_day(date);
    }
    return records;
}

void make_synthetic_dataset(const std::filesystem::path& csv_path, std::size_t days,
                            std::uint64_t seed) {
    if (days < 64) {
        throw config_error("make_synthetic_dataset: need at least 64 days");
    }
    std::vector<LoadRecord> records = synthetic_records(days, seed);

    std::string csv = "timestamp,cooling,heating,power\n";
    char buf[128];
    for (const LoadRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00,", r.timestamp.date.year,
                      r.timestamp.date.month, r.timestamp.date.day, r.timestamp.hour);
        csv += buf;
        csv += format_double(r.cooling) + "," + format_double(r.heating) + "," +
               format_double(r.power) + "\n";
    }
    atomic_write_text(csv_path, csv);

    SyntheticTargets targets;
    nlohmann::json doc;
    doc["days"] = days;
    doc["seed"] = seed;
    doc["target_cross_correlation"] = {{"cooling_heating", targets.cool_heat},
                                       {"cooling_power", targets.cool_power},
                                       {"heating_power", targets.heat_power}};
    doc["min_lag1_autocorrelation"] = targets.min_lag1_autocorr;
    std::filesystem::path sidecar = csv_path;
    sidecar += ".targets.json";
    atomic_write_text(sidecar, doc.dump(2) + "\n");
}

}  // namespace gmmn::data
