//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "msdi/calendar.hpp"
#include "msdi/csv.hpp"
#include "msdi/errors.hpp"

namespace msdi {

struct ClimateRecord {
    YearMonth year_month;
    double rainfall = 0.0;     // monthly-average rainfall, mm/day
    double temperature = 0.0;  // monthly-average ground temperature, degC

    friend bool operator==(const ClimateRecord&, const ClimateRecord&) = default;
};

struct StationInfo {
    std::string id;
    double latitude = 0.0;
    double longitude = 0.0;
};

// Ordered, gap-free monthly record. Immutable after construction/validation.
struct ClimateSeries {
    StationInfo station;
    std::vector<ClimateRecord> records;

    std::size_t size() const noexcept { return records.size(); }

    std::vector<double> rainfall() const {
        std::vector<double> v;
        v.reserve(records.size());
        for (const auto& r : records) v.push_back(r.rainfall);
        return v;
    }

    std::vector<double> temperature() const {
        std::vector<double> v;
        v.reserve(records.size());
        for (const auto& r : records) v.push_back(r.temperature);
        return v;
    }

    MonthRange span() const {
        if (records.empty()) throw_validation("empty series has no span");
        return MonthRange{records.front().year_month, records.back().year_month};
    }
};

// Paddy-favorable windows; defaults follow the study-area characterization.
struct FavorableBounds {
    double rainfall_low = 2.74;
    double rainfall_high = 4.11;
    double temperature_low = 21.0;
    double temperature_high = 27.0;

    void check() const {
        if (!(rainfall_low < rainfall_high) || !(temperature_low < temperature_high))
            throw_validation("favorable bounds require low < high on each axis");
    }
};

// Sorts by month and enforces every series invariant. Gaps are hard errors:
// the windowed indices assume consecutive months and interpolation would bias
// them.
inline void validate_series(ClimateSeries& series) {
    auto& recs = series.records;
    std::sort(recs.begin(), recs.end(),
              [](const ClimateRecord& a, const ClimateRecord& b) {
                  return a.year_month < b.year_month;
              });
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        if (!std::isfinite(r.rainfall) || r.rainfall < 0.0)
            throw_validation("rainfall must be finite and >= 0 at " + r.year_month.str());
        if (!std::isfinite(r.temperature) || r.temperature < -50.0 || r.temperature > 60.0)
            throw_validation("temperature outside [-50, 60] degC at " + r.year_month.str());
        if (i > 0) {
            const auto expected = recs[i - 1].year_month.next();
            if (r.year_month == recs[i - 1].year_month)
                throw_validation("duplicate month " + r.year_month.str());
            if (r.year_month != expected)
                throw_validation("gap in months: expected " + expected.str() + ", found " +
                                 r.year_month.str());
        }
    }
}

struct CsvSchema {
    std::string date_column = "date";
    std::string rainfall_column = "rainfall_mm_day";
    std::string temperature_column = "temperature_c";
};

inline ClimateSeries load_csv(const std::string& path, const CsvSchema& schema = {},
                              StationInfo station = {}) {
    const csv::Table table = csv::read_file(path);
    const int date_col = table.column(schema.date_column);
    const int rain_col = table.column(schema.rainfall_column);
    const int temp_col = table.column(schema.temperature_column);
    if (date_col < 0) throw_validation("missing column '" + schema.date_column + "' in " + path);
    if (rain_col < 0)
        throw_validation("missing column '" + schema.rainfall_column + "' in " + path);
    if (temp_col < 0)
        throw_validation("missing column '" + schema.temperature_column + "' in " + path);

    ClimateSeries series;
    series.station = std::move(station);
    series.records.reserve(table.rows.size());
    const std::size_t need =
        static_cast<std::size_t>(std::max({date_col, rain_col, temp_col})) + 1;
    for (const auto& row : table.rows) {
        if (row.size() < need) throw_validation("short row in " + path);
        ClimateRecord rec;
        rec.year_month = parse_year_month(row[date_col]);
        rec.rainfall = csv::parse_double(row[rain_col], "rainfall");
        rec.temperature = csv::parse_double(row[temp_col], "temperature");
        series.records.push_back(rec);
    }
    validate_series(series);
    return series;
}

// Canonical CSV form of a series; also the byte stream its content hash is
// computed over.
inline std::string series_to_csv(const ClimateSeries& series,
                                 const std::vector<std::string>& comments = {}) {
    csv::Writer w;
    for (const auto& c : comments) w.comment(c);
    w.row({"date", "rainfall_mm_day", "temperature_c"});
    for (const auto& r : series.records)
        w.row({r.year_month.str(), csv::format_double(r.rainfall),
               csv::format_double(r.temperature)});
    return w.str();
}

inline void write_csv(const ClimateSeries& series, const std::string& path,
                      const std::vector<std::string>& comments = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot open '" + path + "' for writing");
    out << series_to_csv(series, comments);
    if (!out) throw_io("write to '" + path + "' failed");
}

// Fraction of records strictly inside the favorable window, per axis.
// The empirical companion to the model-based interval probability.
inline std::pair<double, double> favorable_fraction(const ClimateSeries& series,
                                                    const FavorableBounds& bounds) {
    if (series.records.empty()) throw_validation("favorable_fraction on empty series");
    bounds.check();
    std::size_t rain_in = 0;
    std::size_t temp_in = 0;
    for (const auto& r : series.records) {
        if (r.rainfall > bounds.rainfall_low && r.rainfall < bounds.rainfall_high) ++rain_in;
        if (r.temperature > bounds.temperature_low && r.temperature < bounds.temperature_high)
            ++temp_in;
    }
    const double n = static_cast<double>(series.records.size());
    return {rain_in / n, temp_in / n};
}

}  // namespace msdi
