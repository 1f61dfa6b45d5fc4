//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "msdi/climate.hpp"
#include "msdi/copulas.hpp"
#include "msdi/distributions.hpp"
#include "msdi/errors.hpp"
#include "msdi/special.hpp"

namespace msdi {

enum class IndexKind { MSDI, SPI };

inline const char* kind_name(IndexKind k) { return k == IndexKind::MSDI ? "msdi" : "spi"; }

enum class Severity { ExtremelyDry, Dry, Normal, Undefined };

inline const char* severity_name(Severity s) {
    switch (s) {
    case Severity::ExtremelyDry: return "extremely_dry";
    case Severity::Dry: return "dry";
    case Severity::Normal: return "normal";
    case Severity::Undefined: return "undefined";
    }
    return "?";
}

inline Severity severity_from_name(const std::string& name) {
    if (name == "extremely_dry") return Severity::ExtremelyDry;
    if (name == "dry") return Severity::Dry;
    if (name == "normal") return Severity::Normal;
    if (name == "undefined") return Severity::Undefined;
    throw_validation("unknown severity label '" + name + "'");
}

// The index is clamped to [-clamp, clamp]; nearly all normal mass lies
// within that range.
inline constexpr double kDefaultIndexClamp = 5.0;

inline constexpr int kDefaultWindows[] = {3, 6, 9, 12};

// Per-window severity cut points. A value below extremely_dry_upper is
// ExtremelyDry; in [extremely_dry_upper, dry_upper) it is Dry; at or above
// dry_upper it is Normal. The lower interval is closed at its top, so a value
// exactly at extremely_dry_upper counts as Dry.
struct ThresholdCuts {
    double extremely_dry_upper;
    double dry_upper;
};

struct ThresholdTable {
    std::map<int, ThresholdCuts> cuts;

    static ThresholdTable msdi_defaults() {
        ThresholdTable t;
        t.cuts[3] = {-3.2, -1.3};
        t.cuts[6] = {-2.5, -0.8};
        t.cuts[9] = {-2.1, -0.4};
        t.cuts[12] = {-1.7, -0.3};
        return t;
    }

    // Conventional SPI severity cuts, window-independent.
    static ThresholdTable spi_defaults(std::span<const int> windows) {
        ThresholdTable t;
        for (int w : windows) t.cuts[w] = {-2.0, -1.0};
        return t;
    }

    const ThresholdCuts& for_window(int window) const {
        const auto it = cuts.find(window);
        if (it == cuts.end())
            throw_validation("no thresholds configured for window " + std::to_string(window));
        if (!(it->second.extremely_dry_upper < it->second.dry_upper))
            throw_validation("thresholds must satisfy extremely_dry_upper < dry_upper");
        return it->second;
    }
};

// Per-month index values aligned to a climate series. The first window-1
// months of an n-month series are undefined (NaN value, Undefined label).
struct IndexSeries {
    IndexKind kind = IndexKind::MSDI;
    int window = 1;
    YearMonth start;
    std::vector<double> values;
    std::vector<Severity> labels;

    std::size_t size() const noexcept { return values.size(); }

    YearMonth month_at(std::size_t i) const { return start.plus(static_cast<int>(i)); }

    bool defined(std::size_t i) const { return !std::isnan(values[i]); }
};

// Joint non-exceedance probability C(F(x), G(y)). Marginal CDF values are
// clamped the same way as the PIT, using each marginal's fit sample count.
inline double joint_probability(const FittedMarginal& rain_m, const FittedMarginal& temp_m,
                                const CopulaModel& c, double rainfall, double temperature) {
    auto clamped = [](const FittedMarginal& m, double x) {
        const double n = static_cast<double>(m.n > 0 ? m.n : 1);
        const double lo = 1.0 / (2.0 * n);
        return std::clamp(cdf(m, x), lo, 1.0 - lo);
    };
    return copula_cdf(c, clamped(rain_m, rainfall), clamped(temp_m, temperature));
}

// 1-month index: standard normal quantile of the joint probability, clamped.
// Negative values indicate dry conditions, positive wet.
inline double msdi_1month(double p, double clamp = kDefaultIndexClamp) {
    if (!(p > 0.0 && p < 1.0)) throw_validation("msdi_1month requires p in (0,1)");
    return std::clamp(special::normal_quantile(p), -clamp, clamp);
}

inline IndexSeries msdi_series(const ClimateSeries& series, const FittedMarginal& rain_m,
                               const FittedMarginal& temp_m, const CopulaModel& c,
                               double clamp = kDefaultIndexClamp) {
    if (series.records.empty()) throw_validation("msdi_series on empty series");
    IndexSeries out;
    out.kind = IndexKind::MSDI;
    out.window = 1;
    out.start = series.records.front().year_month;
    out.values.reserve(series.size());
    for (const auto& rec : series.records) {
        const double p = joint_probability(rain_m, temp_m, c, rec.rainfall, rec.temperature);
        out.values.push_back(msdi_1month(p, clamp));
    }
    out.labels.assign(out.values.size(), Severity::Undefined);
    return out;
}

// n-month index: trailing average of the 1-month index over the n months
// ending at each month. The first n-1 months are undefined.
inline IndexSeries aggregate(const IndexSeries& one_month, int window) {
    if (one_month.window != 1) throw_validation("aggregate expects a 1-month series");
    if (window < 1) throw_validation("aggregate window must be >= 1");
    if (one_month.size() < static_cast<std::size_t>(window))
        throw_validation("series shorter than aggregation window");
    IndexSeries out;
    out.kind = one_month.kind;
    out.window = window;
    out.start = one_month.start;
    out.values.assign(one_month.size(), std::numeric_limits<double>::quiet_NaN());
    // Fresh left-to-right summation per month: the result must equal the
    // plainly computed mean of the window bit for bit.
    for (std::size_t i = window - 1; i < one_month.size(); ++i) {
        double sum = 0.0;
        for (std::size_t k = i + 1 - window; k <= i; ++k) sum += one_month.values[k];
        out.values[i] = sum / window;
    }
    out.labels.assign(out.values.size(), Severity::Undefined);
    return out;
}

// Labels every defined value against the table; undefined months pass
// through.
inline IndexSeries classify(IndexSeries series, const ThresholdTable& table) {
    const ThresholdCuts& c = table.for_window(series.window);
    series.labels.assign(series.values.size(), Severity::Undefined);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!series.defined(i)) continue;
        const double x = series.values[i];
        if (x < c.extremely_dry_upper)
            series.labels[i] = Severity::ExtremelyDry;
        else if (x < c.dry_upper)
            series.labels[i] = Severity::Dry;
        else
            series.labels[i] = Severity::Normal;
    }
    return series;
}

// SPI over an n-month window: gamma fit to the trailing n-month accumulated
// precipitation of the whole record, with the zero-rainfall mass handled as
// a point mass H(x) = q + (1-q) G(x), then the standard normal inverse.
//
// per_month=true fits one gamma per calendar month instead (off by default;
// the single long-term fit matches the construction used for comparison).
inline IndexSeries spi_series(const ClimateSeries& series, int window,
                              double clamp = kDefaultIndexClamp, bool per_month = false) {
    if (window < 1) throw_validation("spi window must be >= 1");
    if (series.size() < static_cast<std::size_t>(window))
        throw_validation("series shorter than SPI window");

    const std::vector<double> rain = series.rainfall();
    const std::size_t n = rain.size();
    std::vector<double> accumulated(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = window - 1; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = i + 1 - window; k <= i; ++k) sum += rain[k];
        accumulated[i] = sum;
    }

    IndexSeries out;
    out.kind = IndexKind::SPI;
    out.window = window;
    out.start = series.records.front().year_month;
    out.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.labels.assign(n, Severity::Undefined);

    auto transform_group = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> defined;
        std::vector<double> positive;
        for (std::size_t i : idx) {
            if (std::isnan(accumulated[i])) continue;
            defined.push_back(accumulated[i]);
            if (accumulated[i] > 0.0) positive.push_back(accumulated[i]);
        }
        if (defined.empty()) return;
        if (positive.empty()) throw_validation("SPI: all accumulated precipitation is zero");
        const double q =
            1.0 - static_cast<double>(positive.size()) / static_cast<double>(defined.size());
        const FittedMarginal gamma_fit = fit_mle(DistributionFamily::Gamma, positive);
        for (std::size_t i : idx) {
            if (std::isnan(accumulated[i])) continue;
            const double g = accumulated[i] > 0.0 ? cdf(gamma_fit, accumulated[i]) : 0.0;
            double h = q + (1.0 - q) * g;
            const double eps = 1.0 / (2.0 * static_cast<double>(defined.size()));
            h = std::clamp(h, eps, 1.0 - eps);
            out.values[i] = std::clamp(special::normal_quantile(h), -clamp, clamp);
        }
    };

    if (per_month) {
        for (int month = 1; month <= 12; ++month) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if (out.month_at(i).month == month) idx.push_back(i);
            transform_group(idx);
        }
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        transform_group(idx);
    }
    return out;
}

// A named month range of interest (a recorded drought episode).
struct EventRange {
    std::string name;
    YearMonth start;
    YearMonth end;
};

struct EventDetection {
    EventRange event;
    bool has_data = false;
    bool msdi_dry = false;   // breached Dry or worse
    bool msdi_xdry = false;  // breached ExtremelyDry
    bool spi_dry = false;
    bool spi_xdry = false;
};

struct ComparisonReport {
    int window = 0;
    std::vector<EventDetection> events;
    std::size_t msdi_detections = 0;  // events where MSDI breached Dry or worse
    std::size_t spi_detections = 0;
};

// Per-event detection table for two classified index series over the same
// months. Reports, does not judge.
inline ComparisonReport compare(const IndexSeries& msdi, const IndexSeries& spi,
                                std::span<const EventRange> events) {
    if (msdi.kind != IndexKind::MSDI || spi.kind != IndexKind::SPI)
        throw_validation("compare expects (MSDI, SPI) in that order");
    if (msdi.window != spi.window || msdi.start != spi.start || msdi.size() != spi.size())
        throw_validation("compare requires same months and window on both series");

    ComparisonReport report;
    report.window = msdi.window;
    for (const EventRange& ev : events) {
        if (ev.end < ev.start) throw_validation("event '" + ev.name + "' has end before start");
        EventDetection det;
        det.event = ev;
        for (std::size_t i = 0; i < msdi.size(); ++i) {
            const YearMonth ym = msdi.month_at(i);
            if (ym < ev.start || ev.end < ym) continue;
            if (msdi.labels[i] != Severity::Undefined) det.has_data = true;
            if (msdi.labels[i] == Severity::Dry || msdi.labels[i] == Severity::ExtremelyDry)
                det.msdi_dry = true;
            if (msdi.labels[i] == Severity::ExtremelyDry) det.msdi_xdry = true;
            if (spi.labels[i] == Severity::Dry || spi.labels[i] == Severity::ExtremelyDry)
                det.spi_dry = true;
            if (spi.labels[i] == Severity::ExtremelyDry) det.spi_xdry = true;
        }
        if (det.msdi_dry) ++report.msdi_detections;
        if (det.spi_dry) ++report.spi_detections;
        report.events.push_back(det);
    }
    return report;
}

}  // namespace msdi
