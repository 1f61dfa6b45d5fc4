//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "msdi/config.hpp"
#include "msdi/csv.hpp"
#include "msdi/dependence.hpp"
#include "msdi/index.hpp"
#include "msdi/model_io.hpp"
#include "msdi/remote.hpp"

namespace msdi {

namespace detail {

// Deterministic seed slots so every stage draws from an independent stream.
inline constexpr std::uint64_t kSeedSlotMarginals = 1'000;
inline constexpr std::uint64_t kSeedSlotCopulas = 2'000;

inline std::string fixed(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

inline std::string index_csv_name(IndexKind kind, int window) {
    return std::string(kind_name(kind)) + "_" + std::to_string(window) + ".csv";
}

}  // namespace detail

inline ClimateSeries load_input(const PipelineConfig& cfg) {
    if (cfg.input_csv) return load_csv(*cfg.input_csv);
    return fetch_remote(cfg.remote->station, cfg.remote->range, cfg.remote->endpoint,
                        cfg.cache_dir);
}

// Fits every candidate marginal per variable (AIC selection), then every
// candidate copula on the rank pseudo-observations (GOF p-value selection).
// Writes model.json and a human-readable fit report; returns the document.
inline ModelDocument cmd_fit(const PipelineConfig& cfg) {
    const ClimateSeries series = load_input(cfg);
    const std::vector<double> rain = series.rainfall();
    const std::vector<double> temp = series.temperature();

    auto fit_candidates = [&](const std::vector<DistributionFamily>& families,
                              const std::vector<double>& data, std::uint64_t slot) {
        std::vector<FittedMarginal> fits;
        for (std::size_t i = 0; i < families.size(); ++i) {
            if (families[i] == DistributionFamily::GaussianMixture)
                fits.push_back(fit_gmm(data, cfg.gmm_components,
                                       child_seed(cfg.seed, slot + i)));
            else
                fits.push_back(fit_mle(families[i], data));
        }
        return fits;
    };

    ModelDocument doc;
    doc.series_hash = series_hash(series);
    doc.config_hash = cfg.config_hash;
    doc.rainfall_candidates =
        fit_candidates(cfg.rainfall_candidates, rain, detail::kSeedSlotMarginals);
    doc.temperature_candidates =
        fit_candidates(cfg.temperature_candidates, temp, detail::kSeedSlotMarginals + 100);
    doc.rainfall = select_by_aic(doc.rainfall_candidates);
    doc.temperature = select_by_aic(doc.temperature_candidates);

    // Copula estimation and GOF run on rank pseudo-observations of the raw
    // pairs; the parametric PIT enters only at index time.
    const PseudoObservations po = pseudo_observations(rain, temp);
    const double tau_hat = kendall_tau(po);
    for (std::size_t i = 0; i < cfg.copula_candidates.size(); ++i) {
        // FGM admissibility guard: the family cannot represent |tau| > 2/9.
        if (cfg.copula_candidates[i] == CopulaFamily::FGM && std::fabs(tau_hat) > 2.0 / 9.0)
            throw_validation("FGM refused as a candidate: sample |tau| exceeds 2/9");
        doc.copula_candidates.push_back(
            gof_pvalue(cfg.copula_candidates[i], po, cfg.bootstrap_n,
                       child_seed(cfg.seed, detail::kSeedSlotCopulas + i)));
    }
    doc.copula = select_copula(doc.copula_candidates, cfg.allow_rejected_copula);

    std::filesystem::create_directories(cfg.output_dir);
    save_model(doc, (std::filesystem::path(cfg.output_dir) / "model.json").string());

    // Fit report: every candidate with its diagnostics, not only the winner.
    std::ostringstream rep;
    rep << "# config=" << cfg.config_hash << " model=" << doc.series_hash << "\n";
    rep << "fit report\n";
    rep << "months: " << series.records.front().year_month.str() << ".."
        << series.records.back().year_month.str() << " (n=" << series.size() << ")\n";
    rep << "series_hash: " << doc.series_hash << "\n\n";

    auto marginal_table = [&](const char* title, const std::vector<FittedMarginal>& fits,
                              const FittedMarginal& selected) {
        rep << title << " candidates:\n";
        for (const auto& m : fits) {
            rep << "  " << family_name(m.family) << ": ";
            switch (m.family) {
            case DistributionFamily::Beta:
                rep << "alpha=" << detail::fixed(m.params[0], 4)
                    << " beta=" << detail::fixed(m.params[1], 4);
                break;
            case DistributionFamily::Gamma:
                rep << "shape=" << detail::fixed(m.params[0], 4)
                    << " scale=" << detail::fixed(m.params[1], 4);
                break;
            case DistributionFamily::HalfGaussian:
                rep << "sigma=" << detail::fixed(m.params[0], 4);
                break;
            case DistributionFamily::GaussianMixture:
                for (std::size_t c = 0; c < m.component_count(); ++c)
                    rep << "(w=" << detail::fixed(m.params[3 * c], 4)
                        << " mu=" << detail::fixed(m.params[3 * c + 1], 4)
                        << " sigma=" << detail::fixed(m.params[3 * c + 2], 4) << ") ";
                break;
            }
            if (!m.scale.identity())
                rep << " scale_divisor=" << detail::fixed(m.scale.divisor, 6);
            rep << " log_lik=" << detail::fixed(m.log_likelihood, 3)
                << " aic=" << detail::fixed(m.aic, 3);
            if (!m.scale.identity()) {
                const double n = static_cast<double>(m.n);
                const double aic_unit = m.aic - 2.0 * n * std::log(m.scale.divisor);
                rep << " aic_transformed_scale=" << detail::fixed(aic_unit, 3);
            }
            rep << "\n";
        }
        rep << "  selected: " << family_name(selected.family) << "\n\n";
    };
    marginal_table("rainfall", doc.rainfall_candidates, doc.rainfall);
    marginal_table("temperature", doc.temperature_candidates, doc.temperature);

    rep << "dependence:\n  kendall_tau=" << detail::fixed(kendall_tau(po), 6) << "\n\n";
    rep << "copula candidates:\n";
    for (const auto& c : doc.copula_candidates) {
        rep << "  " << family_name(c.family) << ": theta=" << detail::fixed(c.theta, 6);
        if (c.family != CopulaFamily::Independence && c.fit)
            rep << " theta_tau_inversion="
                << detail::fixed(theta_of_tau(c.family, c.fit->tau), 6);
        if (c.fit)
            rep << " s_n=" << detail::fixed(c.fit->s_n, 6)
                << " p_value=" << detail::fixed(c.fit->p_value, 4)
                << " bootstrap_n=" << c.fit->bootstrap_n;
        rep << "\n";
    }
    rep << "  selected: " << family_name(doc.copula.family) << "\n\n";

    const auto [rain_frac, temp_frac] = favorable_fraction(series, cfg.favorable);
    rep << "favorable rainfall (" << detail::fixed(cfg.favorable.rainfall_low, 2) << ".."
        << detail::fixed(cfg.favorable.rainfall_high, 2) << " mm/day):"
        << " model_probability="
        << detail::fixed(interval_probability(doc.rainfall, cfg.favorable.rainfall_low,
                                              cfg.favorable.rainfall_high), 4)
        << " empirical_fraction=" << detail::fixed(rain_frac, 4) << "\n";
    rep << "favorable temperature: empirical_fraction=" << detail::fixed(temp_frac, 4) << "\n";
    rep << "rainfall mean (transformed units): " << detail::fixed(mean(doc.rainfall), 4)
        << "\n";

    std::ofstream out(std::filesystem::path(cfg.output_dir) / "fit_report.txt",
                      std::ios::binary);
    if (!out) throw_io("cannot write fit report");
    out << rep.str();
    return doc;
}

namespace detail {

inline void write_index_csv(const IndexSeries& s, const std::string& path,
                            const std::string& config_hash, const std::string& model_hash) {
    csv::Writer w;
    w.comment("config=" + config_hash + " model=" + model_hash);
    w.row({"date", "index", "label"});
    for (std::size_t i = 0; i < s.size(); ++i)
        w.row({s.month_at(i).str(), s.defined(i) ? csv::format_double(s.values[i]) : "",
               severity_name(s.labels[i])});
    w.save(path);
}

inline IndexSeries read_index_csv(const std::string& path, IndexKind kind, int window) {
    const csv::Table t = csv::read_file(path);
    const int date_col = t.column("date");
    const int value_col = t.column("index");
    const int label_col = t.column("label");
    if (date_col < 0 || value_col < 0 || label_col < 0)
        throw_io("'" + path + "' is not an index CSV");
    IndexSeries s;
    s.kind = kind;
    s.window = window;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const YearMonth ym = parse_year_month(row[date_col]);
        if (i == 0)
            s.start = ym;
        else if (ym != s.start.plus(static_cast<int>(i)))
            throw_validation("index CSV has non-consecutive months: " + path);
        s.values.push_back(row[value_col].empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : csv::parse_double(row[value_col], "index"));
        s.labels.push_back(severity_from_name(row[label_col]));
    }
    return s;
}

}  // namespace detail

// Computes MSDI and SPI for every configured window, classifies them, and
// writes one CSV per (kind, window) plus a combined CSV per window.
inline void cmd_index(const PipelineConfig& cfg, std::string model_path = {}) {
    if (model_path.empty())
        model_path = (std::filesystem::path(cfg.output_dir) / "model.json").string();
    const ModelDocument doc = load_model(model_path);
    const ClimateSeries series = load_input(cfg);
    if (series_hash(series) != doc.series_hash)
        throw_mismatch("model document was fitted on a different series (hash " +
                       doc.series_hash + " != " + series_hash(series) + ")");

    const IndexSeries base =
        msdi_series(series, doc.rainfall, doc.temperature, doc.copula, cfg.index_clamp);
    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path out_dir(cfg.output_dir);

    for (int w : cfg.windows) {
        const IndexSeries msdi_w = classify(aggregate(base, w), cfg.thresholds);
        const IndexSeries spi_w = classify(
            spi_series(series, w, cfg.index_clamp, cfg.spi_per_month), cfg.spi_thresholds);
        detail::write_index_csv(msdi_w,
                                (out_dir / detail::index_csv_name(IndexKind::MSDI, w)).string(),
                                cfg.config_hash, doc.series_hash);
        detail::write_index_csv(spi_w,
                                (out_dir / detail::index_csv_name(IndexKind::SPI, w)).string(),
                                cfg.config_hash, doc.series_hash);

        csv::Writer combined;
        combined.comment("config=" + cfg.config_hash + " model=" + doc.series_hash);
        combined.row({"date", "msdi", "spi", "msdi_label", "spi_label"});
        for (std::size_t i = 0; i < msdi_w.size(); ++i)
            combined.row({msdi_w.month_at(i).str(),
                          msdi_w.defined(i) ? csv::format_double(msdi_w.values[i]) : "",
                          spi_w.defined(i) ? csv::format_double(spi_w.values[i]) : "",
                          severity_name(msdi_w.labels[i]), severity_name(spi_w.labels[i])});
        combined.save((out_dir / ("combined_" + std::to_string(w) + ".csv")).string());
    }
}

inline std::vector<EventRange> load_events(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    const int name_col = t.column("name");
    const int start_col = t.column("start");
    const int end_col = t.column("end");
    if (name_col < 0 || start_col < 0 || end_col < 0)
        throw_validation("events file needs columns name,start,end: " + path);
    std::vector<EventRange> events;
    for (const auto& row : t.rows)
        events.push_back(EventRange{row[name_col], parse_year_month(row[start_col]),
                                    parse_year_month(row[end_col])});
    return events;
}

// Per-event, per-window detection table for both indices. Reporting only:
// succeeds no matter which index wins.
inline void cmd_compare(const PipelineConfig& cfg, const std::string& events_path) {
    const std::vector<EventRange> events = load_events(events_path);
    const std::filesystem::path out_dir(cfg.output_dir);

    csv::Writer summary;
    summary.comment("config=" + cfg.config_hash);
    summary.row({"window", "events", "events_with_data", "msdi_detections",
                 "spi_detections"});

    for (int w : cfg.windows) {
        const IndexSeries msdi_w = detail::read_index_csv(
            (out_dir / detail::index_csv_name(IndexKind::MSDI, w)).string(), IndexKind::MSDI,
            w);
        const IndexSeries spi_w = detail::read_index_csv(
            (out_dir / detail::index_csv_name(IndexKind::SPI, w)).string(), IndexKind::SPI, w);
        const ComparisonReport report = compare(msdi_w, spi_w, events);

        csv::Writer out;
        out.comment("config=" + cfg.config_hash);
        out.row({"event", "start", "end", "status", "msdi_dry", "msdi_extremely_dry",
                 "spi_dry", "spi_extremely_dry"});
        std::size_t with_data = 0;
        for (const auto& det : report.events) {
            with_data += det.has_data ? 1 : 0;
            if (!det.has_data) {
                out.row({det.event.name, det.event.start.str(), det.event.end.str(),
                         "no_data", "", "", "", ""});
                continue;
            }
            auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
            out.row({det.event.name, det.event.start.str(), det.event.end.str(), "ok",
                     flag(det.msdi_dry), flag(det.msdi_xdry), flag(det.spi_dry),
                     flag(det.spi_xdry)});
        }
        out.save((out_dir / ("comparison_" + std::to_string(w) + ".csv")).string());
        summary.row({std::to_string(w), std::to_string(report.events.size()),
                     std::to_string(with_data), std::to_string(report.msdi_detections),
                     std::to_string(report.spi_detections)});
    }
    summary.save((out_dir / "comparison_summary.csv").string());
}

// Tidy long-format dump of every computed index series with the active
// thresholds attached, ready for any plotting tool.
inline void cmd_plotdata(const PipelineConfig& cfg) {
    const std::filesystem::path out_dir(cfg.output_dir);
    csv::Writer w;
    w.comment("config=" + cfg.config_hash);
    w.row({"date", "window", "kind", "value", "label", "threshold_dry", "threshold_xdry"});
    for (int win : cfg.windows) {
        for (IndexKind kind : {IndexKind::MSDI, IndexKind::SPI}) {
            const IndexSeries s = detail::read_index_csv(
                (out_dir / detail::index_csv_name(kind, win)).string(), kind, win);
            const ThresholdTable& table =
                kind == IndexKind::MSDI ? cfg.thresholds : cfg.spi_thresholds;
            const ThresholdCuts& cuts = table.for_window(win);
            for (std::size_t i = 0; i < s.size(); ++i)
                w.row({s.month_at(i).str(), std::to_string(win), kind_name(kind),
                       s.defined(i) ? csv::format_double(s.values[i]) : "",
                       severity_name(s.labels[i]), csv::format_double(cuts.dry_upper),
                       csv::format_double(cuts.extremely_dry_upper)});
        }
    }
    w.save((out_dir / "plotdata.csv").string());
}

// Fetches the configured remote series and writes it as canonical CSV.
inline std::string cmd_fetch(const PipelineConfig& cfg, std::string out_path = {}) {
    if (!cfg.remote) throw_validation("fetch requires a remote input block in the config");
    const ClimateSeries series = load_input(cfg);
    if (out_path.empty())
        out_path = (std::filesystem::path(cfg.output_dir) / "climate.csv").string();
    std::filesystem::create_directories(std::filesystem::path(out_path).parent_path());
    write_csv(series, out_path, {"config=" + cfg.config_hash + " model=-"});
    return out_path;
}

}  // namespace msdi
