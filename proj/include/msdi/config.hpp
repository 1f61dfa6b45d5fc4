//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msdi/climate.hpp"
#include "msdi/copulas.hpp"
#include "msdi/distributions.hpp"
#include "msdi/errors.hpp"
#include "msdi/index.hpp"
#include "msdi/model_io.hpp"
#include "msdi/remote.hpp"

namespace msdi {

// One structured document drives the whole pipeline; see
// configs/example.json for an annotated template.
struct PipelineConfig {
    // Exactly one input source.
    std::optional<std::string> input_csv;
    struct RemoteInput {
        StationInfo station;
        MonthRange range;
        Endpoint endpoint;
    };
    std::optional<RemoteInput> remote;

    std::vector<DistributionFamily> rainfall_candidates = {
        DistributionFamily::Beta, DistributionFamily::Gamma, DistributionFamily::HalfGaussian};
    std::vector<DistributionFamily> temperature_candidates = {
        DistributionFamily::GaussianMixture};
    std::size_t gmm_components = 2;
    std::vector<CopulaFamily> copula_candidates = {CopulaFamily::Frank, CopulaFamily::FGM};
    std::size_t bootstrap_n = 1000;
    std::vector<int> windows = {std::begin(kDefaultWindows), std::end(kDefaultWindows)};
    ThresholdTable thresholds = ThresholdTable::msdi_defaults();
    ThresholdTable spi_thresholds = ThresholdTable::spi_defaults(kDefaultWindows);
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string cache_dir = default_cache_dir();
    double index_clamp = kDefaultIndexClamp;
    bool spi_per_month = false;
    bool allow_rejected_copula = false;
    FavorableBounds favorable;

    std::string config_hash;  // hash of the loaded document
};

namespace detail {

inline void apply_threshold_overrides(ThresholdTable& table, const nlohmann::json& overrides) {
    for (const auto& [key, value] : overrides.items()) {
        const int window = std::stoi(key);
        if (!value.is_array() || value.size() != 2)
            throw_validation("threshold override for window " + key +
                             " must be [extremely_dry_upper, dry_upper]");
        table.cuts[window] = ThresholdCuts{value[0].get<double>(), value[1].get<double>()};
    }
}

}  // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& j) {
    PipelineConfig cfg;

    if (!j.contains("seed")) throw_validation("config requires an explicit seed");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (!j.contains("input")) throw_validation("config requires an input block");
    const auto& input = j.at("input");
    if (input.contains("csv")) cfg.input_csv = input.at("csv").get<std::string>();
    if (input.contains("remote")) {
        const auto& r = input.at("remote");
        PipelineConfig::RemoteInput remote;
        remote.station.latitude = r.at("latitude").get<double>();
        remote.station.longitude = r.at("longitude").get<double>();
        remote.station.id = r.value("station_id", std::string{});
        remote.range.start = parse_year_month(r.at("start").get<std::string>());
        remote.range.end = parse_year_month(r.at("end").get<std::string>());
        remote.endpoint.url = r.at("endpoint").get<std::string>();
        remote.endpoint.rainfall_parameter =
            r.value("rainfall_parameter", remote.endpoint.rainfall_parameter);
        remote.endpoint.temperature_parameter =
            r.value("temperature_parameter", remote.endpoint.temperature_parameter);
        remote.endpoint.community = r.value("community", remote.endpoint.community);
        cfg.remote = remote;
    }
    if (cfg.input_csv.has_value() == cfg.remote.has_value())
        throw_validation("config input must name exactly one of csv or remote");

    auto family_list = [&](const char* key, std::vector<DistributionFamily> fallback) {
        if (!j.contains(key)) return fallback;
        std::vector<DistributionFamily> out;
        for (const auto& name : j.at(key)) out.push_back(family_from_name(name));
        if (out.empty()) throw_validation(std::string(key) + " must be nonempty");
        return out;
    };
    cfg.rainfall_candidates = family_list("rainfall_candidates", cfg.rainfall_candidates);
    cfg.temperature_candidates =
        family_list("temperature_candidates", cfg.temperature_candidates);

    if (j.contains("copula_candidates")) {
        cfg.copula_candidates.clear();
        for (const auto& name : j.at("copula_candidates"))
            cfg.copula_candidates.push_back(copula_from_name(name));
        if (cfg.copula_candidates.empty())
            throw_validation("copula_candidates must be nonempty");
    }

    cfg.gmm_components = j.value("gmm_components", cfg.gmm_components);
    if (cfg.gmm_components < 1) throw_validation("gmm_components must be >= 1");

    cfg.bootstrap_n = j.value("bootstrap_n", cfg.bootstrap_n);
    if (cfg.bootstrap_n < 100) throw_validation("bootstrap_n must be >= 100");

    if (j.contains("windows")) {
        cfg.windows.clear();
        for (const auto& w : j.at("windows")) cfg.windows.push_back(w.get<int>());
    }
    if (cfg.windows.empty()) throw_validation("windows must be nonempty");
    for (int w : cfg.windows)
        if (w < 1) throw_validation("windows must be >= 1");

    if (j.contains("thresholds"))
        detail::apply_threshold_overrides(cfg.thresholds, j.at("thresholds"));
    cfg.spi_thresholds = ThresholdTable::spi_defaults(cfg.windows);
    if (j.contains("spi_thresholds"))
        detail::apply_threshold_overrides(cfg.spi_thresholds, j.at("spi_thresholds"));

    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    cfg.index_clamp = j.value("index_clamp", cfg.index_clamp);
    if (!(cfg.index_clamp > 0.0)) throw_validation("index_clamp must be positive");
    cfg.spi_per_month = j.value("spi_per_month", cfg.spi_per_month);
    cfg.allow_rejected_copula = j.value("allow_rejected_copula", cfg.allow_rejected_copula);

    if (j.contains("favorable_bounds")) {
        const auto& f = j.at("favorable_bounds");
        cfg.favorable.rainfall_low = f.value("rainfall_low", cfg.favorable.rainfall_low);
        cfg.favorable.rainfall_high = f.value("rainfall_high", cfg.favorable.rainfall_high);
        cfg.favorable.temperature_low =
            f.value("temperature_low", cfg.favorable.temperature_low);
        cfg.favorable.temperature_high =
            f.value("temperature_high", cfg.favorable.temperature_high);
        cfg.favorable.check();
    }

    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                                  /*ignore_comments=*/true);
    } catch (const std::exception& e) {
        throw_validation("malformed config '" + path + "': " + e.what());
    }
    PipelineConfig cfg = parse_config(j);
    cfg.config_hash = hash_hex(text);
    return cfg;
}

}  // namespace msdi
