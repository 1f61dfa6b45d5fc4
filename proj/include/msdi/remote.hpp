//SPDX-License-Identifier: Apache-2.0
#pragma once

#ifdef MSDI_ENABLE_TLS
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#endif

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "msdi/calendar.hpp"
#include "msdi/climate.hpp"
#include "msdi/csv.hpp"
#include "msdi/errors.hpp"
#include "msdi/model_io.hpp"

namespace msdi {

// A monthly point-data service speaking the POWER-style JSON layout:
// properties.parameter.<VARIABLE>.<YYYYMM> = value, with month 13 carrying
// the annual aggregate and values <= -999 marking missing data. A different
// provider only needs a new parser alongside parse_power_json.
struct Endpoint {
    std::string url;  // e.g. "https://power.larc.nasa.gov/api/temporal/monthly/point"
    std::string rainfall_parameter = "PRECTOTCORR";  // mm/day
    std::string temperature_parameter = "TS";        // ground (skin) temperature, degC
    std::string community = "AG";
};

inline std::string default_cache_dir() {
    if (const char* env = std::getenv("MSDI_CACHE_DIR"); env && *env) return env;
    return ".msdi_cache";
}

namespace detail {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw_validation("endpoint url missing scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot read cache file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

// Maps a POWER-style monthly JSON body onto a validated ClimateSeries
// restricted to `range`.
inline ClimateSeries parse_power_json(const std::string& body, const MonthRange& range,
                                      const StationInfo& station, const Endpoint& endpoint) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const std::exception& e) {
        throw_io(std::string("malformed service response: ") + e.what());
    }
    if (!j.contains("properties") || !j["properties"].contains("parameter"))
        throw_io("service response missing properties.parameter");
    const auto& params = j["properties"]["parameter"];
    for (const auto* name : {&endpoint.rainfall_parameter, &endpoint.temperature_parameter})
        if (!params.contains(*name))
            throw_io("service response missing variable '" + *name + "'");

    auto month_of_key = [](const std::string& key) -> YearMonth {
        if (key.size() != 6) throw_io("unexpected month key '" + key + "'");
        const int year = std::stoi(key.substr(0, 4));
        const int month = std::stoi(key.substr(4, 2));
        return YearMonth{year, month};
    };

    ClimateSeries series;
    series.station = station;
    for (const auto& [key, value] : params[endpoint.rainfall_parameter].items()) {
        const int month = std::stoi(key.substr(4, 2));
        if (month == 13) continue;  // annual aggregate row
        const YearMonth ym = month_of_key(key);
        if (!range.contains(ym)) continue;
        const double rain = value.get<double>();
        const auto& temps = params[endpoint.temperature_parameter];
        if (!temps.contains(key))
            throw_io("temperature missing for month " + ym.str());
        const double temp = temps[key].get<double>();
        if (rain <= -999.0 || temp <= -999.0)
            throw_validation("fill value (missing data) at " + ym.str());
        series.records.push_back(ClimateRecord{ym, rain, temp});
    }
    validate_series(series);
    if (series.records.size() != static_cast<std::size_t>(range.size()))
        throw_validation("service returned " + std::to_string(series.records.size()) +
                         " months, expected " + std::to_string(range.size()));
    return series;
}

// Fetches a monthly series, caching the raw response body under a
// content-addressed path so re-runs are offline-reproducible. The cache key
// covers station, range, and endpoint; set cache_dir per MSDI_CACHE_DIR or
// the config to redirect it.
inline ClimateSeries fetch_remote(const StationInfo& station, const MonthRange& range,
                                  const Endpoint& endpoint,
                                  const std::string& cache_dir = default_cache_dir(),
                                  int retries = 3) {
    if (range.empty()) throw_validation("empty month range");

    const std::string key = csv::format_double(station.latitude) + "|" +
                            csv::format_double(station.longitude) + "|" +
                            range.start.str() + "|" + range.end.str() + "|" + endpoint.url +
                            "|" + endpoint.rainfall_parameter + "|" +
                            endpoint.temperature_parameter + "|" + endpoint.community;
    const std::filesystem::path cache_path =
        std::filesystem::path(cache_dir) / ("power_" + hash_hex(key) + ".json");

    std::string body;
    if (std::filesystem::exists(cache_path)) {
        body = detail::read_file_bytes(cache_path.string());
    } else {
        const auto [base, path] = detail::split_url(endpoint.url);
#ifndef MSDI_ENABLE_TLS
        if (base.rfind("https", 0) == 0)
            throw_io("endpoint requires TLS but this build has no TLS support: " + base);
#endif
        httplib::Params query{{"parameters", endpoint.rainfall_parameter + "," +
                                                 endpoint.temperature_parameter},
                              {"community", endpoint.community},
                              {"latitude", csv::format_double(station.latitude)},
                              {"longitude", csv::format_double(station.longitude)},
                              {"start", std::to_string(range.start.year)},
                              {"end", std::to_string(range.end.year)},
                              {"format", "JSON"}};
        const std::string full_path = httplib::append_query_params(path, query);

        std::string last_error;
        bool got = false;
        for (int attempt = 1; attempt <= retries && !got; ++attempt) {
            httplib::Client client(base);
            client.set_connection_timeout(10);
            client.set_read_timeout(60);
            auto res = client.Get(full_path);
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                throw_io("service error: HTTP " + std::to_string(res->status) + " from " +
                         endpoint.url);
            }
            body = res->body;
            got = true;
        }
        if (!got)
            throw_io("network failure fetching " + endpoint.url + " after " +
                     std::to_string(retries) + " attempts: " + last_error);

        std::filesystem::create_directories(cache_path.parent_path());
        std::ofstream out(cache_path, std::ios::binary);
        if (!out) throw_io("cannot write cache file '" + cache_path.string() + "'");
        out << body;
    }

    return parse_power_json(body, range, station, endpoint);
}

}  // namespace msdi
