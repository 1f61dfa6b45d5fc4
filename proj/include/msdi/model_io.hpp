//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "msdi/climate.hpp"
#include "msdi/copulas.hpp"
#include "msdi/distributions.hpp"
#include "msdi/errors.hpp"

namespace msdi {

using json = nlohmann::ordered_json;

// FNV-1a over a byte string; rendered as 16 hex digits. Stable across
// platforms, good enough to pin artifacts to their inputs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

// Content hash of a climate series: hash of its canonical CSV bytes.
inline std::string series_hash(const ClimateSeries& series) {
    return hash_hex(series_to_csv(series));
}

inline json to_json(const FittedMarginal& m) {
    json j;
    j["family"] = family_name(m.family);
    switch (m.family) {
    case DistributionFamily::Beta:
        j["params"] = {{"alpha", m.params[0]}, {"beta", m.params[1]}};
        break;
    case DistributionFamily::Gamma:
        j["params"] = {{"shape", m.params[0]}, {"scale", m.params[1]}};
        break;
    case DistributionFamily::HalfGaussian:
        j["params"] = {{"sigma", m.params[0]}};
        break;
    case DistributionFamily::GaussianMixture: {
        json comps = json::array();
        for (std::size_t c = 0; c < m.component_count(); ++c)
            comps.push_back({{"weight", m.params[3 * c]},
                             {"mean", m.params[3 * c + 1]},
                             {"stddev", m.params[3 * c + 2]}});
        j["params"] = {{"components", comps}};
        break;
    }
    }
    j["scale"] = {{"offset", m.scale.offset}, {"divisor", m.scale.divisor}};
    j["n"] = m.n;
    j["log_likelihood"] = m.log_likelihood;
    j["aic"] = m.aic;
    return j;
}

inline FittedMarginal marginal_from_json(const json& j) {
    FittedMarginal m;
    m.family = family_from_name(j.at("family").get<std::string>());
    const json& p = j.at("params");
    switch (m.family) {
    case DistributionFamily::Beta:
        m.params = {p.at("alpha").get<double>(), p.at("beta").get<double>()};
        break;
    case DistributionFamily::Gamma:
        m.params = {p.at("shape").get<double>(), p.at("scale").get<double>()};
        break;
    case DistributionFamily::HalfGaussian:
        m.params = {p.at("sigma").get<double>()};
        break;
    case DistributionFamily::GaussianMixture:
        for (const json& c : p.at("components")) {
            m.params.push_back(c.at("weight").get<double>());
            m.params.push_back(c.at("mean").get<double>());
            m.params.push_back(c.at("stddev").get<double>());
        }
        break;
    }
    m.scale.offset = j.at("scale").at("offset").get<double>();
    m.scale.divisor = j.at("scale").at("divisor").get<double>();
    m.n = j.at("n").get<std::size_t>();
    // NaN (an unfitted hand-built marginal) serializes as null.
    auto num = [](const json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    m.log_likelihood = num(j.at("log_likelihood"));
    m.aic = num(j.at("aic"));
    m.check();
    return m;
}

inline json to_json(const CopulaModel& c) {
    json j;
    j["family"] = family_name(c.family);
    j["theta"] = c.theta;
    if (c.fit) {
        j["fit"] = {{"tau", c.fit->tau},
                    {"s_n", c.fit->s_n},
                    {"p_value", c.fit->p_value},
                    {"bootstrap_n", c.fit->bootstrap_n}};
    }
    return j;
}

inline CopulaModel copula_from_json(const json& j) {
    CopulaModel c;
    c.family = copula_from_name(j.at("family").get<std::string>());
    c.theta = j.at("theta").get<double>();
    if (j.contains("fit")) {
        GofDiagnostics d;
        d.tau = j["fit"].at("tau").get<double>();
        d.s_n = j["fit"].at("s_n").get<double>();
        d.p_value = j["fit"].at("p_value").get<double>();
        d.bootstrap_n = j["fit"].at("bootstrap_n").get<std::size_t>();
        c.fit = d;
    }
    check_theta(c.family, c.theta);
    return c;
}

// The versioned fit artifact: selected marginals and copula plus every
// candidate that was evaluated, pinned to the input series by content hash.
struct ModelDocument {
    static constexpr int kVersion = 1;

    std::string series_hash;
    std::string config_hash;
    FittedMarginal rainfall;
    FittedMarginal temperature;
    CopulaModel copula;
    std::vector<FittedMarginal> rainfall_candidates;
    std::vector<FittedMarginal> temperature_candidates;
    std::vector<CopulaModel> copula_candidates;
};

inline json to_json(const ModelDocument& doc) {
    json j;
    j["version"] = ModelDocument::kVersion;
    j["series_hash"] = doc.series_hash;
    j["config_hash"] = doc.config_hash;
    j["rainfall"] = {{"selected", to_json(doc.rainfall)}};
    j["temperature"] = {{"selected", to_json(doc.temperature)}};
    j["copula"] = {{"selected", to_json(doc.copula)}};
    json rc = json::array();
    for (const auto& m : doc.rainfall_candidates) rc.push_back(to_json(m));
    j["rainfall"]["candidates"] = rc;
    json tc = json::array();
    for (const auto& m : doc.temperature_candidates) tc.push_back(to_json(m));
    j["temperature"]["candidates"] = tc;
    json cc = json::array();
    for (const auto& c : doc.copula_candidates) cc.push_back(to_json(c));
    j["copula"]["candidates"] = cc;
    return j;
}

inline ModelDocument model_from_json(const json& j) {
    if (j.at("version").get<int>() != ModelDocument::kVersion)
        throw_validation("unsupported model document version");
    ModelDocument doc;
    doc.series_hash = j.at("series_hash").get<std::string>();
    doc.config_hash = j.at("config_hash").get<std::string>();
    doc.rainfall = marginal_from_json(j.at("rainfall").at("selected"));
    doc.temperature = marginal_from_json(j.at("temperature").at("selected"));
    doc.copula = copula_from_json(j.at("copula").at("selected"));
    for (const json& m : j.at("rainfall").at("candidates"))
        doc.rainfall_candidates.push_back(marginal_from_json(m));
    for (const json& m : j.at("temperature").at("candidates"))
        doc.temperature_candidates.push_back(marginal_from_json(m));
    for (const json& c : j.at("copula").at("candidates"))
        doc.copula_candidates.push_back(copula_from_json(c));
    return doc;
}

inline void save_model(const ModelDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot open '" + path + "' for writing");
    out << to_json(doc).dump(2) << '\n';
    if (!out) throw_io("write to '" + path + "' failed");
}

inline ModelDocument load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open model document '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw_io("malformed model document '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

}  // namespace msdi
