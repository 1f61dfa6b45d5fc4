//SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion prints exactly one line:
//   criterion <n> [PASS|FAIL|SKIP] <name> -- <detail>
// SKIP is reserved for the data-dependent criteria (1, 2, 7) when the remote
// climate service is unreachable and no cached response exists. The process
// exits nonzero iff any executed criterion FAILs.
//
//   acceptance [--only N] [--skip-slow]

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msdi/pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace msdi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum Status { Pass, Fail, Skip } status = Pass;
    std::string detail;
};

Outcome pass(std::string detail = "") { return {Outcome::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Outcome::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Outcome::Skip, std::move(detail)}; }

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "msdi_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Shared station fit for the data-dependent criteria (1, 2, 7).

struct StationFit {
    PipelineConfig cfg;
    ClimateSeries series;
    ModelDocument doc;
    double fit_seconds = 0.0;
};

PipelineConfig station_config() {
    PipelineConfig cfg;
    PipelineConfig::RemoteInput remote;
    remote.station = {"nc", 8.1996, 80.6327};
    remote.range = {YearMonth{1981, 1}, YearMonth{2021, 12}};
    remote.endpoint.url = "https://power.larc.nasa.gov/api/temporal/monthly/point";
    cfg.remote = remote;
    cfg.seed = 20240801;
    cfg.bootstrap_n = 1000;
    cfg.output_dir = scratch("station_fit").string();
    cfg.config_hash = "acceptance";
    return cfg;
}

// Fetches and fits once; nullopt (with a reason) when the data source is out
// of reach. A previously warmed cache (e.g. from `msdi fetch`) also works.
const std::optional<StationFit>& station_fit(std::string* reason = nullptr) {
    static std::optional<StationFit> cached;
    static bool attempted = false;
    static std::string why;
    if (!attempted) {
        attempted = true;
        try {
            StationFit sf;
            sf.cfg = station_config();
            sf.series = load_input(sf.cfg);
            const auto t0 = std::chrono::steady_clock::now();
            sf.doc = cmd_fit(sf.cfg);
            sf.fit_seconds = seconds_since(t0);
            cached = std::move(sf);
        } catch (const std::exception& e) {
            why = e.what();
        }
    }
    if (reason) *reason = why;
    return cached;
}

// ---------------------------------------------------------------------------
// Criterion 1: marginal reproduction on the station series.

Outcome criterion1() {
    std::string reason;
    const auto& sf = station_fit(&reason);
    if (!sf) return skip("station data unavailable: " + reason);

    double beta_aic = 0.0, gamma_aic = 0.0, hg_aic = 0.0;
    const FittedMarginal* beta_fit = nullptr;
    for (const auto& m : sf->doc.rainfall_candidates) {
        if (m.family == DistributionFamily::Beta) {
            beta_aic = m.aic;
            beta_fit = &m;
        }
        if (m.family == DistributionFamily::Gamma) gamma_aic = m.aic;
        if (m.family == DistributionFamily::HalfGaussian) hg_aic = m.aic;
    }
    if (!(beta_aic < gamma_aic && gamma_aic < hg_aic))
        return fail(fmt("AIC ordering violated: beta=%.3f gamma=%.3f half_gaussian=%.3f",
                        beta_aic, gamma_aic, hg_aic));

    std::ostringstream note;
    note << fmt("AIC beta=%.3f < gamma=%.3f < half_gaussian=%.3f", beta_aic, gamma_aic,
                hg_aic);
    const double alpha = beta_fit->params[0];
    const double beta_p = beta_fit->params[1];
    if (std::fabs(alpha - 0.779) > 0.05 || std::fabs(beta_p - 5.271) > 0.05)
        note << fmt("; beta params deviate from the reported fit: alpha=%.4f (ref 0.779) "
                    "beta=%.4f (ref 5.271)",
                    alpha, beta_p);
    else
        note << fmt("; alpha=%.4f beta=%.4f within 0.05", alpha, beta_p);

    const auto& gmm = sf->doc.temperature;
    const double ref[6] = {0.31, 24.8586, 0.8015, 0.69, 28.6589, 1.3191};
    bool gmm_ok = gmm.params.size() == 6;
    for (int i = 0; gmm_ok && i < 6; ++i)
        gmm_ok = std::fabs(gmm.params[i] - ref[i]) <= 0.05 * std::fabs(ref[i]);
    if (gmm_ok)
        note << "; GMM components within 5%";
    else
        note << "; GMM components deviate from the reported fit (reported, not failing)";
    note << fmt("; fit took %.1fs", sf->fit_seconds);
    if (sf->fit_seconds > 120.0) return fail("fit exceeded 2 minutes: " + note.str());
    return pass(note.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: dependence reproduction on the station series.

Outcome criterion2() {
    std::string reason;
    const auto& sf = station_fit(&reason);
    if (!sf) return skip("station data unavailable: " + reason);

    const PseudoObservations po =
        pseudo_observations(sf->series.rainfall(), sf->series.temperature());
    const double tau = kendall_tau(po);
    std::ostringstream note;
    note << fmt("tau=%.5f", tau);
    if (std::fabs(tau - (-0.00711)) > 0.01)
        return fail(note.str() + " outside -0.00711 +- 0.01");

    const CopulaModel* fgm = nullptr;
    const CopulaModel* frank = nullptr;
    for (const auto& c : sf->doc.copula_candidates) {
        if (c.family == CopulaFamily::FGM) fgm = &c;
        if (c.family == CopulaFamily::Frank) frank = &c;
    }
    if (!fgm || !frank) return fail("copula candidates missing");
    note << fmt("; FGM theta=%.5f", fgm->theta);
    if (std::fabs(fgm->theta - (-0.03195)) > 0.01)
        return fail(note.str() + " outside -0.03195 +- 0.01");
    note << fmt("; p FGM=%.4f Frank=%.4f", fgm->fit->p_value, frank->fit->p_value);
    if (sf->doc.copula.family != CopulaFamily::FGM)
        return fail(note.str() + "; FGM not selected");
    return pass(note.str() + "; FGM selected");
}

// ---------------------------------------------------------------------------
// Criterion 3: synthetic round trips, 20 seeded repetitions each.

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = 20000;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const std::uint64_t seed = child_seed(31337, rep);
        {
            const auto fit =
                fit_mle(DistributionFamily::Beta, sample(make_beta(0.8, 5.3), n, seed));
            if (std::fabs(fit.params[0] - 0.8) > 0.05 || std::fabs(fit.params[1] - 5.3) > 0.25)
                return fail(fmt("beta rep %llu: alpha=%.4f beta=%.4f",
                                (unsigned long long)rep, fit.params[0], fit.params[1]));
        }
        {
            const auto fit = fit_mle(DistributionFamily::Gamma,
                                     sample(make_gamma(0.861, 3.690), n, seed + 1));
            if (std::fabs(fit.params[0] - 0.861) > 0.05 * 0.861 ||
                std::fabs(fit.params[1] - 3.690) > 0.05 * 3.690)
                return fail(fmt("gamma rep %llu: shape=%.4f scale=%.4f",
                                (unsigned long long)rep, fit.params[0], fit.params[1]));
        }
        {
            const auto fit = fit_mle(DistributionFamily::HalfGaussian,
                                     sample(make_half_gaussian(4.821), n, seed + 2));
            if (std::fabs(fit.params[0] - 4.821) > 0.05 * 4.821)
                return fail(fmt("half-gaussian rep %llu: sigma=%.4f",
                                (unsigned long long)rep, fit.params[0]));
        }
        {
            const auto truth = make_gmm({{0.31, 24.8586, 0.8015}, {0.69, 28.6589, 1.3191}});
            const auto fit = fit_gmm(sample(truth, n, seed + 3), 2, seed + 4);
            const double ref[6] = {0.31, 24.8586, 0.8015, 0.69, 28.6589, 1.3191};
            for (int i = 0; i < 6; ++i)
                if (std::fabs(fit.params[i] - ref[i]) > 0.05 * std::fabs(ref[i]))
                    return fail(fmt("gmm rep %llu: param %d = %.4f (ref %.4f)",
                                    (unsigned long long)rep, i, fit.params[i], ref[i]));
        }
        {
            const auto sim = simulate({CopulaFamily::FGM, 0.8}, n, seed + 5);
            std::vector<double> u(n), v(n);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = sim[i].first;
                v[i] = sim[i].second;
            }
            const auto fit = fit_theta(CopulaFamily::FGM, pseudo_observations(u, v));
            if (std::fabs(fit.theta - 0.8) > 0.05)
                return fail(fmt("fgm rep %llu: theta=%.4f", (unsigned long long)rep,
                                fit.theta));
        }
        {
            const auto sim = simulate({CopulaFamily::Frank, 5.0}, n, seed + 6);
            std::vector<double> u(n), v(n);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = sim[i].first;
                v[i] = sim[i].second;
            }
            const auto fit = fit_theta(CopulaFamily::Frank, pseudo_observations(u, v));
            if (std::fabs(fit.theta - 5.0) > 0.25)
                return fail(fmt("frank rep %llu: theta=%.4f", (unsigned long long)rep,
                                fit.theta));
        }
    }
    const double dt = seconds_since(t0);
    if (dt > 300.0) return fail(fmt("round trips exceeded 5 minutes (%.0fs)", dt));
    return pass(fmt("4 marginal + 2 copula families, 20 seeded reps each, %.0fs", dt));
}

// ---------------------------------------------------------------------------
// Criterion 4: oracle equivalences.

Outcome criterion4() {
    // O(n log n) Kendall tau == brute force, exactly, ties included.
    {
        Rng rng(4001);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t n = 2 + rng.below(199);
            std::vector<double> x(n), y(n);
            bool x_varies = false, y_varies = false;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = trial % 2 ? rng.uniform01() : static_cast<double>(rng.below(10));
                y[i] = trial % 2 ? rng.uniform01() : static_cast<double>(rng.below(10));
                if (x[i] != x[0]) x_varies = true;
                if (y[i] != y[0]) y_varies = true;
            }
            if (!x_varies || !y_varies) continue;
            if (kendall_tau(x, y) != oracles::kendall_tau_bruteforce(x, y))
                return fail(fmt("kendall mismatch at trial %d (n=%zu)", trial, n));
        }
    }
    // Density vs mixed second differences of the CDF.
    {
        Rng rng(4002);
        const double h = 1e-4;
        for (const CopulaFamily family : {CopulaFamily::Frank, CopulaFamily::FGM}) {
            for (int trial = 0; trial < 50; ++trial) {
                const double theta = family == CopulaFamily::FGM
                                         ? 2.0 * rng.uniform01() - 1.0
                                         : 12.0 * rng.uniform01() - 6.0;
                const CopulaModel c{family, theta};
                const double u = 0.05 + 0.9 * rng.uniform01();
                const double v = 0.05 + 0.9 * rng.uniform01();
                const double mixed =
                    (copula_cdf(c, u + h, v + h) - copula_cdf(c, u + h, v - h) -
                     copula_cdf(c, u - h, v + h) + copula_cdf(c, u - h, v - h)) /
                    (4.0 * h * h);
                if (std::fabs(copula_density(c, u, v) - mixed) > 1e-4)
                    return fail(fmt("density/cdf mismatch: %s theta=%.3f u=%.3f v=%.3f",
                                    family_name(family), theta, u, v));
            }
        }
    }
    // tau_of_theta vs Monte Carlo tau of simulated pairs.
    {
        Rng rng(4003);
        for (const CopulaFamily family : {CopulaFamily::Frank, CopulaFamily::FGM}) {
            for (int trial = 0; trial < 20; ++trial) {
                const double theta = family == CopulaFamily::FGM
                                         ? 2.0 * rng.uniform01() - 1.0
                                         : 12.0 * rng.uniform01() - 6.0;
                const CopulaModel c{family, theta};
                const auto sim = simulate(c, 100000, child_seed(4004, trial));
                std::vector<double> u(sim.size()), v(sim.size());
                for (std::size_t i = 0; i < sim.size(); ++i) {
                    u[i] = sim[i].first;
                    v[i] = sim[i].second;
                }
                const double mc = kendall_tau(u, v);
                if (std::fabs(tau_of_theta(family, theta) - mc) > 0.01)
                    return fail(fmt("tau mismatch: %s theta=%.3f analytic=%.4f mc=%.4f",
                                    family_name(family), theta,
                                    tau_of_theta(family, theta), mc));
            }
        }
    }
    // Normal quantile vs the bisection oracle.
    {
        Rng rng(4005);
        for (int trial = 0; trial < 10000; ++trial) {
            const double p = rng.uniform01();
            if (std::fabs(special::normal_quantile(p) - oracles::normal_quantile_bisect(p)) >
                1e-9)
                return fail(fmt("normal quantile mismatch at p=%.12f", p));
        }
    }
    return pass("kendall exact x1000; density 1e-4; tau MC 0.01; quantile 1e-9 x10000");
}

// ---------------------------------------------------------------------------
// Criterion 5 (slow): GOF p-value calibration under the null.

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const int replicates = 500;
    const std::size_t n = 200;
    const std::size_t bootstrap_n = 250;
    std::vector<double> pvalues(replicates);

    detail::parallel_for(replicates, std::thread::hardware_concurrency(), [&](std::size_t r) {
        const auto sim = simulate({CopulaFamily::FGM, 0.5}, n, child_seed(7919, r));
        std::vector<double> u(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = sim[i].first;
            v[i] = sim[i].second;
        }
        const auto po = pseudo_observations(u, v);
        const CopulaModel model =
            gof_pvalue(CopulaFamily::FGM, po, bootstrap_n, child_seed(104729, r),
                       /*threads=*/1);
        pvalues[r] = model.fit->p_value;
    });

    int rejections = 0;
    for (double p : pvalues)
        if (p <= 0.05) ++rejections;
    const double rate = static_cast<double>(rejections) / replicates;

    // Chi-square uniformity over 10 bins, 9 dof, 5% critical value 16.919.
    double chi2 = 0.0;
    {
        int bins[10] = {};
        for (double p : pvalues) {
            int b = static_cast<int>(p * 10.0);
            if (b > 9) b = 9;
            ++bins[b];
        }
        const double expected = replicates / 10.0;
        for (int b = 0; b < 10; ++b)
            chi2 += (bins[b] - expected) * (bins[b] - expected) / expected;
    }

    const double dt = seconds_since(t0);
    std::string note = fmt("rejection rate %.3f (target 0.05 +- 0.02), chi2=%.2f "
                           "(9 dof, 5%% crit 16.92), %.0fs",
                           rate, chi2, dt);
    if (rate < 0.03 || rate > 0.07) return fail(note);
    if (chi2 > 16.919) return fail(note + "; p-values not uniform");
    if (dt > 1800.0) return fail(note + "; exceeded 30 minutes");
    return pass(note);
}

// ---------------------------------------------------------------------------
// Criterion 6: index properties.

Outcome criterion6() {
    // Normal quantile round trip on the unclamped range.
    {
        Rng rng(6001);
        for (int trial = 0; trial < 5000; ++trial) {
            const double p = rng.uniform01();
            const double z = msdi_1month(p);
            if (std::fabs(z) < 5.0 && std::fabs(special::normal_cdf(z) - p) > 1e-9)
                return fail(fmt("msdi_1month round trip broke at p=%.12f", p));
        }
    }
    // Aggregate vs plainly computed moving averages, 50 random fixtures.
    {
        Rng rng(6002);
        for (int fixture = 0; fixture < 50; ++fixture) {
            const int n = 5 + static_cast<int>(rng.below(80));
            const int window = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            IndexSeries one;
            one.kind = IndexKind::MSDI;
            one.window = 1;
            one.start = YearMonth{1981, 1};
            for (int i = 0; i < n; ++i) one.values.push_back(8.0 * rng.uniform01() - 4.0);
            one.labels.assign(one.values.size(), Severity::Undefined);
            const IndexSeries agg = aggregate(one, window);
            for (int i = 0; i < n; ++i) {
                if (i < window - 1) {
                    if (!std::isnan(agg.values[i]))
                        return fail(fmt("fixture %d: warm-up month %d defined", fixture, i));
                    continue;
                }
                double sum = 0.0;
                for (int k = i - window + 1; k <= i; ++k) sum += one.values[k];
                if (agg.values[i] != sum / window)
                    return fail(fmt("fixture %d: window mean mismatch at month %d", fixture,
                                    i));
            }
        }
    }
    // Threshold table boundary examples, half-open convention.
    {
        const ThresholdTable table = ThresholdTable::msdi_defaults();
        auto label_of = [&](int window, double value) {
            IndexSeries s;
            s.kind = IndexKind::MSDI;
            s.window = window;
            s.start = YearMonth{1981, 1};
            s.values = {value};
            s.labels = {Severity::Undefined};
            return classify(s, table).labels[0];
        };
        struct Case {
            int window;
            double value;
            Severity expected;
        };
        const Case cases[] = {
            {3, -3.5, Severity::ExtremelyDry}, {12, -1.0, Severity::Dry},
            {6, 0.0, Severity::Normal},        {3, -3.2, Severity::Dry},
            {6, -2.5, Severity::Dry},          {9, -2.1, Severity::Dry},
            {12, -1.7, Severity::Dry},         {3, -1.3, Severity::Normal},
            {6, -0.8, Severity::Normal},       {9, -0.4, Severity::Normal},
            {12, -0.3, Severity::Normal},
        };
        for (const auto& c : cases)
            if (label_of(c.window, c.value) != c.expected)
                return fail(fmt("classify(%d-month, %.2f) mislabeled", c.window, c.value));
    }
    // All emitted values on a synthetic pipeline stay in [-5, 5].
    {
        const auto series = test_support::synthetic_station_series(492, 999);
        const auto rain = fit_mle(DistributionFamily::Beta, series.rainfall());
        const auto temp = fit_gmm(series.temperature(), 2, 1234);
        const IndexSeries base = msdi_series(series, rain, temp, {CopulaFamily::FGM, -0.03});
        for (int w : {1, 3, 6, 9, 12}) {
            const IndexSeries agg = aggregate(base, w);
            const IndexSeries spi = spi_series(series, w);
            for (std::size_t i = 0; i < agg.size(); ++i) {
                if (agg.defined(i) && std::fabs(agg.values[i]) > 5.0)
                    return fail("msdi value escaped the clamp");
                if (spi.defined(i) && std::fabs(spi.values[i]) > 5.0)
                    return fail("spi value escaped the clamp");
            }
        }
    }
    return pass("round trip 1e-9; 50 aggregate fixtures exact; 11 threshold cases; clamp");
}

// ---------------------------------------------------------------------------
// Criterion 7: directional comparison against the recorded drought episodes.

Outcome criterion7() {
    std::string reason;
    const auto& sf = station_fit(&reason);
    if (!sf) return skip("station data unavailable: " + reason);

    const std::vector<EventRange> events = {
        {"1935-1937", {1935, 1}, {1937, 12}}, {"1947-1949", {1947, 1}, {1949, 12}},
        {"1953-1956", {1953, 1}, {1956, 12}}, {"1965", {1965, 1}, {1965, 12}},
        {"1974-1977", {1974, 1}, {1977, 12}}, {"1982-1983", {1982, 1}, {1983, 12}},
        {"1986-1987", {1986, 1}, {1987, 12}}, {"1992", {1992, 1}, {1992, 12}},
        {"1995-1996", {1995, 1}, {1996, 12}}, {"2001", {2001, 1}, {2001, 12}},
        {"2004", {2004, 1}, {2004, 12}},      {"2013-2014", {2013, 1}, {2014, 12}},
        {"2016-2017", {2016, 1}, {2017, 12}},
    };

    const IndexSeries base = msdi_series(sf->series, sf->doc.rainfall, sf->doc.temperature,
                                         sf->doc.copula, sf->cfg.index_clamp);
    std::ostringstream note;
    bool counterexample = false;
    for (int w : {3, 6, 9, 12}) {
        const IndexSeries msdi_w = classify(aggregate(base, w), sf->cfg.thresholds);
        const IndexSeries spi_w =
            classify(spi_series(sf->series, w), sf->cfg.spi_thresholds);
        const ComparisonReport report = compare(msdi_w, spi_w, events);
        note << fmt("w%d: msdi=%zu spi=%zu; ", w, report.msdi_detections,
                    report.spi_detections);
        if (w >= 6 && report.msdi_detections < report.spi_detections) counterexample = true;
    }
    if (counterexample)
        return pass(note.str() + "FLAGGED: a window >= 6 has MSDI < SPI detections");
    return pass(note.str() + "MSDI >= SPI on all windows >= 6");
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical output trees through the real CLI.

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MSDI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome criterion8() {
    const fs::path dir = scratch("determinism");
    const fs::path csv = dir / "station.csv";
    write_csv(test_support::synthetic_station_series(), csv.string());
    const fs::path events = dir / "events.csv";
    {
        std::ofstream out(events);
        out << "name,start,end\nepisode,1990-01,1992-12\n";
    }

    // One config; only the output directory is overridden per run.
    const fs::path config = test_support::write_config(
        dir, csv.string(), (dir / "out_default").string(), /*seed=*/20240801,
        /*bootstrap_n=*/100);
    for (const char* run : {"a", "b"}) {
        const fs::path out_dir = dir / (std::string("out_") + run);
        const std::string base =
            "--config " + config.string() + " --output-dir " + out_dir.string();
        if (run_cli(base + " fit") != 0) return fail("cli fit failed");
        if (run_cli(base + " index") != 0) return fail("cli index failed");
        if (run_cli(base + " compare --events " + events.string()) != 0)
            return fail("cli compare failed");
        if (run_cli(base + " plotdata") != 0) return fail("cli plotdata failed");
    }

    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "out_a")) {
        ++files;
        const fs::path b = dir / "out_b" / entry.path().filename();
        if (!fs::exists(b)) return fail("missing in second run: " + b.string());
        if (test_support::slurp(entry.path()) != test_support::slurp(b))
            return fail("byte mismatch: " + entry.path().filename().string());
    }
    if (files < 16) return fail(fmt("expected a full output tree, saw %zu files", files));
    return pass(fmt("two CLI pipeline runs, %zu files byte-identical", files));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    bool skip_slow = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--skip-slow") == 0)
            skip_slow = true;
    }

    struct Entry {
        int id;
        const char* name;
        bool slow;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "marginal reproduction (station data)", false, criterion1},
        {2, "dependence reproduction (station data)", false, criterion2},
        {3, "synthetic round-trip suite", false, criterion3},
        {4, "oracle equivalence", false, criterion4},
        {5, "GOF p-value calibration (slow)", true, criterion5},
        {6, "index properties", false, criterion6},
        {7, "MSDI vs SPI directional check (station data)", false, criterion7},
        {8, "pipeline determinism", false, criterion8},
    };

    bool any_fail = false;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        if (only == 0 && skip_slow && c.slow) continue;
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = fail(std::string("unexpected exception: ") + e.what());
        }
        const char* tag = outcome.status == Outcome::Pass   ? "PASS"
                          : outcome.status == Outcome::Fail ? "FAIL"
                                                            : "SKIP";
        std::printf("criterion %d [%s] %s -- %s\n", c.id, tag, c.name,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (outcome.status == Outcome::Fail) any_fail = true;
    }
    return any_fail ? 1 : 0;
}
