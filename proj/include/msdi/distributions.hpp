//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "msdi/errors.hpp"
#include "msdi/rng.hpp"
#include "msdi/special.hpp"

namespace msdi {

// Fitting operations refuse samples shorter than this. EM on two components
// and the bootstrap GOF are meaningless below it.
inline constexpr std::size_t kMinFitLength = 24;

enum class DistributionFamily { Beta, Gamma, HalfGaussian, GaussianMixture };

inline const char* family_name(DistributionFamily f) {
    switch (f) {
    case DistributionFamily::Beta: return "beta";
    case DistributionFamily::Gamma: return "gamma";
    case DistributionFamily::HalfGaussian: return "half_gaussian";
    case DistributionFamily::GaussianMixture: return "gaussian_mixture";
    }
    return "?";
}

inline DistributionFamily family_from_name(const std::string& name) {
    if (name == "beta") return DistributionFamily::Beta;
    if (name == "gamma") return DistributionFamily::Gamma;
    if (name == "half_gaussian") return DistributionFamily::HalfGaussian;
    if (name == "gaussian_mixture") return DistributionFamily::GaussianMixture;
    throw_validation("unknown distribution family '" + name + "'");
}

// Affine data transform recorded on a fit when the family required rescaling
// (beta needs data in (0,1)). Evaluation always maps original-unit input
// through it first.
struct ScaleTransform {
    double offset = 0.0;
    double divisor = 1.0;

    double apply(double x) const noexcept { return (x - offset) / divisor; }
    double invert(double t) const noexcept { return t * divisor + offset; }
    bool identity() const noexcept { return offset == 0.0 && divisor == 1.0; }
};

// A fitted univariate marginal.
//
// Parameter layout: Beta {alpha, beta}; Gamma {shape, scale};
// HalfGaussian {sigma}; GaussianMixture {w, mu, sigma} per component,
// components in increasing-mean order.
//
// log_likelihood and aic are expressed in original data units: when a scale
// transform was applied, the Jacobian term n*log(divisor) is subtracted from
// the transformed-scale log-likelihood so AIC values are comparable across
// families fitted to the same series.
struct FittedMarginal {
    DistributionFamily family = DistributionFamily::Gamma;
    std::vector<double> params;
    ScaleTransform scale;
    double log_likelihood = std::numeric_limits<double>::quiet_NaN();
    double aic = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;

    std::size_t component_count() const { return params.size() / 3; }

    int free_parameters() const {
        switch (family) {
        case DistributionFamily::Beta: return 2;
        case DistributionFamily::Gamma: return 2;
        case DistributionFamily::HalfGaussian: return 1;
        case DistributionFamily::GaussianMixture:
            return static_cast<int>(3 * component_count()) - 1;
        }
        return 0;
    }

    void check() const {
        switch (family) {
        case DistributionFamily::Beta:
            if (params.size() != 2 || params[0] <= 0.0 || params[1] <= 0.0)
                throw_validation("beta requires alpha, beta > 0");
            break;
        case DistributionFamily::Gamma:
            if (params.size() != 2 || params[0] <= 0.0 || params[1] <= 0.0)
                throw_validation("gamma requires shape, scale > 0");
            break;
        case DistributionFamily::HalfGaussian:
            if (params.size() != 1 || params[0] <= 0.0)
                throw_validation("half-gaussian requires sigma > 0");
            break;
        case DistributionFamily::GaussianMixture: {
            if (params.size() < 3 || params.size() % 3 != 0)
                throw_validation("mixture parameter vector must hold (w, mu, sigma) triples");
            double wsum = 0.0;
            for (std::size_t j = 0; j < component_count(); ++j) {
                const double w = params[3 * j];
                const double sigma = params[3 * j + 2];
                if (!(w > 0.0 && w < 1.0 + 1e-12))
                    throw_validation("mixture weights must lie in (0,1)");
                if (sigma <= 0.0) throw_validation("mixture sigma must be > 0");
                wsum += w;
            }
            if (std::fabs(wsum - 1.0) > 1e-9)
                throw_validation("mixture weights must sum to 1");
            break;
        }
        }
        if (divisor_invalid()) throw_validation("scale divisor must be positive");
    }

private:
    bool divisor_invalid() const { return !(scale.divisor > 0.0) || !std::isfinite(scale.offset); }
};

// Construction helpers for hand-specified marginals (tests, oracles).
inline FittedMarginal make_beta(double alpha, double beta, ScaleTransform scale = {},
                                std::size_t n = 0) {
    FittedMarginal m;
    m.family = DistributionFamily::Beta;
    m.params = {alpha, beta};
    m.scale = scale;
    m.n = n;
    m.check();
    return m;
}
inline FittedMarginal make_gamma(double shape, double scale_param, std::size_t n = 0) {
    FittedMarginal m;
    m.family = DistributionFamily::Gamma;
    m.params = {shape, scale_param};
    m.n = n;
    m.check();
    return m;
}
inline FittedMarginal make_half_gaussian(double sigma, std::size_t n = 0) {
    FittedMarginal m;
    m.family = DistributionFamily::HalfGaussian;
    m.params = {sigma};
    m.n = n;
    m.check();
    return m;
}
struct GaussianComponent {
    double weight;
    double mean;
    double stddev;
};
inline FittedMarginal make_gmm(const std::vector<GaussianComponent>& components,
                               std::size_t n = 0) {
    FittedMarginal m;
    m.family = DistributionFamily::GaussianMixture;
    for (const auto& c : components) {
        m.params.push_back(c.weight);
        m.params.push_back(c.mean);
        m.params.push_back(c.stddev);
    }
    m.n = n;
    m.check();
    return m;
}

namespace detail {

inline double beta_pdf(double a, double b, double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) -
                    special::log_beta(a, b));
}

inline double gamma_pdf(double k, double theta, double t) {
    // Support treated as open at 0 when k < 1 (the density is unbounded
    // there); out-of-support points evaluate to 0.
    if (t < 0.0 || (t == 0.0 && k != 1.0)) return 0.0;
    if (t == 0.0) return 1.0 / theta;
    return std::exp((k - 1.0) * std::log(t) - t / theta - std::lgamma(k) -
                    k * std::log(theta));
}

inline double half_gaussian_pdf(double sigma, double t) {
    if (t < 0.0) return 0.0;
    const double z = t / sigma;
    return std::sqrt(2.0 / std::numbers::pi) / sigma * std::exp(-0.5 * z * z);
}

}  // namespace detail

namespace detail {

// Density and CDF in the transformed variable, bypassing the scale transform.
inline double pdf_transformed(const FittedMarginal& m, double t) {
    switch (m.family) {
    case DistributionFamily::Beta:
        return beta_pdf(m.params[0], m.params[1], t);
    case DistributionFamily::Gamma:
        return gamma_pdf(m.params[0], m.params[1], t);
    case DistributionFamily::HalfGaussian:
        return half_gaussian_pdf(m.params[0], t);
    case DistributionFamily::GaussianMixture: {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.component_count(); ++j) {
            const double w = m.params[3 * j];
            const double mu = m.params[3 * j + 1];
            const double sigma = m.params[3 * j + 2];
            acc += w * special::normal_pdf((t - mu) / sigma) / sigma;
        }
        return acc;
    }
    }
    return 0.0;
}

inline double cdf_transformed(const FittedMarginal& m, double t) {
    switch (m.family) {
    case DistributionFamily::Beta:
        return special::inc_beta(m.params[0], m.params[1], t);
    case DistributionFamily::Gamma:
        return t <= 0.0 ? 0.0 : special::gamma_p(m.params[0], t / m.params[1]);
    case DistributionFamily::HalfGaussian:
        return t <= 0.0 ? 0.0 : std::erf(t / (m.params[0] * special::kSqrt2));
    case DistributionFamily::GaussianMixture: {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.component_count(); ++j) {
            const double w = m.params[3 * j];
            const double mu = m.params[3 * j + 1];
            const double sigma = m.params[3 * j + 2];
            acc += w * special::normal_cdf((t - mu) / sigma);
        }
        return std::min(acc, 1.0);
    }
    }
    return 0.0;
}

}  // namespace detail

// Density of the transformed variable at original-unit x (the recorded scale
// transform is applied first).
inline double pdf(const FittedMarginal& m, double x) {
    return detail::pdf_transformed(m, m.scale.apply(x));
}

// CDF at original-unit x.
inline double cdf(const FittedMarginal& m, double x) {
    return detail::cdf_transformed(m, m.scale.apply(x));
}

// Quantile in original units, by bisection on the CDF (the half-gaussian case
// is closed form). Used for simulation and the SPI transform.
inline double quantile(const FittedMarginal& m, double p) {
    if (!(p > 0.0 && p < 1.0)) throw_validation("quantile requires p in (0,1)");
    if (m.family == DistributionFamily::HalfGaussian)
        return m.scale.invert(m.params[0] * special::normal_quantile(0.5 * (p + 1.0)));

    double lo;
    double hi;
    switch (m.family) {
    case DistributionFamily::Beta:
        lo = 0.0;
        hi = 1.0;
        break;
    case DistributionFamily::Gamma: {
        lo = 0.0;
        hi = m.params[0] * m.params[1];
        while (special::gamma_p(m.params[0], hi / m.params[1]) < p) hi *= 2.0;
        break;
    }
    default: {  // GaussianMixture
        lo = m.params[1];
        hi = m.params[1];
        for (std::size_t j = 0; j < m.component_count(); ++j) {
            lo = std::min(lo, m.params[3 * j + 1] - 12.0 * m.params[3 * j + 2]);
            hi = std::max(hi, m.params[3 * j + 1] + 12.0 * m.params[3 * j + 2]);
        }
        break;
    }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (detail::cdf_transformed(m, mid) < p ? lo : hi) = mid;
    }
    return m.scale.invert(0.5 * (lo + hi));
}

// Exact zeros destabilize the beta/gamma log-density, so they are clamped to
// this floor (post-scaling) before likelihood evaluation.
inline constexpr double kZeroClamp = 1e-9;

// Log-likelihood of `data` (original units) under `m`, Jacobian-corrected to
// original scale. Applies the same zero clamp the fitters use.
inline double log_likelihood(const FittedMarginal& m, std::span<const double> data) {
    double acc = 0.0;
    const bool clamp = m.family == DistributionFamily::Beta ||
                       m.family == DistributionFamily::Gamma;
    for (double x : data) {
        double t = m.scale.apply(x);
        if (clamp && t < kZeroClamp) t = kZeroClamp;
        const double d = detail::pdf_transformed(m, t);
        if (!(d > 0.0) || !std::isfinite(d)) return -std::numeric_limits<double>::infinity();
        acc += std::log(d);
    }
    return acc - static_cast<double>(data.size()) * std::log(m.scale.divisor);
}

namespace detail {

inline void require_fit_data(std::span<const double> data) {
    if (data.size() < kMinFitLength)
        throw_validation("fitting requires at least " + std::to_string(kMinFitLength) +
                         " observations, got " + std::to_string(data.size()));
    for (double x : data)
        if (!std::isfinite(x)) throw_validation("non-finite value in sample");
}

inline double sample_mean(std::span<const double> data) {
    return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

inline double sample_std(std::span<const double> data) {
    const double mean = sample_mean(data);
    double acc = 0.0;
    for (double x : data) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(data.size()));
}

inline void require_nondegenerate(std::span<const double> data) {
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    if (*lo == *hi) throw_validation("degenerate data: zero variance");
}

struct BetaSuffStats {
    double sum_log_t = 0.0;
    double sum_log_1mt = 0.0;
    std::size_t n = 0;
};

inline double beta_loglik(double a, double b, const BetaSuffStats& s) {
    return (a - 1.0) * s.sum_log_t + (b - 1.0) * s.sum_log_1mt -
           static_cast<double>(s.n) * special::log_beta(a, b);
}

// Newton-Raphson on the beta log-likelihood, method-of-moments start.
inline std::pair<double, double> beta_mle(const std::vector<double>& t) {
    BetaSuffStats s;
    s.n = t.size();
    double mean = 0.0;
    for (double v : t) {
        s.sum_log_t += std::log(v);
        s.sum_log_1mt += std::log1p(-v);
        mean += v;
    }
    mean /= static_cast<double>(t.size());
    double var = 0.0;
    for (double v : t) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.size());

    double a = 1.0;
    double b = 1.0;
    if (var > 1e-14) {
        const double common = mean * (1.0 - mean) / var - 1.0;
        if (common > 0.0) {
            a = std::max(mean * common, 1e-3);
            b = std::max((1.0 - mean) * common, 1e-3);
        }
    }

    const double n = static_cast<double>(s.n);
    double ll = beta_loglik(a, b, s);
    for (int iter = 0; iter < 200; ++iter) {
        const double psi_ab = special::digamma(a + b);
        const double g1 = n * (psi_ab - special::digamma(a)) + s.sum_log_t;
        const double g2 = n * (psi_ab - special::digamma(b)) + s.sum_log_1mt;
        const double tri_ab = special::trigamma(a + b);
        const double h11 = n * (tri_ab - special::trigamma(a));
        const double h22 = n * (tri_ab - special::trigamma(b));
        const double h12 = n * tri_ab;
        const double det = h11 * h22 - h12 * h12;
        if (det == 0.0) throw_fit("beta fit: singular Hessian");
        double da = (-g1 * h22 + g2 * h12) / det;
        double db = (-g2 * h11 + g1 * h12) / det;
        double step = 1.0;
        for (int halve = 0; halve < 60; ++halve) {
            const double an = a + step * da;
            const double bn = b + step * db;
            if (an > 0.0 && bn > 0.0) {
                const double lln = beta_loglik(an, bn, s);
                if (lln >= ll - 1e-12) {
                    const double rel =
                        std::max(std::fabs(step * da) / a, std::fabs(step * db) / b);
                    a = an;
                    b = bn;
                    ll = lln;
                    if (rel < 1e-10) return {a, b};
                    break;
                }
            }
            step *= 0.5;
            if (halve == 59) throw_fit("beta fit: line search failed");
        }
    }
    throw_fit("beta fit: no convergence within 200 iterations");
}

// Newton on the gamma shape profile likelihood.
inline std::pair<double, double> gamma_mle(std::span<const double> data) {
    double mean = 0.0;
    double mean_log = 0.0;
    for (double x : data) {
        const double v = std::max(x, kZeroClamp);
        mean += v;
        mean_log += std::log(v);
    }
    const double n = static_cast<double>(data.size());
    mean /= n;
    mean_log /= n;
    const double s = std::log(mean) - mean_log;
    if (!(s > 0.0)) throw_validation("degenerate data: zero variance");

    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = std::log(k) - special::digamma(k) - s;
        const double fp = 1.0 / k - special::trigamma(k);
        double knext = k - f / fp;
        if (knext <= 0.0) knext = 0.5 * k;
        const double rel = std::fabs(knext - k) / k;
        k = knext;
        if (rel < 1e-12) return {k, mean / k};
    }
    throw_fit("gamma fit: no convergence within 200 iterations");
}

}  // namespace detail

// Maximum-likelihood fit for beta, gamma, and half-gaussian. Beta data are
// rescaled into (0,1) by divisor = max * (1 + 1e-6) when needed, and the
// transform is recorded on the result. Mixtures go through fit_gmm.
inline FittedMarginal fit_mle(DistributionFamily family, std::span<const double> data) {
    detail::require_fit_data(data);
    detail::require_nondegenerate(data);

    FittedMarginal m;
    m.family = family;
    m.n = data.size();

    switch (family) {
    case DistributionFamily::Beta: {
        const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
        if (*lo < 0.0) throw_validation("beta fit requires nonnegative data");
        if (!(*lo > 0.0 && *hi < 1.0)) m.scale.divisor = *hi * (1.0 + 1e-6);
        std::vector<double> t(data.size());
        for (std::size_t i = 0; i < data.size(); ++i)
            t[i] = std::max(m.scale.apply(data[i]), kZeroClamp);
        const auto [a, b] = detail::beta_mle(t);
        m.params = {a, b};
        break;
    }
    case DistributionFamily::Gamma: {
        if (*std::min_element(data.begin(), data.end()) < 0.0)
            throw_validation("gamma fit requires nonnegative data");
        const auto [k, theta] = detail::gamma_mle(data);
        m.params = {k, theta};
        break;
    }
    case DistributionFamily::HalfGaussian: {
        double sum_sq = 0.0;
        for (double x : data) {
            if (x < 0.0) throw_validation("half-gaussian fit requires nonnegative data");
            sum_sq += x * x;
        }
        m.params = {std::sqrt(sum_sq / static_cast<double>(data.size()))};
        break;
    }
    case DistributionFamily::GaussianMixture:
        throw_validation("use fit_gmm for mixture fitting");
    }

    m.check();
    m.log_likelihood = log_likelihood(m, data);
    m.aic = 2.0 * m.free_parameters() - 2.0 * m.log_likelihood;
    return m;
}

namespace detail {

struct EmResult {
    std::vector<double> params;  // (w, mu, sigma) triples
    double log_likelihood = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool ok = false;
};

inline std::vector<double> kmeans_pp_centers(std::span<const double> data, std::size_t k,
                                             Rng& rng) {
    std::vector<double> centers;
    centers.reserve(k);
    centers.push_back(data[rng.below(data.size())]);
    std::vector<double> dist2(data.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (data[i] - c) * (data[i] - c));
            dist2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(data[rng.below(data.size())]);
            continue;
        }
        double target = rng.uniform01() * total;
        std::size_t pick = data.size() - 1;
        for (std::size_t i = 0; i < data.size(); ++i) {
            target -= dist2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(data[pick]);
    }
    return centers;
}

inline EmResult run_em(std::span<const double> data, std::size_t k, double sigma_floor,
                       std::uint64_t restart_seed) {
    Rng rng(restart_seed);
    const std::size_t n = data.size();
    EmResult result;

    // K-means init: Lloyd iterations on k-means++ seeds.
    std::vector<double> centers = kmeans_pp_centers(data, k, rng);
    std::vector<std::size_t> assign(n, 0);
    for (int pass = 0; pass < 50; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double d = std::fabs(data[i] - centers[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[assign[i]] += data[i];
            ++count[assign[i]];
        }
        for (std::size_t j = 0; j < k; ++j)
            if (count[j] > 0) centers[j] = sum[j] / static_cast<double>(count[j]);
        if (!changed) break;
    }

    std::vector<double> w(k), mu(k), sigma(k);
    {
        std::vector<double> ssq(k, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++count[assign[i]];
            ssq[assign[i]] += (data[i] - centers[assign[i]]) * (data[i] - centers[assign[i]]);
        }
        const double fallback = sample_std(data);
        for (std::size_t j = 0; j < k; ++j) {
            if (count[j] == 0) return result;  // empty cluster, restart fails
            w[j] = static_cast<double>(count[j]) / static_cast<double>(n);
            mu[j] = centers[j];
            sigma[j] = count[j] >= 2 ? std::sqrt(ssq[j] / static_cast<double>(count[j]))
                                     : fallback;
            sigma[j] = std::max(sigma[j], sigma_floor);
        }
    }

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
        // E-step in the log domain.
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double max_term = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double z = (data[i] - mu[j]) / sigma[j];
                const double term = std::log(w[j]) - 0.5 * z * z - std::log(sigma[j]) -
                                    0.5 * std::log(2.0 * std::numbers::pi);
                resp[i * k + j] = term;
                max_term = std::max(max_term, term);
            }
            double denom = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                denom += std::exp(resp[i * k + j] - max_term);
            const double lse = max_term + std::log(denom);
            ll += lse;
            for (std::size_t j = 0; j < k; ++j)
                resp[i * k + j] = std::exp(resp[i * k + j] - lse);
        }
        result.trace.push_back(ll);
        if (ll - prev_ll < 1e-8 && iter > 0) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;

        // M-step.
        for (std::size_t j = 0; j < k; ++j) {
            double nj = 0.0;
            double sx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nj += resp[i * k + j];
                sx += resp[i * k + j] * data[i];
            }
            if (nj < 1e-10) return result;  // component starved
            mu[j] = sx / nj;
            double sv = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sv += resp[i * k + j] * (data[i] - mu[j]) * (data[i] - mu[j]);
            sigma[j] = std::sqrt(sv / nj);
            w[j] = nj / static_cast<double>(n);
            if (sigma[j] < sigma_floor) return result;  // singular component
        }
    }

    result.log_likelihood = prev_ll;
    result.params.resize(3 * k);
    for (std::size_t j = 0; j < k; ++j) {
        result.params[3 * j] = w[j];
        result.params[3 * j + 1] = mu[j];
        result.params[3 * j + 2] = sigma[j];
    }
    result.ok = true;
    return result;
}

}  // namespace detail

inline constexpr int kGmmRestarts = 8;

// Gaussian mixture fit: EM with k-means(++) initialization, best of
// kGmmRestarts seeded restarts by log-likelihood. The per-iteration
// log-likelihood trace of the winning restart is exposed for diagnostics.
inline FittedMarginal fit_gmm(std::span<const double> data, std::size_t components,
                              std::uint64_t seed, std::vector<double>* trace = nullptr) {
    if (components < 1) throw_validation("fit_gmm requires components >= 1");
    if (data.size() < 12 * components)
        throw_validation("fit_gmm requires at least 12 observations per component");
    for (double x : data)
        if (!std::isfinite(x)) throw_validation("non-finite value in sample");
    detail::require_nondegenerate(data);

    const double sigma_floor = 1e-4 * detail::sample_std(data);
    detail::EmResult best;
    for (int r = 0; r < kGmmRestarts; ++r) {
        auto res = detail::run_em(data, components, sigma_floor, child_seed(seed, r));
        if (res.ok && res.log_likelihood > best.log_likelihood) best = std::move(res);
    }
    if (!best.ok)
        throw_fit("fit_gmm: singular component (sigma collapse) in all restarts");

    // Report components in increasing-mean order.
    std::vector<std::size_t> order(components);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return best.params[3 * a + 1] < best.params[3 * b + 1];
    });

    FittedMarginal m;
    m.family = DistributionFamily::GaussianMixture;
    m.n = data.size();
    for (std::size_t j : order) {
        m.params.push_back(best.params[3 * j]);
        m.params.push_back(best.params[3 * j + 1]);
        m.params.push_back(best.params[3 * j + 2]);
    }
    m.check();
    m.log_likelihood = best.log_likelihood;
    m.aic = 2.0 * m.free_parameters() - 2.0 * m.log_likelihood;
    if (trace) *trace = std::move(best.trace);
    return m;
}

// Minimum-AIC selection; ties prefer fewer free parameters, then list order.
inline const FittedMarginal& select_by_aic(const std::vector<FittedMarginal>& candidates) {
    if (candidates.empty()) throw_validation("select_by_aic on empty candidate list");
    const FittedMarginal* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.aic < best->aic ||
            (c.aic == best->aic && c.free_parameters() < best->free_parameters()))
            best = &c;
    }
    return *best;
}

// Analytic mean in the transformed variable's units.
inline double mean(const FittedMarginal& m) {
    switch (m.family) {
    case DistributionFamily::Beta: return m.params[0] / (m.params[0] + m.params[1]);
    case DistributionFamily::Gamma: return m.params[0] * m.params[1];
    case DistributionFamily::HalfGaussian:
        return m.params[0] * std::sqrt(2.0 / std::numbers::pi);
    case DistributionFamily::GaussianMixture: {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.component_count(); ++j)
            acc += m.params[3 * j] * m.params[3 * j + 1];
        return acc;
    }
    }
    return 0.0;
}

// P(lo < X < hi) with bounds in original data units.
inline double interval_probability(const FittedMarginal& m, double lo, double hi) {
    if (!(lo < hi)) throw_validation("interval_probability requires lo < hi");
    return cdf(m, hi) - cdf(m, lo);
}

// Inverse-CDF sampling in original units.
inline std::vector<double> sample(const FittedMarginal& m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(m, rng.uniform01()));
    return out;
}

}  // namespace msdi
