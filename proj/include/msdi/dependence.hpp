//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "msdi/distributions.hpp"
#include "msdi/errors.hpp"

namespace msdi {

// Probability integral transform through a fitted marginal. Output is clamped
// to [1/(2n), 1 - 1/(2n)] so downstream copula densities and normal quantiles
// stay finite; n is the marginal's fit sample count (falling back to the data
// length for hand-built marginals).
inline std::vector<double> pit(const FittedMarginal& m, std::span<const double> data) {
    const double n = static_cast<double>(m.n >= 2 ? m.n : data.size());
    const double lo = 1.0 / (2.0 * n);
    const double hi = 1.0 - lo;
    std::vector<double> u;
    u.reserve(data.size());
    for (double x : data) u.push_back(std::clamp(cdf(m, x), lo, hi));
    return u;
}

// Rank-based uniformized pairs u_i = rank_i / (n+1), average ranks on ties.
struct PseudoObservations {
    std::vector<double> u;
    std::vector<double> v;

    std::size_t size() const noexcept { return u.size(); }
};

namespace detail {

inline std::vector<double> scaled_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    const double denom = static_cast<double>(n) + 1.0;
    for (auto& r : ranks) r /= denom;
    return ranks;
}

// Merge-sort inversion count.
inline std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                                      std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(v, scratch, lo, mid) +
                          count_inversions(v, scratch, mid, hi);
    std::size_t a = lo;
    std::size_t b = mid;
    std::size_t out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            count += mid - a;
            scratch[out++] = v[b++];
        } else {
            scratch[out++] = v[a++];
        }
    }
    while (a < mid) scratch[out++] = v[a++];
    while (b < hi) scratch[out++] = v[b++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
    return count;
}

inline std::uint64_t tie_pairs(std::span<const double> sorted) {
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const std::uint64_t t = j - i + 1;
        total += t * (t - 1) / 2;
        i = j + 1;
    }
    return total;
}

}  // namespace detail

inline PseudoObservations pseudo_observations(std::span<const double> x,
                                              std::span<const double> y) {
    if (x.size() != y.size()) throw_validation("pseudo_observations: length mismatch");
    if (x.size() < 2) throw_validation("pseudo_observations requires at least 2 pairs");
    return PseudoObservations{detail::scaled_ranks(x), detail::scaled_ranks(y)};
}

// Kendall's tau-b by Knight's O(n log n) algorithm: sort by (x, y), count
// discordances as merge-sort inversions of y, and correct for ties.
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw_validation("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw_validation("kendall_tau requires at least 2 pairs");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;

    // Pairs tied on x, and tied on both, from runs in (x, y) order.
    std::uint64_t n1 = 0;
    std::uint64_t n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
            const std::uint64_t t = j - i + 1;
            n1 += t * (t - 1) / 2;
            std::size_t a = i;
            while (a <= j) {
                std::size_t b = a;
                while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
                const std::uint64_t u = b - a + 1;
                n3 += u * (u - 1) / 2;
                a = b + 1;
            }
            i = j + 1;
        }
    }

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    std::vector<double> scratch(n);
    const std::uint64_t swaps = detail::count_inversions(ys, scratch, 0, n);
    const std::uint64_t n2 = detail::tie_pairs(ys);  // ys is now fully sorted

    if (n0 == n1 || n0 == n2)
        throw_validation("kendall_tau: a coordinate is entirely tied");

    const std::int64_t concordant_minus_discordant =
        static_cast<std::int64_t>(n0) - static_cast<std::int64_t>(n1) -
        static_cast<std::int64_t>(n2) + static_cast<std::int64_t>(n3) -
        2 * static_cast<std::int64_t>(swaps);
    return static_cast<double>(concordant_minus_discordant) /
           std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

inline double kendall_tau(const PseudoObservations& pairs) {
    return kendall_tau(pairs.u, pairs.v);
}

}  // namespace msdi
