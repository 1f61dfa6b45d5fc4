//SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "msdi/dependence.hpp"
#include "msdi/rng.hpp"
#include "oracles.hpp"

using namespace msdi;

TEST_CASE("pit through the uniform marginal is the identity") {
    const auto m = make_beta(1.0, 1.0, {}, /*n=*/100);
    const std::vector<double> data{0.1, 0.5, 0.9};
    const auto u = pit(m, data);
    REQUIRE(u[0] == Catch::Approx(0.1));
    REQUIRE(u[1] == Catch::Approx(0.5));
    REQUIRE(u[2] == Catch::Approx(0.9));
}

TEST_CASE("pit clamps boundary values to 1/(2n)") {
    const auto m = make_gamma(2.0, 1.0, /*n=*/10);
    std::vector<double> data(10, 1.0);
    data[0] = -5.0;   // below support: cdf 0
    data[1] = 1e9;    // far above: cdf 1
    const auto u = pit(m, data);
    REQUIRE(u[0] == 1.0 / 20.0);
    REQUIRE(u[1] == 1.0 - 1.0 / 20.0);
}

TEST_CASE("pit of a marginal's own sample is uniform (KS)") {
    const auto m = make_gamma(1.7, 2.3, 10000);
    const auto data = sample(m, 10000, 55);
    const auto u = pit(m, data);
    REQUIRE(oracles::ks_distance_uniform(u) < 0.02);
}

TEST_CASE("pseudo-observations are ranks over n+1") {
    const std::vector<double> x{10.0, 20.0, 30.0};
    const std::vector<double> y{1.0, 2.0, 3.0};
    const auto po = pseudo_observations(x, y);
    REQUIRE(po.u == std::vector<double>{0.25, 0.5, 0.75});

    const std::vector<double> tied{5.0, 5.0};
    const auto po2 = pseudo_observations(tied, tied);
    REQUIRE(po2.u == std::vector<double>{0.5, 0.5});

    const std::vector<double> x4{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y4{4.0, 3.0, 2.0, 1.0};
    const auto po3 = pseudo_observations(x4, y4);
    REQUIRE(po3.v == std::vector<double>{0.8, 0.6, 0.4, 0.2});

    REQUIRE_THROWS_AS(pseudo_observations(x, x4), Error);
}

TEST_CASE("pseudo-observations are invariant under affine rescaling") {
    Rng rng(77);
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
        x.push_back(rng.uniform01());
        y.push_back(rng.uniform01());
    }
    const auto base = pseudo_observations(x, y);
    std::vector<double> xs = x;
    std::vector<double> ys = y;
    for (auto& v : xs) v = 3.5 * v + 11.0;
    for (auto& v : ys) v = 0.02 * v - 7.0;
    const auto scaled = pseudo_observations(xs, ys);
    REQUIRE(base.u == scaled.u);
    REQUIRE(base.v == scaled.v);
}

TEST_CASE("kendall tau hand examples") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
    REQUIRE(kendall_tau(x, x) == 1.0);

    // Pairs (1,3),(2,1),(3,2): enumerating the three comparisons gives one
    // concordant and two discordant, so tau = -1/3.
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{3.0, 1.0, 2.0};
    REQUIRE(kendall_tau(a, b) == Catch::Approx(-1.0 / 3.0));
    REQUIRE(kendall_tau(a, b) == oracles::kendall_tau_bruteforce(a, b));

    std::vector<double> rev = x;
    std::reverse(rev.begin(), rev.end());
    REQUIRE(kendall_tau(x, rev) == -1.0);

    REQUIRE_THROWS_AS(kendall_tau(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
    // Entirely tied coordinate has no defined tau.
    const std::vector<double> flat{2.0, 2.0, 2.0};
    REQUIRE_THROWS_AS(kendall_tau(flat, a), Error);
}

TEST_CASE("fast kendall tau equals brute force exactly, ties included") {
    Rng rng(501);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(200);
        std::vector<double> x(n), y(n);
        const bool with_ties = trial % 2 == 0;
        bool x_varies = false;
        bool y_varies = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Small integer grids force plenty of ties.
            x[i] = with_ties ? static_cast<double>(rng.below(8)) : rng.uniform01();
            y[i] = with_ties ? static_cast<double>(rng.below(8)) : rng.uniform01();
            if (x[i] != x[0]) x_varies = true;
            if (y[i] != y[0]) y_varies = true;
        }
        if (!x_varies || !y_varies) continue;
        REQUIRE(kendall_tau(x, y) == oracles::kendall_tau_bruteforce(x, y));
    }
}

TEST_CASE("kendall tau is invariant under strictly increasing transforms") {
    Rng rng(502);
    std::vector<double> x, y;
    for (int i = 0; i < 300; ++i) {
        x.push_back(rng.uniform01() * 4.0);
        y.push_back(rng.uniform01() * 4.0);
    }
    const double base = kendall_tau(x, y);
    std::vector<double> xt = x;
    std::vector<double> yt = y;
    for (auto& v : xt) v = std::exp(v);
    for (auto& v : yt) v = std::log1p(v) * 10.0 + 3.0;
    REQUIRE(kendall_tau(xt, yt) == base);
}

TEST_CASE("negating one coordinate flips tau in the tie-free case") {
    Rng rng(503);
    std::vector<double> x, y;
    for (int i = 0; i < 257; ++i) {
        x.push_back(rng.uniform01());
        y.push_back(rng.uniform01());
    }
    const double base = kendall_tau(x, y);
    std::vector<double> yn = y;
    for (auto& v : yn) v = -v;
    REQUIRE(kendall_tau(x, yn) == Catch::Approx(-base).margin(1e-15));
}
