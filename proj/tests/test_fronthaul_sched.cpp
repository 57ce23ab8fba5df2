// SPDX-License-Identifier: Apache-2.0
//
// cfmimo: cell-free massive MIMO with wireless fronthaul
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "cfmimo/error.hpp"
#include "cfmimo/fronthaul_sched.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

using namespace cfmimo;

namespace
{

double total(const std::vector<double> &t) { return std::accumulate(t.begin(), t.end(), 0.0); }

double worst_rate(const TdmaSchedule &s, const std::vector<double> &rates)
{
    double w = INFINITY;
    for (std::size_t k = 0; k < rates.size(); ++k)
        w = std::min(w, s.t[k] * rates[k]);
    return w;
}

void check_kkt(const TdmaSchedule &s, const std::vector<double> &rates, const std::vector<double> &caps)
{
    constexpr double tol = 1e-6;
    const double cap_sum = total(caps);
    CHECK(total(s.t) <= 1.0 + tol);
    if (cap_sum > 1.0)
        CHECK(total(s.t) == doctest::Approx(1.0).epsilon(tol));
    for (std::size_t k = 0; k < rates.size(); ++k)
    {
        CHECK(s.t[k] >= 0.0);
        CHECK(s.t[k] <= caps[k] * (1.0 + tol));
        const bool at_cap = s.t[k] >= caps[k] * (1.0 - tol);
        if (!at_cap)
            CHECK(s.t[k] * rates[k] == doctest::Approx(s.eta).epsilon(tol));
        else if (cap_sum > 1.0)
            CHECK(caps[k] * rates[k] <= s.eta * (1.0 + tol));
    }
}

} // namespace

TEST_SUITE("fronthaul_sched")
{
    TEST_CASE("harmonic mean reference values")
    {
        const std::vector<double> a{1.0, 3.0};
        CHECK(harmonic_mean(a) == doctest::Approx(1.5));
        const std::vector<double> b{2.0, 2.0, 2.0};
        CHECK(harmonic_mean(b) == doctest::Approx(2.0));
    }

    TEST_CASE("equal-rate split for two groups")
    {
        const std::vector<double> r{1.0, 3.0};
        const TdmaSchedule s = tdma_equal_rate(r);
        CHECK(s.eta == doctest::Approx(0.75));
        CHECK(s.t[0] == doctest::Approx(0.75));
        CHECK(s.t[1] == doctest::Approx(0.25));
    }

    TEST_CASE("equal-rate split: common rate is HM / K and airtime sums to one")
    {
        std::mt19937_64 gen(6);
        std::uniform_real_distribution<double> u(0.1, 20.0);
        for (int trial = 0; trial < 200; ++trial)
        {
            std::vector<double> r(1 + static_cast<std::size_t>(trial % 12));
            for (double &x : r)
                x = u(gen);
            const TdmaSchedule s = tdma_equal_rate(r);
            CHECK(total(s.t) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(s.eta == doctest::Approx(harmonic_mean(r) / static_cast<double>(r.size())).epsilon(1e-12));
            for (std::size_t k = 0; k < r.size(); ++k)
                CHECK(s.t[k] * r[k] == doctest::Approx(s.eta).epsilon(1e-12));
        }
    }

    TEST_CASE("loose caps change nothing")
    {
        const std::vector<double> r{2.0, 5.0, 7.0};
        const std::vector<double> caps{1.0, 1.0, 1.0};
        const TdmaSchedule a = tdma_equal_rate(r);
        const TdmaSchedule b = tdma_capped(r, caps);
        CHECK(b.eta == doctest::Approx(a.eta).epsilon(1e-9));
        for (std::size_t k = 0; k < r.size(); ++k)
            CHECK(b.t[k] == doctest::Approx(a.t[k]).epsilon(1e-9));
    }

    TEST_CASE("a binding cap frees airtime for the others")
    {
        const std::vector<double> r{1.0, 1.0};
        const std::vector<double> caps{0.2, 1.0};
        const TdmaSchedule s = tdma_capped(r, caps);
        CHECK(s.t[0] == doctest::Approx(0.2));
        CHECK(s.t[1] == doctest::Approx(0.8));
        CHECK(s.eta == doctest::Approx(0.8));
    }

    TEST_CASE("caps summing to at most one are granted in full")
    {
        const std::vector<double> r{3.0, 1.0};
        const std::vector<double> caps{0.3, 0.4};
        const TdmaSchedule s = tdma_capped(r, caps);
        CHECK(s.t == caps);
    }

    TEST_CASE("capped schedule satisfies the optimality conditions")
    {
        std::mt19937_64 gen(13);
        std::uniform_real_distribution<double> u(0.1, 20.0);
        std::uniform_real_distribution<double> c(0.0, 0.6);
        for (int trial = 0; trial < 300; ++trial)
        {
            const std::size_t k = 1 + static_cast<std::size_t>(trial % 9);
            std::vector<double> r(k), caps(k);
            for (std::size_t i = 0; i < k; ++i)
            {
                r[i] = u(gen);
                caps[i] = c(gen);
            }
            check_kkt(tdma_capped(r, caps), r, caps);
        }
    }

    TEST_CASE("two-group capped schedule matches a scan")
    {
        std::mt19937_64 gen(71);
        std::uniform_real_distribution<double> u(0.5, 10.0);
        std::uniform_real_distribution<double> c(0.05, 1.0);
        for (int trial = 0; trial < 100; ++trial)
        {
            const std::vector<double> r{u(gen), u(gen)};
            const std::vector<double> caps{c(gen), c(gen)};
            const TdmaSchedule s = tdma_capped(r, caps);
            const std::vector<double> ref = oracle::tdma_scan_2(r, caps, 1e-4);
            const double ref_worst = std::min(ref[0] * r[0], ref[1] * r[1]);
            CHECK(worst_rate(s, r) >= ref_worst - 1e-6);
            CHECK(worst_rate(s, r) <= ref_worst + 1e-4 * std::max(r[0], r[1]) + 1e-9);
            CHECK(total(s.t) >= total(ref) - 2e-4);
        }
    }

    TEST_CASE("airtime caps from access demand")
    {
        const std::vector<double> access{2.0, 1.0};
        const std::vector<double> group{4.0, 8.0};
        const std::vector<double> caps = access_time_caps(access, group, 20e6, 2e9);
        CHECK(caps[0] == doctest::Approx(0.005));
        CHECK(caps[1] == doctest::Approx(0.00125));
    }

    TEST_CASE("bad inputs")
    {
        const std::vector<double> none;
        CHECK_THROWS_AS(tdma_equal_rate(none), DomainError);
        const std::vector<double> zero{1.0, 0.0};
        CHECK_THROWS_AS(tdma_equal_rate(zero), DegenerateGroupError);
        const std::vector<double> r{1.0, 2.0};
        const std::vector<double> short_caps{1.0};
        const std::vector<double> neg_caps{1.0, -0.1};
        CHECK_THROWS_AS(tdma_capped(r, short_caps), DomainError);
        CHECK_THROWS_AS(tdma_capped(r, neg_caps), DomainError);
        CHECK_THROWS_AS(access_time_caps(short_caps, r, 1.0, 1.0), DomainError);
    }
}
