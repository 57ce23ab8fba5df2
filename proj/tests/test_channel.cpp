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


#include "cfmimo/channel.hpp"
#include "cfmimo/error.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace cfmimo;

TEST_SUITE("channel")
{
    TEST_CASE("path loss at the reference points")
    {
        CHECK(std::abs(path_loss_db(100.0, 28.0) - 102.79) < 0.005);
        CHECK(std::abs(path_loss_db(1.0, 3.5) - 43.83) < 0.005);
        CHECK(std::abs(path_loss_db(100.0, 3.5) - 83.82) < 0.01);
        CHECK(db_to_linear_gain(path_loss_db(100.0, 3.5)) == doctest::Approx(4.15e-9).epsilon(0.005));
    }

    TEST_CASE("path loss agrees with the long double reference")
    {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> dist(1.0, 500.0), freq(0.5, 100.0);
        for (int i = 0; i < 200; ++i)
        {
            const double d = dist(gen);
            const double f = freq(gen);
            CHECK(path_loss_db(d, f) == doctest::Approx(static_cast<double>(oracle::path_loss_db(d, f))).epsilon(1e-13));
        }
    }

    TEST_CASE("path loss grows 20 dB per decade of distance and with carrier")
    {
        CHECK(path_loss_db(370.0, 3.5) - path_loss_db(37.0, 3.5) == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(path_loss_db(10.0, 28.0) > path_loss_db(10.0, 3.5));
        CHECK(path_loss_db(11.0, 3.5) > path_loss_db(10.0, 3.5));
    }

    TEST_CASE("path loss rejects non-positive inputs")
    {
        CHECK_THROWS_AS(path_loss_db(0.0, 3.5), DomainError);
        CHECK_THROWS_AS(path_loss_db(10.0, 0.0), DomainError);
        CHECK_THROWS_AS(path_loss_db(-1.0, 3.5), DomainError);
    }

    TEST_CASE("steering vector is unit norm with the half-wavelength phase progression")
    {
        const Eigen::VectorXcd a = ula_response(2, std::numbers::pi / 6.0);
        CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::arg(a[1] / a[0]) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14));
        const Eigen::VectorXcd broadside = ula_response(16, 0.0);
        for (Eigen::Index n = 1; n < broadside.size(); ++n)
            CHECK(std::abs(broadside[n] - broadside[0]) < 1e-15);
    }

    TEST_CASE("fronthaul channels carry N beta of energy")
    {
        const SystemConfig c;
        const Placement p = generate_placement(c, 9);
        const FronthaulChannelSet set = build_fronthaul_channels(p, c);
        REQUIRE(set.size() == c.num_aps);
        for (std::size_t m = 0; m < set.size(); ++m)
        {
            const double expected = static_cast<double>(c.cpu_antennas) * set.betas[m];
            CHECK(std::abs(set.vectors[m].squaredNorm() - expected) <= 1e-10 * expected);
            const double d = clamped_distance(p.cpu_position, p.ap_positions[m], c.min_distance_m);
            CHECK(set.betas[m] == doctest::Approx(std::pow(10.0, -static_cast<double>(oracle::path_loss_db(d, 28.0)) / 10.0)).epsilon(1e-12));
            CHECK(set.angles[m] == doctest::Approx(std::atan2(p.ap_positions[m].y, p.ap_positions[m].x + 100.0)));
        }
    }

    TEST_CASE("access gains follow distance")
    {
        SystemConfig c;
        c.num_aps = 1;
        c.num_ues = 3;
        c.pilot_length = 3;
        Placement p;
        p.ap_positions = {{0.0, 0.0}};
        p.ue_positions = {{30.0, 40.0}, {-50.0, 0.0}, {0.0, 80.0}};
        const Eigen::MatrixXd beta = access_large_scale(p, c);
        CHECK(beta(0, 0) == beta(0, 1)); // both 50 m away
        CHECK(beta(0, 2) < beta(0, 0));
        CHECK(beta(0, 0) == doctest::Approx(std::pow(10.0, -static_cast<double>(oracle::path_loss_db(50.0, 3.5)) / 10.0)).epsilon(1e-12));
    }

    TEST_CASE("MMSE variance reference values")
    {
        CHECK(mmse_variance(0.01, 10.0, 10) == doctest::Approx(0.005).epsilon(1e-14));
        CHECK(mmse_variance(0.0, 10.0, 10) == 0.0);
        CHECK(std::abs(mmse_variance(1.0, 1e8, 10) - 1.0) < 1e-8);
    }

    TEST_CASE("estimates never exceed the true gain")
    {
        const SystemConfig c;
        const NormalizedPowers powers = normalize_powers(c);
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const Placement p = generate_placement(c, seed);
            Eigen::MatrixXd beta = access_large_scale(p, c);
            beta(0, 0) = 0.0;
            const AccessStats s = make_access_stats(beta, powers.rho_t, c.pilot_length);
            CHECK(s.beta_hat(0, 0) == 0.0);
            for (Eigen::Index m = 0; m < beta.rows(); ++m)
                for (Eigen::Index k = 0; k < beta.cols(); ++k)
                    if (beta(m, k) > 0.0)
                    {
                        CHECK(s.beta_hat(m, k) >= 0.0);
                        CHECK(s.beta_hat(m, k) < s.beta(m, k));
                    }
        }
    }
}
