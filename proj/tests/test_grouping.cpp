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
#include "cfmimo/grouping.hpp"

#include "doctest.h"

#include <algorithm>
#include <random>

using namespace cfmimo;

TEST_SUITE("grouping")
{
    TEST_CASE("top-G picks the strongest APs, best first, lower index on ties")
    {
        Eigen::MatrixXd beta(4, 2);
        beta << 0.1, 4.0,
                0.5, 3.0,
                0.3, 2.0,
                0.5, 1.0;
        const Grouping g2 = top_g_groups(beta, 2);
        CHECK(g2.groups[0] == IndexSet{1, 3});
        CHECK(g2.groups[1] == IndexSet{0, 1});
        CHECK(top_g_groups(beta, 1).groups[0] == IndexSet{1});
        CHECK(top_g_groups(beta, 4).groups[0] == IndexSet{1, 3, 2, 0});
    }

    TEST_CASE("served-user map inverts the groups")
    {
        const Grouping g = Grouping::from_groups({{0, 2}, {2}, {1, 0}}, 4);
        CHECK(g.num_ues() == 3);
        CHECK(g.num_aps() == 4);
        CHECK(g.served_users[0] == IndexSet{0, 2});
        CHECK(g.served_users[1] == IndexSet{2});
        CHECK(g.served_users[2] == IndexSet{0, 1});
        CHECK(g.served_users[3].empty());

        const Grouping f = Grouping::full(3, 2);
        for (const auto &users : f.served_users)
            CHECK(users == IndexSet{0, 1});
    }

    TEST_CASE("malformed groups are rejected")
    {
        CHECK_THROWS_AS(Grouping::from_groups({{}}, 2), DomainError);
        CHECK_THROWS_AS(Grouping::from_groups({{0, 2}}, 2), DomainError);
        CHECK_THROWS_AS(Grouping::from_groups({{1, 1}}, 2), DomainError);
        const Eigen::MatrixXd beta = Eigen::MatrixXd::Ones(3, 2);
        CHECK_THROWS_AS(top_g_groups(beta, 0), DomainError);
        CHECK_THROWS_AS(top_g_groups(beta, 4), DomainError);
    }

    TEST_CASE("top-G ignores per-user scaling")
    {
        std::mt19937_64 gen(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::MatrixXd beta(10, 5);
        for (Eigen::Index i = 0; i < beta.size(); ++i)
            beta(i) = u(gen);
        Eigen::MatrixXd scaled = beta;
        for (Eigen::Index k = 0; k < 5; ++k)
            scaled.col(k) *= std::pow(10.0, -static_cast<double>(k) - 3.0);
        CHECK(top_g_groups(beta, 4).groups == top_g_groups(scaled, 4).groups);
    }

    TEST_CASE("cluster selection ranks clusters by summed gain")
    {
        ClusterLayout layout;
        layout.clusters = {{0, 1}, {2, 3}, {4}};
        layout.leaders = {1, 2, 4};
        Eigen::MatrixXd beta(5, 1);
        beta << 0.4, 0.4, 0.1, 0.6, 0.75;
        // sums: 0.8, 0.7, 0.75
        const ClusterGrouping one = cluster_top_g(beta, layout, 1);
        CHECK(one.cluster_groups[0] == IndexSet{0});
        CHECK(one.fronthaul_groups[0] == IndexSet{1});
        CHECK(one.access_groups[0] == IndexSet{0, 1});
        const ClusterGrouping two = cluster_top_g(beta, layout, 2);
        CHECK(two.cluster_groups[0] == IndexSet{0, 2});
        CHECK(two.fronthaul_groups[0] == IndexSet{1, 4});
        CHECK(two.access_groups[0] == IndexSet{0, 1, 4});
        CHECK_THROWS_AS(cluster_top_g(beta, layout, 4), DomainError);
    }

    TEST_CASE("singleton clusters reduce to top-G")
    {
        std::mt19937_64 gen(10);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::MatrixXd beta(8, 4);
        for (Eigen::Index i = 0; i < beta.size(); ++i)
            beta(i) = u(gen);
        const ClusterGrouping c = cluster_top_g(beta, singleton_clusters(8), 3);
        const Grouping g = top_g_groups(beta, 3);
        for (std::size_t k = 0; k < 4; ++k)
        {
            CHECK(c.fronthaul_groups[k] == g.groups[k]);
            IndexSet sorted = g.groups[k];
            std::sort(sorted.begin(), sorted.end());
            CHECK(c.access_groups[k] == sorted);
        }
    }

    TEST_CASE("group-size search walks to the crossing and keeps the best point")
    {
        std::vector<std::size_t> calls;
        const auto eval = [&](std::size_t g) {
            calls.push_back(g);
            return GroupSizeEval{static_cast<double>(g), 10.0 - static_cast<double>(g), 0.0};
        };
        const GroupSizeSearch up = optimize_group_size(eval, 1, 1, 8);
        CHECK(up.best == 5);
        CHECK(calls == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});

        calls.clear();
        const GroupSizeSearch down = optimize_group_size(eval, 100, 1, 8);
        CHECK(down.best == 5);
        CHECK(calls == std::vector<std::size_t>{8, 7, 6, 5});
        CHECK(down.history.size() == 4);
        CHECK(down.history.back().sum_fronthaul == 5.0);
    }

    TEST_CASE("group-size search stops at the bounds")
    {
        std::size_t count = 0;
        const auto always_up = [&](std::size_t g) {
            ++count;
            return GroupSizeEval{1.0, 2.0, static_cast<double>(g)};
        };
        const GroupSizeSearch s = optimize_group_size(always_up, 2, 2, 4);
        CHECK(count == 3);
        CHECK(s.best == 2); // all ties: first visited wins
        CHECK_THROWS_AS(optimize_group_size(always_up, 1, 0, 4), DomainError);
        CHECK_THROWS_AS(optimize_group_size(always_up, 1, 5, 4), DomainError);
    }
}
