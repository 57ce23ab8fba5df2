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

#include "cfmimo/grouping.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cfmimo
{

namespace
{

// Indices of the `count` largest scores; equal scores keep the lower index first.
IndexSet top_indices(const std::vector<double> &scores, std::size_t count)
{
    IndexSet order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(count);
    return order;
}

} // namespace

Grouping Grouping::from_groups(std::vector<IndexSet> groups, std::size_t num_aps)
{
    Grouping g;
    g.served_users.resize(num_aps);
    for (std::size_t k = 0; k < groups.size(); ++k)
    {
        if (groups[k].empty())
            throw DomainError("group of user " + std::to_string(k) + " is empty");
        std::set<std::size_t> seen;
        for (std::size_t m : groups[k])
        {
            if (m >= num_aps)
                throw DomainError("AP index " + std::to_string(m) + " out of range");
            if (!seen.insert(m).second)
                throw DomainError("AP " + std::to_string(m) + " repeated in group of user " + std::to_string(k));
            g.served_users[m].push_back(k);
        }
    }
    g.groups = std::move(groups);
    return g;
}

Grouping Grouping::full(std::size_t num_aps, std::size_t num_ues)
{
    IndexSet all(num_aps);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return from_groups(std::vector<IndexSet>(num_ues, all), num_aps);
}

Grouping top_g_groups(const Eigen::MatrixXd &beta, std::size_t group_size)
{
    const auto m_count = static_cast<std::size_t>(beta.rows());
    if (group_size < 1 || group_size > m_count)
        throw DomainError("group size " + std::to_string(group_size) + " outside [1, " + std::to_string(m_count) +
                          "]");
    std::vector<IndexSet> groups;
    groups.reserve(static_cast<std::size_t>(beta.cols()));
    std::vector<double> column(m_count);
    for (Eigen::Index k = 0; k < beta.cols(); ++k)
    {
        for (std::size_t m = 0; m < m_count; ++m)
            column[m] = beta(static_cast<Eigen::Index>(m), k);
        groups.push_back(top_indices(column, group_size));
    }
    return Grouping::from_groups(std::move(groups), m_count);
}

ClusterGrouping cluster_top_g(const Eigen::MatrixXd &beta, const ClusterLayout &layout, std::size_t group_size)
{
    const std::size_t l_count = layout.size();
    if (group_size < 1 || group_size > l_count)
        throw DomainError("cluster group size " + std::to_string(group_size) + " outside [1, " +
                          std::to_string(l_count) + "]");

    ClusterGrouping out;
    std::vector<double> cluster_gain(l_count);
    for (Eigen::Index k = 0; k < beta.cols(); ++k)
    {
        for (std::size_t l = 0; l < l_count; ++l)
        {
            cluster_gain[l] = 0.0;
            for (std::size_t m : layout.clusters[l])
                cluster_gain[l] += beta(static_cast<Eigen::Index>(m), k);
        }
        IndexSet chosen = top_indices(cluster_gain, group_size);

        IndexSet leaders;
        IndexSet members;
        for (std::size_t l : chosen)
        {
            leaders.push_back(layout.leaders[l]);
            members.insert(members.end(), layout.clusters[l].begin(), layout.clusters[l].end());
        }
        std::sort(members.begin(), members.end());

        out.cluster_groups.push_back(std::move(chosen));
        out.fronthaul_groups.push_back(std::move(leaders));
        out.access_groups.push_back(std::move(members));
    }
    return out;
}

GroupSizeSearch optimize_group_size(const GroupSizeEvaluator &eval, std::size_t initial, std::size_t lower,
                                    std::size_t upper)
{
    if (lower < 1 || lower > upper)
        throw DomainError("group size bounds must satisfy 1 <= lower <= upper");

    GroupSizeSearch search;
    std::size_t g = std::clamp(initial, lower, upper);
    const std::size_t max_steps = 2 * upper;

    auto visited = [&](std::size_t size) {
        return std::any_of(search.history.begin(), search.history.end(),
                           [&](const GroupSizeStep &s) { return s.group_size == size; });
    };

    for (std::size_t step = 0; step < max_steps && !visited(g); ++step)
    {
        const GroupSizeEval e = eval(g);
        search.history.push_back({g, e.sum_access, e.sum_fronthaul, e.min_rate});
        const std::size_t next = e.sum_fronthaul >= e.sum_access ? std::min(g + 1, upper) : std::max(g - 1, lower);
        g = next;
    }

    double best_value = -1.0;
    for (const auto &s : search.history)
    {
        const double value = std::min(s.sum_access, s.sum_fronthaul);
        if (value > best_value)
        {
            best_value = value;
            search.best = s.group_size;
        }
    }
    return search;
}

} // namespace cfmimo
