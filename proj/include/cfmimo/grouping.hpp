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

#ifndef CFMIMO_GROUPING_HPP
#define CFMIMO_GROUPING_HPP

#include "cfmimo/scenario.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace cfmimo
{

using IndexSet = std::vector<std::size_t>;

// User-centric AP groups and the inverse map (users served by each AP).
struct Grouping
{
    std::vector<IndexSet> groups;       // K sets of AP indices, best first
    std::vector<IndexSet> served_users; // M sets of user indices, ascending

    std::size_t num_ues() const { return groups.size(); }
    std::size_t num_aps() const { return served_users.size(); }

    // Builds the inverse map. Throws DomainError on an empty group or an
    // out-of-range / repeated AP index.
    static Grouping from_groups(std::vector<IndexSet> groups, std::size_t num_aps);

    // Every user served by every AP.
    static Grouping full(std::size_t num_aps, std::size_t num_ues);
};

// G strongest APs per user (column of `beta`), lower AP index first on ties.
Grouping top_g_groups(const Eigen::MatrixXd &beta, std::size_t group_size);

struct ClusterGrouping
{
    std::vector<IndexSet> cluster_groups;   // selected cluster indices per user
    std::vector<IndexSet> fronthaul_groups; // leader AP of each selected cluster
    std::vector<IndexSet> access_groups;    // all members of the selected clusters, ascending
};

// Ranks clusters per user by the summed gain of their members and keeps the top G.
ClusterGrouping cluster_top_g(const Eigen::MatrixXd &beta, const ClusterLayout &layout, std::size_t group_size);

struct GroupSizeEval
{
    double sum_access = 0.0;
    double sum_fronthaul = 0.0;
    double min_rate = 0.0; // recorded in the history only; does not drive the search
};

struct GroupSizeStep
{
    std::size_t group_size = 0;
    double sum_access = 0.0;
    double sum_fronthaul = 0.0;
    double min_rate = 0.0;
};

struct GroupSizeSearch
{
    std::size_t best = 0;
    std::vector<GroupSizeStep> history;
};

using GroupSizeEvaluator = std::function<GroupSizeEval(std::size_t)>;

// Grows G while the fronthaul sum keeps up with the access sum and shrinks it
// otherwise. Stops on the first revisit or after 2*upper steps, returning the
// visited G with the largest min(sum access, sum fronthaul).
GroupSizeSearch optimize_group_size(const GroupSizeEvaluator &eval, std::size_t initial, std::size_t lower,
                                    std::size_t upper);

} // namespace cfmimo

#endif
