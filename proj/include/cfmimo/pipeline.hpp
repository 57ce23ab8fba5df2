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

#ifndef CFMIMO_PIPELINE_HPP
#define CFMIMO_PIPELINE_HPP

#include "cfmimo/access_power.hpp"
#include "cfmimo/beamforming.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/fronthaul_sched.hpp"
#include "cfmimo/grouping.hpp"
#include "cfmimo/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cfmimo
{

enum class Mode
{
    separate, // wireless fronthaul to every AP
    mixed,    // wireless fronthaul to cluster leaders, fiber inside clusters
    fiber     // unconstrained fronthaul, every AP serves every user
};

enum class TdmaApproach
{
    approach1, // equal time-scaled group rates
    approach2  // equal rates capped by each user's access rate
};

std::string to_string(Mode mode);
std::string to_string(TdmaApproach tdma);
Mode parse_mode(std::string_view text);
TdmaApproach parse_tdma(std::string_view text);

// Everything drawn or derived once per realization.
struct Deployment
{
    Placement placement;
    std::optional<ClusterLayout> clusters; // present for the grid layout
    FronthaulChannelSet fronthaul;
    AccessStats access;
    NormalizedPowers powers;
};

Deployment build_deployment(const SystemConfig &config, std::uint64_t seed);

// min(B_ac R_ac_k, t_k B_fh R_fh_k) in bits/s.
std::vector<double> end_to_end_rates(std::span<const double> access_rates, std::span<const double> group_rates,
                                     const TdmaSchedule &schedule, double access_bw_hz, double fronthaul_bw_hz);

struct SolverMetadata
{
    std::size_t bisection_steps = 0;
    std::size_t newton_steps = 0;
    std::size_t indeterminate_steps = 0;
    std::size_t power_solves = 0;
};

struct RealizationResult
{
    std::uint64_t seed = 0;
    Mode mode = Mode::separate;
    TdmaApproach tdma = TdmaApproach::approach2;

    std::vector<double> access_rate;    // bits/s/Hz per user
    std::vector<double> group_rate;     // bits/s/Hz per user group (fronthaul)
    std::vector<double> access_bps;     // B_ac R_ac_k
    std::vector<double> fronthaul_bps;  // t_k B_fh R_fh_k; +inf in fiber mode
    std::vector<double> end_to_end_bps; // min of the two

    TdmaSchedule schedule; // empty in fiber mode
    PowerAllocation allocation;
    double gamma_star = 0.0;

    std::vector<IndexSet> access_groups;
    std::vector<IndexSet> fronthaul_groups;
    std::size_t group_size = 0; // G*: APs per user, or clusters per user in mixed mode
    GroupSizeSearch group_search;
    SolverMetadata solver;

    double sum_access_bps() const;
    double sum_fronthaul_bps() const;
    double sum_end_to_end_bps() const;
    double min_end_to_end_bps() const;
};

// Max-min solutions keyed by the access groups. Only valid for runs that share
// one deployment's access statistics.
using PowerCache = std::map<std::vector<IndexSet>, MaxMinSolution>;

struct RunOptions
{
    // Fixed group size; when unset the group size is iterated from config.group_size_init.
    std::optional<std::size_t> group_size;
    // Overrides the deployment's cluster layout in mixed mode.
    std::optional<ClusterLayout> clusters;
    PowerCache *power_cache = nullptr;
};

// placement -> channels -> grouping (with group-size iteration) -> max-min
// power -> multicast beams -> TDMA -> end-to-end rates. Failures are rethrown
// as RealizationError carrying the seed, with the original exception nested.
RealizationResult run_realization(const SystemConfig &config, std::uint64_t seed, Mode mode, TdmaApproach tdma,
                                  const RunOptions &options = {});

// Same as run_realization on an already-built deployment.
RealizationResult run_on_deployment(const SystemConfig &config, const Deployment &deployment, std::uint64_t seed,
                                    Mode mode, TdmaApproach tdma, const RunOptions &options = {});

// Beam search per the configured strategy.
GroupBeamSolution search_group_beam(const SystemConfig &config, std::span<const std::size_t> group,
                                    const FronthaulChannelSet &channels, const PhaseCodebook &codebook,
                                    double rho_fh);

} // namespace cfmimo

#endif
