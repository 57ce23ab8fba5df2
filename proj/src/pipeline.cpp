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

#include "cfmimo/pipeline.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>

namespace cfmimo
{

std::string to_string(Mode mode)
{
    switch (mode)
    {
    case Mode::separate:
        return "separate";
    case Mode::mixed:
        return "mixed";
    case Mode::fiber:
        return "fiber";
    }
    return "unknown";
}

std::string to_string(TdmaApproach tdma)
{
    return tdma == TdmaApproach::approach1 ? "approach1" : "approach2";
}

Mode parse_mode(std::string_view text)
{
    if (text == "separate")
        return Mode::separate;
    if (text == "mixed")
        return Mode::mixed;
    if (text == "fiber")
        return Mode::fiber;
    throw ConfigError("mode must be separate, mixed or fiber, got '" + std::string(text) + "'");
}

TdmaApproach parse_tdma(std::string_view text)
{
    if (text == "approach1")
        return TdmaApproach::approach1;
    if (text == "approach2")
        return TdmaApproach::approach2;
    throw ConfigError("tdma must be approach1 or approach2, got '" + std::string(text) + "'");
}

Deployment build_deployment(const SystemConfig &config, std::uint64_t seed)
{
    validate(config);
    Deployment d;
    if (config.layout == Layout::grid)
    {
        auto [placement, clusters] = generate_grid_clusters(config, config.grid_rows, config.grid_cols, seed);
        d.placement = std::move(placement);
        d.clusters = std::move(clusters);
    }
    else
    {
        d.placement = generate_placement(config, seed);
    }
    d.powers = normalize_powers(config);
    d.fronthaul = build_fronthaul_channels(d.placement, config);
    d.access = make_access_stats(access_large_scale(d.placement, config), d.powers.rho_t, config.pilot_length);
    return d;
}

std::vector<double> end_to_end_rates(std::span<const double> access_rates, std::span<const double> group_rates,
                                     const TdmaSchedule &schedule, double access_bw_hz, double fronthaul_bw_hz)
{
    const std::size_t k_count = access_rates.size();
    if (group_rates.size() != k_count || schedule.t.size() != k_count)
        throw DomainError("end-to-end rate inputs differ in length");
    std::vector<double> out(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        out[k] = std::min(access_bw_hz * access_rates[k], schedule.t[k] * fronthaul_bw_hz * group_rates[k]);
    return out;
}

double RealizationResult::sum_access_bps() const
{
    return std::accumulate(access_bps.begin(), access_bps.end(), 0.0);
}

double RealizationResult::sum_fronthaul_bps() const
{
    return std::accumulate(fronthaul_bps.begin(), fronthaul_bps.end(), 0.0);
}

double RealizationResult::sum_end_to_end_bps() const
{
    return std::accumulate(end_to_end_bps.begin(), end_to_end_bps.end(), 0.0);
}

double RealizationResult::min_end_to_end_bps() const
{
    return end_to_end_bps.empty() ? 0.0 : *std::min_element(end_to_end_bps.begin(), end_to_end_bps.end());
}

GroupBeamSolution search_group_beam(const SystemConfig &config, std::span<const std::size_t> group,
                                    const FronthaulChannelSet &channels, const PhaseCodebook &codebook,
                                    double rho_fh)
{
    if (config.beam_search == BeamSearch::exhaustive)
        return multicast_beam_exhaustive(group, channels, codebook, rho_fh, config.enumeration_cap);
    return multicast_beam_heuristic(group, channels, codebook, rho_fh);
}

namespace
{

struct GroupSets
{
    std::vector<IndexSet> access;
    std::vector<IndexSet> fronthaul;
};

// Solved sub-problems for one grouping.
struct Evaluation
{
    GroupSets groups;
    MaxMinSolution power;
    std::vector<double> access_rate;
    std::vector<double> group_rate;
};

std::vector<double> to_std(const Eigen::VectorXd &v)
{
    return {v.data(), v.data() + v.size()};
}

TdmaSchedule schedule_for(TdmaApproach tdma, const Evaluation &e, const SystemConfig &config)
{
    if (tdma == TdmaApproach::approach1)
        return tdma_equal_rate(e.group_rate);
    const std::vector<double> caps =
        access_time_caps(e.access_rate, e.group_rate, config.access_bw_hz, config.fronthaul_bw_hz);
    return tdma_capped(e.group_rate, caps);
}

class Evaluator
{
public:
    Evaluator(const SystemConfig &config, const Deployment &deployment, Mode mode, const ClusterLayout *clusters,
              PowerCache *power_cache)
        : config_(config), deployment_(deployment), mode_(mode), clusters_(clusters), power_cache_(power_cache),
          codebook_(config.cpu_antennas, config.phase_bits)
    {
    }

    std::size_t max_group_size() const
    {
        return mode_ == Mode::mixed ? clusters_->size() : deployment_.placement.ap_positions.size();
    }

    const Evaluation &at(std::size_t group_size)
    {
        auto it = cache_.find(group_size);
        if (it != cache_.end())
            return it->second;
        return cache_.emplace(group_size, evaluate(group_size)).first->second;
    }

    std::size_t power_solves() const { return power_solves_; }

private:
    GroupSets groups_for(std::size_t group_size) const
    {
        if (mode_ == Mode::mixed)
        {
            ClusterGrouping cg = cluster_top_g(deployment_.access.beta, *clusters_, group_size);
            return {std::move(cg.access_groups), std::move(cg.fronthaul_groups)};
        }
        Grouping g = top_g_groups(deployment_.access.beta, group_size);
        return {g.groups, g.groups};
    }

    Evaluation evaluate(std::size_t group_size)
    {
        Evaluation e;
        e.groups = groups_for(group_size);
        const std::size_t m_count = deployment_.placement.ap_positions.size();
        const Grouping grouping = Grouping::from_groups(e.groups.access, m_count);

        e.power = solve_power(grouping);
        e.access_rate =
            to_std(access_rates(user_sinr(e.power.allocation, deployment_.access, deployment_.powers.rho_ac)));

        e.group_rate.reserve(e.groups.fronthaul.size());
        for (const IndexSet &group : e.groups.fronthaul)
            e.group_rate.push_back(group_rate(group));
        return e;
    }

    MaxMinSolution solve_power(const Grouping &grouping)
    {
        PowerCache &cache = power_cache_ ? *power_cache_ : local_power_;
        auto it = cache.find(grouping.groups);
        if (it != cache.end())
            return it->second;

        Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(deployment_.access.beta.rows(), deployment_.access.beta.cols());
        for (std::size_t k = 0; k < grouping.num_ues(); ++k)
            for (std::size_t m : grouping.groups[k])
                mask(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = 1.0;

        // Warm start from the cached solution that stays best on this grouping.
        std::optional<MaxMinWarmStart> warm;
        double warm_sinr = 0.0;
        for (const auto &[groups, sol] : cache)
        {
            MaxMinWarmStart candidate{{sol.allocation.p.cwiseProduct(mask)}};
            const double s =
                user_sinr(candidate.allocation, deployment_.access, deployment_.powers.rho_ac).minCoeff();
            if (s > warm_sinr)
            {
                warm_sinr = s;
                warm = std::move(candidate);
            }
        }

        ++power_solves_;
        MaxMinSolution sol = maxmin_power_bisection(grouping, deployment_.access, deployment_.powers.rho_ac,
                                                    config_.bisection_tol, warm ? &*warm : nullptr);
        cache.emplace(grouping.groups, sol);
        return sol;
    }

    // Users with the same AP set share one beam search.
    double group_rate(const IndexSet &group)
    {
        IndexSet key = group;
        std::sort(key.begin(), key.end());
        auto it = beams_.find(key);
        if (it != beams_.end())
            return it->second;
        const GroupBeamSolution sol =
            search_group_beam(config_, group, deployment_.fronthaul, codebook_, deployment_.powers.rho_fh);
        beams_.emplace(std::move(key), sol.group_rate);
        return sol.group_rate;
    }

    const SystemConfig &config_;
    const Deployment &deployment_;
    Mode mode_;
    const ClusterLayout *clusters_;
    PowerCache *power_cache_;
    PowerCache local_power_;
    PhaseCodebook codebook_;
    std::size_t power_solves_ = 0;
    std::map<std::size_t, Evaluation> cache_;
    std::map<IndexSet, double> beams_;
};

RealizationResult run_fiber(const SystemConfig &config, const Deployment &deployment)
{
    RealizationResult r;
    const std::size_t m_count = deployment.placement.ap_positions.size();
    const std::size_t k_count = deployment.placement.ue_positions.size();
    const Grouping grouping = Grouping::full(m_count, k_count);

    const MaxMinSolution power =
        maxmin_power_bisection(grouping, deployment.access, deployment.powers.rho_ac, config.bisection_tol);
    r.allocation = power.allocation;
    r.gamma_star = power.gamma_star;
    r.solver = {power.bisection_steps, power.newton_steps, power.indeterminate_steps, 1};

    r.access_rate = to_std(access_rates(user_sinr(power.allocation, deployment.access, deployment.powers.rho_ac)));
    for (double a : r.access_rate)
    {
        r.access_bps.push_back(config.access_bw_hz * a);
        r.fronthaul_bps.push_back(std::numeric_limits<double>::infinity());
        r.group_rate.push_back(std::numeric_limits<double>::infinity());
    }
    r.end_to_end_bps = r.access_bps;
    r.access_groups = grouping.groups;
    r.group_size = m_count;
    return r;
}

} // namespace

RealizationResult run_on_deployment(const SystemConfig &config, const Deployment &deployment, std::uint64_t seed,
                                    Mode mode, TdmaApproach tdma, const RunOptions &options)
{
    RealizationResult r;
    if (mode == Mode::fiber)
    {
        r = run_fiber(config, deployment);
        r.seed = seed;
        r.mode = mode;
        r.tdma = tdma;
        return r;
    }

    const ClusterLayout *clusters = nullptr;
    if (mode == Mode::mixed)
    {
        clusters = options.clusters ? &*options.clusters : deployment.clusters ? &*deployment.clusters : nullptr;
        if (!clusters)
            throw ConfigError("mixed mode requires a cluster layout (layout = grid)");
        validate(*clusters, deployment.placement.ap_positions.size());
    }

    Evaluator evaluator(config, deployment, mode, clusters, options.power_cache);
    const std::size_t upper = evaluator.max_group_size();

    std::size_t chosen = 0;
    if (options.group_size)
    {
        chosen = *options.group_size;
        if (chosen < 1 || chosen > upper)
            throw DomainError("group size " + std::to_string(chosen) + " outside [1, " + std::to_string(upper) + "]");
    }
    else
    {
        const auto eval = [&](std::size_t g) {
            const Evaluation &e = evaluator.at(g);
            GroupSizeEval out;
            for (double a : e.access_rate)
                out.sum_access += config.access_bw_hz * a;
            out.sum_fronthaul = config.fronthaul_bw_hz * harmonic_mean(e.group_rate);
            const TdmaSchedule s = schedule_for(tdma, e, config);
            const std::vector<double> e2e =
                end_to_end_rates(e.access_rate, e.group_rate, s, config.access_bw_hz, config.fronthaul_bw_hz);
            out.min_rate = *std::min_element(e2e.begin(), e2e.end());
            return out;
        };
        r.group_search = optimize_group_size(eval, config.group_size_init, 1, upper);
        chosen = r.group_search.best;
    }

    const Evaluation &e = evaluator.at(chosen);
    r.seed = seed;
    r.mode = mode;
    r.tdma = tdma;
    r.group_size = chosen;
    r.access_groups = e.groups.access;
    r.fronthaul_groups = e.groups.fronthaul;
    r.allocation = e.power.allocation;
    r.gamma_star = e.power.gamma_star;
    r.access_rate = e.access_rate;
    r.group_rate = e.group_rate;
    r.schedule = schedule_for(tdma, e, config);
    r.end_to_end_bps =
        end_to_end_rates(e.access_rate, e.group_rate, r.schedule, config.access_bw_hz, config.fronthaul_bw_hz);
    for (std::size_t k = 0; k < e.access_rate.size(); ++k)
    {
        r.access_bps.push_back(config.access_bw_hz * e.access_rate[k]);
        r.fronthaul_bps.push_back(r.schedule.t[k] * config.fronthaul_bw_hz * e.group_rate[k]);
    }
    r.solver = {e.power.bisection_steps, e.power.newton_steps, e.power.indeterminate_steps, evaluator.power_solves()};
    return r;
}

RealizationResult run_realization(const SystemConfig &config, std::uint64_t seed, Mode mode, TdmaApproach tdma,
                                  const RunOptions &options)
{
    try
    {
        const Deployment deployment = build_deployment(config, seed);
        return run_on_deployment(config, deployment, seed, mode, tdma, options);
    }
    catch (const std::exception &e)
    {
        std::throw_with_nested(RealizationError(seed, e.what()));
    }
}

} // namespace cfmimo
