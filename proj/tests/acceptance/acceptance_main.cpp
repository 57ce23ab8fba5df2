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


// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures (capped at 1). `--only name[,name...]` runs a subset.

#include "cfmimo/access_power.hpp"
#include "cfmimo/beamforming.hpp"
#include "cfmimo/fronthaul_sched.hpp"
#include "cfmimo/pipeline.hpp"
#include "cfmimo/sweep.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cfmimo;

namespace
{

constexpr std::uint64_t master_seed = 1;
constexpr std::size_t realizations = 25;

struct Verdict
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Default deployment: M = 100, K = 10, N = 128.
SystemConfig default_config(double bandwidth_hz)
{
    SystemConfig c;
    c.fronthaul_bw_hz = bandwidth_hz;
    c.realizations = realizations;
    c.master_seed = master_seed;
    return c;
}

// Deployments and solved power problems, reused across fronthaul bandwidths
// and group sizes (the access side does not depend on either).
struct Ensemble
{
    std::vector<std::uint64_t> seeds;
    std::vector<Deployment> deployments;
    std::vector<PowerCache> caches;

    explicit Ensemble(const SystemConfig &config)
    {
        for (std::size_t i = 0; i < config.realizations; ++i)
        {
            seeds.push_back(derive_seed(config.master_seed, i));
            deployments.push_back(build_deployment(config, seeds.back()));
        }
        caches.resize(seeds.size());
    }

    std::vector<RealizationResult> run(const SystemConfig &config, Mode mode, TdmaApproach tdma,
                                       std::optional<std::size_t> group_size = std::nullopt)
    {
        std::vector<RealizationResult> out;
        for (std::size_t i = 0; i < seeds.size(); ++i)
        {
            deployments[i].powers = normalize_powers(config);
            RunOptions options;
            options.group_size = group_size;
            options.power_cache = &caches[i];
            out.push_back(run_on_deployment(config, deployments[i], seeds[i], mode, tdma, options));
        }
        return out;
    }
};

double mean_of(const std::vector<RealizationResult> &rs, double (RealizationResult::*metric)() const)
{
    double sum = 0.0;
    for (const auto &r : rs)
        sum += (r.*metric)();
    return sum / static_cast<double>(rs.size());
}

double mean_group_size(const std::vector<RealizationResult> &rs)
{
    double sum = 0.0;
    for (const auto &r : rs)
        sum += static_cast<double>(r.group_size);
    return sum / static_cast<double>(rs.size());
}

// Shared by the figure reproductions and the trend checks.
struct BaselineState
{
    Ensemble ensemble{default_config(2e9)};
    std::vector<RealizationResult> fiber;
    std::vector<RealizationResult> wireless_2ghz;
    bool have_fiber = false;
    bool have_2ghz = false;

    const std::vector<RealizationResult> &fiber_results()
    {
        if (!have_fiber)
        {
            fiber = ensemble.run(default_config(2e9), Mode::fiber, TdmaApproach::approach2);
            have_fiber = true;
        }
        return fiber;
    }

    const std::vector<RealizationResult> &results_2ghz()
    {
        if (!have_2ghz)
        {
            wireless_2ghz = ensemble.run(default_config(2e9), Mode::separate, TdmaApproach::approach2);
            have_2ghz = true;
        }
        return wireless_2ghz;
    }
};

BaselineState &baseline_state()
{
    static BaselineState state;
    return state;
}

Verdict check_separate_2ghz()
{
    BaselineState &s = baseline_state();
    const double fiber = mean_of(s.fiber_results(), &RealizationResult::sum_end_to_end_bps);
    const double e2e = mean_of(s.results_2ghz(), &RealizationResult::sum_end_to_end_bps);
    const double ratio = e2e / fiber;
    const bool pass = e2e >= 450e6 && e2e <= 750e6 && fiber >= 550e6 && fiber <= 850e6 && ratio >= 0.75;
    return {pass, fmt("e2e %.1f Mbps in [450, 750], fiber %.1f Mbps in [550, 850], ratio %.3f >= 0.75, mean G %.1f",
                      e2e / 1e6, fiber / 1e6, ratio, mean_group_size(s.results_2ghz()))};
}

Verdict check_bw480()
{
    BaselineState &s = baseline_state();
    const double fiber = mean_of(s.fiber_results(), &RealizationResult::sum_end_to_end_bps);
    const auto rs = s.ensemble.run(default_config(480e6), Mode::separate, TdmaApproach::approach2);
    const double e2e = mean_of(rs, &RealizationResult::sum_end_to_end_bps);
    const double ratio = e2e / fiber;
    return {ratio >= 0.70, fmt("e2e %.1f Mbps, fiber %.1f Mbps, ratio %.3f >= 0.70, mean G %.1f", e2e / 1e6,
                               fiber / 1e6, ratio, mean_group_size(rs))};
}

Verdict check_mixed()
{
    SystemConfig c = default_config(80e6);
    c.layout = Layout::grid;
    c.grid_rows = 10;
    c.grid_cols = 10;
    Ensemble ensemble(c);
    const double fiber = mean_of(ensemble.run(c, Mode::fiber, TdmaApproach::approach2),
                                 &RealizationResult::sum_end_to_end_bps);
    const auto rs = ensemble.run(c, Mode::mixed, TdmaApproach::approach2);
    const double e2e = mean_of(rs, &RealizationResult::sum_end_to_end_bps);
    const double ratio = e2e / fiber;
    return {ratio >= 0.85, fmt("e2e %.1f Mbps, fiber %.1f Mbps, ratio %.3f >= 0.85, mean clusters per user %.1f",
                               e2e / 1e6, fiber / 1e6, ratio, mean_group_size(rs))};
}

Verdict check_maxmin_oracle()
{
    SystemConfig c;
    c.num_aps = 2;
    c.num_ues = 2;
    std::size_t close = 0, equal = 0;
    double worst_gap = 0.0, worst_spread = 0.0, solver_seconds = 0.0;
    const std::size_t instances = 50;
    for (std::size_t i = 0; i < instances; ++i)
    {
        const Deployment d = build_deployment(c, derive_seed(master_seed + 1000, i));
        const auto t0 = std::chrono::steady_clock::now();
        const MaxMinSolution sol =
            maxmin_power_bisection(Grouping::full(2, 2), d.access, d.powers.rho_ac, c.bisection_tol);
        solver_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const oracle::GridOptimum ref = oracle::maxmin_grid_2x2(d.access.beta, d.access.beta_hat, d.powers.rho_ac);

        const double gap = std::abs(sol.gamma_star - ref.min_sinr) / ref.min_sinr;
        worst_gap = std::max(worst_gap, gap);
        close += gap <= 0.02;
        const Eigen::VectorXd s = user_sinr(sol.allocation, d.access, d.powers.rho_ac);
        const double spread = (s.maxCoeff() - s.minCoeff()) / s.minCoeff();
        worst_spread = std::max(worst_spread, spread);
        equal += spread <= 1e-3;
    }
    const bool pass = close == instances && equal == instances && solver_seconds <= 300.0;
    return {pass, fmt("%zu/%zu within 2%% (worst %.2e), %zu/%zu equal SINR within 1e-3 (worst %.2e), solver %.2f s",
                      close, instances, worst_gap, equal, instances, worst_spread, solver_seconds)};
}

Verdict check_beam_oracle()
{
    std::mt19937_64 gen(master_seed + 2000);
    const std::size_t trials = 200;
    std::size_t recovered = 0, bounded = 0, near = 0;
    for (std::size_t i = 0; i < trials; ++i)
    {
        SystemConfig c;
        c.num_aps = 12;
        c.cpu_antennas = 2 + i % 7;
        c.phase_bits = 2;
        const Placement placement = generate_placement(c, derive_seed(master_seed + 2000, i));
        const FronthaulChannelSet channels = build_fronthaul_channels(placement, c);
        const double rho_fh = normalize_powers(c).rho_fh;
        const PhaseCodebook cb(c.cpu_antennas, c.phase_bits);

        std::vector<std::size_t> aps(c.num_aps);
        std::iota(aps.begin(), aps.end(), std::size_t{0});
        std::shuffle(aps.begin(), aps.end(), gen);
        const std::size_t size = i % 2 == 0 ? 1 : 2 + (i / 2) % 4;
        const std::vector<std::size_t> group(aps.begin(), aps.begin() + static_cast<std::ptrdiff_t>(size));

        const GroupBeamSolution ex = multicast_beam_exhaustive(group, channels, cb, rho_fh);
        const GroupBeamSolution he = multicast_beam_heuristic(group, channels, cb, rho_fh);
        std::vector<Eigen::VectorXcd> member_channels;
        for (std::size_t m : group)
            member_channels.push_back(channels.vectors[m]);
        const oracle::BeamOptimum ref = oracle::enumerate_beams(member_channels, c.cpu_antennas, c.phase_bits);
        const double ref_rate = std::log2(1.0 + rho_fh * ref.min_gain);

        recovered += std::abs(ex.group_rate - ref_rate) <= 1e-9 * ref_rate;
        bounded += he.group_rate <= ex.group_rate * (1.0 + 1e-12);
        near += he.group_rate >= 0.9 * ex.group_rate;
    }

    std::size_t exact = 0;
    const std::size_t single_trials = 100;
    for (std::size_t i = 0; i < single_trials; ++i)
    {
        SystemConfig c;
        c.num_aps = 4;
        c.cpu_antennas = 2;
        c.phase_bits = 1;
        const Placement placement = generate_placement(c, derive_seed(master_seed + 3000, i));
        const FronthaulChannelSet channels = build_fronthaul_channels(placement, c);
        const double rho_fh = normalize_powers(c).rho_fh;
        const PhaseCodebook cb(2, 1);
        const std::vector<std::size_t> group{i % 4};
        exact += multicast_beam_heuristic(group, channels, cb, rho_fh).group_rate ==
                 multicast_beam_exhaustive(group, channels, cb, rho_fh).group_rate;
    }

    const bool pass = recovered == trials && bounded == trials && near * 100 >= 95 * trials && exact == single_trials;
    return {pass, fmt("exhaustive = enumeration %zu/%zu, heuristic <= exhaustive %zu/%zu, heuristic >= 0.9x "
                      "%zu/%zu (need 95%%), single-AP N=2 q=1 exact %zu/%zu",
                      recovered, trials, bounded, trials, near, trials, exact, single_trials)};
}

Verdict check_tdma()
{
    std::mt19937_64 gen(master_seed + 4000);
    std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(20.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t vectors = 1000;
    double worst_identity = 0.0, worst_uncapped = 0.0, worst_kkt = 0.0;

    for (std::size_t i = 0; i < vectors; ++i)
    {
        const std::size_t k_count = 1 + i % 20;
        std::vector<double> rates(k_count);
        for (double &r : rates)
            r = std::exp(log_rate(gen));

        // K * eta = harmonic mean, with the airtimes summing to one.
        long double inv = 0.0L;
        for (double r : rates)
            inv += 1.0L / r;
        const long double hm = static_cast<long double>(k_count) / inv;
        const TdmaSchedule eq = tdma_equal_rate(rates);
        double airtime = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
        {
            airtime += eq.t[k];
            worst_identity = std::max(worst_identity, std::abs(eq.t[k] * rates[k] - eq.eta) / eq.eta);
        }
        worst_identity = std::max(worst_identity, static_cast<double>(
                                                      std::abs(k_count * static_cast<long double>(eq.eta) - hm) / hm));
        worst_identity = std::max(worst_identity, std::abs(airtime - 1.0));

        // Caps that do not bind.
        std::vector<double> loose(k_count);
        for (std::size_t k = 0; k < k_count; ++k)
            loose[k] = eq.t[k] * (1.0 + 1e-3 + unit(gen));
        const TdmaSchedule capped = tdma_capped(rates, loose);
        worst_uncapped = std::max(worst_uncapped, std::abs(capped.eta - eq.eta) / eq.eta);
        for (std::size_t k = 0; k < k_count; ++k)
            worst_uncapped = std::max(worst_uncapped, std::abs(capped.t[k] - eq.t[k]) / eq.t[k]);

        // Random caps: capped groups sit at their cap, the rest at the common level.
        std::vector<double> caps(k_count);
        for (double &c : caps)
            c = 2.0 * unit(gen) / static_cast<double>(k_count);
        const TdmaSchedule s = tdma_capped(rates, caps);
        const double cap_sum = std::accumulate(caps.begin(), caps.end(), 0.0);
        double used = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
        {
            used += s.t[k];
            const double over = (s.t[k] - caps[k]) / std::max(caps[k], 1e-300);
            worst_kkt = std::max(worst_kkt, std::max(0.0, over));
            if (s.t[k] < caps[k] * (1.0 - 1e-6))
                worst_kkt = std::max(worst_kkt, std::abs(s.t[k] * rates[k] - s.eta) / s.eta);
            else if (cap_sum > 1.0)
                worst_kkt = std::max(worst_kkt, std::max(0.0, (caps[k] * rates[k] - s.eta) / s.eta));
        }
        worst_kkt = std::max(worst_kkt, cap_sum > 1.0 ? std::abs(used - 1.0) : std::max(0.0, used - 1.0));
    }
    const bool pass = worst_identity <= 1e-9 && worst_uncapped <= 1e-9 && worst_kkt <= 1e-6;
    return {pass, fmt("%zu vectors: identity error %.2e <= 1e-9, uncapped mismatch %.2e <= 1e-9, KKT residual "
                      "%.2e <= 1e-6",
                      vectors, worst_identity, worst_uncapped, worst_kkt)};
}

std::size_t count_violations(const std::vector<double> &v, int direction)
{
    std::size_t n = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (direction * (v[i] - v[i - 1]) < -1e-9 * std::abs(v[i - 1]))
            ++n;
    return n;
}

Verdict check_trends()
{
    BaselineState &s = baseline_state();
    const SystemConfig c = default_config(2e9);

    // Sum rates against a fixed G; approach 1 so the fronthaul sum is B_fh times the harmonic mean.
    std::vector<double> access, fronthaul;
    for (std::size_t g = 5; g <= 40; ++g)
    {
        const auto rs = s.ensemble.run(c, Mode::separate, TdmaApproach::approach1, g);
        access.push_back(mean_of(rs, &RealizationResult::sum_access_bps));
        fronthaul.push_back(mean_of(rs, &RealizationResult::sum_fronthaul_bps));
    }
    const std::size_t access_bad = count_violations(access, +1);
    const std::size_t fronthaul_bad = count_violations(fronthaul, -1);

    std::vector<double> by_m;
    for (std::size_t m : {25, 50})
    {
        SystemConfig cm = c;
        cm.num_aps = m;
        Ensemble e(cm);
        by_m.push_back(mean_of(e.run(cm, Mode::separate, TdmaApproach::approach2), &RealizationResult::sum_end_to_end_bps));
    }
    by_m.push_back(mean_of(s.results_2ghz(), &RealizationResult::sum_end_to_end_bps));
    const bool m_ok = by_m[0] <= by_m[1] && by_m[1] <= by_m[2];

    const bool pass = access_bad <= 2 && fronthaul_bad <= 2 && m_ok;
    return {pass, fmt("G=5..40: access %.1f -> %.1f Mbps (%zu decreases), fronthaul %.1f -> %.1f Mbps (%zu increases); "
                      "M=25/50/100 e2e %.1f / %.1f / %.1f Mbps",
                      access.front() / 1e6, access.back() / 1e6, access_bad, fronthaul.front() / 1e6,
                      fronthaul.back() / 1e6, fronthaul_bad, by_m[0] / 1e6, by_m[1] / 1e6, by_m[2] / 1e6)};
}

Verdict check_determinism()
{
    SystemConfig c;
    c.num_aps = 20;
    c.num_ues = 4;
    c.cpu_antennas = 16;
    c.phase_bits = 2;
    c.group_size_init = 4;
    c.realizations = 4;
    c.master_seed = master_seed;
    SweepAxes axes;
    axes.bandwidths = {0.5e9, 2e9};
    std::vector<std::string> outputs;
    for (std::size_t workers : {1, 2, 4, 1})
    {
        std::ostringstream os;
        write_csv(os, c, run_sweep(c, axes, {workers}));
        outputs.push_back(os.str());
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto &o) { return o == outputs[0]; });
    return {same, fmt("CSV of %zu bytes identical across workers 1, 2, 4 and a rerun: %s", outputs[0].size(),
                      same ? "yes" : "no")};
}

struct Criterion
{
    const char *name;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char **argv)
{
    const std::vector<Criterion> criteria{
        {"separate_2ghz", check_separate_2ghz},  {"bandwidth_480mhz", check_bw480},
        {"mixed_grid_80mhz", check_mixed},   {"maxmin_oracle", check_maxmin_oracle},
        {"beam_oracle", check_beam_oracle}, {"tdma_closed_forms", check_tdma},
        {"trends", check_trends},            {"determinism", check_determinism},
    };

    std::set<std::string> only;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--only")
        {
            std::stringstream list(argv[i + 1]);
            for (std::string name; std::getline(list, name, ',');)
                only.insert(name);
        }

    int failures = 0;
    for (const auto &c : criteria)
    {
        if (!only.empty() && !only.count(c.name))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = c.run();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %-20s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), seconds);
        std::fflush(stdout);
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
