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

#include "cfmimo/fronthaul_sched.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfmimo
{

namespace
{

constexpr double level_tol = 1e-9;

void require_positive_rates(std::span<const double> rates)
{
    if (rates.empty())
        throw DomainError("TDMA schedule needs at least one group");
    for (std::size_t k = 0; k < rates.size(); ++k)
        if (!(rates[k] > 0.0) || !std::isfinite(rates[k]))
            throw DegenerateGroupError(k, "group " + std::to_string(k) + " has non-positive fronthaul rate");
}

double airtime(std::span<const double> rates, std::span<const double> caps, double eta)
{
    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k)
        total += std::min(caps[k], eta / rates[k]);
    return total;
}

} // namespace

double harmonic_mean(std::span<const double> values)
{
    double inv = 0.0;
    for (double v : values)
        inv += 1.0 / v;
    return static_cast<double>(values.size()) / inv;
}

TdmaSchedule tdma_equal_rate(std::span<const double> group_rates)
{
    require_positive_rates(group_rates);
    TdmaSchedule s;
    s.eta = harmonic_mean(group_rates) / static_cast<double>(group_rates.size());
    s.t.reserve(group_rates.size());
    for (double r : group_rates)
        s.t.push_back(s.eta / r);
    return s;
}

TdmaSchedule tdma_capped(std::span<const double> group_rates, std::span<const double> caps)
{
    require_positive_rates(group_rates);
    if (caps.size() != group_rates.size())
        throw DomainError("one airtime cap per group required");
    for (double c : caps)
        if (!(c >= 0.0))
            throw DomainError("airtime caps must be >= 0");

    const std::size_t k_count = group_rates.size();
    TdmaSchedule s;

    double ceiling = 0.0; // water level at which every group hits its cap
    for (std::size_t k = 0; k < k_count; ++k)
        ceiling = std::max(ceiling, caps[k] * group_rates[k]);

    const double cap_sum = std::accumulate(caps.begin(), caps.end(), 0.0);
    if (cap_sum <= 1.0)
    {
        s.t.assign(caps.begin(), caps.end());
        s.eta = ceiling;
        return s;
    }

    // Largest level with total airtime <= 1, bracketed in [0, ceiling].
    double lo = 0.0;
    double hi = ceiling;
    while (hi - lo > level_tol * hi)
    {
        const double mid = 0.5 * (lo + hi);
        if (airtime(group_rates, caps, mid) <= 1.0)
            lo = mid;
        else
            hi = mid;
    }

    // Polish on the active set: capped groups keep their cap, the rest share
    // the remaining airtime at a common level.
    std::vector<bool> capped(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        capped[k] = caps[k] * group_rates[k] <= lo;
    double eta = lo;
    for (bool changed = true; changed;)
    {
        changed = false;
        double used = 0.0;
        double inv_rates = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
        {
            if (capped[k])
                used += caps[k];
            else
                inv_rates += 1.0 / group_rates[k];
        }
        if (inv_rates == 0.0)
            break;
        eta = std::max(0.0, 1.0 - used) / inv_rates;
        for (std::size_t k = 0; k < k_count; ++k)
            if (!capped[k] && caps[k] * group_rates[k] < eta)
            {
                capped[k] = true;
                changed = true;
            }
    }

    s.eta = eta;
    s.t.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k)
        s.t[k] = capped[k] ? caps[k] : eta / group_rates[k];
    return s;
}

std::vector<double> access_time_caps(std::span<const double> access_rates, std::span<const double> group_rates,
                                     double access_bw_hz, double fronthaul_bw_hz)
{
    if (access_rates.size() != group_rates.size())
        throw DomainError("access and fronthaul rate vectors differ in length");
    std::vector<double> caps(access_rates.size());
    for (std::size_t k = 0; k < caps.size(); ++k)
        caps[k] = access_bw_hz * access_rates[k] / (fronthaul_bw_hz * group_rates[k]);
    return caps;
}

} // namespace cfmimo
