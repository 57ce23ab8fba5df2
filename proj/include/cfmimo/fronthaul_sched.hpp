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

#ifndef CFMIMO_FRONTHAUL_SCHED_HPP
#define CFMIMO_FRONTHAUL_SCHED_HPP

#include <span>
#include <vector>

namespace cfmimo
{

// TDMA airtime split across the K user groups.
struct TdmaSchedule
{
    std::vector<double> t; // time fraction per group
    double eta = 0.0;      // common time-scaled group rate (water level), bits/s/Hz
};

double harmonic_mean(std::span<const double> values);

// Equal time-scaled rates: t_k = eta / R_k with eta = HM(R) / K, so sum t = 1
// and the sum fronthaul rate K * eta equals the harmonic mean of the rates.
// Throws DegenerateGroupError if some rate is not positive.
TdmaSchedule tdma_equal_rate(std::span<const double> group_rates);

// Water-filling with per-group ceilings: t_k = min(cap_k, eta / R_k) with the
// largest eta such that sum t <= 1. Reduces to tdma_equal_rate when no cap binds.
TdmaSchedule tdma_capped(std::span<const double> group_rates, std::span<const double> caps);

// Access-rate ceilings B_ac R_ac_k / (B_fh R_fh_k) on the fronthaul airtime.
std::vector<double> access_time_caps(std::span<const double> access_rates, std::span<const double> group_rates,
                                     double access_bw_hz, double fronthaul_bw_hz);

} // namespace cfmimo

#endif
