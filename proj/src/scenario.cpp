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

#include "cfmimo/scenario.hpp"

#include "cfmimo/error.hpp"
#include "cfmimo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfmimo
{

namespace
{
constexpr double boltzmann = 1.380649e-23; // J/K
constexpr double noise_temperature_k = 290.0;

void require(bool ok, const std::string &what)
{
    if (!ok)
        throw ConfigError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
} // namespace

double distance(const Point2 &a, const Point2 &b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double clamped_distance(const Point2 &a, const Point2 &b, double min_distance_m)
{
    return std::max(distance(a, b), min_distance_m);
}

void validate(const SystemConfig &c)
{
    require(c.num_aps >= 1, "num_aps must be >= 1");
    require(c.num_ues >= 1, "num_ues must be >= 1");
    require(c.cpu_antennas >= 1, "cpu_antennas must be >= 1");
    require(c.phase_bits >= 1 && c.phase_bits <= 16, "phase_bits must be in [1, 16]");
    require(finite_positive(c.fronthaul_carrier_ghz), "fronthaul_carrier_ghz must be > 0");
    require(finite_positive(c.access_carrier_ghz), "access_carrier_ghz must be > 0");
    require(finite_positive(c.fronthaul_bw_hz), "fronthaul_bw_hz must be > 0");
    require(finite_positive(c.access_bw_hz), "access_bw_hz must be > 0");
    require(std::isfinite(c.cpu_tx_power_dbm), "cpu_tx_power_dbm must be finite");
    require(std::isfinite(c.ap_tx_power_dbm), "ap_tx_power_dbm must be finite");
    require(std::isfinite(c.pilot_tx_power_dbm), "pilot_tx_power_dbm must be finite");
    require(std::isfinite(c.noise_figure_db), "noise_figure_db must be finite");
    require(c.pilot_length >= 1, "pilot_length must be >= 1");
    require(c.pilot_length >= c.num_ues, "pilot_length must be >= num_ues (orthogonal pilots)");
    require(std::isfinite(c.area_side_m) && c.area_side_m >= 0.0, "area_side_m must be >= 0");
    require(std::isfinite(c.cpu_offset_m), "cpu_offset_m must be finite");
    require(c.realizations >= 1, "realizations must be >= 1");
    require(finite_positive(c.min_distance_m), "min_distance_m must be > 0");
    require(c.group_size_init >= 1, "group_size_init must be >= 1");
    require(finite_positive(c.bisection_tol), "bisection_tol must be > 0");
    require(c.enumeration_cap >= 1, "enumeration_cap must be >= 1");
    if (c.layout == Layout::grid)
        require(c.grid_rows * c.grid_cols == c.num_aps, "grid_rows * grid_cols must equal num_aps");
}

void validate(const ClusterLayout &layout, std::size_t num_aps)
{
    require(layout.clusters.size() == layout.leaders.size(), "one leader per cluster required");
    std::vector<int> owner(num_aps, -1);
    for (std::size_t l = 0; l < layout.clusters.size(); ++l)
    {
        require(!layout.clusters[l].empty(), "empty cluster " + std::to_string(l));
        for (std::size_t m : layout.clusters[l])
        {
            require(m < num_aps, "cluster member out of range");
            require(owner[m] < 0, "AP " + std::to_string(m) + " belongs to two clusters");
            owner[m] = static_cast<int>(l);
        }
        require(layout.leaders[l] < num_aps && owner[layout.leaders[l]] == static_cast<int>(l),
                "leader of cluster " + std::to_string(l) + " is not a member");
    }
    require(std::all_of(owner.begin(), owner.end(), [](int o) { return o >= 0; }),
            "clusters do not cover every AP");
}

ClusterLayout singleton_clusters(std::size_t num_aps)
{
    ClusterLayout layout;
    layout.clusters.reserve(num_aps);
    for (std::size_t m = 0; m < num_aps; ++m)
    {
        layout.clusters.push_back({m});
        layout.leaders.push_back(m);
    }
    return layout;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index)
{
    // Two rounds so that neighbouring masters and neighbouring indices decorrelate.
    return splitmix64(splitmix64(master_seed) ^ (index + 0x632be59bd9b4e019ULL));
}

namespace
{
Point2 uniform_point(Rng &rng, double side)
{
    const double half = side / 2.0;
    // Draw order x then y is part of the determinism contract.
    const double x = rng.uniform(-half, half);
    const double y = rng.uniform(-half, half);
    return {x, y};
}
} // namespace

Placement generate_placement(const SystemConfig &config, std::uint64_t seed)
{
    Rng rng(seed);
    Placement p;
    p.cpu_position = {-config.cpu_offset_m, 0.0};
    p.ap_positions.reserve(config.num_aps);
    for (std::size_t m = 0; m < config.num_aps; ++m)
        p.ap_positions.push_back(uniform_point(rng, config.area_side_m));
    p.ue_positions.reserve(config.num_ues);
    for (std::size_t k = 0; k < config.num_ues; ++k)
        p.ue_positions.push_back(uniform_point(rng, config.area_side_m));
    return p;
}

std::pair<Placement, ClusterLayout> generate_grid_clusters(const SystemConfig &config, std::size_t rows,
                                                           std::size_t cols, std::uint64_t seed)
{
    if (rows == 0 || cols == 0 || rows * cols != config.num_aps)
        throw ConfigError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " does not hold num_aps = " + std::to_string(config.num_aps));

    const double side = config.area_side_m;
    const double half = side / 2.0;

    Placement p;
    p.cpu_position = {0.0, 0.0};
    p.ap_positions.reserve(config.num_aps);

    ClusterLayout layout;
    layout.clusters.resize(cols);
    for (std::size_t c = 0; c < cols; ++c)
    {
        const double x = -half + (static_cast<double>(c) + 0.5) * side / static_cast<double>(cols);
        for (std::size_t r = 0; r < rows; ++r)
        {
            const double y = -half + (static_cast<double>(r) + 0.5) * side / static_cast<double>(rows);
            layout.clusters[c].push_back(p.ap_positions.size());
            p.ap_positions.push_back({x, y});
        }
    }

    layout.leaders.reserve(cols);
    for (const auto &cluster : layout.clusters)
    {
        std::size_t best = cluster.front();
        double best_d = distance(p.ap_positions[best], p.cpu_position);
        for (std::size_t m : cluster)
        {
            const double d = distance(p.ap_positions[m], p.cpu_position);
            if (d < best_d)
            {
                best = m;
                best_d = d;
            }
        }
        layout.leaders.push_back(best);
    }

    Rng rng(seed);
    p.ue_positions.reserve(config.num_ues);
    for (std::size_t k = 0; k < config.num_ues; ++k)
        p.ue_positions.push_back(uniform_point(rng, side));

    return {std::move(p), std::move(layout)};
}

double noise_power_w(double bandwidth_hz, double noise_figure_db)
{
    return boltzmann * noise_temperature_k * bandwidth_hz * std::pow(10.0, noise_figure_db / 10.0);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    return 10.0 * std::log10(noise_power_w(bandwidth_hz, noise_figure_db)) + 30.0;
}

double dbm_to_watt(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

NormalizedPowers normalize_powers(const SystemConfig &config)
{
    const double noise_ac = noise_power_w(config.access_bw_hz, config.noise_figure_db);
    const double noise_fh = noise_power_w(config.fronthaul_bw_hz, config.noise_figure_db);
    return {dbm_to_watt(config.cpu_tx_power_dbm) / noise_fh, dbm_to_watt(config.ap_tx_power_dbm) / noise_ac,
            dbm_to_watt(config.pilot_tx_power_dbm) / noise_ac};
}

} // namespace cfmimo
