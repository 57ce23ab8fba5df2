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

#ifndef CFMIMO_SCENARIO_HPP
#define CFMIMO_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cfmimo
{

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2 &, const Point2 &) = default;
};

double distance(const Point2 &a, const Point2 &b);

// Euclidean distance clamped from below, so path loss stays finite near d -> 0.
double clamped_distance(const Point2 &a, const Point2 &b, double min_distance_m);

enum class Layout
{
    random, // APs and UEs i.i.d. uniform, CPU at (-D, 0)
    grid    // APs on a rows x cols grid, one cluster per column, CPU at the origin
};

enum class BeamSearch
{
    heuristic,
    exhaustive
};

// Deployment, radio and Monte Carlo parameters. Defaults are the baseline
// simulation values (28 GHz / 2 GHz fronthaul, 3.5 GHz / 20 MHz access).
struct SystemConfig
{
    std::size_t num_aps = 100;
    std::size_t num_ues = 10;
    std::size_t cpu_antennas = 128;
    std::size_t phase_bits = 3;
    double fronthaul_carrier_ghz = 28.0;
    double access_carrier_ghz = 3.5;
    double fronthaul_bw_hz = 2e9;
    double access_bw_hz = 20e6;
    double cpu_tx_power_dbm = 30.0;
    double ap_tx_power_dbm = 10.0;
    double pilot_tx_power_dbm = 10.0;
    double noise_figure_db = 9.0;
    std::size_t pilot_length = 10;
    double area_side_m = 100.0;
    double cpu_offset_m = 100.0;
    std::size_t realizations = 25;
    std::uint64_t master_seed = 1;
    double min_distance_m = 1.0;

    // Solver and layout knobs.
    Layout layout = Layout::random;
    std::size_t grid_rows = 10;
    std::size_t grid_cols = 10;
    std::size_t group_size_init = 10;
    double bisection_tol = 1e-4;
    BeamSearch beam_search = BeamSearch::heuristic;
    std::uint64_t enumeration_cap = std::uint64_t{1} << 24;
};

// Throws ConfigError naming the first violated constraint.
void validate(const SystemConfig &config);

struct Placement
{
    Point2 cpu_position;
    std::vector<Point2> ap_positions;
    std::vector<Point2> ue_positions;
};

// Disjoint AP clusters covering all APs, each with one leader that owns the
// wireless fronthaul link of the cluster.
struct ClusterLayout
{
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> leaders;

    std::size_t size() const { return clusters.size(); }
};

// Throws ConfigError if the clusters do not partition {0..num_aps-1} or a
// leader is not a member of its cluster.
void validate(const ClusterLayout &layout, std::size_t num_aps);

// One singleton cluster per AP; the degenerate layout under which the mixed
// architecture reduces to separate APs.
ClusterLayout singleton_clusters(std::size_t num_aps);

struct NormalizedPowers
{
    double rho_fh = 0.0;
    double rho_ac = 0.0;
    double rho_t = 0.0;
};

// Counter-based split of the master seed: realization i always gets the same
// stream regardless of the order in which realizations are run.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

Placement generate_placement(const SystemConfig &config, std::uint64_t seed);

// APs on a uniform rows x cols grid of cell centres spanning the area, CPU at
// the origin, UEs uniform. Cluster l is grid column l (fixed x); its leader is
// the member closest to the CPU, lowest index on ties. AP index = col*rows + row.
std::pair<Placement, ClusterLayout> generate_grid_clusters(const SystemConfig &config, std::size_t rows,
                                                           std::size_t cols, std::uint64_t seed);

// Thermal noise power k*T*B*NF in watts, T = 290 K.
double noise_power_w(double bandwidth_hz, double noise_figure_db);
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

double dbm_to_watt(double dbm);

NormalizedPowers normalize_powers(const SystemConfig &config);

} // namespace cfmimo

#endif
