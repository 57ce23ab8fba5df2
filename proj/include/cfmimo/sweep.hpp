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


#ifndef CFMIMO_SWEEP_HPP
#define CFMIMO_SWEEP_HPP

#include "cfmimo/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace cfmimo
{

struct SweepAxes
{
    std::vector<std::size_t> g_values; // empty: iterate G per realization
    std::vector<double> bandwidths;    // fronthaul Hz; empty: config value
    std::vector<std::size_t> m_values; // empty: config value
    std::vector<Mode> modes{Mode::separate};
    std::vector<TdmaApproach> tdmas{TdmaApproach::approach2};
    bool include_fiber = true;
};

void validate(const SweepAxes &axes);

// One (mode, tdma, M, G, B_fh) combination.
struct SweepPoint
{
    Mode mode = Mode::separate;
    TdmaApproach tdma = TdmaApproach::approach2;
    std::size_t num_aps = 0;
    std::optional<std::size_t> group_size; // requested G; unset = iterated
    double fronthaul_bw_hz = 0.0;          // +inf for the fiber baseline
};

struct PointSummary
{
    SweepPoint point;
    std::size_t realizations = 0;
    double mean_sum_access_bps = 0.0;
    double mean_sum_fronthaul_bps = 0.0;
    double mean_sum_end_to_end_bps = 0.0;
    double mean_min_end_to_end_bps = 0.0;
    double mean_group_size = 0.0; // mean chosen G
};

struct SweepRecord
{
    std::size_t point = 0; // index into SweepResult::points
    std::size_t realization = 0;
    RealizationResult result;
};

struct SweepResult
{
    SweepAxes axes;
    std::vector<PointSummary> points;  // fiber points last
    std::vector<SweepRecord> records;  // point-major, then realization
    std::vector<std::size_t> fiber_points() const;
};

struct SweepOptions
{
    std::size_t workers = 1;
};

// Runs config.realizations seeds per point. Realization r uses
// derive_seed(config.master_seed, r) at every point, so points are compared on
// common placements. Output does not depend on the worker count.
SweepResult run_sweep(const SystemConfig &config, const SweepAxes &axes, const SweepOptions &options = {});

void write_csv(std::ostream &os, const SystemConfig &config, const SweepResult &result);
nlohmann::json summary_json(const SystemConfig &config, const SweepResult &result);

struct SweepFiles
{
    std::filesystem::path csv;
    std::filesystem::path summary;
};

// Writes sweep.csv and summary.json into `out_dir`. The directory is checked
// for writability first; IoError is thrown before any computation.
SweepFiles sweep_and_emit(const SystemConfig &config, const SweepAxes &axes, const std::filesystem::path &out_dir,
                          const SweepOptions &options = {}, SweepResult *result = nullptr);

std::string format_double(double value);

} // namespace cfmimo

#endif
