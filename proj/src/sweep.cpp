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


#include "cfmimo/sweep.hpp"

#include "cfmimo/config_io.hpp"
#include "cfmimo/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

namespace cfmimo
{

void validate(const SweepAxes &axes)
{
    if (axes.modes.empty() && !axes.include_fiber)
        throw ConfigError("sweep has no modes");
    if (axes.tdmas.empty())
        throw ConfigError("sweep has no TDMA approach");
    for (std::size_t g : axes.g_values)
        if (g == 0)
            throw ConfigError("group sizes must be >= 1");
    for (double bw : axes.bandwidths)
        if (!(bw > 0.0) || !std::isfinite(bw))
            throw ConfigError("fronthaul bandwidths must be positive and finite");
    for (std::size_t m : axes.m_values)
        if (m == 0)
            throw ConfigError("AP counts must be >= 1");
}

std::vector<std::size_t> SweepResult::fiber_points() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].point.mode == Mode::fiber)
            out.push_back(i);
    return out;
}

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace
{

struct Plan
{
    std::vector<std::size_t> m_list;
    std::vector<double> bw_list;
    std::vector<SweepPoint> points;
};

Plan make_plan(const SystemConfig &config, const SweepAxes &axes)
{
    Plan plan;
    plan.m_list = axes.m_values.empty() ? std::vector<std::size_t>{config.num_aps} : axes.m_values;
    plan.bw_list = axes.bandwidths.empty() ? std::vector<double>{config.fronthaul_bw_hz} : axes.bandwidths;

    std::vector<std::optional<std::size_t>> g_list;
    for (std::size_t g : axes.g_values)
        g_list.emplace_back(g);
    if (g_list.empty())
        g_list.emplace_back(std::nullopt);

    bool fiber = axes.include_fiber;
    for (std::size_t m : plan.m_list)
        for (double bw : plan.bw_list)
            for (Mode mode : axes.modes)
            {
                if (mode == Mode::fiber)
                {
                    fiber = true;
                    continue;
                }
                for (TdmaApproach tdma : axes.tdmas)
                    for (const auto &g : g_list)
                        plan.points.push_back({mode, tdma, m, g, bw});
            }
    if (fiber)
        for (std::size_t m : plan.m_list)
            plan.points.push_back({Mode::fiber, TdmaApproach::approach1, m, std::nullopt,
                                   std::numeric_limits<double>::infinity()});
    return plan;
}

// All points sharing one AP count reuse the deployment of a realization.
void run_job(const SystemConfig &config, const Plan &plan, std::size_t m_index, std::size_t realization,
             std::vector<SweepRecord> &records)
{
    const std::size_t realizations = config.realizations;
    SystemConfig cfg = config;
    cfg.num_aps = plan.m_list[m_index];
    const std::uint64_t seed = derive_seed(config.master_seed, realization);

    try
    {
        Deployment deployment = build_deployment(cfg, seed);
        PowerCache cache;
        for (std::size_t p = 0; p < plan.points.size(); ++p)
        {
            const SweepPoint &pt = plan.points[p];
            if (pt.num_aps != cfg.num_aps)
                continue;
            SystemConfig point_cfg = cfg;
            if (pt.mode != Mode::fiber)
                point_cfg.fronthaul_bw_hz = pt.fronthaul_bw_hz;
            deployment.powers = normalize_powers(point_cfg);

            RunOptions options;
            options.group_size = pt.group_size;
            options.power_cache = &cache;
            SweepRecord &rec = records[p * realizations + realization];
            rec.point = p;
            rec.realization = realization;
            rec.result = run_on_deployment(point_cfg, deployment, seed, pt.mode, pt.tdma, options);
        }
    }
    catch (const std::exception &e)
    {
        std::throw_with_nested(RealizationError(seed, e.what()));
    }
}

PointSummary summarize(const SweepPoint &pt, std::span<const SweepRecord> records)
{
    PointSummary s;
    s.point = pt;
    s.realizations = records.size();
    if (records.empty())
        return s;
    for (const SweepRecord &rec : records)
    {
        s.mean_sum_access_bps += rec.result.sum_access_bps();
        s.mean_sum_fronthaul_bps += rec.result.sum_fronthaul_bps();
        s.mean_sum_end_to_end_bps += rec.result.sum_end_to_end_bps();
        s.mean_min_end_to_end_bps += rec.result.min_end_to_end_bps();
        s.mean_group_size += static_cast<double>(rec.result.group_size);
    }
    const double n = static_cast<double>(records.size());
    s.mean_sum_access_bps /= n;
    s.mean_sum_fronthaul_bps /= n;
    s.mean_sum_end_to_end_bps /= n;
    s.mean_min_end_to_end_bps /= n;
    s.mean_group_size /= n;
    return s;
}

nlohmann::json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json point_json(const PointSummary &s)
{
    nlohmann::json j;
    j["mode"] = to_string(s.point.mode);
    j["tdma"] = s.point.mode == Mode::fiber ? nlohmann::json(nullptr) : nlohmann::json(to_string(s.point.tdma));
    j["M"] = s.point.num_aps;
    j["G"] = s.point.group_size ? nlohmann::json(*s.point.group_size) : nlohmann::json(nullptr);
    j["fronthaul_bw_hz"] = number_or_null(s.point.fronthaul_bw_hz);
    j["realizations"] = s.realizations;
    j["mean_sum_access_bps"] = s.mean_sum_access_bps;
    j["mean_sum_fronthaul_bps"] = number_or_null(s.mean_sum_fronthaul_bps);
    j["mean_sum_end_to_end_bps"] = s.mean_sum_end_to_end_bps;
    j["mean_min_end_to_end_bps"] = s.mean_min_end_to_end_bps;
    j["mean_group_size"] = s.mean_group_size;
    return j;
}

} // namespace

SweepResult run_sweep(const SystemConfig &config, const SweepAxes &axes, const SweepOptions &options)
{
    validate(config);
    validate(axes);
    const Plan plan = make_plan(config, axes);
    const std::size_t realizations = config.realizations;

    SweepResult result;
    result.axes = axes;
    result.records.resize(plan.points.size() * realizations);

    const std::size_t jobs = plan.m_list.size() * realizations;
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++)
        {
            try
            {
                run_job(config, plan, j / realizations, j % realizations, result.records);
            }
            catch (...)
            {
                errors[j] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(jobs, 1));
    if (workers == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);

    for (std::size_t p = 0; p < plan.points.size(); ++p)
        result.points.push_back(summarize(
            plan.points[p], std::span<const SweepRecord>(result.records).subspan(p * realizations, realizations)));
    return result;
}

void write_csv(std::ostream &os, const SystemConfig &config, const SweepResult &result)
{
    os << "realization_id,seed,mode,tdma,M,K,N,G,fronthaul_bw_hz,user_id,access_bps,fronthaul_bps,"
          "end_to_end_bps,t_k,gamma_star\n";
    for (const SweepRecord &rec : result.records)
    {
        const SweepPoint &pt = result.points[rec.point].point;
        const RealizationResult &r = rec.result;
        const bool fiber = pt.mode == Mode::fiber;
        for (std::size_t k = 0; k < r.end_to_end_bps.size(); ++k)
        {
            const double t_k = fiber ? std::numeric_limits<double>::quiet_NaN() : r.schedule.t[k];
            os << rec.realization << ',' << r.seed << ',' << to_string(pt.mode) << ','
               << (fiber ? "none" : to_string(pt.tdma)) << ',' << pt.num_aps << ',' << config.num_ues << ','
               << config.cpu_antennas << ',' << r.group_size << ',' << format_double(pt.fronthaul_bw_hz) << ','
               << k << ',' << format_double(r.access_bps[k]) << ',' << format_double(r.fronthaul_bps[k]) << ','
               << format_double(r.end_to_end_bps[k]) << ',' << format_double(t_k) << ','
               << format_double(r.gamma_star) << '\n';
        }
    }
}

nlohmann::json summary_json(const SystemConfig &config, const SweepResult &result)
{
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["realizations"] = config.realizations;

    nlohmann::json axes;
    axes["G"] = result.axes.g_values;
    axes["fronthaul_bw_hz"] = result.axes.bandwidths;
    axes["M"] = result.axes.m_values;
    nlohmann::json modes = nlohmann::json::array();
    for (Mode m : result.axes.modes)
        modes.push_back(to_string(m));
    axes["modes"] = modes;
    nlohmann::json tdmas = nlohmann::json::array();
    for (TdmaApproach t : result.axes.tdmas)
        tdmas.push_back(to_string(t));
    axes["tdma"] = tdmas;
    j["axes"] = axes;

    nlohmann::json points = nlohmann::json::array();
    nlohmann::json fiber = nlohmann::json::array();
    for (const PointSummary &s : result.points)
        (s.point.mode == Mode::fiber ? fiber : points).push_back(point_json(s));
    j["points"] = points;
    j["fiber"] = fiber;
    return j;
}

SweepFiles sweep_and_emit(const SystemConfig &config, const SweepAxes &axes, const std::filesystem::path &out_dir,
                          const SweepOptions &options, SweepResult *result)
{
    SweepFiles files{out_dir / "sweep.csv", out_dir / "summary.json"};
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    std::ofstream csv(files.csv, std::ios::binary | std::ios::trunc);
    if (!csv)
        throw IoError("cannot write " + files.csv.string());
    std::ofstream summary(files.summary, std::ios::binary | std::ios::trunc);
    if (!summary)
        throw IoError("cannot write " + files.summary.string());

    SweepResult res = run_sweep(config, axes, options);
    write_csv(csv, config, res);
    summary << summary_json(config, res).dump(2) << '\n';
    csv.flush();
    summary.flush();
    if (!csv || !summary)
        throw IoError("write failed in " + out_dir.string());
    if (result)
        *result = std::move(res);
    return files;
}

} // namespace cfmimo
