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


#include "cfmimo/config_io.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/pipeline.hpp"
#include "cfmimo/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace cfmimo;

namespace
{

template <typename T>
std::vector<T> parse_list(const std::string &text, const char *what)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
            continue;
        try
        {
            std::size_t used = 0;
            if constexpr (std::is_floating_point_v<T>)
                out.push_back(std::stod(item, &used));
            else
                out.push_back(static_cast<T>(std::stoull(item, &used)));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::logic_error &)
        {
            throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty())
        throw ConfigError(std::string("empty ") + what + " list");
    return out;
}

std::vector<std::size_t> parse_range(const std::string &text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        return parse_list<std::size_t>(text, "--sweep-g");
    const auto lo = parse_list<std::size_t>(text.substr(0, colon), "--sweep-g");
    const auto hi = parse_list<std::size_t>(text.substr(colon + 1), "--sweep-g");
    if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0])
        throw ConfigError("--sweep-g expects a:b with a <= b");
    std::vector<std::size_t> out;
    for (std::size_t g = lo[0]; g <= hi[0]; ++g)
        out.push_back(g);
    return out;
}

nlohmann::json finite_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json vec_json(const std::vector<double> &v)
{
    nlohmann::json a = nlohmann::json::array();
    for (double x : v)
        a.push_back(finite_or_null(x));
    return a;
}

nlohmann::json result_json(const SystemConfig &config, const RealizationResult &r)
{
    nlohmann::json j;
    j["seed"] = r.seed;
    j["mode"] = to_string(r.mode);
    j["tdma"] = r.mode == Mode::fiber ? nlohmann::json(nullptr) : nlohmann::json(to_string(r.tdma));
    j["M"] = config.num_aps;
    j["K"] = config.num_ues;
    j["G"] = r.group_size;
    j["fronthaul_bw_hz"] = r.mode == Mode::fiber ? nlohmann::json(nullptr) : nlohmann::json(config.fronthaul_bw_hz);
    j["access_bps"] = vec_json(r.access_bps);
    j["fronthaul_bps"] = vec_json(r.fronthaul_bps);
    j["end_to_end_bps"] = vec_json(r.end_to_end_bps);
    j["t"] = r.schedule.t;
    j["eta"] = r.schedule.eta;
    j["gamma_star"] = r.gamma_star;
    j["sum_end_to_end_bps"] = r.sum_end_to_end_bps();
    j["min_end_to_end_bps"] = r.min_end_to_end_bps();
    j["access_groups"] = r.access_groups;
    j["fronthaul_groups"] = r.fronthaul_groups;
    nlohmann::json hist = nlohmann::json::array();
    for (const GroupSizeStep &s : r.group_search.history)
        hist.push_back({{"G", s.group_size},
                        {"sum_access_bps", s.sum_access},
                        {"sum_fronthaul_bps", s.sum_fronthaul},
                        {"min_end_to_end_bps", s.min_rate}});
    j["group_size_history"] = hist;
    j["solver"] = {{"bisection_steps", r.solver.bisection_steps},
                   {"newton_steps", r.solver.newton_steps},
                   {"indeterminate_steps", r.solver.indeterminate_steps},
                   {"power_solves", r.solver.power_solves}};
    return j;
}

void print_nested(const std::exception &e, int depth = 0)
{
    std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
    try
    {
        std::rethrow_if_nested(e);
    }
    catch (const std::exception &inner)
    {
        print_nested(inner, depth + 1);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Cell-free massive MIMO with wireless fronthaul: simulation driver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string mode_text = "separate";
    std::string tdma_text = "approach2";
    std::optional<std::size_t> realizations;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--mode", mode_text, "separate | mixed | fiber");
    app.add_option("--tdma", tdma_text, "approach1 | approach2");
    app.add_option("--realizations", realizations, "Realizations per point");
    app.add_option("--seed", seed, "Master seed");

    // One flag per config key, e.g. --num_aps=50.
    std::map<std::string, std::string> overrides;
    for (const std::string &key : config_keys())
        if (key != "realizations")
            app.add_option("--" + key, overrides[key], "Config override");

    auto *run = app.add_subcommand("run", "Single realization, JSON on stdout");
    std::optional<std::size_t> run_g;
    std::size_t run_index = 0;
    run->add_option("--group-size", run_g, "Fixed G (default: iterate)");
    run->add_option("--realization", run_index, "Realization index used to derive the seed");

    auto *sweep = app.add_subcommand("sweep", "Monte Carlo sweep, writes sweep.csv and summary.json");
    std::string sweep_g, sweep_bw, sweep_m, modes_text, out_dir = "out";
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    bool no_fiber = false;
    sweep->add_option("--sweep-g", sweep_g, "Group sizes a:b or list (default: iterate)");
    sweep->add_option("--sweep-bw", sweep_bw, "Fronthaul bandwidths in Hz, comma-separated");
    sweep->add_option("--sweep-m", sweep_m, "AP counts, comma-separated");
    sweep->add_option("--modes", modes_text, "Comma-separated modes (default: --mode)");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--workers", workers, "Worker threads");
    sweep->add_flag("--no-fiber", no_fiber, "Skip the fiber baseline");

    auto *beammap = app.add_subcommand("beammap", "Beam gain over the area as x,y,gain CSV");
    std::size_t bm_user = 0;
    std::size_t bm_resolution = 101;
    std::size_t bm_index = 0;
    std::optional<std::size_t> bm_g;
    std::string bm_out;
    beammap->add_option("--user", bm_user, "User whose fronthaul group is beamed to");
    beammap->add_option("--resolution", bm_resolution, "Grid points per axis")->check(CLI::Range(2, 10000));
    beammap->add_option("--realization", bm_index, "Realization index used to derive the seed");
    beammap->add_option("--group-size", bm_g, "Fixed G (default: iterate)");
    beammap->add_option("--out", bm_out, "Output CSV (default: stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        // help and version exit 0; every usage error exits 2
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        SystemConfig config = config_path.empty() ? SystemConfig{} : load_config(config_path);
        for (const auto &[key, value] : overrides)
            if (!value.empty())
                set_config_value(config, key, value);
        if (realizations)
            config.realizations = *realizations;
        if (seed)
            config.master_seed = *seed;
        validate(config);
        const TdmaApproach tdma = parse_tdma(tdma_text);

        if (*run)
        {
            const Mode mode = parse_mode(mode_text);
            RunOptions options;
            options.group_size = run_g;
            const std::uint64_t s = derive_seed(config.master_seed, run_index);
            const RealizationResult r = run_realization(config, s, mode, tdma, options);
            std::cout << result_json(config, r).dump(2) << '\n';
        }
        else if (*sweep)
        {
            SweepAxes axes;
            if (!sweep_g.empty())
                axes.g_values = parse_range(sweep_g);
            if (!sweep_bw.empty())
                axes.bandwidths = parse_list<double>(sweep_bw, "--sweep-bw");
            if (!sweep_m.empty())
                axes.m_values = parse_list<std::size_t>(sweep_m, "--sweep-m");
            axes.modes.clear();
            std::stringstream ss(modes_text.empty() ? mode_text : modes_text);
            for (std::string m; std::getline(ss, m, ',');)
                axes.modes.push_back(parse_mode(m));
            axes.tdmas = {tdma};
            axes.include_fiber = !no_fiber;
            const SweepFiles files = sweep_and_emit(config, axes, out_dir, {workers});
            std::cerr << "wrote " << files.csv.string() << " and " << files.summary.string() << '\n';
        }
        else if (*beammap)
        {
            const Mode mode = parse_mode(mode_text);
            if (mode == Mode::fiber)
                throw ConfigError("beammap needs a wireless fronthaul mode");
            const std::uint64_t s = derive_seed(config.master_seed, bm_index);
            const Deployment d = build_deployment(config, s);
            RunOptions options;
            options.group_size = bm_g;
            const RealizationResult r = run_on_deployment(config, d, s, mode, tdma, options);
            if (bm_user >= r.fronthaul_groups.size())
                throw ConfigError("--user out of range");
            const PhaseCodebook codebook(config.cpu_antennas, config.phase_bits);
            const GroupBeamSolution beam =
                search_group_beam(config, r.fronthaul_groups[bm_user], d.fronthaul, codebook, d.powers.rho_fh);

            const double half = config.area_side_m / 2.0;
            const double x0 = std::min(-half, d.placement.cpu_position.x);
            std::vector<Point2> points;
            const double n = static_cast<double>(bm_resolution - 1);
            for (std::size_t i = 0; i < bm_resolution; ++i)
                for (std::size_t j = 0; j < bm_resolution; ++j)
                    points.push_back({x0 + (half - x0) * static_cast<double>(j) / n,
                                      -half + config.area_side_m * static_cast<double>(i) / n});
            const std::vector<double> gain =
                beam_gain_map(beam.beam, points, d.placement.cpu_position, config.cpu_antennas);

            std::ofstream file;
            if (!bm_out.empty())
            {
                file.open(bm_out, std::ios::binary | std::ios::trunc);
                if (!file)
                    throw IoError("cannot write " + bm_out);
            }
            std::ostream &os = bm_out.empty() ? std::cout : file;
            os << "x,y,gain\n";
            for (std::size_t i = 0; i < points.size(); ++i)
                os << format_double(points[i].x) << ',' << format_double(points[i].y) << ','
                   << format_double(gain[i]) << '\n';
        }
    }
    catch (const ConfigError &e)
    {
        print_nested(e);
        return 2;
    }
    catch (const std::exception &e)
    {
        print_nested(e);
        return 1;
    }
    return 0;
}
