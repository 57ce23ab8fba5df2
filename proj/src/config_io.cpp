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

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cfmimo
{

namespace
{

struct Field
{
    std::function<void(SystemConfig &, std::string_view)> set;
    std::function<std::string(const SystemConfig &)> get;
};

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const char *first = text.data();
    const char *last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ConfigError("invalid value '" + std::string(text) + "' for key " + std::string(key));
    return value;
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <typename T>
Field member(T SystemConfig::*ptr, const char *key)
{
    return {[ptr, key](SystemConfig &c, std::string_view v) { c.*ptr = parse_number<T>(key, v); },
            [ptr](const SystemConfig &c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*ptr);
                else
                    return std::to_string(c.*ptr);
            }};
}

const std::vector<std::pair<std::string, Field>> &registry()
{
    using C = SystemConfig;
    static const std::vector<std::pair<std::string, Field>> fields = {
        {"num_aps", member(&C::num_aps, "num_aps")},
        {"num_ues", member(&C::num_ues, "num_ues")},
        {"cpu_antennas", member(&C::cpu_antennas, "cpu_antennas")},
        {"phase_bits", member(&C::phase_bits, "phase_bits")},
        {"fronthaul_carrier_ghz", member(&C::fronthaul_carrier_ghz, "fronthaul_carrier_ghz")},
        {"access_carrier_ghz", member(&C::access_carrier_ghz, "access_carrier_ghz")},
        {"fronthaul_bw_hz", member(&C::fronthaul_bw_hz, "fronthaul_bw_hz")},
        {"access_bw_hz", member(&C::access_bw_hz, "access_bw_hz")},
        {"cpu_tx_power_dbm", member(&C::cpu_tx_power_dbm, "cpu_tx_power_dbm")},
        {"ap_tx_power_dbm", member(&C::ap_tx_power_dbm, "ap_tx_power_dbm")},
        {"pilot_tx_power_dbm", member(&C::pilot_tx_power_dbm, "pilot_tx_power_dbm")},
        {"noise_figure_db", member(&C::noise_figure_db, "noise_figure_db")},
        {"pilot_length", member(&C::pilot_length, "pilot_length")},
        {"area_side_m", member(&C::area_side_m, "area_side_m")},
        {"cpu_offset_m", member(&C::cpu_offset_m, "cpu_offset_m")},
        {"realizations", member(&C::realizations, "realizations")},
        {"master_seed", member(&C::master_seed, "master_seed")},
        {"min_distance_m", member(&C::min_distance_m, "min_distance_m")},
        {"layout",
         {[](C &c, std::string_view v) {
              if (v == "random")
                  c.layout = Layout::random;
              else if (v == "grid")
                  c.layout = Layout::grid;
              else
                  throw ConfigError("layout must be 'random' or 'grid', got '" + std::string(v) + "'");
          },
          [](const C &c) { return to_string(c.layout); }}},
        {"grid_rows", member(&C::grid_rows, "grid_rows")},
        {"grid_cols", member(&C::grid_cols, "grid_cols")},
        {"group_size_init", member(&C::group_size_init, "group_size_init")},
        {"bisection_tol", member(&C::bisection_tol, "bisection_tol")},
        {"beam_search",
         {[](C &c, std::string_view v) {
              if (v == "heuristic")
                  c.beam_search = BeamSearch::heuristic;
              else if (v == "exhaustive")
                  c.beam_search = BeamSearch::exhaustive;
              else
                  throw ConfigError("beam_search must be 'heuristic' or 'exhaustive', got '" + std::string(v) +
                                    "'");
          },
          [](const C &c) { return to_string(c.beam_search); }}},
        {"enumeration_cap", member(&C::enumeration_cap, "enumeration_cap")},
    };
    return fields;
}

const Field &lookup(std::string_view key)
{
    for (const auto &[name, field] : registry())
        if (name == key)
            return field;
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

bool is_textual(std::string_view key) { return key == "layout" || key == "beam_search"; }

} // namespace

const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto &entry : registry())
            k.push_back(entry.first);
        return k;
    }();
    return keys;
}

void set_config_value(SystemConfig &config, std::string_view key, std::string_view value)
{
    lookup(key).set(config, value);
}

std::string get_config_value(const SystemConfig &config, std::string_view key)
{
    return lookup(key).get(config);
}

SystemConfig config_from_json(const nlohmann::json &j)
{
    if (!j.is_object())
        throw ConfigError("configuration must be a flat JSON object");
    SystemConfig config;
    for (const auto &[key, value] : j.items())
    {
        if (value.is_string())
            set_config_value(config, key, value.get<std::string>());
        else if (value.is_number_integer() || value.is_number_unsigned() || value.is_number_float())
            set_config_value(config, key, value.dump());
        else
            throw ConfigError("configuration key '" + key + "' must be a number or string");
    }
    return config;
}

nlohmann::json config_to_json(const SystemConfig &config)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto &key : config_keys())
    {
        const std::string text = get_config_value(config, key);
        if (is_textual(key))
            j[key] = text;
        else
            j[key] = nlohmann::json::parse(text);
    }
    return j;
}

SystemConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open configuration file " + path.string());
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError("malformed configuration file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string to_string(Layout layout)
{
    return layout == Layout::grid ? "grid" : "random";
}

std::string to_string(BeamSearch search)
{
    return search == BeamSearch::exhaustive ? "exhaustive" : "heuristic";
}

} // namespace cfmimo
