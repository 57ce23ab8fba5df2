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

#ifndef CFMIMO_CONFIG_IO_HPP
#define CFMIMO_CONFIG_IO_HPP

#include "cfmimo/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cfmimo
{

// Every configurable key, in declaration order. Keys match SystemConfig members.
const std::vector<std::string> &config_keys();

// Sets one key from its textual value. Throws ConfigError on an unknown key or
// an unparsable value.
void set_config_value(SystemConfig &config, std::string_view key, std::string_view value);

std::string get_config_value(const SystemConfig &config, std::string_view key);

// Flat JSON object; missing keys keep their defaults, unknown keys are an error.
SystemConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const SystemConfig &config);

SystemConfig load_config(const std::filesystem::path &path);

std::string to_string(Layout layout);
std::string to_string(BeamSearch search);

} // namespace cfmimo

#endif
