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

#ifndef CFMIMO_ERROR_HPP
#define CFMIMO_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cfmimo
{

// Invalid or inconsistent configuration values.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Exhaustive search refused because the candidate space exceeds the cap.
class SearchSizeError : public std::length_error
{
public:
    using std::length_error::length_error;
};

// A user has no serving AP with a nonzero estimate variance.
class DegenerateUserError : public std::runtime_error
{
public:
    DegenerateUserError(std::size_t user, const std::string &what)
        : std::runtime_error(what), user_(user) {}
    std::size_t user() const noexcept { return user_; }

private:
    std::size_t user_;
};

// A user group has zero fronthaul rate.
class DegenerateGroupError : public std::runtime_error
{
public:
    DegenerateGroupError(std::size_t group, const std::string &what)
        : std::runtime_error(what), group_(group) {}
    std::size_t group() const noexcept { return group_; }

private:
    std::size_t group_;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Wraps any failure inside a single Monte Carlo realization.
class RealizationError : public std::runtime_error
{
public:
    RealizationError(std::uint64_t seed, const std::string &what)
        : std::runtime_error("realization seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace cfmimo

#endif
