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

#ifndef CFMIMO_BEAMFORMING_HPP
#define CFMIMO_BEAMFORMING_HPP

#include "cfmimo/channel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace cfmimo
{

// Analog beams built from 2^q phase shifts uniform over [0, 2*pi).
class PhaseCodebook
{
public:
    PhaseCodebook(std::size_t num_antennas, std::size_t phase_bits);

    std::size_t num_antennas() const { return num_antennas_; }
    std::size_t phase_bits() const { return phase_bits_; }
    std::size_t phase_count() const { return phase_set_.size(); }
    const std::vector<double> &phase_set() const { return phase_set_; }

    // Index of the nearest phase (circular distance), lowest index on ties.
    std::size_t quantize(double angle) const;

    // exp(j * phase_set[index]) / sqrt(N)
    std::complex<double> entry(std::size_t index) const { return entries_[index]; }

private:
    std::size_t num_antennas_;
    std::size_t phase_bits_;
    std::vector<double> phase_set_;
    std::vector<std::complex<double>> entries_;
};

struct BeamVector
{
    std::vector<std::uint16_t> phase_index;
    Eigen::VectorXcd entries;

    static BeamVector from_indices(const PhaseCodebook &codebook, std::vector<std::uint16_t> indices);

    // Beam whose n-th phase is the quantized phase of v_n (matched / conjugate beam).
    static BeamVector quantized_match(const PhaseCodebook &codebook, const Eigen::VectorXcd &v);
};

struct GroupBeamSolution
{
    BeamVector beam;
    std::vector<double> per_ap_rates; // same order as the group
    double group_rate = 0.0;          // min of per_ap_rates
};

// log2(1 + rho |h^H f|^2)
double ap_fronthaul_rate(const Eigen::VectorXcd &h, const BeamVector &f, double rho_fh);

// Evaluates rates of the group members under a fixed beam.
GroupBeamSolution evaluate_group_beam(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                      BeamVector beam, double rho_fh);

constexpr std::uint64_t default_enumeration_cap = std::uint64_t{1} << 24;

// Global optimum of the group min-rate over the whole codebook; ties go to the
// lexicographically smallest phase-index tuple. Throws SearchSizeError when
// 2^(qN) exceeds `enumeration_cap`, DomainError for an empty group.
GroupBeamSolution multicast_beam_exhaustive(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                            const PhaseCodebook &codebook, double rho_fh,
                                            std::uint64_t enumeration_cap = default_enumeration_cap);

struct HeuristicTrace
{
    double init_weakest_objective = 0.0; // min |h^H f|^2 at the weakest-member start
    double init_mean_objective = 0.0;    // min |h^H f|^2 at the beta-weighted mean start
    std::size_t passes = 0;
};

// Cyclic coordinate ascent over the N phase indices from two starts (quantized
// match to the weakest member, and to the beta-weighted mean steering vector).
GroupBeamSolution multicast_beam_heuristic(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                           const PhaseCodebook &codebook, double rho_fh,
                                           HeuristicTrace *trace = nullptr);

// Array gain N |a(theta)^H f|^2 (at most N) at each point, theta seen from the CPU.
std::vector<double> beam_gain_map(const BeamVector &f, std::span<const Point2> points, const Point2 &cpu_position,
                                  std::size_t num_antennas);

} // namespace cfmimo

#endif
