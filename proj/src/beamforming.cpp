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

#include "cfmimo/beamforming.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cfmimo
{

namespace
{

constexpr double two_pi = 2.0 * std::numbers::pi;

// Candidates must beat the incumbent by this relative margin; keeps tie-breaking
// independent of last-bit rounding (e.g. f and -f).
constexpr double improvement_margin = 1e-12;

constexpr std::size_t max_ascent_passes = 50;

bool improves(double candidate, double incumbent)
{
    return candidate > incumbent + improvement_margin * std::abs(incumbent);
}

// Per-member lookup: conj(h_mn) * codeword entry p, laid out [member][antenna][phase].
class ResponseTable
{
public:
    ResponseTable(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                  const PhaseCodebook &codebook)
        : members_(group.size()), antennas_(codebook.num_antennas()), phases_(codebook.phase_count()),
          table_(members_ * antennas_ * phases_)
    {
        for (std::size_t g = 0; g < members_; ++g)
        {
            const Eigen::VectorXcd &h = channels.vectors.at(group[g]);
            if (static_cast<std::size_t>(h.size()) != antennas_)
                throw DomainError("channel dimension does not match codebook");
            for (std::size_t n = 0; n < antennas_; ++n)
                for (std::size_t p = 0; p < phases_; ++p)
                    table_[index(g, n, p)] = std::conj(h[static_cast<Eigen::Index>(n)]) * codebook.entry(p);
        }
    }

    std::complex<double> operator()(std::size_t g, std::size_t n, std::size_t p) const
    {
        return table_[index(g, n, p)];
    }

    std::size_t members() const { return members_; }

    // Inner products h_m^H f for every member.
    std::vector<std::complex<double>> inner(const std::vector<std::uint16_t> &phase) const
    {
        std::vector<std::complex<double>> s(members_);
        for (std::size_t g = 0; g < members_; ++g)
            for (std::size_t n = 0; n < antennas_; ++n)
                s[g] += (*this)(g, n, phase[n]);
        return s;
    }

private:
    std::size_t index(std::size_t g, std::size_t n, std::size_t p) const { return (g * antennas_ + n) * phases_ + p; }

    std::size_t members_;
    std::size_t antennas_;
    std::size_t phases_;
    std::vector<std::complex<double>> table_;
};

double min_gain(const std::vector<std::complex<double>> &s)
{
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &v : s)
        worst = std::min(worst, std::norm(v));
    return worst;
}

void require_group(std::span<const std::size_t> group, const FronthaulChannelSet &channels)
{
    if (group.empty())
        throw DomainError("beam search needs a nonempty group");
    for (std::size_t m : group)
        if (m >= channels.size())
            throw DomainError("group member " + std::to_string(m) + " has no fronthaul channel");
}

struct AscentResult
{
    std::vector<std::uint16_t> phase;
    double objective;
    std::size_t passes;
};

AscentResult coordinate_ascent(const ResponseTable &table, std::vector<std::uint16_t> phase, std::size_t phases)
{
    const std::size_t antennas = phase.size();
    std::vector<std::complex<double>> s = table.inner(phase);
    double objective = min_gain(s);
    std::vector<std::complex<double>> trial(s.size());

    std::size_t pass = 0;
    while (pass < max_ascent_passes)
    {
        ++pass;
        bool improved = false;
        for (std::size_t n = 0; n < antennas; ++n)
        {
            const std::size_t current = phase[n];
            std::size_t best_p = current;
            double best_obj = objective;
            for (std::size_t p = 0; p < phases; ++p)
            {
                if (p == current)
                    continue;
                double worst = std::numeric_limits<double>::infinity();
                for (std::size_t g = 0; g < s.size(); ++g)
                    worst = std::min(worst, std::norm(s[g] + table(g, n, p) - table(g, n, current)));
                if (improves(worst, best_obj))
                {
                    best_obj = worst;
                    best_p = p;
                }
            }
            if (best_p != current)
            {
                for (std::size_t g = 0; g < s.size(); ++g)
                    s[g] += table(g, n, best_p) - table(g, n, current);
                phase[n] = static_cast<std::uint16_t>(best_p);
                objective = best_obj;
                improved = true;
            }
        }
        // Re-anchor the running sums to avoid drift across passes.
        s = table.inner(phase);
        objective = min_gain(s);
        if (!improved)
            break;
    }
    return {std::move(phase), objective, pass};
}

} // namespace

PhaseCodebook::PhaseCodebook(std::size_t num_antennas, std::size_t phase_bits)
    : num_antennas_(num_antennas), phase_bits_(phase_bits)
{
    if (num_antennas == 0)
        throw DomainError("codebook needs at least one antenna");
    if (phase_bits == 0 || phase_bits > 16)
        throw DomainError("phase_bits must be in [1, 16]");
    const std::size_t count = std::size_t{1} << phase_bits;
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    phase_set_.reserve(count);
    entries_.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const double phi = two_pi * static_cast<double>(i) / static_cast<double>(count);
        phase_set_.push_back(phi);
        entries_.push_back(std::polar(scale, phi));
    }
}

std::size_t PhaseCodebook::quantize(double angle) const
{
    double a = std::fmod(angle, two_pi);
    if (a < 0.0)
        a += two_pi;
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phase_set_.size(); ++i)
    {
        double d = std::abs(a - phase_set_[i]);
        d = std::min(d, two_pi - d);
        if (d < best_dist - 1e-12)
        {
            best = i;
            best_dist = d;
        }
    }
    return best;
}

BeamVector BeamVector::from_indices(const PhaseCodebook &codebook, std::vector<std::uint16_t> indices)
{
    if (indices.size() != codebook.num_antennas())
        throw DomainError("beam index tuple length must equal the antenna count");
    BeamVector f;
    f.entries.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t n = 0; n < indices.size(); ++n)
    {
        if (indices[n] >= codebook.phase_count())
            throw DomainError("phase index out of range");
        f.entries[static_cast<Eigen::Index>(n)] = codebook.entry(indices[n]);
    }
    f.phase_index = std::move(indices);
    return f;
}

BeamVector BeamVector::quantized_match(const PhaseCodebook &codebook, const Eigen::VectorXcd &v)
{
    std::vector<std::uint16_t> idx(codebook.num_antennas());
    for (std::size_t n = 0; n < idx.size(); ++n)
        idx[n] = static_cast<std::uint16_t>(codebook.quantize(std::arg(v[static_cast<Eigen::Index>(n)])));
    return from_indices(codebook, std::move(idx));
}

double ap_fronthaul_rate(const Eigen::VectorXcd &h, const BeamVector &f, double rho_fh)
{
    if (h.size() != f.entries.size())
        throw DomainError("channel and beam dimensions differ");
    return std::log2(1.0 + rho_fh * std::norm(h.dot(f.entries)));
}

GroupBeamSolution evaluate_group_beam(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                      BeamVector beam, double rho_fh)
{
    require_group(group, channels);
    GroupBeamSolution out;
    out.per_ap_rates.reserve(group.size());
    for (std::size_t m : group)
        out.per_ap_rates.push_back(ap_fronthaul_rate(channels.vectors[m], beam, rho_fh));
    out.group_rate = *std::min_element(out.per_ap_rates.begin(), out.per_ap_rates.end());
    out.beam = std::move(beam);
    return out;
}

GroupBeamSolution multicast_beam_exhaustive(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                            const PhaseCodebook &codebook, double rho_fh,
                                            std::uint64_t enumeration_cap)
{
    require_group(group, channels);
    const std::size_t antennas = codebook.num_antennas();
    const std::size_t phases = codebook.phase_count();
    const std::size_t bits = codebook.phase_bits() * antennas;
    if (bits >= 63 || (std::uint64_t{1} << bits) > enumeration_cap)
        throw SearchSizeError("exhaustive beam search over 2^" + std::to_string(bits) +
                              " codewords exceeds the enumeration cap; use the heuristic search");

    const ResponseTable table(group, channels, codebook);
    std::vector<std::uint16_t> phase(antennas, 0);
    std::vector<std::complex<double>> s = table.inner(phase);

    std::vector<std::uint16_t> best = phase;
    double best_obj = min_gain(s);

    // Odometer in lexicographic order, antenna 0 most significant.
    const std::uint64_t total = std::uint64_t{1} << bits;
    for (std::uint64_t step = 1; step < total; ++step)
    {
        std::size_t n = antennas;
        while (n-- > 0)
        {
            const std::size_t old = phase[n];
            const std::size_t next = (old + 1) % phases;
            for (std::size_t g = 0; g < s.size(); ++g)
                s[g] += table(g, n, next) - table(g, n, old);
            phase[n] = static_cast<std::uint16_t>(next);
            if (next != 0)
                break;
        }
        // Periodic re-anchoring keeps accumulated rounding far below the tie margin.
        if ((step & 0xffff) == 0)
            s = table.inner(phase);
        const double obj = min_gain(s);
        if (improves(obj, best_obj))
        {
            best_obj = obj;
            best = phase;
        }
    }
    return evaluate_group_beam(group, channels, BeamVector::from_indices(codebook, std::move(best)), rho_fh);
}

GroupBeamSolution multicast_beam_heuristic(std::span<const std::size_t> group, const FronthaulChannelSet &channels,
                                           const PhaseCodebook &codebook, double rho_fh, HeuristicTrace *trace)
{
    require_group(group, channels);
    const ResponseTable table(group, channels, codebook);

    std::size_t weakest = group.front();
    for (std::size_t m : group)
        if (channels.betas[m] < channels.betas[weakest] ||
            (channels.betas[m] == channels.betas[weakest] && m < weakest))
            weakest = m;
    const BeamVector start_weakest = BeamVector::quantized_match(codebook, channels.vectors[weakest]);

    Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(codebook.num_antennas()));
    for (std::size_t m : group)
        mean += channels.betas[m] * ula_response(codebook.num_antennas(), channels.angles[m]);
    const BeamVector start_mean = BeamVector::quantized_match(codebook, mean);

    const double init_a = min_gain(table.inner(start_weakest.phase_index));
    const double init_b = min_gain(table.inner(start_mean.phase_index));

    AscentResult run_a = coordinate_ascent(table, start_weakest.phase_index, codebook.phase_count());
    AscentResult run_b = coordinate_ascent(table, start_mean.phase_index, codebook.phase_count());

    if (trace)
    {
        trace->init_weakest_objective = init_a;
        trace->init_mean_objective = init_b;
        trace->passes = run_a.passes + run_b.passes;
    }
    AscentResult &winner = improves(run_b.objective, run_a.objective) ? run_b : run_a;
    return evaluate_group_beam(group, channels, BeamVector::from_indices(codebook, std::move(winner.phase)), rho_fh);
}

std::vector<double> beam_gain_map(const BeamVector &f, std::span<const Point2> points, const Point2 &cpu_position,
                                  std::size_t num_antennas)
{
    if (static_cast<std::size_t>(f.entries.size()) != num_antennas)
        throw DomainError("beam length does not match the antenna count");
    std::vector<double> gains;
    gains.reserve(points.size());
    const double n = static_cast<double>(num_antennas);
    for (const auto &pt : points)
    {
        const Eigen::VectorXcd a = ula_response(num_antennas, azimuth(cpu_position, pt));
        gains.push_back(n * std::norm(a.dot(f.entries)));
    }
    return gains;
}

} // namespace cfmimo
