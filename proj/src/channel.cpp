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

#include "cfmimo/channel.hpp"

#include "cfmimo/error.hpp"

#include <cmath>
#include <numbers>

namespace cfmimo
{

double path_loss_db(double distance_m, double carrier_ghz)
{
    if (!(distance_m > 0.0) || !(carrier_ghz > 0.0))
        throw DomainError("path loss needs positive distance and carrier frequency");
    return 32.4 + 20.0 * std::log10(distance_m) + 21.0 * std::log10(carrier_ghz);
}

double db_to_linear_gain(double loss_db)
{
    return std::pow(10.0, -loss_db / 10.0);
}

Eigen::VectorXcd ula_response(std::size_t num_antennas, double theta)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    const double step = std::numbers::pi * std::sin(theta);
    Eigen::VectorXcd a(static_cast<Eigen::Index>(num_antennas));
    for (std::size_t n = 0; n < num_antennas; ++n)
        a[static_cast<Eigen::Index>(n)] = std::polar(scale, step * static_cast<double>(n));
    return a;
}

double azimuth(const Point2 &origin, const Point2 &target)
{
    return std::atan2(target.y - origin.y, target.x - origin.x);
}

FronthaulChannelSet build_fronthaul_channels(const Placement &placement, const SystemConfig &config)
{
    const std::size_t m_count = placement.ap_positions.size();
    const double n = static_cast<double>(config.cpu_antennas);

    FronthaulChannelSet set;
    set.betas.reserve(m_count);
    set.angles.reserve(m_count);
    set.vectors.reserve(m_count);
    for (const auto &ap : placement.ap_positions)
    {
        const double d = clamped_distance(placement.cpu_position, ap, config.min_distance_m);
        const double beta = db_to_linear_gain(path_loss_db(d, config.fronthaul_carrier_ghz));
        // At the minimum distance the AP may coincide with the CPU; atan2(0, 0) = 0 (broadside).
        const double theta = azimuth(placement.cpu_position, ap);
        set.betas.push_back(beta);
        set.angles.push_back(theta);
        set.vectors.push_back(std::sqrt(n * beta) * ula_response(config.cpu_antennas, theta));
    }
    return set;
}

Eigen::MatrixXd access_large_scale(const Placement &placement, const SystemConfig &config)
{
    const auto m_count = static_cast<Eigen::Index>(placement.ap_positions.size());
    const auto k_count = static_cast<Eigen::Index>(placement.ue_positions.size());
    Eigen::MatrixXd beta(m_count, k_count);
    for (Eigen::Index m = 0; m < m_count; ++m)
        for (Eigen::Index k = 0; k < k_count; ++k)
        {
            const double d = clamped_distance(placement.ap_positions[static_cast<std::size_t>(m)],
                                              placement.ue_positions[static_cast<std::size_t>(k)],
                                              config.min_distance_m);
            beta(m, k) = db_to_linear_gain(path_loss_db(d, config.access_carrier_ghz));
        }
    return beta;
}

double mmse_variance(double beta, double rho_t, std::size_t pilot_length)
{
    const double snr = rho_t * static_cast<double>(pilot_length) * beta;
    return snr * beta / (1.0 + snr);
}

AccessStats make_access_stats(Eigen::MatrixXd beta, double rho_t, std::size_t pilot_length)
{
    AccessStats stats;
    stats.beta_hat = beta.unaryExpr([&](double b) { return mmse_variance(b, rho_t, pilot_length); });
    stats.beta = std::move(beta);
    return stats;
}

} // namespace cfmimo
