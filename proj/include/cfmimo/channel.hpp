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

#ifndef CFMIMO_CHANNEL_HPP
#define CFMIMO_CHANNEL_HPP

#include "cfmimo/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cfmimo
{

// 3GPP UMi street-canyon LOS path loss in dB: 32.4 + 20 log10(d) + 21 log10(fc).
// Throws DomainError for non-positive distance or carrier.
double path_loss_db(double distance_m, double carrier_ghz);

double db_to_linear_gain(double loss_db);

// Unit-norm half-wavelength ULA response, a_n = exp(j pi n sin(theta)) / sqrt(N).
Eigen::VectorXcd ula_response(std::size_t num_antennas, double theta);

// Azimuth of `target` seen from an array at `origin` whose broadside is +x.
double azimuth(const Point2 &origin, const Point2 &target);

// LOS fronthaul channels, h_m = sqrt(N beta_m) a(theta_m).
struct FronthaulChannelSet
{
    std::vector<double> betas;
    std::vector<double> angles;
    std::vector<Eigen::VectorXcd> vectors;

    std::size_t size() const { return vectors.size(); }
};

FronthaulChannelSet build_fronthaul_channels(const Placement &placement, const SystemConfig &config);

// Access large-scale gains (M x K) at the access carrier.
Eigen::MatrixXd access_large_scale(const Placement &placement, const SystemConfig &config);

// MMSE estimate variance rho_t L_p beta^2 / (1 + rho_t L_p beta).
double mmse_variance(double beta, double rho_t, std::size_t pilot_length);

struct AccessStats
{
    Eigen::MatrixXd beta;     // M x K
    Eigen::MatrixXd beta_hat; // M x K

    std::size_t num_aps() const { return static_cast<std::size_t>(beta.rows()); }
    std::size_t num_ues() const { return static_cast<std::size_t>(beta.cols()); }
};

AccessStats make_access_stats(Eigen::MatrixXd beta, double rho_t, std::size_t pilot_length);

} // namespace cfmimo

#endif
