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


// Reference computations for the tests. Written independently of the library
// (no shared helpers beyond the public data types) so that agreement means
// something.

#ifndef CFMIMO_TESTS_ORACLES_HPP
#define CFMIMO_TESTS_ORACLES_HPP

#include "cfmimo/channel.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace oracle
{

// 32.4 + 20 log10 d + 21 log10 f in long double.
long double path_loss_db(long double distance_m, long double carrier_ghz);

// 10 log10(k T B NF) + 30 in long double, T = 290 K.
long double noise_dbm(long double bandwidth_hz, long double noise_figure_db);

// SINR of every user straight from the definition, one AP and one user at a time.
std::vector<double> sinr(const Eigen::MatrixXd &p, const Eigen::MatrixXd &beta, const Eigen::MatrixXd &beta_hat,
                         double rho);

struct GridOptimum
{
    double min_sinr = 0.0;
    Eigen::MatrixXd p;
};

// Max-min SINR for M = 2, K = 2 with every AP serving both users. Each AP's
// powers are parametrized by its load in [0, 1] and the split between the two
// users; a points^4 grid is followed by `zooms` rounds of local refinement.
GridOptimum maxmin_grid_2x2(const Eigen::MatrixXd &beta, const Eigen::MatrixXd &beta_hat, double rho,
                            int points = 50, int zooms = 6);

struct BeamOptimum
{
    std::vector<std::uint16_t> phases;
    double min_gain = 0.0; // min over members of |h^H f|^2
};

// Enumerates all phase tuples in lexicographic order; the first strict maximum wins.
BeamOptimum enumerate_beams(const std::vector<Eigen::VectorXcd> &channels, std::size_t num_antennas,
                            std::size_t phase_bits);

// Best (t1, t2) for two groups by scanning t1 on a grid of the given step:
// maximizes min_k t_k R_k subject to t_k <= cap_k and t1 + t2 <= 1, with
// the second user taking all the time it can use.
std::vector<double> tdma_scan_2(const std::vector<double> &rates, const std::vector<double> &caps, double step);

} // namespace oracle

#endif
