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

#ifndef CFMIMO_ACCESS_POWER_HPP
#define CFMIMO_ACCESS_POWER_HPP

#include "cfmimo/channel.hpp"
#include "cfmimo/grouping.hpp"

#include <Eigen/Dense>

#include <optional>

namespace cfmimo
{

// Downlink power coefficients p_mk (M x K). Per AP: sum_k p_mk beta_hat_mk <= 1.
struct PowerAllocation
{
    Eigen::MatrixXd p;
};

// Largest violation of the per-AP power budget, 0 if all budgets hold.
double power_budget_violation(const PowerAllocation &alloc, const AccessStats &stats);

// Conjugate-beamforming SINR lower bound of every user:
//   rho (sum_m sqrt(p_mk) bh_mk)^2 / (1 + rho sum_m b_mk sum_k' p_mk' bh_mk')
Eigen::VectorXd user_sinr(const PowerAllocation &alloc, const AccessStats &stats, double rho_ac);

// log2(1 + SINR_k)
Eigen::VectorXd access_rates(const Eigen::VectorXd &sinr);
Eigen::VectorXd access_rates(const PowerAllocation &alloc, const AccessStats &stats, double rho_ac);

enum class FeasibilityStatus
{
    feasible,
    infeasible,
    indeterminate // iteration cap or numerical breakdown; not a certificate either way
};

struct ConeSolverStats
{
    std::size_t newton_steps = 0;
    std::size_t centering_rounds = 0;
};

struct FeasibilityOutcome
{
    FeasibilityStatus status = FeasibilityStatus::infeasible;
    bool feasible = false;
    std::optional<PowerAllocation> allocation;
    double residual = 0.0; // max(power budget excess, relative SINR shortfall) of `allocation`
    double margin = 0.0;       // cone margin t of the last iterate
    double margin_bound = 0.0; // certified upper bound on the largest margin
    ConeSolverStats stats;
};

struct ConeSolverOptions
{
    double tol = 1e-7;
    std::size_t max_newton_steps = 600;
};

// Decides whether every user can reach SINR >= gamma under the per-AP budgets
// and the grouping (p_mk = 0 for m outside G_k). Solved as a second-order cone
// feasibility problem in y_mk = sqrt(p_mk bh_mk); see docs/access_power_socp.md.
FeasibilityOutcome socp_feasible(double gamma, const Grouping &grouping, const AccessStats &stats, double rho_ac,
                                 const ConeSolverOptions &options = {});

// Per-user SINR ceiling with interference dropped and every serving AP at full
// power on that user: rho (sum_{m in G_k} sqrt(bh_mk))^2.
Eigen::VectorXd interference_free_bound(const Grouping &grouping, const AccessStats &stats, double rho_ac);

struct MaxMinSolution
{
    double gamma_star = 0.0;
    PowerAllocation allocation;
    std::size_t bisection_steps = 0;
    std::size_t indeterminate_steps = 0;
    std::size_t newton_steps = 0;
};

// Feasible starting point for the bisection. Entries outside the grouping are
// dropped before use.
struct MaxMinWarmStart
{
    PowerAllocation allocation;
};

// Bisection on the common SINR target over [0, min_k interference-free bound]
// until the bracket is narrower than tol_gamma * max(1, gamma). The lower end
// starts at the worst SINR of the warm start (or of an equal per-AP split) and
// the upper end is found by geometric probing above it. The returned allocation
// is the last certified one with surplus SINR trimmed, so every user sits at
// the same SINR >= gamma_star. Throws DegenerateUserError if some user has no serving AP with bh > 0.
MaxMinSolution maxmin_power_bisection(const Grouping &grouping, const AccessStats &stats, double rho_ac,
                                      double tol_gamma = 1e-4, const MaxMinWarmStart *warm = nullptr);

} // namespace cfmimo

#endif
