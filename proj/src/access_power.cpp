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

#include "cfmimo/access_power.hpp"

#include "cfmimo/error.hpp"

#include <algorithm>
#include <cmath>

namespace cfmimo
{

double power_budget_violation(const PowerAllocation &alloc, const AccessStats &stats)
{
    const Eigen::VectorXd used = alloc.p.cwiseProduct(stats.beta_hat).rowwise().sum();
    return std::max(0.0, used.size() > 0 ? used.maxCoeff() - 1.0 : 0.0);
}

Eigen::VectorXd user_sinr(const PowerAllocation &alloc, const AccessStats &stats, double rho_ac)
{
    const Eigen::MatrixXd &p = alloc.p;
    if (p.rows() != stats.beta.rows() || p.cols() != stats.beta.cols())
        throw DomainError("power allocation shape does not match the access statistics");

    // Fraction of each AP's budget in use.
    const Eigen::VectorXd ap_load = p.cwiseProduct(stats.beta_hat).rowwise().sum();
    const Eigen::MatrixXd amplitude = p.cwiseSqrt().cwiseProduct(stats.beta_hat);

    Eigen::VectorXd sinr(p.cols());
    for (Eigen::Index k = 0; k < p.cols(); ++k)
    {
        const double coherent = amplitude.col(k).sum();
        const double interference = stats.beta.col(k).dot(ap_load);
        sinr[k] = rho_ac * coherent * coherent / (1.0 + rho_ac * interference);
    }
    return sinr;
}

Eigen::VectorXd access_rates(const Eigen::VectorXd &sinr)
{
    return sinr.unaryExpr([](double s) { return std::log2(1.0 + s); });
}

Eigen::VectorXd access_rates(const PowerAllocation &alloc, const AccessStats &stats, double rho_ac)
{
    return access_rates(user_sinr(alloc, stats, rho_ac));
}

Eigen::VectorXd interference_free_bound(const Grouping &grouping, const AccessStats &stats, double rho_ac)
{
    Eigen::VectorXd bound(static_cast<Eigen::Index>(grouping.num_ues()));
    for (std::size_t k = 0; k < grouping.num_ues(); ++k)
    {
        double amp = 0.0;
        for (std::size_t m : grouping.groups[k])
            amp += std::sqrt(stats.beta_hat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)));
        bound[static_cast<Eigen::Index>(k)] = rho_ac * amp * amp;
    }
    return bound;
}

namespace
{

// Equal split of each AP's budget over the users it serves.
PowerAllocation equal_split(const Grouping &grouping, const AccessStats &stats)
{
    PowerAllocation a{Eigen::MatrixXd::Zero(stats.beta.rows(), stats.beta.cols())};
    for (std::size_t m = 0; m < grouping.num_aps(); ++m)
    {
        const auto &users = grouping.served_users[m];
        for (std::size_t k : users)
        {
            const double bh = stats.beta_hat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
            if (bh > 0.0)
                a.p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
                    1.0 / (static_cast<double>(users.size()) * bh);
        }
    }
    return a;
}

PowerAllocation restrict_to(const PowerAllocation &alloc, const Grouping &grouping, const AccessStats &stats)
{
    if (alloc.p.rows() != stats.beta.rows() || alloc.p.cols() != stats.beta.cols())
        throw DomainError("warm-start allocation shape does not match the access statistics");
    PowerAllocation a{Eigen::MatrixXd::Zero(stats.beta.rows(), stats.beta.cols())};
    for (std::size_t k = 0; k < grouping.num_ues(); ++k)
        for (std::size_t m : grouping.groups[k])
        {
            const auto mi = static_cast<Eigen::Index>(m);
            const auto ki = static_cast<Eigen::Index>(k);
            a.p(mi, ki) = std::max(0.0, alloc.p(mi, ki));
        }
    // Guard against a warm start slightly over budget.
    const Eigen::VectorXd load = a.p.cwiseProduct(stats.beta_hat).rowwise().sum();
    for (Eigen::Index m = 0; m < load.size(); ++m)
        if (load[m] > 1.0)
            a.p.row(m) /= load[m];
    return a;
}

// Scales down the power of every user above the worst SINR until all SINRs
// meet. Loads and interference only fall, so budgets and the minimum hold.
void equalize_sinr(PowerAllocation &alloc, const AccessStats &stats, double rho_ac)
{
    constexpr int max_rounds = 1000;
    constexpr double spread_tol = 1e-9;
    for (int round = 0; round < max_rounds; ++round)
    {
        const Eigen::VectorXd sinr = user_sinr(alloc, stats, rho_ac);
        const double target = sinr.minCoeff();
        if (!(target > 0.0) || sinr.maxCoeff() <= target * (1.0 + spread_tol))
            return;
        for (Eigen::Index k = 0; k < sinr.size(); ++k)
            if (sinr[k] > target)
                alloc.p.col(k) *= target / sinr[k];
    }
}

} // namespace

MaxMinSolution maxmin_power_bisection(const Grouping &grouping, const AccessStats &stats, double rho_ac,
                                      double tol_gamma, const MaxMinWarmStart *warm)
{
    if (grouping.num_ues() != stats.num_ues() || grouping.num_aps() != stats.num_aps())
        throw DomainError("grouping and access statistics disagree on M or K");

    const Eigen::VectorXd bound = interference_free_bound(grouping, stats, rho_ac);
    for (Eigen::Index k = 0; k < bound.size(); ++k)
        if (!(bound[k] > 0.0))
            throw DegenerateUserError(static_cast<std::size_t>(k),
                                      "user " + std::to_string(k) +
                                          " has no serving AP with a nonzero channel estimate");

    MaxMinSolution sol;
    double hi = bound.minCoeff();
    sol.allocation = warm ? restrict_to(warm->allocation, grouping, stats) : equal_split(grouping, stats);
    double lo = std::min(user_sinr(sol.allocation, stats, rho_ac).minCoeff(), hi);

    const auto test = [&](double gamma) {
        const FeasibilityOutcome out = socp_feasible(gamma, grouping, stats, rho_ac);
        ++sol.bisection_steps;
        sol.newton_steps += out.stats.newton_steps;
        if (out.feasible)
        {
            // Any certified allocation lifts the lower end to its own worst SINR.
            const double achieved = user_sinr(*out.allocation, stats, rho_ac).minCoeff();
            lo = std::min(std::max(gamma, achieved), hi);
            sol.allocation = *out.allocation;
            return true;
        }
        if (out.status == FeasibilityStatus::indeterminate)
            ++sol.indeterminate_steps;
        hi = gamma;
        return false;
    };

    // Probe upward from the starting point until the target turns infeasible.
    double step = warm ? 0.02 : 0.5;
    while (lo > 0.0 && hi - lo > tol_gamma * std::max(1.0, lo))
    {
        const double probe = lo * (1.0 + step);
        if (probe >= hi || !test(probe))
            break;
        step *= 4.0;
    }

    while (hi - lo > tol_gamma * std::max(1.0, lo))
        test(0.5 * (lo + hi));
    equalize_sinr(sol.allocation, stats, rho_ac);
    sol.gamma_star = lo;
    return sol;
}

} // namespace cfmimo
