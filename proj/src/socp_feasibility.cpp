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


// Barrier-method solver for the per-target SINR feasibility problem.
//
// With y_mk = sqrt(p_mk bh_mk) the budget of AP m reads ||y_m.|| <= 1 and the
// SINR constraint of user k becomes a second-order cone:
//
//   sum_m c_mk y_mk - t >= sqrt(gamma) || [ d_mk y_mj ]_(m,j) ; 1 ||_2
//
// with c_mk = sqrt(rho bh_mk) and d_mk = sqrt(rho b_mk); the interference term
// sum_m rho b_mk ||y_m.||^2 is the squared norm of the scaled y. The target is
// feasible iff the largest common margin t* is >= 0, so every iterate with
// t > 0 certifies feasibility.
//
// The sign of y is left free. A negative amplitude only lowers its user's
// margin, and the recovered power y^2 / bh with amplitude |y| does at least as
// well as the cone claims. This keeps the barrier smooth at y = 0, where most
// links of a max-min solution end up.
//
// Infeasibility is certified by weak duality. The barrier gradient of every
// user cone is a dual-feasible multiplier at any interior point, and
// maximizing the resulting Lagrangian over the balls ||y_m.|| <= 1 gives an
// upper bound on t* that does not rely on exact centring. Near the central
// path it is within O(theta / tau) of t.
//
// Newton systems. For a cone point (x0, xbar) with r = ||xbar||,
// d = x0^2 - r^2 and xhat = xbar / r, the Hessian of -log d is
//
//   (2/d) (I - xhat xhat^T) on xbar  +  l+ e+ e+^T  +  l- e- e-^T,
//   e+- = (1, -+xhat) / sqrt(2),  l+ = 2 (x0 + r)^2 / d^2,  l- = 2 / (x0 + r)^2.
//
// Mapped to (y, t), the (2/d) I part is diagonal and constant on each AP
// block, so with the ball barriers it forms blocks a I + b y_m y_m^T whose
// inverse is applied through the split along and across y_m. The three
// rank-one terms per user are eliminated through a dense (3K + 1) system in
// (t, multipliers), followed by iterative refinement against the exact product.

#include "cfmimo/access_power.hpp"

#include "cfmimo/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace cfmimo
{

namespace
{

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double barrier_growth = 20.0;
constexpr double centering_tol = 1e-9;
constexpr double armijo = 0.01;
constexpr double backtrack = 0.5;
constexpr int max_refinement = 3;
constexpr double refinement_tol = 1e-12;
constexpr std::size_t max_stalls = 3;

struct ConeProblem
{
    double gamma = 0.0;
    std::size_t num_ues = 0;

    // y variables ordered by AP, then by user, so AP blocks are contiguous.
    std::vector<std::size_t> y_ap;
    std::vector<std::size_t> y_user;
    std::vector<double> y_coef; // c_mk

    std::vector<std::size_t> block_ap;
    std::vector<std::size_t> block_offset;
    std::vector<std::size_t> block_size;

    std::vector<std::vector<std::size_t>> user_vars;
    Eigen::MatrixXd d2; // K x blocks, rho * beta

    std::size_t n_y() const { return y_ap.size(); }
    std::size_t n_blocks() const { return block_ap.size(); }

    double barrier_degree() const { return static_cast<double>(n_blocks() + 2 * num_ues); }

    Eigen::Index off(std::size_t j) const { return static_cast<Eigen::Index>(block_offset[j]); }
    Eigen::Index len(std::size_t j) const { return static_cast<Eigen::Index>(block_size[j]); }
};

ConeProblem build_problem(double gamma, const Grouping &grouping, const AccessStats &stats, double rho)
{
    ConeProblem pb;
    pb.gamma = gamma;
    pb.num_ues = grouping.num_ues();
    pb.user_vars.resize(pb.num_ues);

    for (std::size_t m = 0; m < grouping.num_aps(); ++m)
    {
        const std::size_t offset = pb.y_ap.size();
        for (std::size_t k : grouping.served_users[m])
        {
            const double bh = stats.beta_hat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
            if (!(bh > 0.0))
                continue;
            pb.user_vars[k].push_back(pb.y_ap.size());
            pb.y_ap.push_back(m);
            pb.y_user.push_back(k);
            pb.y_coef.push_back(std::sqrt(rho * bh));
        }
        if (pb.y_ap.size() > offset)
        {
            pb.block_ap.push_back(m);
            pb.block_offset.push_back(offset);
            pb.block_size.push_back(pb.y_ap.size() - offset);
        }
    }

    pb.d2.resize(static_cast<Eigen::Index>(pb.num_ues), static_cast<Eigen::Index>(pb.n_blocks()));
    for (std::size_t k = 0; k < pb.num_ues; ++k)
        for (std::size_t j = 0; j < pb.n_blocks(); ++j)
            pb.d2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                rho * stats.beta(static_cast<Eigen::Index>(pb.block_ap[j]), static_cast<Eigen::Index>(k));
    return pb;
}

struct Point
{
    Eigen::VectorXd y;
    double t = 0.0;
};

// Squared block norms ||y_m.||^2.
Eigen::VectorXd block_loads(const ConeProblem &pb, const Eigen::VectorXd &y)
{
    Eigen::VectorXd q(static_cast<Eigen::Index>(pb.n_blocks()));
    for (std::size_t j = 0; j < pb.n_blocks(); ++j)
        q[static_cast<Eigen::Index>(j)] = y.segment(pb.off(j), pb.len(j)).squaredNorm();
    return q;
}

// User cone at a point: head x0, tail norm r and d = (x0 - r)(x0 + r).
struct ConeState
{
    double x0 = 0.0;
    double r = 0.0;
    double d = 0.0;
};

ConeState user_cone(const ConeProblem &pb, const Point &x, const Eigen::VectorXd &loads, std::size_t k)
{
    ConeState c;
    for (std::size_t i : pb.user_vars[k])
        c.x0 += pb.y_coef[i] * x.y[static_cast<Eigen::Index>(i)];
    c.x0 -= x.t;
    c.r = std::sqrt(pb.gamma * (1.0 + pb.d2.row(static_cast<Eigen::Index>(k)).dot(loads)));
    c.d = (c.x0 - c.r) * (c.x0 + c.r);
    return c;
}

// -tau t + barrier, or +inf outside the open domain.
double objective(const ConeProblem &pb, const Point &x, double tau)
{
    const Eigen::VectorXd loads = block_loads(pb, x.y);
    double phi = 0.0;
    for (Eigen::Index j = 0; j < loads.size(); ++j)
    {
        if (!(loads[j] < 1.0))
            return inf;
        phi -= std::log1p(-loads[j]);
    }
    for (std::size_t k = 0; k < pb.num_ues; ++k)
    {
        const ConeState c = user_cone(pb, x, loads, k);
        if (!(c.x0 > c.r))
            return inf;
        phi -= std::log(c.d);
    }
    return -tau * x.t + phi;
}

// Upper bound on the largest margin from the user-cone multipliers
// lambda_k = (x0, -xbar) / (d_k S), S = sum_k x0 / d_k, which make the
// coefficient of t vanish.
double margin_upper_bound(const ConeProblem &pb, const Point &x)
{
    const Eigen::VectorXd loads = block_loads(pb, x.y);
    std::vector<ConeState> users(pb.num_ues);
    double scale = 0.0;
    for (std::size_t k = 0; k < pb.num_ues; ++k)
    {
        users[k] = user_cone(pb, x, loads, k);
        scale += users[k].x0 / users[k].d;
    }
    if (!(scale > 0.0) || !std::isfinite(scale))
        return inf;

    double bound = 0.0;
    for (std::size_t k = 0; k < pb.num_ues; ++k)
        bound -= pb.gamma / (users[k].d * scale);

    for (std::size_t j = 0; j < pb.n_blocks(); ++j)
    {
        // weight of this AP's interference term in the Lagrangian
        double interference = 0.0;
        for (std::size_t k = 0; k < pb.num_ues; ++k)
            interference += pb.gamma * pb.d2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) /
                            (users[k].d * scale);
        double coef_sq = 0.0;
        for (Eigen::Index i = pb.off(j); i < pb.off(j) + pb.len(j); ++i)
        {
            const auto ii = static_cast<std::size_t>(i);
            const ConeState &u = users[pb.y_user[ii]];
            const double coef = u.x0 * pb.y_coef[ii] / (u.d * scale) - interference * x.y[i];
            coef_sq += coef * coef;
        }
        bound += std::sqrt(coef_sq); // sup over ||y_m.|| <= 1
    }
    return bound;
}

struct NewtonStep
{
    Eigen::VectorXd dy;
    double dt = 0.0;
    double decrement_sq = 0.0; // lambda^2 = -grad . step
    bool ok = false;
};

NewtonStep newton_step(const ConeProblem &pb, const Point &x, double tau)
{
    const auto ny = static_cast<Eigen::Index>(pb.n_y());
    const auto nk = static_cast<Eigen::Index>(pb.num_ues);
    const auto nb = pb.n_blocks();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Eigen::VectorXd loads = block_loads(pb, x.y);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(ny);
    double gt = -tau;
    // Per block: Hessian a I + b y y^T.
    Eigen::VectorXd block_a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nb));
    Eigen::VectorXd block_b(static_cast<Eigen::Index>(nb));

    for (std::size_t j = 0; j < nb; ++j)
    {
        const auto jj = static_cast<Eigen::Index>(j);
        const double q = loads[jj];
        const double e = (1.0 - std::sqrt(q)) * (1.0 + std::sqrt(q));
        g.segment(pb.off(j), pb.len(j)) += (2.0 / e) * x.y.segment(pb.off(j), pb.len(j));
        block_a[jj] = 2.0 / e;
        block_b[jj] = 4.0 / (e * e);
    }

    Eigen::MatrixXd fu = Eigen::MatrixXd::Zero(ny, 3 * nk);
    Eigen::VectorXd ft = Eigen::VectorXd::Zero(3 * nk);
    Eigen::VectorXd lu_coef(3 * nk);
    for (std::size_t k = 0; k < pb.num_ues; ++k)
    {
        const auto kk = static_cast<Eigen::Index>(k);
        const ConeState c = user_cone(pb, x, loads, k);
        const double inv_d = 1.0 / c.d;

        for (std::size_t i : pb.user_vars[k])
            g[static_cast<Eigen::Index>(i)] -= 2.0 * c.x0 * pb.y_coef[i] * inv_d;
        gt += 2.0 * c.x0 * inv_d;

        // w = gamma D_k^2 y / r
        for (std::size_t j = 0; j < nb; ++j)
        {
            const double scale = pb.gamma * pb.d2(kk, static_cast<Eigen::Index>(j));
            g.segment(pb.off(j), pb.len(j)) += (2.0 * scale * inv_d) * x.y.segment(pb.off(j), pb.len(j));
            block_a[static_cast<Eigen::Index>(j)] += 2.0 * scale * inv_d;
            fu.col(3 * kk + 2).segment(pb.off(j), pb.len(j)) = (scale / c.r) * x.y.segment(pb.off(j), pb.len(j));
        }
        fu.col(3 * kk) = -inv_sqrt2 * fu.col(3 * kk + 2);
        fu.col(3 * kk + 1) = inv_sqrt2 * fu.col(3 * kk + 2);
        for (std::size_t i : pb.user_vars[k])
        {
            const auto ii = static_cast<Eigen::Index>(i);
            fu(ii, 3 * kk) += pb.y_coef[i] * inv_sqrt2;
            fu(ii, 3 * kk + 1) += pb.y_coef[i] * inv_sqrt2;
        }
        ft[3 * kk] = -inv_sqrt2;
        ft[3 * kk + 1] = -inv_sqrt2;
        const double sum = c.x0 + c.r;
        lu_coef[3 * kk] = 2.0 * sum * sum * inv_d * inv_d;
        lu_coef[3 * kk + 1] = 2.0 / (sum * sum);
        lu_coef[3 * kk + 2] = -2.0 * inv_d;
    }

    // (a I + b y y^T)^-1 v = v_perp / a + v_par / (a + b q), split along y.
    auto block_solve = [&](Eigen::Ref<Eigen::VectorXd> v) {
        for (std::size_t j = 0; j < nb; ++j)
        {
            const auto jj = static_cast<Eigen::Index>(j);
            auto seg = v.segment(pb.off(j), pb.len(j));
            const double q = loads[jj];
            if (q > 0.0)
            {
                const Eigen::VectorXd yhat = x.y.segment(pb.off(j), pb.len(j)) / std::sqrt(q);
                const double along = yhat.dot(seg);
                seg -= along * yhat;
                seg /= block_a[jj];
                seg += (along / (block_a[jj] + block_b[jj] * q)) * yhat;
            }
            else
                seg /= block_a[jj];
        }
    };

    auto apply = [&](const Eigen::VectorXd &v, double vt, Eigen::VectorXd &out, double &out_t) {
        out.resize(ny);
        for (std::size_t j = 0; j < nb; ++j)
        {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto yj = x.y.segment(pb.off(j), pb.len(j));
            const auto vj = v.segment(pb.off(j), pb.len(j));
            out.segment(pb.off(j), pb.len(j)) = block_a[jj] * vj + (block_b[jj] * yj.dot(vj)) * yj;
        }
        const Eigen::VectorXd proj = lu_coef.cwiseProduct(fu.transpose() * v + ft * vt);
        out += fu * proj;
        out_t = ft.dot(proj);
    };

    // Reduced system in (dt, xi):
    //   [ 0     ft^T                  ] [dt]   [ rt            ]
    //   [ ft   -(L^-1 + fu^T B^-1 fu) ] [xi] = [ -fu^T B^-1 r  ]
    Eigen::MatrixXd binv_fu = fu;
    for (Eigen::Index c = 0; c < binv_fu.cols(); ++c)
        block_solve(binv_fu.col(c));
    const Eigen::Index m = 3 * nk + 1;
    Eigen::MatrixXd red = Eigen::MatrixXd::Zero(m, m);
    red.block(0, 1, 1, 3 * nk) = ft.transpose();
    red.block(1, 0, 3 * nk, 1) = ft;
    red.bottomRightCorner(3 * nk, 3 * nk) = -(fu.transpose() * binv_fu);
    red.bottomRightCorner(3 * nk, 3 * nk).diagonal() -= lu_coef.cwiseInverse();
    const Eigen::PartialPivLU<Eigen::MatrixXd> red_lu(red);

    auto solve = [&](const Eigen::VectorXd &r, double rt, Eigen::VectorXd &v, double &vt) {
        Eigen::VectorXd binv_r = r;
        block_solve(binv_r);
        Eigen::VectorXd rhs(m);
        rhs[0] = rt;
        rhs.tail(3 * nk) = -(fu.transpose() * binv_r);
        const Eigen::VectorXd sol = red_lu.solve(rhs);
        vt = sol[0];
        v = binv_r - binv_fu * sol.tail(3 * nk);
    };

    NewtonStep step;
    Eigen::VectorXd v;
    double vt = 0.0;
    solve(-g, -gt, v, vt);
    const double g_norm = std::sqrt(g.squaredNorm() + gt * gt);
    Eigen::VectorXd hv, cv;
    double hvt = 0.0, cvt = 0.0;
    for (int pass = 0; pass < max_refinement; ++pass)
    {
        apply(v, vt, hv, hvt);
        const Eigen::VectorXd res = -g - hv;
        const double res_t = -gt - hvt;
        if (std::sqrt(res.squaredNorm() + res_t * res_t) <= refinement_tol * g_norm)
            break;
        solve(res, res_t, cv, cvt);
        v += cv;
        vt += cvt;
    }

    step.dy = std::move(v);
    step.dt = vt;
    step.decrement_sq = -(g.dot(step.dy) + gt * vt);
    step.ok = std::isfinite(step.decrement_sq) && step.decrement_sq >= 0.0;
    return step;
}

Point initial_point(const ConeProblem &pb)
{
    Point x;
    x.y.resize(static_cast<Eigen::Index>(pb.n_y()));
    for (std::size_t j = 0; j < pb.n_blocks(); ++j)
        x.y.segment(pb.off(j), pb.len(j)).setConstant(0.5 / std::sqrt(static_cast<double>(pb.block_size[j])));

    const Eigen::VectorXd loads = block_loads(pb, x.y);
    double margin = inf;
    for (std::size_t k = 0; k < pb.num_ues; ++k)
    {
        const ConeState c = user_cone(pb, x, loads, k);
        margin = std::min(margin, c.x0 - c.r);
    }
    x.t = margin - std::max(1.0, std::abs(margin));
    return x;
}

PowerAllocation recover_allocation(const ConeProblem &pb, const Point &x, const AccessStats &stats)
{
    PowerAllocation alloc{Eigen::MatrixXd::Zero(stats.beta.rows(), stats.beta.cols())};
    for (std::size_t i = 0; i < pb.n_y(); ++i)
    {
        const auto m = static_cast<Eigen::Index>(pb.y_ap[i]);
        const auto k = static_cast<Eigen::Index>(pb.y_user[i]);
        const double yi = x.y[static_cast<Eigen::Index>(i)];
        alloc.p(m, k) = yi * yi / stats.beta_hat(m, k);
    }
    return alloc;
}

double feasibility_residual(double gamma, const PowerAllocation &alloc, const AccessStats &stats, double rho)
{
    double residual = power_budget_violation(alloc, stats);
    if (gamma > 0.0)
    {
        const Eigen::VectorXd sinr = user_sinr(alloc, stats, rho);
        for (Eigen::Index k = 0; k < sinr.size(); ++k)
            residual = std::max(residual, (gamma - sinr[k]) / gamma);
    }
    return residual;
}

} // namespace

FeasibilityOutcome socp_feasible(double gamma, const Grouping &grouping, const AccessStats &stats, double rho_ac,
                                 const ConeSolverOptions &options)
{
    if (!(gamma >= 0.0))
        throw DomainError("SINR target must be >= 0");

    FeasibilityOutcome out;
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(stats.beta.rows(), stats.beta.cols());
    if (gamma == 0.0)
    {
        out.status = FeasibilityStatus::feasible;
        out.feasible = true;
        out.allocation = PowerAllocation{zero};
        return out;
    }

    const ConeProblem pb = build_problem(gamma, grouping, stats, rho_ac);
    for (const auto &vars : pb.user_vars)
        if (vars.empty())
            return out; // a user with no usable AP has SINR 0 < gamma

    Point x = initial_point(pb);
    const double theta = pb.barrier_degree();
    const double gap_floor = options.tol * std::max(1.0, std::sqrt(gamma));
    double tau = theta / std::max(1.0, std::sqrt(gamma));

    auto finish_feasible = [&](const Point &p) {
        out.status = FeasibilityStatus::feasible;
        out.feasible = true;
        out.allocation = recover_allocation(pb, p, stats);
        out.residual = feasibility_residual(gamma, *out.allocation, stats, rho_ac);
        return out;
    };

    auto finish = [&](FeasibilityStatus status, double bound) {
        out.status = status;
        out.margin = x.t;
        out.margin_bound = bound;
        return out;
    };

    double f = objective(pb, x, tau);
    std::size_t stalls = 0;
    while (true)
    {
        ++out.stats.centering_rounds;
        bool stalled = false;
        while (true)
        {
            if (out.stats.newton_steps >= options.max_newton_steps)
                return finish(FeasibilityStatus::indeterminate, margin_upper_bound(pb, x));
            const NewtonStep step = newton_step(pb, x, tau);
            ++out.stats.newton_steps;
            if (!step.ok)
            {
                stalled = true;
                break;
            }
            if (step.decrement_sq / 2.0 <= centering_tol)
                break;

            double alpha = 1.0;
            Point trial;
            double f_trial = inf;
            while (alpha > 1e-14)
            {
                trial.y = x.y + alpha * step.dy;
                trial.t = x.t + alpha * step.dt;
                f_trial = objective(pb, trial, tau);
                if (f_trial <= f - armijo * alpha * step.decrement_sq)
                    break;
                alpha *= backtrack;
            }
            if (!(alpha > 1e-14))
            {
                stalled = true;
                break;
            }
            x = std::move(trial);
            f = f_trial;
            if (x.t > 0.0)
            {
                out.margin = x.t;
                out.margin_bound = margin_upper_bound(pb, x);
                return finish_feasible(x);
            }
        }

        const double bound = margin_upper_bound(pb, x);
        // t* <= bound; a bound within the tolerance of zero is treated as infeasible.
        if (bound < 0.0 || bound - x.t < gap_floor)
            return finish(FeasibilityStatus::infeasible, bound);
        if (stalled && ++stalls >= max_stalls)
            return finish(FeasibilityStatus::indeterminate, bound);
        tau *= barrier_growth;
        f = objective(pb, x, tau);
    }
}

} // namespace cfmimo
