// SPDX-License-Identifier: Apache-2.0
//
// riswipt: joint transmit beamforming, RIS reflection, and power-split
// optimization for SWIPT downlinks
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

#include "riswipt/qcqp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace riswipt
{

std::string to_string(QcqpStatus status)
{
    switch (status)
    {
    case QcqpStatus::converged:
        return "converged";
    case QcqpStatus::max_iter:
        return "max_iter";
    case QcqpStatus::infeasible_start:
        return "infeasible_start";
    }
    return "unknown";
}

RVec complex_stack(const CVec &v)
{
    RVec x(2 * v.size());
    x.head(v.size()) = v.real();
    x.tail(v.size()) = v.imag();
    return x;
}

CVec complex_unstack(const RVec &x)
{
    if (x.size() % 2 != 0)
        throw std::invalid_argument("complex_unstack: length must be even.");
    Eigen::Index n = x.size() / 2;
    CVec v(n);
    v.real() = x.head(n);
    v.imag() = x.tail(n);
    return v;
}

RMat hermitian_to_real(const CMat &Q)
{
    if (Q.rows() != Q.cols())
        throw std::invalid_argument("hermitian_to_real: matrix must be square.");
    Eigen::Index n = Q.rows();
    RMat M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = Q.real();
    M.bottomRightCorner(n, n) = Q.real();
    M.topRightCorner(n, n) = -Q.imag();
    M.bottomLeftCorner(n, n) = Q.imag();
    return M;
}

namespace
{

// Fails when M has an eigenvalue below -tol * scale: M + shift I must admit a
// Cholesky factorization if M is PSD up to tolerance.
bool is_psd(const RMat &M, double tol)
{
    double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    RMat shifted = M + tol * scale * RMat::Identity(M.rows(), M.cols());
    return Eigen::LLT<RMat>(shifted).info() == Eigen::Success;
}

struct Barrier
{
    const QuadForm &f0;
    const std::vector<QuadForm> &cons;
    double t;

    double value(const RVec &x, bool &feasible) const
    {
        feasible = true;
        double v = -t * f0.eval(x);
        for (const QuadForm &g : cons)
        {
            double gv = g.eval(x);
            if (gv >= 0.0)
            {
                feasible = false;
                return std::numeric_limits<double>::infinity();
            }
            v -= std::log(-gv);
        }
        return v;
    }

    void grad_hess(const RVec &x, RVec &grad, RMat &hess) const
    {
        grad = -t * f0.grad(x);
        hess = -2.0 * t * f0.A;
        for (const QuadForm &g : cons)
        {
            double gv = g.eval(x);
            RVec gg = g.grad(x);
            grad += gg / (-gv);
            hess += (2.0 / (-gv)) * g.A + (gg * gg.transpose()) / (gv * gv);
        }
    }
};

// Newton descent on the barrier function from a strictly feasible point.
// Returns the number of steps taken; `budget` bounds them. `complete` is set
// when centering stopped on its own criterion rather than on the budget.
int center(const Barrier &barrier, RVec &x, int budget, double decrement_tol, bool &complete)
{
    complete = true;
    int steps = 0;
    RVec grad;
    RMat hess;
    bool feasible = true;
    double fx = barrier.value(x, feasible);

    while (steps < budget)
    {
        barrier.grad_hess(x, grad, hess);

        // Factor the Hessian; escalate a diagonal ridge on breakdown.
        RVec step;
        double ridge = 0.0;
        for (;;)
        {
            Eigen::LDLT<RMat> ldlt(ridge == 0.0
                                       ? hess
                                       : RMat(hess + ridge * RMat::Identity(hess.rows(), hess.cols())));
            if (ldlt.info() == Eigen::Success)
            {
                step = ldlt.solve(-grad);
                if (step.allFinite())
                    break;
            }
            ridge = (ridge == 0.0) ? 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff())
                                   : ridge * 100.0;
            if (!std::isfinite(ridge) || ridge > 1e30)
                return steps; // hopeless factorization; give up on this stage
        }

        double decrement2 = -grad.dot(step);
        if (!(decrement2 > 2.0 * decrement_tol))
            return steps;

        // Backtracking line search, keeping iterates strictly feasible.
        double alpha = 1.0;
        double slope = grad.dot(step);
        RVec trial;
        double ftrial = 0.0;
        bool ok = false;
        for (int bt = 0; bt < 60; ++bt)
        {
            trial = x + alpha * step;
            ftrial = barrier.value(trial, feasible);
            if (feasible && ftrial <= fx + 0.25 * alpha * slope)
            {
                ok = true;
                break;
            }
            alpha *= 0.5;
        }
        ++steps;
        if (!ok)
            return steps; // step direction exhausted; centering is as good as it gets
        x = trial;
        fx = ftrial;
    }
    complete = false;
    return steps;
}

// Residual of the stationarity + complementarity conditions at (x, lambda).
double kkt_residual(const QuadForm &f0, const std::vector<QuadForm> &cons, const RVec &x,
                    const RVec &lambda)
{
    RVec stat = f0.grad(x);
    double comp = 0.0;
    for (std::size_t i = 0; i < cons.size(); ++i)
    {
        stat -= lambda[static_cast<Eigen::Index>(i)] * cons[i].grad(x);
        comp = std::max(comp, std::abs(lambda[static_cast<Eigen::Index>(i)] * cons[i].eval(x)));
    }
    return std::max(stat.cwiseAbs().maxCoeff(), comp);
}

// Newton refinement of the active-set KKT equations
//   grad f0(x) - sum_i lambda_i grad g_i(x) = 0,  g_i(x) = 0  (i active)
// to sharpen the barrier solution, followed by a tiny pull into the strict
// interior so the result can seed another barrier solve. Multipliers become
// free variables here, which removes the 1/(t g) noise floor of the barrier
// estimates. Candidates enter the active set by multiplier size or by slack,
// and constraints whose refined multiplier turns negative are dropped and
// the refinement retried. Returns false (leaving x, lambda untouched) when
// the refinement is not clearly an improvement.
bool polish(const QuadForm &f0, const std::vector<QuadForm> &cons, RVec &x, RVec &lambda,
            int &steps)
{
    const Eigen::Index n = x.size();
    const double x_scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    std::vector<std::size_t> active;
    double lam_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
    for (std::size_t i = 0; i < cons.size(); ++i)
    {
        bool big_multiplier = lambda[static_cast<Eigen::Index>(i)] > std::max(1e-9, 1e-6 * lam_max);
        bool tight = cons[i].eval(x) > -1e-6 * x_scale;
        if (big_multiplier || tight)
            active.push_back(i);
    }

    if (active.empty())
    {
        // Every multiplier is tiny and every constraint has slack: the optimum
        // is interior, so one regularized Newton solve on the objective alone
        // lands on the exact stationary point.
        RMat H = -f0.A;
        double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        H += ridge * RMat::Identity(n, n);
        RVec xp = Eigen::LDLT<RMat>(H).solve(f0.b);
        ++steps;
        if (!xp.allFinite())
            return false;
        for (const QuadForm &g : cons)
            if (g.eval(xp) >= 0.0)
                return false;
        RVec lam_new = RVec::Zero(static_cast<Eigen::Index>(cons.size()));
        if (kkt_residual(f0, cons, xp, lam_new) >= kkt_residual(f0, cons, x, lambda))
            return false;
        x = xp;
        lambda = lam_new;
        return true;
    }

    for (int attempt = 0; attempt < 4 && !active.empty(); ++attempt)
    {
        const Eigen::Index a = static_cast<Eigen::Index>(active.size());
        RVec xp = x;
        RVec lp(a);
        for (Eigen::Index j = 0; j < a; ++j)
            lp[j] = std::max(lambda[static_cast<Eigen::Index>(active[static_cast<std::size_t>(j)])], 0.0);

        bool diverged = false;
        for (int it = 0; it < 12; ++it)
        {
            RVec res(n + a);
            RMat J = RMat::Zero(n + a, n + a);
            RVec stat = f0.grad(xp);
            J.topLeftCorner(n, n) = 2.0 * f0.A;
            for (Eigen::Index j = 0; j < a; ++j)
            {
                const QuadForm &g = cons[active[static_cast<std::size_t>(j)]];
                RVec gg = g.grad(xp);
                stat -= lp[j] * gg;
                J.topLeftCorner(n, n) -= 2.0 * lp[j] * g.A;
                J.block(0, n + j, n, 1) = -gg;
                J.block(n + j, 0, 1, n) = gg.transpose();
                res[n + j] = g.eval(xp);
            }
            res.head(n) = stat;
            if (res.cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + f0.grad(xp).cwiseAbs().maxCoeff()))
                break;

            Eigen::PartialPivLU<RMat> lu(J);
            RVec delta = lu.solve(-res);
            if (!delta.allFinite() || delta.cwiseAbs().maxCoeff() > 1e6 * x_scale)
            {
                diverged = true;
                break;
            }
            xp += delta.head(n);
            lp += delta.tail(a);
            ++steps;
        }
        if (diverged)
            return false;

        // A negative multiplier marks a constraint that is not truly active;
        // drop the worst offender and refine against the smaller set.
        Eigen::Index worst = -1;
        double worst_val = -1e-10;
        for (Eigen::Index j = 0; j < a; ++j)
            if (lp[j] < worst_val)
            {
                worst_val = lp[j];
                worst = j;
            }
        if (worst >= 0)
        {
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
            continue;
        }

        // Reject refinements that left the feasible set.
        double scale = std::max(1.0, xp.cwiseAbs().maxCoeff());
        bool infeasible = false;
        for (const QuadForm &g : cons)
            if (g.eval(xp) > 1e-9 * scale)
                infeasible = true;
        if (infeasible)
            return false;

        // Nudge off the active faces along the inward multiplier direction.
        RVec inward = RVec::Zero(n);
        for (Eigen::Index j = 0; j < a; ++j)
            inward -= std::max(lp[j], 0.0) * cons[active[static_cast<std::size_t>(j)]].grad(xp);
        double norm = inward.norm();
        if (norm > 0.0)
            xp += (1e-11 * scale / norm) * inward;
        bool interior = true;
        for (const QuadForm &g : cons)
            if (g.eval(xp) >= 0.0)
                interior = false;
        if (!interior)
            return false;

        RVec lam_new = RVec::Zero(static_cast<Eigen::Index>(cons.size()));
        for (Eigen::Index j = 0; j < a; ++j)
            lam_new[static_cast<Eigen::Index>(active[static_cast<std::size_t>(j)])] =
                std::max(lp[j], 0.0);
        if (kkt_residual(f0, cons, xp, lam_new) >= kkt_residual(f0, cons, x, lambda))
            return false;

        x = xp;
        lambda = lam_new;
        return true;
    }
    return false;
}

} // namespace

QcqpSolution solve(const ConvexQuadraticProgram &prob, const QcqpOptions &opts)
{
    const Eigen::Index n = prob.dim;
    if (n <= 0)
        throw std::invalid_argument("qcqp: dimension must be >= 1.");
    if (prob.objective.A.rows() != n || prob.objective.A.cols() != n ||
        prob.objective.b.size() != n || prob.x0.size() != n)
        throw std::invalid_argument("qcqp: objective/start dimensions do not match.");
    for (const QuadForm &g : prob.constraints)
        if (g.A.rows() != n || g.A.cols() != n || g.b.size() != n)
            throw std::invalid_argument("qcqp: constraint dimensions do not match.");
    if (opts.check_psd)
    {
        if (!is_psd(-prob.objective.A, 1e-9))
            throw std::invalid_argument("qcqp: objective is not concave (A0 must be NSD).");
        for (const QuadForm &g : prob.constraints)
            if (!is_psd(g.A, 1e-9))
                throw std::invalid_argument("qcqp: constraint is not convex (Ai must be PSD).");
    }

    // Scale each constraint by its data magnitude; this only rescales the
    // multipliers and keeps the barrier Hessian well conditioned.
    std::vector<QuadForm> cons = prob.constraints;
    std::vector<double> scales(cons.size(), 1.0);
    for (std::size_t i = 0; i < cons.size(); ++i)
    {
        double s = std::max({1.0, cons[i].A.cwiseAbs().maxCoeff(), cons[i].b.cwiseAbs().maxCoeff(),
                             std::abs(cons[i].c)});
        cons[i].A /= s;
        cons[i].b /= s;
        cons[i].c /= s;
        scales[i] = s;
    }
    const int m = static_cast<int>(cons.size());

    QcqpSolution sol;
    sol.x = prob.x0;
    sol.lambda = RVec::Zero(m);

    for (const QuadForm &g : cons)
        if (g.eval(prob.x0) >= 0.0)
        {
            sol.status = QcqpStatus::infeasible_start;
            sol.objective_value = prob.objective.eval(prob.x0);
            sol.kkt_residual = std::numeric_limits<double>::infinity();
            return sol;
        }

    if (m == 0)
    {
        // Unconstrained concave quadratic: one regularized Newton solve.
        RMat H = -prob.objective.A;
        double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        H += ridge * RMat::Identity(n, n);
        sol.x = Eigen::LDLT<RMat>(H).solve(prob.objective.b);
        if (!sol.x.allFinite())
            sol.x = prob.x0;
        sol.iterations = 1;
        sol.objective_value = prob.objective.eval(sol.x);
        sol.kkt_residual = prob.objective.grad(sol.x).cwiseAbs().maxCoeff();
        sol.stage_values.push_back(sol.objective_value);
        return sol;
    }

    // Outer barrier loop: t grows geometrically until the gap bound m/t is
    // below tolerance. The first stage starts near the analytic center.
    double t = std::max(1.0, static_cast<double>(m) / std::max(1.0, std::abs(prob.objective.eval(prob.x0))));
    int budget = opts.newton_cap;
    bool out_of_budget = false;
    for (;;)
    {
        Barrier barrier{prob.objective, cons, t};
        bool complete = true;
        // The barrier value grows with t, so the decrement target must too;
        // a fixed target drowns in rounding noise once t is large.
        int used = center(barrier, sol.x, budget - sol.iterations, 1e-12 * (1.0 + t), complete);
        sol.iterations += used;
        sol.stage_values.push_back(prob.objective.eval(sol.x));
        if (!complete)
        {
            out_of_budget = true;
            break;
        }
        if (static_cast<double>(m) / t <= opts.tol)
            break;
        t *= opts.mu;
    }

    for (int i = 0; i < m; ++i)
        sol.lambda[i] = 1.0 / (t * (-cons[static_cast<std::size_t>(i)].eval(sol.x)));

    if (!out_of_budget)
    {
        polish(prob.objective, cons, sol.x, sol.lambda, sol.iterations);
        // A rejected refinement leaves only the barrier estimate; sharpen it
        // with further barrier stages until the stationarity residual sits
        // below the gap target on the data scale.
        for (int extra = 0; extra < 4 && sol.iterations < budget; ++extra)
        {
            double target =
                opts.tol * (1.0 + prob.objective.grad(sol.x).cwiseAbs().maxCoeff());
            if (kkt_residual(prob.objective, cons, sol.x, sol.lambda) <= target)
                break;
            t *= opts.mu;
            Barrier barrier{prob.objective, cons, t};
            bool complete = true;
            sol.iterations += center(barrier, sol.x, budget - sol.iterations,
                                     1e-12 * (1.0 + t), complete);
            if (!complete)
                break;
            for (int i = 0; i < m; ++i)
                sol.lambda[i] = 1.0 / (t * (-cons[static_cast<std::size_t>(i)].eval(sol.x)));
            polish(prob.objective, cons, sol.x, sol.lambda, sol.iterations);
        }
    }

    sol.status = out_of_budget ? QcqpStatus::max_iter : QcqpStatus::converged;
    sol.objective_value = prob.objective.eval(sol.x);
    sol.kkt_residual = kkt_residual(prob.objective, cons, sol.x, sol.lambda);
    return sol;
}

QcqpSolution solve(const ConvexQuadraticProgram &prob, double tol)
{
    QcqpOptions opts;
    opts.tol = tol;
    return solve(prob, opts);
}

PhaseIResult max_margin_point(const ConvexQuadraticProgram &prob, const QcqpOptions &opts)
{
    const Eigen::Index n = prob.dim;
    const std::size_t m = prob.constraints.size();
    PhaseIResult res;
    res.x = prob.x0;
    if (m == 0)
    {
        res.margin = std::numeric_limits<double>::infinity();
        res.ok = true;
        return res;
    }

    std::vector<double> scales(m, 1.0);
    for (std::size_t i = 0; i < m; ++i)
    {
        const QuadForm &g = prob.constraints[i];
        scales[i] = std::max({1.0, g.A.cwiseAbs().maxCoeff(), g.b.cwiseAbs().maxCoeff(),
                              std::abs(g.c)});
    }
    auto min_margin = [&](const RVec &x) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            worst = std::min(worst, -prob.constraints[i].eval(x) / scales[i]);
        return worst;
    };

    // Augmented program over (x, t): maximize t with g_i(x) + s_i t <= 0.
    // Starting at t0 = margin(x0) - 1 keeps every row strictly negative, so
    // the restoration itself never needs a feasible start.
    const double t0 = min_margin(prob.x0) - 1.0;
    const double t_cap = std::abs(t0) + 10.0;
    ConvexQuadraticProgram aug;
    aug.dim = n + 1;
    aug.objective.A = RMat::Zero(n + 1, n + 1);
    aug.objective.b = RVec::Zero(n + 1);
    aug.objective.b[n] = 0.5;
    aug.objective.c = 0.0;
    aug.x0 = RVec::Zero(n + 1);
    aug.x0.head(n) = prob.x0;
    aug.x0[n] = t0;
    for (std::size_t i = 0; i < m; ++i)
    {
        const QuadForm &g = prob.constraints[i];
        QuadForm gi;
        gi.A = RMat::Zero(n + 1, n + 1);
        gi.A.topLeftCorner(n, n) = g.A;
        gi.b = RVec::Zero(n + 1);
        gi.b.head(n) = g.b;
        gi.b[n] = 0.5 * scales[i];
        gi.c = g.c;
        aug.constraints.push_back(std::move(gi));
    }
    QuadForm cap;
    cap.A = RMat::Zero(n + 1, n + 1);
    cap.b = RVec::Zero(n + 1);
    cap.b[n] = 0.5;
    cap.c = -t_cap;
    aug.constraints.push_back(std::move(cap));

    QcqpOptions aug_opts = opts;
    aug_opts.tol = std::max(opts.tol, 1e-6);
    aug_opts.check_psd = false;
    QcqpSolution sol = solve(aug, aug_opts);

    RVec cand = sol.x.head(n);
    double cand_margin = min_margin(cand);
    if (cand_margin > min_margin(res.x))
        res.x = cand;
    res.margin = min_margin(res.x);
    res.ok = sol.status != QcqpStatus::infeasible_start && res.margin > 0.0;
    return res;
}

bool ensure_interior_start(ConvexQuadraticProgram &prob, double min_margin, const QcqpOptions &opts)
{
    double worst = std::numeric_limits<double>::infinity();
    for (const QuadForm &g : prob.constraints)
    {
        double s = std::max({1.0, g.A.cwiseAbs().maxCoeff(), g.b.cwiseAbs().maxCoeff(),
                             std::abs(g.c)});
        worst = std::min(worst, -g.eval(prob.x0) / s);
    }
    if (worst >= min_margin)
        return true;
    PhaseIResult fix = max_margin_point(prob, opts);
    if (!fix.ok)
        return false;
    prob.x0 = fix.x;
    return true;
}

} // namespace riswipt
