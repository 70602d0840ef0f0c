/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "riswipt/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace riswipt
{

RVec stack_beams(const std::vector<CVec> &w)
{
    if (w.empty())
        throw std::invalid_argument("stack_beams: w must hold at least one beam.");
    const Eigen::Index M = w[0].size();
    RVec x(2 * M * static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        if (w[i].size() != M)
            throw std::invalid_argument("stack_beams: all beams must share one length.");
        x.segment(2 * M * static_cast<Eigen::Index>(i), 2 * M) = complex_stack(w[i]);
    }
    return x;
}

std::vector<CVec> unstack_beams(const RVec &x, Eigen::Index M, Eigen::Index K)
{
    if (M <= 0 || K <= 0 || x.size() != 2 * M * K)
        throw std::invalid_argument("unstack_beams: size must equal 2*M*K.");
    std::vector<CVec> w(static_cast<std::size_t>(K));
    for (Eigen::Index i = 0; i < K; ++i)
        w[static_cast<std::size_t>(i)] = complex_unstack(x.segment(2 * M * i, 2 * M));
    return w;
}

namespace
{

void check_w_inputs(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                    const AuxVars &aux)
{
    cfg.validate();
    if (channels.h_d.rows() != cfg.K || channels.h_d.cols() != cfg.M)
        throw std::invalid_argument("w subproblem: channel dimensions do not match config.");
    if (static_cast<int>(sol.w.size()) != cfg.K || sol.rho.size() != cfg.K)
        throw std::invalid_argument("w subproblem: solution dimensions do not match config.");
    for (const CVec &wk : sol.w)
        if (wk.size() != cfg.M)
            throw std::invalid_argument("w subproblem: beam length must equal M.");
    if (aux.alpha_i.size() != cfg.K || aux.beta_i.size() != cfg.K || aux.alpha_e.size() != cfg.K ||
        aux.beta_e.rows() != cfg.K || aux.beta_e.cols() != cfg.K)
        throw std::invalid_argument("w subproblem: auxiliary dimensions do not match config.");
    for (int k = 0; k < cfg.K; ++k)
        if (!(sol.rho[k] > 0.0) || sol.rho[k] > 1.0)
            throw std::invalid_argument("w subproblem: rho must lie in (0, 1].");
}

} // namespace

std::vector<QuadForm> w_constraint_forms(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol)
{
    const Eigen::Index M = cfg.M;
    const Eigen::Index K = cfg.K;
    const Eigen::Index n = 2 * M * K;
    const CMat h_eff = effective_channels(channels, sol.v);

    std::vector<QuadForm> cons;

    // Total power ball.
    QuadForm ball;
    ball.A = RMat::Identity(n, n);
    ball.b = RVec::Zero(n);
    ball.c = -cfg.p_t;
    cons.push_back(std::move(ball));

    // Convexified SINR floors: the concave |h_k w_k|^2 term is linearized at
    // the expansion point, the interference stays quadratic.
    if (cfg.gamma_min > 0.0)
        for (Eigen::Index k = 0; k < K; ++k)
        {
            CVec hk = h_eff.row(k).transpose().conjugate();
            RMat Rk = hermitian_to_real(hk * hk.transpose().conjugate());
            CVec hw = hk * (h_eff.row(k) * sol.w[static_cast<std::size_t>(k)]).value();
            double tk = std::norm((h_eff.row(k) * sol.w[static_cast<std::size_t>(k)]).value());
            QuadForm g;
            g.A = RMat::Zero(n, n);
            for (Eigen::Index i = 0; i < K; ++i)
                if (i != k)
                    g.A.block(2 * M * i, 2 * M * i, 2 * M, 2 * M) = cfg.gamma_min * Rk;
            g.b = RVec::Zero(n);
            g.b.segment(2 * M * k, 2 * M) = -linear_to_real(hw);
            g.c = cfg.gamma_min * (cfg.sigma2 + cfg.delta2 / sol.rho[k]) + tk;
            cons.push_back(std::move(g));
        }

    // Linearized harvested-power floors (affine, hence convex).
    if (cfg.p_min > 0.0)
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double e = cfg.eta * (1.0 - sol.rho[k]);
            CVec hk = h_eff.row(k).transpose().conjugate();
            QuadForm g;
            g.A = RMat::Zero(n, n);
            g.b = RVec::Zero(n);
            g.c = cfg.p_min;
            for (Eigen::Index i = 0; i < K; ++i)
            {
                c64 ski = (h_eff.row(k) * sol.w[static_cast<std::size_t>(i)]).value();
                g.b.segment(2 * M * i, 2 * M) = -e * linear_to_real(hk * ski);
                g.c += e * std::norm(ski);
            }
            cons.push_back(std::move(g));
        }

    return cons;
}

ConvexQuadraticProgram build_w_subproblem(const SystemConfig &cfg, const ChannelSet &channels,
                                          const Solution &sol, const AuxVars &aux)
{
    check_w_inputs(cfg, channels, sol, aux);
    const Eigen::Index M = cfg.M;
    const Eigen::Index K = cfg.K;
    const Eigen::Index n = 2 * M * K;
    const double inv_ln2 = 1.0 / ln2;

    const CMat h_eff = effective_channels(channels, sol.v);

    {
        // The surrogate SINR floors only cover the true ones around a
        // feasible expansion point.
        const CMat gains = beam_gains(h_eff, sol.w);
        const RVec s = sinr_from_gains(cfg, gains, sol.rho);
        const RVec ph = harvested_power_from_gains(cfg, gains, sol.rho);
        double power = 0.0;
        for (const CVec &wk : sol.w)
            power += wk.squaredNorm();
        if (power > cfg.p_t + 1e-9 * (1.0 + cfg.p_t))
            throw std::invalid_argument("w subproblem: expansion point violates the power budget.");
        for (int k = 0; k < cfg.K; ++k)
        {
            if (cfg.gamma_min - s[k] > 1e-9 * (1.0 + cfg.gamma_min))
                throw std::invalid_argument("w subproblem: expansion point violates the SINR floor.");
            if (cfg.p_min - ph[k] > 1e-9 * (1.0 + cfg.p_min))
                throw std::invalid_argument(
                    "w subproblem: expansion point violates the harvesting floor.");
        }
    }

    // Shared per-user pieces: rank-one forms H_k = h_k^H h_k and the weight
    // that multiplies sum_i |h_k w_i|^2 in the reformulated objective.
    std::vector<RMat> Rk(static_cast<std::size_t>(K));
    RVec quad_w(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        CVec hk = h_eff.row(k).transpose().conjugate(); // column copy of h_k^H
        Rk[static_cast<std::size_t>(k)] = hermitian_to_real(hk * hk.transpose().conjugate());
        double be2 = aux.beta_e.row(k).squaredNorm();
        quad_w[k] = std::norm(aux.beta_i[k]) * sol.rho[k] +
                    cfg.lambda_bar * be2 * cfg.eta_bar() * (1.0 - sol.rho[k]);
    }
    RMat block = RMat::Zero(2 * M, 2 * M);
    for (Eigen::Index k = 0; k < K; ++k)
        block += quad_w[k] * Rk[static_cast<std::size_t>(k)];

    ConvexQuadraticProgram prob;
    prob.dim = n;
    prob.objective.A = RMat::Zero(n, n);
    prob.objective.b = RVec::Zero(n);
    prob.objective.c = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
        prob.objective.A.block(2 * M * i, 2 * M * i, 2 * M, 2 * M) = -inv_ln2 * block;

    for (Eigen::Index i = 0; i < K; ++i)
    {
        // Linear coefficient of beam i: its own information term plus the
        // harvested-power cross terms of every user.
        CVec row = CVec::Zero(M);
        double ci = std::sqrt(sol.rho[i] * (1.0 + aux.alpha_i[i]));
        row += ci * std::conj(aux.beta_i[i]) * h_eff.row(i).transpose();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double ce = cfg.eta_bar() * (1.0 - sol.rho[k]);
            double sk = cfg.lambda_bar * std::sqrt(ce * (1.0 + aux.alpha_e[k]));
            row += sk * std::conj(aux.beta_e(k, i)) * h_eff.row(k).transpose();
        }
        prob.objective.b.segment(2 * M * i, 2 * M) = inv_ln2 * linear_to_real(row.conjugate());
    }

    for (Eigen::Index k = 0; k < K; ++k)
        prob.objective.c +=
            inv_ln2 * (std::log1p(aux.alpha_i[k]) - aux.alpha_i[k] -
                       std::norm(aux.beta_i[k]) * (sol.rho[k] * cfg.sigma2 + cfg.delta2) +
                       cfg.lambda_bar * (std::log1p(aux.alpha_e[k]) - aux.alpha_e[k] -
                                         aux.beta_e.row(k).squaredNorm() * cfg.sigma2));

    prob.constraints = w_constraint_forms(cfg, channels, sol);
    prob.x0 = stack_beams(sol.w);
    return prob;
}

ScaResult update_w(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                   const AuxVars &aux, const ScaOptions &opts)
{
    check_w_inputs(cfg, channels, sol, aux);
    ScaResult res;
    res.w = sol.w;

    Solution cur = sol;
    CMat h_eff = effective_channels(channels, sol.v);
    double f_cur = f_a_from_gains(cfg, beam_gains(h_eff, cur.w), cur.rho, aux);

    for (int round = 0; round < opts.max_rounds; ++round)
    {
        ConvexQuadraticProgram prob = build_w_subproblem(cfg, channels, cur, aux);
        if (!ensure_interior_start(prob, 1e-12, opts.qcqp))
        {
            res.interior_found = false;
            break;
        }
        QcqpSolution qs = solve(prob, opts.qcqp);
        if (qs.status == QcqpStatus::infeasible_start)
        {
            res.interior_found = false;
            break;
        }
        std::vector<CVec> w_new = unstack_beams(qs.x, cfg.M, cfg.K);
        double f_new = f_a_from_gains(cfg, beam_gains(h_eff, w_new), cur.rho, aux);
        if (!std::isfinite(f_new) || f_new < f_cur - 1e-9 * (1.0 + std::abs(f_cur)))
            break; // keep the no-worse iterate
        cur.w = std::move(w_new);
        res.rounds = round + 1;
        res.trace.push_back(f_new);
        bool converged = f_new - f_cur <= opts.tol * (1.0 + std::abs(f_cur));
        f_cur = std::max(f_cur, f_new);
        if (converged)
            break;
    }

    res.w = cur.w;
    return res;
}

} // namespace riswipt
