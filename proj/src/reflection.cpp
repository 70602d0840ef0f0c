/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "riswipt/reflection.hpp"

#include <cmath>
#include <stdexcept>

namespace riswipt
{

double reflection_amplitude(const ReflectionModel &model, double theta)
{
    model.validate();
    return model.amplitude(theta);
}

CVec project_c4(const ReflectionModel &model, const RVec &theta)
{
    model.validate();
    CVec v(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n)
        v[n] = std::polar(model.amplitude(theta[n]), theta[n]);
    return v;
}

double optimal_theta(const ReflectionModel &model, c64 v, int grid_points)
{
    model.validate();
    if (grid_points < 8)
        throw std::invalid_argument("optimal_theta: grid_points must be >= 8.");
    const double mag = std::abs(v);
    const double ang = std::arg(v);
    // Maximizing 2 f(theta) |v| cos(theta - arg v) - f(theta)^2 minimizes the
    // squared distance; the |v|^2 term is constant.
    auto score = [&](double th) {
        double f = model.amplitude(th);
        return 2.0 * f * mag * std::cos(th - ang) - f * f;
    };
    const double step = 2.0 * pi / grid_points;
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid_points; ++g)
    {
        double th = -pi + step * g;
        double val = score(th);
        if (val > best_val)
        {
            best_val = val;
            best = g;
        }
    }
    // Refine around the best cell; the score is 2 pi periodic, so the bracket
    // may cross +-pi and the result is wrapped back afterwards.
    double lo = -pi + step * (best - 1);
    double hi = -pi + step * (best + 1);
    double th = golden_section_max(score, lo, hi, 1e-12);
    if (score(-pi + step * best) > score(th))
        th = -pi + step * best;
    th = std::remainder(th, 2.0 * pi);
    if (th <= -pi)
        th = pi; // remainder returns (-pi, pi]; keep the +pi representative
    return th;
}

RVec update_theta(const ReflectionModel &model, const CVec &v, int grid_points)
{
    RVec theta(v.size());
    for (Eigen::Index n = 0; n < v.size(); ++n)
        theta[n] = optimal_theta(model, v[n], grid_points);
    return theta;
}

namespace
{

void check_v_inputs(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                    const AuxVars &aux, double gamma_penalty)
{
    cfg.validate();
    if (cfg.N <= 0)
        throw std::invalid_argument("v subproblem: requires at least one RIS element.");
    if (channels.h_d.rows() != cfg.K || channels.h_d.cols() != cfg.M ||
        static_cast<int>(channels.H_r.size()) != cfg.K)
        throw std::invalid_argument("v subproblem: channel dimensions do not match config.");
    if (static_cast<int>(sol.w.size()) != cfg.K || sol.rho.size() != cfg.K ||
        sol.v.size() != cfg.N || sol.theta.size() != cfg.N)
        throw std::invalid_argument("v subproblem: solution dimensions do not match config.");
    if (aux.alpha_i.size() != cfg.K || aux.beta_i.size() != cfg.K || aux.alpha_e.size() != cfg.K ||
        aux.beta_e.rows() != cfg.K || aux.beta_e.cols() != cfg.K)
        throw std::invalid_argument("v subproblem: auxiliary dimensions do not match config.");
    if (!(gamma_penalty >= 0.0))
        throw std::invalid_argument("v subproblem: penalty weight must be >= 0.");
    for (int k = 0; k < cfg.K; ++k)
        if (!(sol.rho[k] > 0.0) || sol.rho[k] > 1.0)
            throw std::invalid_argument("v subproblem: rho must lie in (0, 1].");
}

// Affine beam gains in v: s_{k,i}(v) = d(k,i) + v^H u(k,i).
struct VAffineGains
{
    CMat d;                         // K x K direct parts
    std::vector<std::vector<CVec>> u; // u[k][i] = H_{r,k} w_i
    CMat s_t;                       // gains at the expansion point
};

VAffineGains v_affine_gains(const SystemConfig &cfg, const ChannelSet &channels,
                            const Solution &sol)
{
    const Eigen::Index K = cfg.K;
    VAffineGains g;
    g.d.resize(K, K);
    g.s_t.resize(K, K);
    g.u.resize(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k)
    {
        g.u[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(K));
        for (Eigen::Index i = 0; i < K; ++i)
        {
            const CVec &wi = sol.w[static_cast<std::size_t>(i)];
            g.d(k, i) = (channels.h_d.row(k) * wi).value();
            CVec uk = channels.H_r[static_cast<std::size_t>(k)] * wi;
            g.s_t(k, i) = g.d(k, i) + sol.v.dot(uk); // Eigen dot conjugates the left side
            g.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = std::move(uk);
        }
    }
    return g;
}

std::vector<QuadForm> v_forms_impl(const SystemConfig &cfg, const Solution &sol,
                                   const VAffineGains &ag)
{
    const Eigen::Index N = cfg.N;
    const Eigen::Index K = cfg.K;
    const Eigen::Index n = 2 * N;
    const CMat &d = ag.d;
    const CMat &s_t = ag.s_t;
    std::vector<QuadForm> cons;

    if (cfg.gamma_min > 0.0)
        for (Eigen::Index k = 0; k < K; ++k)
        {
            QuadForm g;
            g.A = RMat::Zero(n, n);
            g.b = RVec::Zero(n);
            g.c = cfg.gamma_min * (cfg.sigma2 + cfg.delta2 / sol.rho[k]);
            for (Eigen::Index i = 0; i < K; ++i)
            {
                if (i == k)
                    continue;
                const CVec &uki = ag.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                g.A += cfg.gamma_min * hermitian_to_real(uki * uki.adjoint());
                g.b += cfg.gamma_min * linear_to_real(CVec(std::conj(d(k, i)) * uki));
                g.c += cfg.gamma_min * std::norm(d(k, i));
            }
            const CVec &ukk = ag.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
            g.b -= linear_to_real(CVec(std::conj(s_t(k, k)) * ukk));
            g.c += std::norm(s_t(k, k)) - 2.0 * std::real(std::conj(s_t(k, k)) * d(k, k));
            cons.push_back(std::move(g));
        }

    if (cfg.p_min > 0.0)
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double e = cfg.eta * (1.0 - sol.rho[k]);
            QuadForm g;
            g.A = RMat::Zero(n, n);
            g.b = RVec::Zero(n);
            g.c = cfg.p_min;
            for (Eigen::Index i = 0; i < K; ++i)
            {
                const CVec &uki = ag.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                g.b -= e * linear_to_real(CVec(std::conj(s_t(k, i)) * uki));
                g.c -= e * (2.0 * std::real(std::conj(s_t(k, i)) * d(k, i)) - std::norm(s_t(k, i)));
            }
            cons.push_back(std::move(g));
        }

    return cons;
}

} // namespace

std::vector<QuadForm> v_constraint_forms(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol)
{
    return v_forms_impl(cfg, sol, v_affine_gains(cfg, channels, sol));
}

ConvexQuadraticProgram build_v_subproblem(const SystemConfig &cfg, const ChannelSet &channels,
                                          const Solution &sol, const AuxVars &aux,
                                          double gamma_penalty)
{
    check_v_inputs(cfg, channels, sol, aux, gamma_penalty);
    const Eigen::Index N = cfg.N;
    const Eigen::Index K = cfg.K;
    const Eigen::Index n = 2 * N;
    const double inv_ln2 = 1.0 / ln2;

    const VAffineGains ag = v_affine_gains(cfg, channels, sol);
    const CMat &d = ag.d;
    const std::vector<std::vector<CVec>> &u = ag.u;

    {
        const RVec s = sinr_from_gains(cfg, ag.s_t, sol.rho);
        const RVec ph = harvested_power_from_gains(cfg, ag.s_t, sol.rho);
        for (int k = 0; k < cfg.K; ++k)
        {
            if (cfg.gamma_min - s[k] > 1e-9 * (1.0 + cfg.gamma_min))
                throw std::invalid_argument("v subproblem: expansion point violates the SINR floor.");
            if (cfg.p_min - ph[k] > 1e-9 * (1.0 + cfg.p_min))
                throw std::invalid_argument(
                    "v subproblem: expansion point violates the harvesting floor.");
        }
    }

    RVec quad_w(K);
    for (Eigen::Index k = 0; k < K; ++k)
        quad_w[k] = std::norm(aux.beta_i[k]) * sol.rho[k] +
                    cfg.lambda_bar * aux.beta_e.row(k).squaredNorm() * cfg.eta_bar() *
                        (1.0 - sol.rho[k]);

    ConvexQuadraticProgram prob;
    prob.dim = n;
    prob.objective.A = RMat::Zero(n, n);
    prob.objective.b = RVec::Zero(n);
    prob.objective.c = 0.0;

    for (Eigen::Index k = 0; k < K; ++k)
    {
        double ci = std::sqrt(sol.rho[k] * (1.0 + aux.alpha_i[k]));
        double se = cfg.lambda_bar *
                    std::sqrt(cfg.eta_bar() * (1.0 - sol.rho[k]) * (1.0 + aux.alpha_e[k]));
        for (Eigen::Index i = 0; i < K; ++i)
        {
            const CVec &uki = u[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            // Quadratic part of -quad_w_k |s_{k,i}(v)|^2.
            prob.objective.A -= inv_ln2 * quad_w[k] * hermitian_to_real(uki * uki.adjoint());
            prob.objective.b -=
                inv_ln2 * quad_w[k] * linear_to_real(CVec(std::conj(d(k, i)) * uki));
            prob.objective.c -= inv_ln2 * quad_w[k] * std::norm(d(k, i));
            // Harvested-power cross term of f_A.
            c64 be = std::conj(aux.beta_e(k, i));
            prob.objective.b += inv_ln2 * se * linear_to_real(CVec(be * uki));
            prob.objective.c += inv_ln2 * 2.0 * se * std::real(be * d(k, i));
        }
        // Information cross term of f_A (beam k only).
        c64 bi = std::conj(aux.beta_i[k]);
        const CVec &ukk = u[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        prob.objective.b += inv_ln2 * ci * linear_to_real(CVec(bi * ukk));
        prob.objective.c += inv_ln2 * 2.0 * ci * std::real(bi * d(k, k));
        // Auxiliary constants.
        prob.objective.c +=
            inv_ln2 * (std::log1p(aux.alpha_i[k]) - aux.alpha_i[k] -
                       std::norm(aux.beta_i[k]) * (sol.rho[k] * cfg.sigma2 + cfg.delta2) +
                       cfg.lambda_bar * (std::log1p(aux.alpha_e[k]) - aux.alpha_e[k] -
                                         aux.beta_e.row(k).squaredNorm() * cfg.sigma2));
    }

    // Coupling penalty -gamma ||v - f(theta) e^{j theta}||^2, in the same
    // bits-scaled units as the penalized objective used by the outer loop.
    if (gamma_penalty > 0.0)
    {
        CVec target = project_c4(cfg.reflection, sol.theta);
        prob.objective.A -= gamma_penalty * RMat::Identity(n, n);
        prob.objective.b += gamma_penalty * linear_to_real(target);
        prob.objective.c -= gamma_penalty * target.squaredNorm();
    }

    prob.constraints = v_forms_impl(cfg, sol, ag);
    prob.x0 = complex_stack(sol.v);
    return prob;
}

VUpdateResult update_v(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                       const AuxVars &aux, double gamma_penalty, const ScaOptions &opts)
{
    check_v_inputs(cfg, channels, sol, aux, gamma_penalty);
    VUpdateResult res;
    res.v = sol.v;

    Solution cur = sol;
    auto penalized = [&](const CVec &v) {
        CMat gains = beam_gains(effective_channels(channels, v), cur.w);
        return f_a_from_gains(cfg, gains, cur.rho, aux) -
               gamma_penalty * c4_violation(cfg.reflection, v, cur.theta);
    };
    double f_cur = penalized(cur.v);

    for (int round = 0; round < opts.max_rounds; ++round)
    {
        ConvexQuadraticProgram prob = build_v_subproblem(cfg, channels, cur, aux, gamma_penalty);
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
        CVec v_new = complex_unstack(qs.x);
        double f_new = penalized(v_new);
        if (!std::isfinite(f_new) || f_new < f_cur - 1e-9 * (1.0 + std::abs(f_cur)))
            break;
        cur.v = std::move(v_new);
        res.rounds = round + 1;
        res.trace.push_back(f_new);
        bool converged = f_new - f_cur <= opts.tol * (1.0 + std::abs(f_cur));
        f_cur = std::max(f_cur, f_new);
        if (converged)
            break;
    }

    res.v = cur.v;
    return res;
}

} // namespace riswipt
