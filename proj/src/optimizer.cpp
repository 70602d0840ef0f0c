/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "riswipt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riswipt
{

void SolveOptions::validate() const
{
    if (!(gamma0 > 0.0))
        throw std::invalid_argument("solve options: gamma0 must be > 0.");
    if (!(gamma_factor > 1.0))
        throw std::invalid_argument("solve options: gamma_factor must be > 1.");
    if (!(gamma_max >= gamma0))
        throw std::invalid_argument("solve options: gamma_max must be >= gamma0.");
    if (!(inner_tol > 0.0) || !(c4_tol > 0.0) || !(aux_tol > 0.0))
        throw std::invalid_argument("solve options: tolerances must be > 0.");
    if (inner_cap < 1 || aux_cap < 1 || ramp_stages < 1)
        throw std::invalid_argument("solve options: iteration caps must be >= 1.");
    if (!(rho_floor > 0.0) || !(rho_floor < 0.5))
        throw std::invalid_argument("solve options: rho_floor must lie in (0, 0.5).");
    if (theta_grid < 8)
        throw std::invalid_argument("solve options: theta_grid must be >= 8.");
    if (!(sca.tol > 0.0) || sca.max_rounds < 1)
        throw std::invalid_argument("solve options: SCA settings out of range.");
}

std::string to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::converged: return "converged";
    case SolveStatus::non_converged_c4: return "non_converged_c4";
    case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace
{

SystemConfig scaled_constraints(const SystemConfig &cfg, double s)
{
    SystemConfig c = cfg;
    c.gamma_min = cfg.gamma_min * s;
    c.p_min = cfg.p_min * s;
    return c;
}

// Violation of the constraints the blocks must actively maintain; the split
// bounds and phase box hold by construction.
double hard_violation(const ConstraintResiduals &r)
{
    double m = r.c3;
    if (r.c1.size() > 0)
        m = std::max(m, r.c1.maxCoeff());
    if (r.c2.size() > 0)
        m = std::max(m, r.c2.maxCoeff());
    return m;
}

CMat current_gains(const ChannelSet &channels, const Solution &sol)
{
    return beam_gains(effective_channels(channels, sol.v), sol.w);
}

double coupling_residual(const SystemConfig &cfg, const Solution &sol)
{
    return sol.v.size() > 0 ? c4_violation(cfg.reflection, sol.v, sol.theta) : 0.0;
}

double penalized_value(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                       const AuxVars &aux, double gamma)
{
    double f = f_a_from_gains(cfg, current_gains(channels, sol), sol.rho, aux);
    return f - gamma * coupling_residual(cfg, sol);
}

void push_trace(Trace *tr, const SystemConfig &cfg, const ChannelSet &channels,
                const Solution &sol, const AuxVars &aux, int stage, const char *block,
                double gamma)
{
    if (tr == nullptr)
        return;
    TraceRecord rec;
    rec.stage = stage;
    rec.block = block;
    rec.gamma = gamma;
    rec.f_a_pen = penalized_value(cfg, channels, sol, aux, gamma);
    rec.objective = weighted_objective(cfg, channels, sol);
    rec.c4 = coupling_residual(cfg, sol);
    rec.max_residual = constraint_residuals(cfg, channels, sol).max_inequality();
    tr->push_back(std::move(rec));
}

int aux_block(const SystemConfig &cfg, const CMat &gains, const RVec &rho, AuxVars &aux,
              const SolveOptions &opts)
{
    double f_prev = f_a_from_gains(cfg, gains, rho, aux);
    int passes = 0;
    while (passes < opts.aux_cap)
    {
        update_aux_id_from_gains(cfg, gains, rho, aux);
        update_aux_eh_from_gains(cfg, gains, rho, aux);
        ++passes;
        double f = f_a_from_gains(cfg, gains, rho, aux);
        if (f - f_prev <= opts.aux_tol * (1.0 + std::abs(f)))
            break;
        f_prev = f;
    }
    return passes;
}

void rho_block(const SystemConfig &cfg, const CMat &gains, const AuxVars &aux, Solution &sol,
               const SolveOptions &opts)
{
    for (int k = 0; k < cfg.K; ++k)
    {
        RhoInterval iv = rho_interval_from_gains(cfg, gains, k, opts.rho_floor);
        if (iv.empty)
            continue; // restoration owns this case; keep the current split
        double r = update_rho_from_gains(cfg, gains, aux, k, opts.rho_floor);
        // Keep a hair inside the interval so the next surrogate expansion
        // point stays strictly feasible for C1/C2.
        double nudge = std::min(1e-9, 1e-3 * (iv.hi - iv.lo));
        if (iv.hi - iv.lo <= 2.0 * nudge)
            r = 0.5 * (iv.lo + iv.hi);
        else
            r = std::clamp(r, iv.lo + nudge, iv.hi - nudge);
        sol.rho[k] = std::min(r, 1.0);
    }
}

std::vector<CVec> mrt_beams(const SystemConfig &cfg, const CMat &h_eff)
{
    std::vector<CVec> w(static_cast<std::size_t>(cfg.K));
    const double amp = std::sqrt(cfg.p_t / cfg.K);
    for (int k = 0; k < cfg.K; ++k)
    {
        CVec dir = h_eff.row(k).adjoint();
        double nrm = dir.norm();
        if (nrm > 0.0)
            dir /= nrm;
        else
        {
            dir.setZero();
            dir[0] = 1.0;
        }
        w[static_cast<std::size_t>(k)] = amp * dir;
    }
    return w;
}

// Repairs feasibility of (rho, w) for the active constraint levels: splits
// move to the middle of their feasible intervals, beams to the max-margin
// point of the surrogate rows at the current expansion. Surrogate
// feasibility implies true feasibility, so a positive margin certifies the
// repair. When a split's interval is empty the current beams cannot satisfy
// C1 at any rho, so the split resets to 1/2 and the beam repair takes over;
// from round 1 on the beams re-expand around MRT, because surrogate rows
// linearized around a starved beam can cut off every useful direction.
bool restore_feasible(const SystemConfig &cfg, const ChannelSet &channels, Solution &sol,
                      const AuxVars &aux, const SolveOptions &opts, Trace *tr, int stage,
                      double gamma)
{
    for (int round = 0; round < 3; ++round)
    {
        if (hard_violation(constraint_residuals(cfg, channels, sol)) <= 0.0)
            return true;

        // Last resort: a reflection pattern tuned at a weaker constraint
        // level can make the full C1 unreachable for every w, so drop the
        // surface and let the v block rebuild it from the direct links.
        if (round == 2 && sol.v.size() > 0)
            sol.v.setZero();

        CMat gains = current_gains(channels, sol);
        for (int k = 0; k < cfg.K; ++k)
        {
            RhoInterval iv = rho_interval_from_gains(cfg, gains, k, opts.rho_floor);
            if (iv.empty)
                sol.rho[k] = 0.5;
            else if (sol.rho[k] < iv.lo || sol.rho[k] > iv.hi)
                sol.rho[k] = 0.5 * (iv.lo + iv.hi);
        }
        if (round >= 1)
            sol.w = mrt_beams(cfg, effective_channels(channels, sol.v));

        ConvexQuadraticProgram prob;
        prob.dim = 2 * cfg.M * cfg.K;
        prob.objective.A = RMat::Zero(prob.dim, prob.dim);
        prob.objective.b = RVec::Zero(prob.dim);
        prob.objective.c = 0.0;
        prob.constraints = w_constraint_forms(cfg, channels, sol);
        prob.x0 = stack_beams(sol.w);
        PhaseIResult fix = max_margin_point(prob, opts.sca.qcqp);
        if (fix.ok)
            sol.w = unstack_beams(fix.x, cfg.M, cfg.K);
        push_trace(tr, cfg, channels, sol, aux, stage, "restore", gamma);
    }
    return hard_violation(constraint_residuals(cfg, channels, sol)) <= 0.0;
}

void check_channel_dims(const SystemConfig &cfg, const ChannelSet &channels)
{
    if (channels.h_d.rows() != cfg.K || channels.h_d.cols() != cfg.M ||
        channels.h_r.rows() != cfg.K || channels.h_r.cols() != cfg.N ||
        channels.G.rows() != cfg.N || channels.G.cols() != cfg.M ||
        static_cast<int>(channels.H_r.size()) != cfg.K)
        throw std::invalid_argument("optimizer: channel dimensions do not match config.");
}

} // namespace

Solution initialize(const SystemConfig &cfg, const ChannelSet &channels, Rng &rng)
{
    cfg.validate();
    check_channel_dims(cfg, channels);
    Solution sol;
    sol.theta = RVec(cfg.N);
    for (int n = 0; n < cfg.N; ++n)
        sol.theta[n] = rng.uniform(-pi, pi);
    sol.v = project_c4(cfg.reflection, sol.theta);
    sol.rho = RVec::Constant(cfg.K, 0.5);
    sol.w = mrt_beams(cfg, effective_channels(channels, sol.v));
    return sol;
}

int alternating_solve(const SystemConfig &cfg, const ChannelSet &channels, Solution &sol,
                      AuxVars &aux, double gamma, const SolveOptions &opts, Trace *trace,
                      int stage, bool update_ris, bool &feasible_out)
{
    cfg.validate();
    opts.validate();
    check_channel_dims(cfg, channels);
    if (aux.alpha_i.size() != cfg.K)
        aux = AuxVars::zero(cfg.K);

    feasible_out = restore_feasible(cfg, channels, sol, aux, opts, trace, stage, gamma);
    if (!feasible_out)
        return 0;

    int cycles = 0;
    double f_prev = penalized_value(cfg, channels, sol, aux, gamma);
    for (int cycle = 0; cycle < opts.inner_cap; ++cycle)
    {
        cycles = cycle + 1;
        CMat gains = current_gains(channels, sol);
        aux_block(cfg, gains, sol.rho, aux, opts);
        push_trace(trace, cfg, channels, sol, aux, stage, "aux", gamma);

        rho_block(cfg, gains, aux, sol, opts);
        push_trace(trace, cfg, channels, sol, aux, stage, "rho", gamma);

        // An SCA block throws when numerical drift pushed the expansion
        // point outside the true constraint set. Restoration repairs the
        // point (recorded in the trace) and the block retries once; if the
        // retry still fails the restored point is kept as-is.
        auto guarded = [&](auto &&step) {
            try
            {
                step();
                return true;
            }
            catch (const std::exception &)
            {
            }
            if (!restore_feasible(cfg, channels, sol, aux, opts, trace, stage, gamma))
                return false;
            try
            {
                step();
            }
            catch (const std::exception &)
            {
            }
            return true;
        };

        if (!guarded([&] { sol.w = update_w(cfg, channels, sol, aux, opts.sca).w; }))
        {
            feasible_out = false;
            return cycles;
        }
        push_trace(trace, cfg, channels, sol, aux, stage, "w", gamma);

        if (update_ris && cfg.N > 0)
        {
            if (!guarded([&] { sol.v = update_v(cfg, channels, sol, aux, gamma, opts.sca).v; }))
            {
                feasible_out = false;
                return cycles;
            }
            push_trace(trace, cfg, channels, sol, aux, stage, "v", gamma);

            sol.theta = update_theta(cfg.reflection, sol.v, opts.theta_grid);
            push_trace(trace, cfg, channels, sol, aux, stage, "theta", gamma);
        }

        double f_now = penalized_value(cfg, channels, sol, aux, gamma);
        if (std::abs(f_now - f_prev) <= opts.inner_tol * (1.0 + std::abs(f_now)))
            break;
        f_prev = f_now;
    }
    return cycles;
}

namespace
{

// Shared tail of the three entry points: audit the final point and fill the
// result. C4 is skipped for the no-surface baseline, whose v is fixed at 0.
void finalize_result(const SystemConfig &cfg, const ChannelSet &channels, Solution sol,
                     SolveResult &out, bool c4_applies)
{
    out.residuals = constraint_residuals(cfg, channels, sol);
    out.metrics = evaluate_metrics(cfg, channels, sol);
    if (!c4_applies)
    {
        out.residuals.c4 = 0.0;
        out.metrics.c4_violation = 0.0;
    }
    bool audit_ok =
        out.residuals.max_inequality() <= 1e-6 && out.residuals.c4 <= 1e-9;
    if (!audit_ok && out.status == SolveStatus::converged)
        out.status = SolveStatus::infeasible;
    out.sol = std::move(sol);
}

// Ramp-then-optimize shared by the fixed-v baselines.
void fixed_v_solve(const SystemConfig &cfg, const ChannelSet &channels, Solution &sol,
                   SolveResult &out, const SolveOptions &opts)
{
    Trace *tr = opts.collect_trace ? &out.trace : nullptr;
    int stage = 0;
    bool feas = true;
    bool need_ramp = hard_violation(constraint_residuals(cfg, channels, sol)) > 0.0;
    if (need_ramp)
    {
        for (int j = 0; j < opts.ramp_stages; ++j)
        {
            double s = opts.ramp_stages == 1
                           ? 1.0
                           : static_cast<double>(j) / (opts.ramp_stages - 1);
            SystemConfig cfg_s = scaled_constraints(cfg, s);
            ++stage;
            out.inner_iters +=
                alternating_solve(cfg_s, channels, sol, out.aux, 0.0, opts, tr, stage, false, feas);
        }
    }
    else
    {
        ++stage;
        out.inner_iters +=
            alternating_solve(cfg, channels, sol, out.aux, 0.0, opts, tr, stage, false, feas);
    }
    if (!feas)
        out.status = SolveStatus::infeasible;
    out.outer_stages = stage;
}

} // namespace

SolveResult penalty_solve(const SystemConfig &cfg, const ChannelSet &channels,
                          const SolveOptions &opts, Rng &rng)
{
    cfg.validate();
    opts.validate();
    check_channel_dims(cfg, channels);

    SolveResult out;
    out.aux = AuxVars::zero(cfg.K);
    Solution sol = initialize(cfg, channels, rng);
    Trace *tr = opts.collect_trace ? &out.trace : nullptr;
    int stage = 0;
    bool feas = true;

    bool need_ramp = hard_violation(constraint_residuals(cfg, channels, sol)) > 0.0;
    if (need_ramp)
    {
        for (int j = 0; j < opts.ramp_stages; ++j)
        {
            double s = opts.ramp_stages == 1
                           ? 1.0
                           : static_cast<double>(j) / (opts.ramp_stages - 1);
            SystemConfig cfg_s = scaled_constraints(cfg, s);
            ++stage;
            out.inner_iters += alternating_solve(cfg_s, channels, sol, out.aux, opts.gamma0, opts,
                                                 tr, stage, true, feas);
        }
        if (!feas)
            out.status = SolveStatus::infeasible;
        out.gamma_final = opts.gamma0;
    }

    if (out.status != SolveStatus::infeasible && cfg.N > 0)
    {
        double gamma = need_ramp ? opts.gamma0 * opts.gamma_factor : opts.gamma0;
        for (;; gamma *= opts.gamma_factor)
        {
            if (gamma > opts.gamma_max * (1.0 + 1e-12))
            {
                out.status = SolveStatus::non_converged_c4;
                break;
            }
            ++stage;
            out.inner_iters +=
                alternating_solve(cfg, channels, sol, out.aux, gamma, opts, tr, stage, true, feas);
            out.gamma_final = gamma;
            if (!feas)
            {
                out.status = SolveStatus::infeasible;
                break;
            }
            if (coupling_residual(cfg, sol) <= opts.c4_tol)
                break;
        }
    }
    else if (out.status != SolveStatus::infeasible && cfg.N == 0 && !need_ramp)
    {
        ++stage;
        out.inner_iters +=
            alternating_solve(cfg, channels, sol, out.aux, 0.0, opts, tr, stage, true, feas);
        if (!feas)
            out.status = SolveStatus::infeasible;
    }

    if (out.status != SolveStatus::infeasible && cfg.N > 0)
    {
        // Exact coupling projection, then re-optimize everything the fixed v
        // still allows.
        sol.v = project_c4(cfg.reflection, sol.theta);
        ++stage;
        push_trace(tr, cfg, channels, sol, out.aux, stage, "project", out.gamma_final);
        out.inner_iters +=
            alternating_solve(cfg, channels, sol, out.aux, 0.0, opts, tr, stage, false, feas);
        if (!feas)
            out.status = SolveStatus::infeasible;
    }
    else if (out.status == SolveStatus::infeasible && cfg.N > 0)
    {
        sol.v = project_c4(cfg.reflection, sol.theta);
    }

    out.outer_stages = stage;
    finalize_result(cfg, channels, std::move(sol), out, true);
    return out;
}

SolveResult no_ris_baseline(const SystemConfig &cfg, const ChannelSet &channels,
                            const SolveOptions &opts)
{
    cfg.validate();
    opts.validate();
    check_channel_dims(cfg, channels);

    SolveResult out;
    out.aux = AuxVars::zero(cfg.K);
    Solution sol;
    sol.theta = RVec::Zero(cfg.N);
    sol.v = CVec::Zero(cfg.N);
    sol.rho = RVec::Constant(cfg.K, 0.5);
    sol.w = mrt_beams(cfg, effective_channels(channels, sol.v));

    fixed_v_solve(cfg, channels, sol, out, opts);
    finalize_result(cfg, channels, std::move(sol), out, false);
    return out;
}

SolveResult random_phase_baseline(const SystemConfig &cfg, const ChannelSet &channels,
                                  const SolveOptions &opts, Rng &rng)
{
    SolveResult out;
    out.aux = AuxVars::zero(cfg.K);
    Solution sol = initialize(cfg, channels, rng);
    fixed_v_solve(cfg, channels, sol, out, opts);
    finalize_result(cfg, channels, std::move(sol), out, true);
    return out;
}

} // namespace riswipt
