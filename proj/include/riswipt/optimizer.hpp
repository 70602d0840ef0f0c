/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#ifndef riswipt_optimizer_H
#define riswipt_optimizer_H

#include "riswipt/beamforming.hpp"
#include "riswipt/fp.hpp"
#include "riswipt/model.hpp"
#include "riswipt/reflection.hpp"

#include <string>
#include <vector>

namespace riswipt
{

struct SolveOptions
{
    double gamma0 = 1e-2;       // initial coupling-penalty weight
    double gamma_factor = 10.0; // penalty growth per outer stage
    double gamma_max = 1e6;     // penalty cap
    double inner_tol = 1e-5;    // relative penalized-objective change ending one stage
    int inner_cap = 50;         // max block cycles per stage
    double c4_tol = 1e-6;       // coupling violation ending the penalty loop
    int ramp_stages = 3;        // constraint ramp length when the start is infeasible
    double rho_floor = 1e-6;    // lower bound keeping the split strictly positive
    double aux_tol = 1e-12;     // relative f_A change ending the auxiliary fixed point
    int aux_cap = 400;          // max auxiliary passes per block visit
    int theta_grid = 2048;      // grid resolution of the per-element phase update
    bool collect_trace = true;  // record per-block TraceRecords
    ScaOptions sca;             // settings of the w and v SCA blocks

    void validate() const;
};

enum class SolveStatus
{
    converged,
    non_converged_c4, // penalty cap reached before the coupling tolerance
    infeasible        // no feasible point found, or the final audit failed
};

std::string to_string(SolveStatus s);

// One record per block update. Restoration blocks may decrease the
// penalized objective (they repair feasibility); all other blocks are
// ascent steps within their stage.
struct TraceRecord
{
    int stage = 0;            // outer stage counter (ramp, penalty, refine)
    std::string block;        // "restore", "aux", "rho", "w", "v", "theta", "project"
    double gamma = 0.0;       // penalty weight active in this stage
    double f_a_pen = 0.0;     // penalized reformulated objective, bits/s/Hz
    double objective = 0.0;   // true weighted objective, bits/s/Hz
    double c4 = 0.0;          // coupling residual
    double max_residual = 0.0; // largest inequality residual
};

using Trace = std::vector<TraceRecord>;

struct SolveResult
{
    Solution sol;
    AuxVars aux;
    Metrics metrics;
    ConstraintResiduals residuals;
    SolveStatus status = SolveStatus::converged;
    int outer_stages = 0; // alternating stages run (ramp + penalty + refine)
    int inner_iters = 0;  // block cycles summed over stages
    double gamma_final = 0.0;
    Trace trace;
};

// MRT beamformers at exactly the power budget, mid-range splits, uniform
// phases, and the coupling-feasible v for those phases.
Solution initialize(const SystemConfig &cfg, const ChannelSet &channels, Rng &rng);

// One alternating stage at fixed penalty weight: repairs feasibility if
// needed, then cycles aux -> rho -> w -> v -> theta until the relative
// penalized-objective change drops below opts.inner_tol or opts.inner_cap
// cycles. Returns the cycle count; false in feasible_out when restoration
// failed.
int alternating_solve(const SystemConfig &cfg, const ChannelSet &channels, Solution &sol,
                      AuxVars &aux, double gamma, const SolveOptions &opts, Trace *trace,
                      int stage, bool update_ris, bool &feasible_out);

// Full solve: constraint ramp when the initial point is infeasible, outer
// penalty loop on gamma, exact projection onto the coupling constraint,
// fixed-v refinement, and a final audit.
SolveResult penalty_solve(const SystemConfig &cfg, const ChannelSet &channels,
                          const SolveOptions &opts, Rng &rng);

// v = 0 (no surface): optimizes beams and splits only. The coupling
// residual is reported as zero since C4 does not exist without a surface.
SolveResult no_ris_baseline(const SystemConfig &cfg, const ChannelSet &channels,
                            const SolveOptions &opts);

// Uniform random phases, v fixed at their coupling-feasible projection.
SolveResult random_phase_baseline(const SystemConfig &cfg, const ChannelSet &channels,
                                  const SolveOptions &opts, Rng &rng);

} // namespace riswipt

#endif
