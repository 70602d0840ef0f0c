/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#ifndef riswipt_beamforming_H
#define riswipt_beamforming_H

#include "riswipt/fp.hpp"
#include "riswipt/model.hpp"
#include "riswipt/qcqp.hpp"

namespace riswipt
{

// Interior-point settings for the SCA subproblems. Looser than the
// standalone solver defaults: the surrogate is rebuilt every round, so
// sub-microscopic duality gaps buy nothing here.
inline QcqpOptions sca_qcqp_defaults()
{
    QcqpOptions q;
    q.tol = 1e-7;
    q.mu = 15.0;
    return q;
}

struct ScaOptions
{
    double tol = 1e-4;                      // relative objective improvement stop
    int max_rounds = 10;                    // successive convexifications per block update
    QcqpOptions qcqp = sca_qcqp_defaults(); // inner solver settings
};

struct ScaResult
{
    std::vector<CVec> w;       // updated beamformers
    std::vector<double> trace; // surrogate objective after each accepted round (bits/s/Hz)
    int rounds = 0;
    bool interior_found = true; // false when no strictly feasible start existed
};

// Surrogate constraint rows at expansion point sol.w in stacked real
// coordinates (beam i occupies rows [2*M*i, 2*M*(i+1))): the total power
// ball, the convexified SINR floors (omitted when gamma_min <= 0), and the
// linearized harvesting floors (omitted when p_min <= 0). Any point
// satisfying these rows satisfies the true C1 and C2, and the rows equal
// the true constraint values at the expansion point itself, so feasibility
// restoration may call this at an infeasible sol.w.
std::vector<QuadForm> w_constraint_forms(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol);

// Convex surrogate of the beamformer subproblem at expansion point sol.w.
// The objective is the concave surrogate of f_A in bits/s/Hz, exact in the
// quadratic terms, so objective.eval(stack(w)) reproduces f_a_from_gains at
// any w. Constraints are w_constraint_forms. Throws when the expansion
// point violates the true C1-C3.
ConvexQuadraticProgram build_w_subproblem(const SystemConfig &cfg, const ChannelSet &channels,
                                          const Solution &sol, const AuxVars &aux);

// One SCA pass over w: repeatedly solve the surrogate at the current point
// until the objective gain falls below opts.tol. Never returns a w with a
// lower f_A than the input. Requires a strictly feasible sol.w; when the
// start sits on a constraint face a max-margin restoration runs first.
ScaResult update_w(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                   const AuxVars &aux, const ScaOptions &opts = {});

// Stacks per-beam complex vectors into the subproblem coordinate order.
RVec stack_beams(const std::vector<CVec> &w);
std::vector<CVec> unstack_beams(const RVec &x, Eigen::Index M, Eigen::Index K);

} // namespace riswipt

#endif
