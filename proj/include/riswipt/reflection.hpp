/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#ifndef riswipt_reflection_H
#define riswipt_reflection_H

#include "riswipt/beamforming.hpp"
#include "riswipt/fp.hpp"
#include "riswipt/model.hpp"
#include "riswipt/qcqp.hpp"

namespace riswipt
{

// Amplitude of one element under the coupled phase/amplitude law.
double reflection_amplitude(const ReflectionModel &model, double theta);

// v_n = f(theta_n) e^{j theta_n}: the coupling-feasible coefficient vector.
CVec project_c4(const ReflectionModel &model, const RVec &theta);

// Phase that minimizes |v - f(theta) e^{j theta}|^2 for one coefficient,
// located on a dense grid over [-pi, pi] plus golden-section refinement.
// Returns a value in (-pi, pi].
double optimal_theta(const ReflectionModel &model, c64 v, int grid_points = 2048);
RVec update_theta(const ReflectionModel &model, const CVec &v, int grid_points = 2048);

struct VUpdateResult
{
    CVec v;                    // updated reflection coefficients
    std::vector<double> trace; // penalized surrogate value per accepted round
    int rounds = 0;
    bool interior_found = true;
};

// Surrogate constraint rows at expansion point sol.v in stacked real
// coordinates: convexified SINR floors (omitted when gamma_min <= 0) and
// linearized harvesting floors (omitted when p_min <= 0). As with
// w_constraint_forms, surrogate feasibility implies true C1/C2 feasibility
// and the rows are exact at the expansion point, so restoration may call
// this at an infeasible sol.v.
std::vector<QuadForm> v_constraint_forms(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol);

// Convex surrogate of the reflection subproblem at expansion point sol.v,
// maximizing f_A (bits/s/Hz) minus the coupling penalty
// gamma_penalty * ||v - f(theta) e^{j theta}||^2 with the target built from
// sol.theta. Constraints are v_constraint_forms; v itself is bounded only
// through the penalty (C4 lives there, C5 in the theta block). Throws when
// the expansion point violates the true C1/C2.
ConvexQuadraticProgram build_v_subproblem(const SystemConfig &cfg, const ChannelSet &channels,
                                          const Solution &sol, const AuxVars &aux,
                                          double gamma_penalty);

// One SCA pass over v at a fixed penalty weight; never returns a v with a
// lower penalized objective than a strictly feasible input.
VUpdateResult update_v(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                       const AuxVars &aux, double gamma_penalty, const ScaOptions &opts = {});

} // namespace riswipt

#endif
