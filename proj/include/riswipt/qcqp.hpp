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

#ifndef riswipt_qcqp_H
#define riswipt_qcqp_H

#include "common.hpp"

#include <string>
#include <vector>

namespace riswipt
{

// q(x) = x' A x + 2 b' x + c over a real vector x.
struct QuadForm
{
    RMat A;
    RVec b;
    double c = 0.0;

    double eval(const RVec &x) const { return x.dot(A * x) + 2.0 * b.dot(x) + c; }
    RVec grad(const RVec &x) const { return 2.0 * (A * x + b); }
};

// maximize   x' A0 x + 2 b0' x + c0          (A0 negative semidefinite)
// subject to x' Ai x + 2 bi' x + ci <= 0     (each Ai positive semidefinite)
// from a strictly feasible start x0.
struct ConvexQuadraticProgram
{
    int dim = 0;
    QuadForm objective;
    std::vector<QuadForm> constraints;
    RVec x0;
};

enum class QcqpStatus
{
    converged,
    max_iter,
    infeasible_start,
};

std::string to_string(QcqpStatus status);

struct QcqpSolution
{
    RVec x;
    double objective_value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0; // Newton steps, all barrier stages plus refinement
    QcqpStatus status = QcqpStatus::converged;
    RVec lambda;                     // multipliers of the scaled constraints
    std::vector<double> stage_values; // objective after each barrier stage
};

struct QcqpOptions
{
    double tol = 1e-9;      // duality-gap target: stop once m / t <= tol
    double mu = 10.0;       // barrier growth factor per outer stage
    int newton_cap = 200;   // total Newton step budget
    bool check_psd = true;  // verify curvature signs of the inputs
};

QcqpSolution solve(const ConvexQuadraticProgram &prob, const QcqpOptions &opts);
QcqpSolution solve(const ConvexQuadraticProgram &prob, double tol = 1e-9);

// Max-min-margin restoration: maximize t subject to g_i(x) + s_i t <= 0 over
// (x, t), where s_i is the scale of constraint i. Its start is strictly
// feasible by construction even when x0 violates constraints, so it can
// always run. A positive margin yields a strictly interior point for `prob`.
struct PhaseIResult
{
    RVec x;
    double margin = 0.0; // min_i (-g_i(x) / s_i) at the returned point
    bool ok = false;     // margin > 0 and the solve completed
};

PhaseIResult max_margin_point(const ConvexQuadraticProgram &prob, const QcqpOptions &opts);

// Replaces prob.x0 by a strictly interior point when its scaled margin is
// below min_margin. Returns false when no interior point could be found.
bool ensure_interior_start(ConvexQuadraticProgram &prob, double min_margin,
                           const QcqpOptions &opts);

// [Re; Im] stacking used to host complex subproblems in the real solver.
RVec complex_stack(const CVec &v);
CVec complex_unstack(const RVec &x);

// Real image of the Hermitian form v^H Q v: x' M x with x = complex_stack(v).
RMat hermitian_to_real(const CMat &Q);

// Real image of the linear form 2 Re(z^H v): 2 b' x with b = complex_stack(z).
inline RVec linear_to_real(const CVec &z) { return complex_stack(z); }

} // namespace riswipt

#endif
