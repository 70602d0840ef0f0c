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

#ifndef riswipt_fp_H
#define riswipt_fp_H

#include "common.hpp"
#include "model.hpp"

#include <utility>

namespace riswipt
{

// Auxiliaries of the two fractional-programming transforms. The information
// ratio of user k has a single numerator |h_k w_k|^2, so beta_i is one scalar
// per user. The harvested-power ratio has the sum-of-squares numerator
// sum_i |h_k w_i|^2; its quadratic transform carries one auxiliary per
// (user, beam) pair, stored as row k of beta_e. Collapsing that row to a
// scalar breaks the tightness of the reformulation whenever K > 1.
struct AuxVars
{
    RVec alpha_i; // K, >= 0
    CVec beta_i;  // K
    RVec alpha_e; // K, >= 0
    CMat beta_e;  // K x K, entry (k, i) pairs user k with beam i

    static AuxVars zero(int K);
};

// Closed-form auxiliary maximizer (r^2 + r sqrt(r^2 + 4)) / 2.
inline double alpha_from_ratio(double r) { return 0.5 * (r * r + r * std::sqrt(r * r + 4.0)); }

// Reformulated objective, reported in bits/s/Hz so it coincides with the
// weighted objective when the auxiliaries sit at their joint maximizer. For
// any feasible auxiliaries it is a lower bound on the weighted objective.
double f_a_value(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                 const AuxVars &aux);
double f_a_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                      const AuxVars &aux);

// One pass of the information-rate auxiliaries: beta_i from the current
// alpha_i, then alpha_i from the refreshed ratio. Never decreases f_a.
std::pair<RVec, CVec> update_aux_id(const SystemConfig &cfg, const ChannelSet &channels,
                                    const Solution &sol, const AuxVars &aux);
void update_aux_id_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                              AuxVars &aux);

// Same pass for the harvested-power auxiliaries.
std::pair<RVec, CMat> update_aux_eh(const SystemConfig &cfg, const ChannelSet &channels,
                                    const Solution &sol, const AuxVars &aux);
void update_aux_eh_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                              AuxVars &aux);

// Feasible range of rho_k at the current beams: the lower end comes from the
// SINR floor written in its linear-in-rho form, the upper end from the
// harvested-power floor, intersected with [rho_floor, 1].
struct RhoInterval
{
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
};

RhoInterval rho_feasible_interval(const SystemConfig &cfg, const ChannelSet &channels,
                                  const Solution &sol, int k, double rho_floor = 1e-6);
RhoInterval rho_interval_from_gains(const SystemConfig &cfg, const CMat &gains, int k,
                                    double rho_floor = 1e-6);

// Global maximizer of a sqrt(rho) + b sqrt(1-rho) + c rho + d (1-rho) over
// [lo, hi], located by a dense pre-scan plus golden-section refinement.
double maximize_rho_objective(double a, double b, double c, double d, double lo, double hi);

// Per-user power-split update: maximizes the rho_k terms of f_a over the
// feasible interval. Throws when the interval is empty.
double update_rho(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                  const AuxVars &aux, int k, double rho_floor = 1e-6);
double update_rho_from_gains(const SystemConfig &cfg, const CMat &gains, const AuxVars &aux, int k,
                             double rho_floor = 1e-6);

} // namespace riswipt

#endif
