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

#ifndef riswipt_model_H
#define riswipt_model_H

#include "common.hpp"

#include <vector>

namespace riswipt
{

// Coupled phase/amplitude law of one RIS element:
//   f(theta) = f_min + (1 - f_min) * ((sin(theta - phi) + 1) / 2)^alpha
// with amplitude in [f_min, 1] for every theta.
struct ReflectionModel
{
    double f_min = 0.2; // minimum amplitude, in [0, 1]
    double alpha = 1.6; // steepness exponent, >= 0
    double phi = 0.43 * pi; // horizontal offset, radians, >= 0

    double amplitude(double theta) const
    {
        double s = 0.5 * (std::sin(theta - phi) + 1.0);
        return f_min + (1.0 - f_min) * std::pow(s, alpha);
    }

    void validate() const;
};

// Scenario constants. All powers are in milliwatts; any dB/dBm source values
// are converted before this struct is filled (see harness::load_config).
struct SystemConfig
{
    int M = 1; // BS antenna count
    int K = 1; // user count
    int N = 0; // RIS element count
    double p_t = 1.0;        // total transmit power budget, mW
    double sigma2 = 1e-4;    // thermal noise power, mW (shared across users)
    double delta2 = 1e-5;    // RF-to-baseband conversion noise power, mW
    double eta = 0.6;        // harvesting circuit efficiency, in [0, 1]
    double xi = 0.005;       // baseband-to-RF conversion efficiency, in [0, 1]
    double lambda_bar = 0.6; // weight of the harvested-power rate term, >= 0
    double gamma_min = 10.0; // per-user SINR floor, linear scale (0 disables C1)
    double p_min = 1e-5;     // per-user harvested-power floor, mW (0 disables C2)
    ReflectionModel reflection;

    double eta_bar() const { return xi * eta; }
    void validate() const;
};

// One channel realization. Rows of h_d and h_r are the per-user vectors
// h_{d,k} (1 x M) and h_{r,k} (1 x N); H_r[k] = diag(h_{r,k}) * G.
struct ChannelSet
{
    CMat G;   // N x M, BS -> RIS
    CMat h_d; // K x M, BS -> user, direct
    CMat h_r; // K x N, RIS -> user
    std::vector<CMat> H_r; // K cascades, each N x M

    void build_cascades();
};

// Decision variables of the joint problem.
struct Solution
{
    std::vector<CVec> w; // K beamformers, each length M
    CVec v;              // N reflection coefficients
    RVec theta;          // N phases, radians
    RVec rho;            // K power-split ratios, in (0, 1]
};

struct Metrics
{
    RVec sinr;             // per-user, linear
    RVec rate_id_per_user; // log2(1 + SINR_k)
    double rate_id = 0.0;  // sum over users, bits/s/Hz
    RVec p_harv;           // per-user harvested power, mW
    double rate_ph = 0.0;  // harvested-power rate proxy, bits/s/Hz
    double objective = 0.0;     // rate_id + lambda_bar * rate_ph
    double c4_violation = 0.0;  // sum_n |v_n - f(theta_n) e^{j theta_n}|^2
};

// Signed constraint residuals; a point is feasible iff every inequality
// residual is <= 0 and the c4 equality residual is below tolerance.
struct ConstraintResiduals
{
    RVec c1;     // gamma_min - SINR_k
    RVec c2;     // p_min - P_{H,k}
    double c3 = 0.0; // sum_k ||w_k||^2 - P_T
    double c4 = 0.0; // coupling residual, sum_n |v_n - f(theta_n) e^{j theta_n}|^2
    RVec c5;     // |theta_n| - pi
    RVec rho_lo; // rho_floor - rho_k (with rho_floor = 0 here: -rho_k)
    RVec rho_hi; // rho_k - 1

    // Largest inequality residual (everything except c4).
    double max_inequality() const;
    bool feasible(double ineq_tol = 1e-9, double c4_tol = 1e-9) const;
};

// h_k = h_{d,k} + v^H H_{r,k}, one row per user.
CMat effective_channels(const ChannelSet &channels, const CVec &v);

// Beam gain table S(k, i) = h_k w_i for the given effective channel rows.
CMat beam_gains(const CMat &h_eff, const std::vector<CVec> &w);

RVec sinr(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
double sum_rate_id(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
RVec harvested_power(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
double rate_ph(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
double weighted_objective(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
double c4_violation(const ReflectionModel &model, const CVec &v, const RVec &theta);

Metrics evaluate_metrics(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol);
ConstraintResiduals constraint_residuals(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol);

// Variants on a precomputed gain table, shared by the solver internals so the
// metric definitions live in exactly one place.
RVec sinr_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho);
RVec harvested_power_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho);
double rate_ph_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho);

} // namespace riswipt

#endif
