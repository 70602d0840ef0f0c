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

#include "riswipt/model.hpp"

#include <stdexcept>

namespace riswipt
{

void ReflectionModel::validate() const
{
    if (f_min < 0.0 || f_min > 1.0)
        throw std::invalid_argument("ReflectionModel: f_min must lie in [0, 1].");
    if (alpha < 0.0)
        throw std::invalid_argument("ReflectionModel: alpha must be >= 0.");
    if (phi < 0.0)
        throw std::invalid_argument("ReflectionModel: phi must be >= 0.");
}

void SystemConfig::validate() const
{
    if (M < 1 || K < 1 || N < 0)
        throw std::invalid_argument("SystemConfig: require M >= 1, K >= 1, N >= 0.");
    if (p_t < 0.0 || sigma2 < 0.0 || delta2 < 0.0 || p_min < 0.0)
        throw std::invalid_argument("SystemConfig: powers must be >= 0.");
    if (eta < 0.0 || eta > 1.0 || xi < 0.0 || xi > 1.0)
        throw std::invalid_argument("SystemConfig: eta and xi must lie in [0, 1].");
    // gamma_min = 0 switches the SINR floor off (used by the constraint ramp).
    if (gamma_min < 0.0)
        throw std::invalid_argument("SystemConfig: gamma_min must be >= 0.");
    if (lambda_bar < 0.0)
        throw std::invalid_argument("SystemConfig: lambda_bar must be >= 0.");
    reflection.validate();
}

void ChannelSet::build_cascades()
{
    const Eigen::Index K = h_d.rows();
    H_r.assign(static_cast<std::size_t>(K), CMat());
    for (Eigen::Index k = 0; k < K; ++k)
        H_r[static_cast<std::size_t>(k)] = h_r.row(k).transpose().asDiagonal() * G;
}

static void check_dims(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    if (channels.h_d.rows() != cfg.K || channels.h_d.cols() != cfg.M)
        throw std::invalid_argument("model: h_d dimensions do not match the config.");
    if (channels.h_r.rows() != cfg.K || channels.h_r.cols() != cfg.N)
        throw std::invalid_argument("model: h_r dimensions do not match the config.");
    if (channels.G.rows() != cfg.N || channels.G.cols() != cfg.M)
        throw std::invalid_argument("model: G dimensions do not match the config.");
    if (static_cast<int>(sol.w.size()) != cfg.K)
        throw std::invalid_argument("model: solution has the wrong number of beamformers.");
    for (const CVec &wk : sol.w)
        if (wk.size() != cfg.M)
            throw std::invalid_argument("model: beamformer length does not match M.");
    if (sol.v.size() != cfg.N || sol.theta.size() != cfg.N)
        throw std::invalid_argument("model: v/theta length does not match N.");
    if (sol.rho.size() != cfg.K)
        throw std::invalid_argument("model: rho length does not match K.");
}

CMat effective_channels(const ChannelSet &channels, const CVec &v)
{
    const Eigen::Index K = channels.h_d.rows();
    if (v.size() != channels.G.rows())
        throw std::invalid_argument("effective_channels: v length does not match the RIS size.");
    if (static_cast<Eigen::Index>(channels.H_r.size()) != K)
        throw std::invalid_argument("effective_channels: cascades not built.");

    CMat h_eff(K, channels.h_d.cols());
    for (Eigen::Index k = 0; k < K; ++k)
        h_eff.row(k) = channels.h_d.row(k) + v.adjoint() * channels.H_r[static_cast<std::size_t>(k)];
    return h_eff;
}

CMat beam_gains(const CMat &h_eff, const std::vector<CVec> &w)
{
    const Eigen::Index K = h_eff.rows();
    CMat gains(K, static_cast<Eigen::Index>(w.size()));
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index i = 0; i < gains.cols(); ++i)
        {
            if (w[static_cast<std::size_t>(i)].size() != h_eff.cols())
                throw std::invalid_argument("beam_gains: beamformer length does not match the channel.");
            gains(k, i) = h_eff.row(k) * w[static_cast<std::size_t>(i)];
        }
    return gains;
}

RVec sinr_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho)
{
    RVec out(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
    {
        if (rho[k] <= 0.0)
            throw std::invalid_argument("sinr: rho must be > 0.");
        double interference = 0.0;
        for (int i = 0; i < cfg.K; ++i)
            if (i != k)
                interference += std::norm(gains(k, i));
        out[k] = std::norm(gains(k, k)) / (interference + cfg.sigma2 + cfg.delta2 / rho[k]);
    }
    return out;
}

RVec harvested_power_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho)
{
    RVec out(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
    {
        double total = 0.0;
        for (int i = 0; i < cfg.K; ++i)
            total += std::norm(gains(k, i));
        out[k] = cfg.eta * (1.0 - rho[k]) * total;
    }
    return out;
}

double rate_ph_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho)
{
    if (cfg.sigma2 <= 0.0)
        throw std::invalid_argument("rate_ph: sigma2 must be > 0.");
    double sum = 0.0;
    for (int k = 0; k < cfg.K; ++k)
    {
        double total = 0.0;
        for (int i = 0; i < cfg.K; ++i)
            total += std::norm(gains(k, i));
        sum += std::log2(1.0 + cfg.eta_bar() * (1.0 - rho[k]) * total / cfg.sigma2);
    }
    return sum;
}

RVec sinr(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    check_dims(cfg, channels, sol);
    return sinr_from_gains(cfg, beam_gains(effective_channels(channels, sol.v), sol.w), sol.rho);
}

double sum_rate_id(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    RVec s = sinr(cfg, channels, sol);
    double sum = 0.0;
    for (int k = 0; k < cfg.K; ++k)
        sum += std::log2(1.0 + s[k]);
    return sum;
}

RVec harvested_power(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    check_dims(cfg, channels, sol);
    return harvested_power_from_gains(cfg, beam_gains(effective_channels(channels, sol.v), sol.w),
                                      sol.rho);
}

double rate_ph(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    check_dims(cfg, channels, sol);
    return rate_ph_from_gains(cfg, beam_gains(effective_channels(channels, sol.v), sol.w), sol.rho);
}

double weighted_objective(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    Metrics m = evaluate_metrics(cfg, channels, sol);
    return m.objective;
}

double c4_violation(const ReflectionModel &model, const CVec &v, const RVec &theta)
{
    if (v.size() != theta.size())
        throw std::invalid_argument("c4_violation: v and theta lengths differ.");
    double sum = 0.0;
    for (Eigen::Index n = 0; n < v.size(); ++n)
    {
        c64 target = std::polar(model.amplitude(theta[n]), theta[n]);
        sum += std::norm(v[n] - target);
    }
    return sum;
}

Metrics evaluate_metrics(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol)
{
    check_dims(cfg, channels, sol);
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);

    Metrics m;
    m.sinr = sinr_from_gains(cfg, gains, sol.rho);
    m.rate_id_per_user = RVec(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
        m.rate_id_per_user[k] = std::log2(1.0 + m.sinr[k]);
    m.rate_id = m.rate_id_per_user.sum();
    m.p_harv = harvested_power_from_gains(cfg, gains, sol.rho);
    m.rate_ph = rate_ph_from_gains(cfg, gains, sol.rho);
    m.objective = m.rate_id + cfg.lambda_bar * m.rate_ph;
    m.c4_violation = c4_violation(cfg.reflection, sol.v, sol.theta);
    return m;
}

double ConstraintResiduals::max_inequality() const
{
    double worst = c3;
    for (Eigen::Index k = 0; k < c1.size(); ++k)
        worst = std::max({worst, c1[k], c2[k], rho_lo[k], rho_hi[k]});
    for (Eigen::Index n = 0; n < c5.size(); ++n)
        worst = std::max(worst, c5[n]);
    return worst;
}

bool ConstraintResiduals::feasible(double ineq_tol, double c4_tol) const
{
    return max_inequality() <= ineq_tol && c4 <= c4_tol;
}

ConstraintResiduals constraint_residuals(const SystemConfig &cfg, const ChannelSet &channels,
                                         const Solution &sol)
{
    Metrics m = evaluate_metrics(cfg, channels, sol);

    ConstraintResiduals r;
    r.c1 = RVec(cfg.K);
    r.c2 = RVec(cfg.K);
    r.rho_lo = RVec(cfg.K);
    r.rho_hi = RVec(cfg.K);
    double power = 0.0;
    for (int k = 0; k < cfg.K; ++k)
    {
        r.c1[k] = cfg.gamma_min - m.sinr[k];
        r.c2[k] = cfg.p_min - m.p_harv[k];
        r.rho_lo[k] = -sol.rho[k];
        r.rho_hi[k] = sol.rho[k] - 1.0;
        power += sol.w[static_cast<std::size_t>(k)].squaredNorm();
    }
    r.c3 = power - cfg.p_t;
    r.c4 = m.c4_violation;
    r.c5 = RVec(cfg.N);
    for (int n = 0; n < cfg.N; ++n)
        r.c5[n] = std::abs(sol.theta[n]) - pi;
    return r;
}

} // namespace riswipt
