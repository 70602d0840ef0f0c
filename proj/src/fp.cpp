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

#include "riswipt/fp.hpp"

#include <stdexcept>

namespace riswipt
{

AuxVars AuxVars::zero(int K)
{
    AuxVars aux;
    aux.alpha_i = RVec::Zero(K);
    aux.beta_i = CVec::Zero(K);
    aux.alpha_e = RVec::Zero(K);
    aux.beta_e = CMat::Zero(K, K);
    return aux;
}

namespace
{

void check_aux(const SystemConfig &cfg, const CMat &gains, const RVec &rho, const AuxVars &aux)
{
    if (gains.rows() != cfg.K || gains.cols() != cfg.K || rho.size() != cfg.K)
        throw std::invalid_argument("fp: gain table / rho dimensions do not match the config.");
    if (aux.alpha_i.size() != cfg.K || aux.beta_i.size() != cfg.K || aux.alpha_e.size() != cfg.K ||
        aux.beta_e.rows() != cfg.K || aux.beta_e.cols() != cfg.K)
        throw std::invalid_argument("fp: auxiliary dimensions do not match the config.");
    for (int k = 0; k < cfg.K; ++k)
        if (rho[k] <= 0.0 || rho[k] > 1.0)
            throw std::invalid_argument("fp: rho must lie in (0, 1].");
}

double row_power(const CMat &gains, int k)
{
    double q = 0.0;
    for (Eigen::Index i = 0; i < gains.cols(); ++i)
        q += std::norm(gains(k, i));
    return q;
}

} // namespace

double f_a_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                      const AuxVars &aux)
{
    check_aux(cfg, gains, rho, aux);
    const double eta_bar = cfg.eta_bar();
    double nats = 0.0;
    for (int k = 0; k < cfg.K; ++k)
    {
        double q = row_power(gains, k);
        double ai = aux.alpha_i[k];
        double ae = aux.alpha_e[k];
        nats += std::log1p(ai) + cfg.lambda_bar * std::log1p(ae) - (ai + cfg.lambda_bar * ae);

        // Information-rate transform terms.
        nats += 2.0 * std::sqrt(rho[k] * (1.0 + ai)) *
                std::real(std::conj(aux.beta_i[k]) * gains(k, k));
        nats -= std::norm(aux.beta_i[k]) * (rho[k] * q + rho[k] * cfg.sigma2 + cfg.delta2);

        // Harvested-power transform terms.
        double cross = 0.0;
        double be2 = 0.0;
        for (int i = 0; i < cfg.K; ++i)
        {
            cross += std::real(std::conj(aux.beta_e(k, i)) * gains(k, i));
            be2 += std::norm(aux.beta_e(k, i));
        }
        nats += 2.0 * cfg.lambda_bar * std::sqrt(eta_bar * (1.0 - rho[k]) * (1.0 + ae)) * cross;
        nats -= cfg.lambda_bar * be2 * (eta_bar * (1.0 - rho[k]) * q + cfg.sigma2);
    }
    return nats / ln2;
}

double f_a_value(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                 const AuxVars &aux)
{
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);
    return f_a_from_gains(cfg, gains, sol.rho, aux);
}

void update_aux_id_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                              AuxVars &aux)
{
    check_aux(cfg, gains, rho, aux);
    for (int k = 0; k < cfg.K; ++k)
    {
        double q = row_power(gains, k);
        double denom = rho[k] * q + rho[k] * cfg.sigma2 + cfg.delta2;
        if (denom <= 0.0)
            throw std::invalid_argument("update_aux_id: zero denominator (need sigma2 or delta2 > 0).");
        // Joint stationary point of the transform in (alpha, beta): alpha
        // equals the SINR and beta follows from it. Landing there directly
        // avoids the slow two-coordinate contraction at high SINR.
        double own = rho[k] * std::norm(gains(k, k));
        aux.alpha_i[k] = own / (denom - own);
        aux.beta_i[k] = std::sqrt(rho[k] * (1.0 + aux.alpha_i[k])) * gains(k, k) / denom;
    }
}

std::pair<RVec, CVec> update_aux_id(const SystemConfig &cfg, const ChannelSet &channels,
                                    const Solution &sol, const AuxVars &aux)
{
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);
    AuxVars tmp = aux;
    update_aux_id_from_gains(cfg, gains, sol.rho, tmp);
    return {tmp.alpha_i, tmp.beta_i};
}

void update_aux_eh_from_gains(const SystemConfig &cfg, const CMat &gains, const RVec &rho,
                              AuxVars &aux)
{
    check_aux(cfg, gains, rho, aux);
    const double eta_bar = cfg.eta_bar();
    for (int k = 0; k < cfg.K; ++k)
    {
        double q = row_power(gains, k);
        double c = eta_bar * (1.0 - rho[k]);
        double denom = c * q + cfg.sigma2;
        if (cfg.sigma2 <= 0.0)
            throw std::invalid_argument("update_aux_eh: zero denominator (need sigma2 > 0).");
        // Joint stationary point in (alpha, beta): alpha equals the harvested
        // SNR and beta follows from it.
        aux.alpha_e[k] = c * q / cfg.sigma2;
        double scale = std::sqrt(c * (1.0 + aux.alpha_e[k])) / denom;
        for (int i = 0; i < cfg.K; ++i)
            aux.beta_e(k, i) = scale * gains(k, i);
    }
}

std::pair<RVec, CMat> update_aux_eh(const SystemConfig &cfg, const ChannelSet &channels,
                                    const Solution &sol, const AuxVars &aux)
{
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);
    AuxVars tmp = aux;
    update_aux_eh_from_gains(cfg, gains, sol.rho, tmp);
    return {tmp.alpha_e, tmp.beta_e};
}

RhoInterval rho_interval_from_gains(const SystemConfig &cfg, const CMat &gains, int k,
                                    double rho_floor)
{
    if (k < 0 || k >= cfg.K)
        throw std::invalid_argument("rho interval: user index out of range.");
    double own = std::norm(gains(k, k));
    double interference = row_power(gains, k) - own;

    RhoInterval iv;
    iv.lo = rho_floor;
    iv.hi = 1.0;

    if (cfg.gamma_min > 0.0)
    {
        // rho * (|h w_k|^2 - gamma (interference + sigma2)) >= gamma delta2
        double coef = own - cfg.gamma_min * (interference + cfg.sigma2);
        double rhs = cfg.gamma_min * cfg.delta2;
        if (coef <= 0.0)
        {
            if (rhs > 0.0 || coef < 0.0)
                return iv; // no split ratio can satisfy the SINR floor
        }
        else
            iv.lo = std::max(iv.lo, rhs / coef);
    }
    if (cfg.p_min > 0.0)
    {
        double budget = cfg.eta * row_power(gains, k);
        if (budget <= 0.0)
            return iv;
        iv.hi = std::min(iv.hi, 1.0 - cfg.p_min / budget);
    }
    iv.empty = !(iv.lo <= iv.hi);
    return iv;
}

RhoInterval rho_feasible_interval(const SystemConfig &cfg, const ChannelSet &channels,
                                  const Solution &sol, int k, double rho_floor)
{
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);
    return rho_interval_from_gains(cfg, gains, k, rho_floor);
}

double maximize_rho_objective(double a, double b, double c, double d, double lo, double hi)
{
    if (!(lo > 0.0 && hi <= 1.0 && lo <= hi))
        throw std::invalid_argument("maximize_rho_objective: need 0 < lo <= hi <= 1.");

    auto g = [&](double rho) {
        return a * std::sqrt(rho) + b * std::sqrt(1.0 - rho) + c * rho + d * (1.0 - rho);
    };
    if (hi - lo < 1e-15)
        return lo;

    // Dense pre-scan guards against the non-concave corner cases, then a
    // golden-section pass sharpens the best bracket.
    const int cells = 2000;
    double best_x = lo, best_v = g(lo);
    for (int j = 1; j <= cells; ++j)
    {
        double x = lo + (hi - lo) * static_cast<double>(j) / cells;
        double v = g(x);
        if (v > best_v)
        {
            best_v = v;
            best_x = x;
        }
    }
    double h = (hi - lo) / cells;
    double refined = golden_section_max(g, std::max(lo, best_x - h), std::min(hi, best_x + h), 1e-12);
    return g(refined) >= best_v ? refined : best_x;
}

double update_rho_from_gains(const SystemConfig &cfg, const CMat &gains, const AuxVars &aux, int k,
                             double rho_floor)
{
    RhoInterval iv = rho_interval_from_gains(cfg, gains, k, rho_floor);
    if (iv.empty)
        throw std::runtime_error("update_rho: empty feasible interval for user " + std::to_string(k));

    const double eta_bar = cfg.eta_bar();
    double q = row_power(gains, k);
    double cross = 0.0;
    double be2 = 0.0;
    for (int i = 0; i < cfg.K; ++i)
    {
        cross += std::real(std::conj(aux.beta_e(k, i)) * gains(k, i));
        be2 += std::norm(aux.beta_e(k, i));
    }
    double a = 2.0 * std::sqrt(1.0 + aux.alpha_i[k]) * std::real(std::conj(aux.beta_i[k]) * gains(k, k));
    double b = 2.0 * cfg.lambda_bar * std::sqrt(eta_bar * (1.0 + aux.alpha_e[k])) * cross;
    double c = -std::norm(aux.beta_i[k]) * (q + cfg.sigma2);
    double d = -cfg.lambda_bar * be2 * eta_bar * q;
    return maximize_rho_objective(a, b, c, d, iv.lo, iv.hi);
}

double update_rho(const SystemConfig &cfg, const ChannelSet &channels, const Solution &sol,
                  const AuxVars &aux, int k, double rho_floor)
{
    CMat gains = beam_gains(effective_channels(channels, sol.v), sol.w);
    return update_rho_from_gains(cfg, gains, aux, k, rho_floor);
}

} // namespace riswipt
