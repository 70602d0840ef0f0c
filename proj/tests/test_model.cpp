/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "doctest.h"

#include "riswipt/model.hpp"
#include "riswipt/reflection.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace riswipt;
namespace ts = riswipt::testing;

namespace
{

// One-user, one-antenna scenario with a direct channel of exactly 1.
struct ScalarScenario
{
    SystemConfig cfg;
    ChannelSet ch;
    Solution sol;

    ScalarScenario()
    {
        cfg = ts::relaxed_config(1, 1, 0);
        ch.G = CMat(0, 1);
        ch.h_d = CMat::Constant(1, 1, c64(1.0, 0.0));
        ch.h_r = CMat(1, 0);
        ch.build_cascades();
        sol.w = {CVec::Constant(1, c64(1.0, 0.0))};
        sol.v = CVec(0);
        sol.theta = RVec(0);
        sol.rho = RVec::Constant(1, 0.5);
    }
};

} // namespace

TEST_CASE("effective channels reduce to the direct rows when v is zero")
{
    Rng rng(11);
    ChannelSet ch = ts::random_channels(rng, 3, 4, 6);
    CMat h = effective_channels(ch, CVec::Zero(6));
    CHECK((h - ch.h_d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective channel of a scalar cascade matches the hand result")
{
    ChannelSet ch;
    ch.G = CMat::Constant(1, 1, c64(1.0, 0.0));
    ch.h_d = CMat::Constant(1, 1, c64(1.0, 0.0));
    ch.h_r = CMat::Constant(1, 1, c64(2.0, 0.0));
    ch.build_cascades();
    CVec v = CVec::Constant(1, c64(0.0, 1.0));
    CMat h = effective_channels(ch, v);
    CHECK(std::abs(h(0, 0) - c64(1.0, -2.0)) <= 1e-15);
}

TEST_CASE("effective channels match the elementwise oracle on random draws")
{
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial)
    {
        const int K = 1 + static_cast<int>(rng.next_u64() % 4);
        const int M = 1 + static_cast<int>(rng.next_u64() % 8);
        const int N = 1 + static_cast<int>(rng.next_u64() % 16);
        ChannelSet ch = ts::random_channels(rng, K, M, N);
        CVec v(N);
        for (int n = 0; n < N; ++n)
            v[n] = rng.cgauss();
        CMat got = effective_channels(ch, v);
        CMat want = ts::naive_effective_channels(ch, v);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("sinr of a unit-gain single user matches the hand denominator")
{
    ScalarScenario s;
    s.cfg.sigma2 = 0.5;
    s.cfg.delta2 = 0.25;
    RVec out = sinr(s.cfg, s.ch, s.sol);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sum_rate_id(s.cfg, s.ch, s.sol) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero beamformers give zero sinr and zero rate")
{
    ScalarScenario s;
    s.sol.w[0].setZero();
    CHECK(sinr(s.cfg, s.ch, s.sol)[0] == 0.0);
    CHECK(sum_rate_id(s.cfg, s.ch, s.sol) == 0.0);
}

TEST_CASE("sinr rejects non-positive splits")
{
    ScalarScenario s;
    s.sol.rho[0] = 0.0;
    CHECK_THROWS_AS((void)sinr(s.cfg, s.ch, s.sol), std::invalid_argument);
}

TEST_CASE("metrics match the naive oracles on random instances")
{
    Rng rng(37);
    for (int trial = 0; trial < 25; ++trial)
    {
        const int K = 1 + static_cast<int>(rng.next_u64() % 4);
        const int M = 1 + static_cast<int>(rng.next_u64() % 8);
        const int N = 1 + static_cast<int>(rng.next_u64() % 16);
        SystemConfig cfg = ts::relaxed_config(M, K, N);
        cfg.lambda_bar = 0.6;
        ChannelSet ch = ts::random_channels(rng, K, M, N);
        Solution sol = ts::random_solution(rng, cfg);

        const RVec s = sinr(cfg, ch, sol);
        const CMat h_eff = ts::naive_effective_channels(ch, sol.v);
        for (int k = 0; k < K; ++k)
        {
            const double want = ts::naive_sinr_k(cfg, h_eff, sol.w, sol.rho, k);
            CHECK(std::abs(s[k] - want) <= 1e-10 * (1.0 + want));
        }
        CHECK(std::abs(sum_rate_id(cfg, ch, sol) - ts::naive_sum_rate(cfg, ch, sol)) <= 1e-10);
        const RVec ph = harvested_power(cfg, ch, sol);
        const RVec ph_want = ts::naive_harvested(cfg, ch, sol);
        CHECK((ph - ph_want).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + ph_want.maxCoeff()));
        CHECK(std::abs(rate_ph(cfg, ch, sol) - ts::naive_rate_ph(cfg, ch, sol)) <= 1e-10);
        CHECK(std::abs(weighted_objective(cfg, ch, sol) - ts::naive_objective(cfg, ch, sol)) <=
              1e-10);
    }
}

TEST_CASE("harvesting vanishes when the whole split goes to decoding")
{
    ScalarScenario s;
    s.sol.rho[0] = 1.0;
    CHECK(harvested_power(s.cfg, s.ch, s.sol)[0] == 0.0);
    CHECK(rate_ph(s.cfg, s.ch, s.sol) == 0.0);
}

TEST_CASE("harvested power of a fully harvesting user is eta times the received power")
{
    ScalarScenario s;
    s.cfg.eta = 0.6;
    s.sol.w[0] = CVec::Constant(1, c64(std::sqrt(2.0), 0.0));
    s.sol.rho[0] = 0.0;
    CHECK(harvested_power(s.cfg, s.ch, s.sol)[0] == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("doubling every beam quadruples the harvested power")
{
    Rng rng(41);
    SystemConfig cfg = ts::relaxed_config(4, 3, 5);
    ChannelSet ch = ts::random_channels(rng, 3, 4, 5);
    Solution sol = ts::random_solution(rng, cfg, 0.2);
    const RVec base = harvested_power(cfg, ch, sol);
    for (auto &wk : sol.w)
        wk *= 2.0;
    const RVec scaled = harvested_power(cfg, ch, sol);
    for (int k = 0; k < cfg.K; ++k)
        CHECK(scaled[k] == doctest::Approx(4.0 * base[k]).epsilon(1e-12));

    // Without interference the same scaling strictly raises the SINR.
    SystemConfig one = ts::relaxed_config(4, 1, 5);
    ChannelSet ch1 = ts::random_channels(rng, 1, 4, 5);
    Solution sol1 = ts::random_solution(rng, one, 0.2);
    const double s0 = sinr(one, ch1, sol1)[0];
    sol1.w[0] *= 2.0;
    CHECK(sinr(one, ch1, sol1)[0] > s0);
}

TEST_CASE("harvesting rate is one bit when the harvest snr is one")
{
    ScalarScenario s;
    s.cfg.eta = 0.5;
    s.cfg.xi = 0.5;
    s.cfg.sigma2 = 0.25;
    s.sol.rho[0] = 0.5;
    s.sol.w[0] = CVec::Constant(1, c64(std::sqrt(2.0), 0.0));
    // xi eta (1 - rho) |h w|^2 / sigma^2 = 0.25 * 0.5 * 2 / 0.25 = 1.
    CHECK(rate_ph(s.cfg, s.ch, s.sol) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("weighted objective equals its components under any weight")
{
    Rng rng(43);
    SystemConfig cfg = ts::relaxed_config(4, 3, 6);
    ChannelSet ch = ts::random_channels(rng, 3, 4, 6);
    Solution sol = ts::random_solution(rng, cfg);

    cfg.lambda_bar = 0.0;
    CHECK(weighted_objective(cfg, ch, sol) == doctest::Approx(sum_rate_id(cfg, ch, sol)).epsilon(1e-14));

    cfg.lambda_bar = 1.0;
    CHECK(weighted_objective(cfg, ch, sol) ==
          doctest::Approx(sum_rate_id(cfg, ch, sol) + rate_ph(cfg, ch, sol)).epsilon(1e-13));

    cfg.lambda_bar = 0.6;
    CHECK(std::abs(weighted_objective(cfg, ch, sol) -
                   (sum_rate_id(cfg, ch, sol) + 0.6 * rate_ph(cfg, ch, sol))) <= 1e-12);
}

TEST_CASE("evaluate_metrics is consistent with the standalone metric calls")
{
    Rng rng(47);
    SystemConfig cfg = ts::relaxed_config(6, 4, 8);
    cfg.lambda_bar = 0.6;
    ChannelSet ch = ts::random_channels(rng, 4, 6, 8);
    Solution sol = ts::random_solution(rng, cfg);
    Metrics m = evaluate_metrics(cfg, ch, sol);
    CHECK(std::abs(m.rate_id - sum_rate_id(cfg, ch, sol)) <= 1e-12);
    CHECK(std::abs(m.rate_ph - rate_ph(cfg, ch, sol)) <= 1e-12);
    CHECK(std::abs(m.objective - (m.rate_id + cfg.lambda_bar * m.rate_ph)) <= 1e-12);
    CHECK((m.sinr - sinr(cfg, ch, sol)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((m.p_harv - harvested_power(cfg, ch, sol)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(m.c4_violation == c4_violation(cfg.reflection, sol.v, sol.theta));
}

TEST_CASE("a constructed strictly feasible point has negative residuals")
{
    Rng rng(53);
    SystemConfig cfg = ts::relaxed_config(4, 3, 6);
    ChannelSet ch = ts::random_channels(rng, 3, 4, 6);
    Solution sol = ts::random_solution(rng, cfg, 0.8);
    ts::set_attainable_floors(cfg, ch, sol, 0.5);
    ConstraintResiduals res = constraint_residuals(cfg, ch, sol);
    CHECK(res.c1.maxCoeff() < 0.0);
    CHECK(res.c2.maxCoeff() < 0.0);
    CHECK(res.c3 < 0.0);
    CHECK(res.c4 < 1e-12);
    CHECK(res.c5.maxCoeff() < 0.0);
    CHECK(res.rho_lo.maxCoeff() < 0.0);
    CHECK(res.rho_hi.maxCoeff() < 0.0);
    CHECK(res.max_inequality() < 0.0);
    CHECK(res.feasible());
}

TEST_CASE("a fully decoding split violates a positive harvesting floor by exactly the floor")
{
    ScalarScenario s;
    s.cfg.p_min = 0.3;
    s.sol.rho[0] = 1.0;
    ConstraintResiduals res = constraint_residuals(s.cfg, s.ch, s.sol);
    CHECK(res.c2[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_FALSE(res.feasible());
}

TEST_CASE("coupling residual is zero for coefficients synthesized from the phases")
{
    Rng rng(59);
    ReflectionModel model;
    RVec theta(8);
    for (int n = 0; n < 8; ++n)
        theta[n] = rng.uniform(-pi, pi);
    CVec v = project_c4(model, theta);
    CHECK(c4_violation(model, v, theta) == 0.0);
    v[3] += c64(0.05, 0.0);
    CHECK(c4_violation(model, v, theta) > 0.0);
}
