/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "doctest.h"

#include "riswipt/reflection.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace riswipt;
namespace ts = riswipt::testing;

namespace
{

struct VInstance
{
    SystemConfig cfg;
    ChannelSet ch;
    Solution sol;
    AuxVars aux;
};

VInstance v_instance(Rng &rng, int M, int K, int N, double floors_margin = 0.5)
{
    VInstance inst;
    inst.cfg = ts::relaxed_config(M, K, N);
    inst.cfg.lambda_bar = 0.6;
    inst.ch = ts::random_channels(rng, K, M, N);
    inst.sol = ts::random_solution(rng, inst.cfg, 0.7);
    if (floors_margin > 0.0)
        ts::set_attainable_floors(inst.cfg, inst.ch, inst.sol, floors_margin);
    inst.aux = ts::aux_fixed_point(inst.cfg, inst.ch, inst.sol);
    return inst;
}

double phase_score(const ReflectionModel &model, c64 v, double theta)
{
    const double f = model.amplitude(theta);
    return 2.0 * f * std::abs(v) * std::cos(theta - std::arg(v)) - f * f;
}

double wrap_diff(double a, double b) { return std::remainder(a - b, 2.0 * pi); }

} // namespace

TEST_CASE("an ideal surface reflects with unit amplitude at any phase")
{
    ReflectionModel model;
    model.f_min = 1.0;
    Rng rng(181);
    for (int i = 0; i < 20; ++i)
        CHECK(reflection_amplitude(model, rng.uniform(-pi, pi)) == 1.0);
}

TEST_CASE("the amplitude peaks a quarter turn past the model offset")
{
    ReflectionModel model;
    CHECK(reflection_amplitude(model, model.phi + pi / 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the amplitude at the offset phase matches the closed formula")
{
    ReflectionModel model; // f_min 0.2, alpha 1.6
    const double got = reflection_amplitude(model, model.phi);
    CHECK(got == doctest::Approx(0.2 + 0.8 * std::pow(0.5, 1.6)).epsilon(1e-14));
    CHECK(got == doctest::Approx(0.4639).epsilon(2e-4));
}

TEST_CASE("amplitudes stay inside the model band")
{
    ReflectionModel model;
    model.f_min = 0.35;
    model.alpha = 2.3;
    Rng rng(191);
    for (int i = 0; i < 200; ++i)
    {
        const double f = reflection_amplitude(model, rng.uniform(-4.0 * pi, 4.0 * pi));
        CHECK(f >= 0.35);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("coefficients synthesized from phases honor the model exactly")
{
    ReflectionModel ideal;
    ideal.f_min = 1.0;
    RVec zero = RVec::Zero(1);
    CHECK(std::abs(project_c4(ideal, zero)[0] - c64(1.0, 0.0)) == 0.0);

    ReflectionModel model;
    Rng rng(193);
    RVec theta(16);
    for (int n = 0; n < 16; ++n)
        theta[n] = rng.uniform(-pi, pi);
    CVec v = project_c4(model, theta);
    for (int n = 0; n < 16; ++n)
    {
        CHECK(std::abs(v[n]) == doctest::Approx(model.amplitude(theta[n])).epsilon(1e-14));
        CHECK(std::abs(wrap_diff(std::arg(v[n]), theta[n])) <= 1e-12);
        CHECK(std::abs(v[n]) >= model.f_min);
        CHECK(std::abs(v[n]) <= 1.0);
    }
    CHECK(c4_violation(model, v, theta) == 0.0);
}

TEST_CASE("a growing penalty pins the reflection subproblem to the coupling target")
{
    Rng rng(197);
    VInstance inst = v_instance(rng, 2, 1, 1, 0.0);
    inst.cfg.reflection.f_min = 1.0;
    inst.sol.v = project_c4(inst.cfg.reflection, inst.sol.theta);
    inst.aux = ts::aux_fixed_point(inst.cfg, inst.ch, inst.sol);
    const c64 target = std::polar(1.0, inst.sol.theta[0]);

    auto dist_at = [&](double gamma) {
        ConvexQuadraticProgram prob =
            build_v_subproblem(inst.cfg, inst.ch, inst.sol, inst.aux, gamma);
        QcqpSolution qs = solve(prob, sca_qcqp_defaults());
        REQUIRE(qs.status == QcqpStatus::converged);
        return std::abs(complex_unstack(qs.x)[0] - target);
    };
    const double d2 = dist_at(1e2);
    const double d4 = dist_at(1e4);
    const double d6 = dist_at(1e6);
    CHECK(d4 < d2);
    CHECK(d6 < d4);
    CHECK(d4 <= 1.5e-2 * d2 + 1e-10);
    CHECK(d6 <= 1e-5);
}

TEST_CASE("the reflection surrogate rows equal the true constraints at the expansion point")
{
    Rng rng(199);
    for (int trial = 0; trial < 10; ++trial)
    {
        VInstance inst = v_instance(rng, 4, 3, 6);
        const std::vector<QuadForm> rows = v_constraint_forms(inst.cfg, inst.ch, inst.sol);
        REQUIRE(static_cast<int>(rows.size()) == 2 * inst.cfg.K);
        const RVec x = complex_stack(inst.sol.v);
        const CMat gains = ts::gains_at(inst.ch, inst.sol.v, inst.sol.w);
        for (int k = 0; k < inst.cfg.K; ++k)
        {
            const double c1 = ts::true_c1_row(inst.cfg, gains, inst.sol.rho, k);
            CHECK(std::abs(rows[static_cast<std::size_t>(k)].eval(x) - c1) <=
                  1e-12 * (1.0 + std::abs(c1)));
            const double c2 = ts::true_c2_row(inst.cfg, gains, inst.sol.rho, k);
            CHECK(std::abs(rows[static_cast<std::size_t>(inst.cfg.K + k)].eval(x) - c2) <=
                  1e-12 * (1.0 + std::abs(c2)));
        }
    }
}

TEST_CASE("an unconstrained single-element subproblem matches its stationary system")
{
    Rng rng(211);
    VInstance inst = v_instance(rng, 2, 1, 1, 0.0);
    ConvexQuadraticProgram prob = build_v_subproblem(inst.cfg, inst.ch, inst.sol, inst.aux, 5.0);
    REQUIRE(prob.constraints.empty());
    REQUIRE(prob.dim == 2);
    const RVec want = prob.objective.A.fullPivLu().solve(-prob.objective.b);
    QcqpSolution qs = solve(prob, sca_qcqp_defaults());
    REQUIRE(qs.status == QcqpStatus::converged);
    CHECK((qs.x - want).norm() <= 1e-7 * (1.0 + want.norm()));
}

TEST_CASE("points satisfying the reflection surrogate satisfy the true floors")
{
    Rng rng(223);
    VInstance inst = v_instance(rng, 4, 3, 6);
    const std::vector<QuadForm> rows = v_constraint_forms(inst.cfg, inst.ch, inst.sol);
    const RVec xt = complex_stack(inst.sol.v);
    int kept = 0;
    for (int draw = 0; draw < 4000 && kept < 200; ++draw)
    {
        RVec x = xt;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] += 0.2 * rng.normal();
        bool ok = true;
        for (const QuadForm &g : rows)
            if (g.eval(x) > 0.0)
            {
                ok = false;
                break;
            }
        if (!ok)
            continue;
        ++kept;
        const CVec v = complex_unstack(x);
        const CMat gains = ts::gains_at(inst.ch, v, inst.sol.w);
        for (int k = 0; k < inst.cfg.K; ++k)
        {
            CHECK(ts::true_c1_row(inst.cfg, gains, inst.sol.rho, k) <= 1e-9);
            CHECK(ts::true_c2_row(inst.cfg, gains, inst.sol.rho, k) <= 1e-9);
        }
    }
    CHECK(kept >= 50);
}

TEST_CASE("the reflection update never lowers the penalized objective and ends feasible")
{
    Rng rng(227);
    for (int trial = 0; trial < 5; ++trial)
    {
        VInstance inst = v_instance(rng, 4, 2, 6);
        const double gamma = 0.5;
        auto penalized = [&](const Solution &s) {
            return f_a_value(inst.cfg, inst.ch, s, inst.aux) -
                   gamma * c4_violation(inst.cfg.reflection, s.v, s.theta);
        };
        const double f0 = penalized(inst.sol);
        VUpdateResult res = update_v(inst.cfg, inst.ch, inst.sol, inst.aux, gamma);
        Solution out = inst.sol;
        out.v = res.v;
        CHECK(penalized(out) >= f0 - 1e-9 * (1.0 + std::abs(f0)));
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i] >= res.trace[i - 1] - 1e-9 * (1.0 + std::abs(res.trace[i])));
        const ConstraintResiduals resi = constraint_residuals(inst.cfg, inst.ch, out);
        CHECK(resi.c1.maxCoeff() <= 1e-8);
        CHECK(resi.c2.maxCoeff() <= 1e-8);
    }
}

TEST_CASE("restarting the reflection update at its own output makes no further progress")
{
    Rng rng(229);
    VInstance inst = v_instance(rng, 4, 2, 6);
    const double gamma = 0.5;
    VUpdateResult first = update_v(inst.cfg, inst.ch, inst.sol, inst.aux, gamma);
    Solution mid = inst.sol;
    mid.v = first.v;
    const double f1 = f_a_value(inst.cfg, inst.ch, mid, inst.aux) -
                      gamma * c4_violation(inst.cfg.reflection, mid.v, mid.theta);
    ScaOptions opts;
    VUpdateResult second = update_v(inst.cfg, inst.ch, mid, inst.aux, gamma, opts);
    Solution out = mid;
    out.v = second.v;
    const double f2 = f_a_value(inst.cfg, inst.ch, out, inst.aux) -
                      gamma * c4_violation(inst.cfg.reflection, out.v, out.theta);
    CHECK(f2 - f1 <= 2.0 * opts.tol * (1.0 + std::abs(f1)));
    CHECK(second.rounds <= 2);
}

TEST_CASE("the reflection subproblem rejects infeasible expansion points")
{
    Rng rng(233);
    VInstance inst = v_instance(rng, 4, 2, 6);
    SystemConfig harsh = inst.cfg;
    harsh.gamma_min = 1e12;
    CHECK_THROWS_AS((void)build_v_subproblem(harsh, inst.ch, inst.sol, inst.aux, 1.0),
                    std::invalid_argument);
    CHECK(v_constraint_forms(harsh, inst.ch, inst.sol).size() == 2 * 2);
}

TEST_CASE("the phase update matches the argument for an ideal surface")
{
    ReflectionModel model;
    model.f_min = 1.0;
    Rng rng(239);
    for (int i = 0; i < 20; ++i)
    {
        const c64 v = std::polar(rng.uniform(0.1, 2.0), rng.uniform(-pi, pi));
        const double th = optimal_theta(model, v);
        CHECK(std::abs(wrap_diff(th, std::arg(v))) <= 1e-6);
    }
}

TEST_CASE("the phase update of a dead coefficient minimizes the amplitude")
{
    // The score is flat to second order at the minimizer, so the phase is
    // only located to roughly the square root of the value tolerance.
    ReflectionModel model; // phi = 0.43 pi
    const double th = optimal_theta(model, c64(0.0, 0.0));
    CHECK(std::abs(wrap_diff(th, model.phi - pi / 2.0)) <= 1e-3);
    CHECK(reflection_amplitude(model, th) <= model.f_min + 1e-10);
}

TEST_CASE("the phase update matches a dense grid oracle")
{
    ReflectionModel model;
    Rng rng(241);
    for (int draw = 0; draw < 10; ++draw)
    {
        const c64 v = std::polar(rng.uniform(0.0, 2.0), rng.uniform(-pi, pi));
        const double th = optimal_theta(model, v);
        const double got = phase_score(model, v, th);
        double best = -std::numeric_limits<double>::infinity();
        const int pts = 1000000;
        for (int i = 0; i < pts; ++i)
            best = std::max(best, phase_score(model, v, -pi + 2.0 * pi * i / pts));
        CHECK(got >= best - 1e-6);
    }
}

TEST_CASE("the phase update dominates random probes")
{
    Rng rng(251);
    for (int draw = 0; draw < 100; ++draw)
    {
        ReflectionModel model;
        model.f_min = rng.uniform(0.1, 1.0);
        model.alpha = rng.uniform(0.5, 3.0);
        model.phi = rng.uniform(0.0, pi);
        const c64 v = std::polar(rng.uniform(0.0, 2.0), rng.uniform(-pi, pi));
        const double th = optimal_theta(model, v);
        const double got = phase_score(model, v, th);
        for (int probe = 0; probe < 100; ++probe)
            CHECK(got >= phase_score(model, v, rng.uniform(-pi, pi)) - 1e-9);
        CHECK(th > -pi);
        CHECK(th <= pi);
    }
}

TEST_CASE("a phase pass never increases the coupling residual")
{
    ReflectionModel model;
    Rng rng(257);
    RVec theta(12);
    CVec v(12);
    for (int n = 0; n < 12; ++n)
    {
        theta[n] = rng.uniform(-pi, pi);
        v[n] = std::polar(rng.uniform(0.0, 1.5), rng.uniform(-pi, pi));
    }
    const double before = c4_violation(model, v, theta);
    RVec after = update_theta(model, v);
    CHECK(c4_violation(model, v, after) <= before + 1e-12);
}
