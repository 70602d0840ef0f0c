/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "doctest.h"

#include "riswipt/channels.hpp"

#include <cmath>
#include <stdexcept>

using namespace riswipt;

namespace
{

SystemConfig small_system(int K, int M, int N)
{
    SystemConfig cfg;
    cfg.M = M;
    cfg.K = K;
    cfg.N = N;
    return cfg;
}

bool identical(const CMat &a, const CMat &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j))
                return false;
    return true;
}

} // namespace

TEST_CASE("steering vector at boresight is all ones")
{
    CVec a = steering_vector(5, 0.0);
    for (int m = 0; m < 5; ++m)
        CHECK(std::abs(a[m] - c64(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("steering vector at endfire alternates sign for half-wavelength spacing")
{
    CVec a = steering_vector(2, pi / 2.0, 0.5);
    CHECK(std::abs(a[0] - c64(1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(a[1] - c64(-1.0, 0.0)) <= 1e-12);
}

TEST_CASE("steering vector entries stay on the unit circle")
{
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial)
    {
        CVec a = steering_vector(8, rng.uniform(-pi / 2.0, pi / 2.0));
        for (int m = 0; m < 8; ++m)
            CHECK(std::abs(std::abs(a[m]) - 1.0) <= 1e-14);
    }
}

TEST_CASE("steering vector rejects an empty array")
{
    CHECK_THROWS_AS((void)steering_vector(0, 0.3), std::invalid_argument);
}

TEST_CASE("path loss hits the reference gain at the reference distance")
{
    GeometryConfig geo;
    CHECK(path_loss(1.0, 2.2, geo) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(path_loss(1.0, 3.6, geo) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(path_loss(10.0, 2.2, geo) == doctest::Approx(1e-3 * std::pow(10.0, -2.2)).epsilon(1e-13));
    CHECK(path_loss(10.0, 2.2, geo) == doctest::Approx(6.30957344480193e-6).epsilon(1e-12));
    CHECK(path_loss(123.4, 0.0, geo) == doctest::Approx(1e-3).epsilon(1e-14));
}

TEST_CASE("a huge rician factor collapses the fading onto the deterministic component")
{
    SystemConfig cfg = small_system(2, 4, 6);
    GeometryConfig geo;
    geo.rician_eps_db = 120.0;
    geo.ue_radius = 1e-9;
    ChannelSet ch = sample_channels(cfg, geo, Rng(91));

    const double d_bs_ris = std::hypot(geo.ris_x - geo.bs_x, geo.ris_y - geo.bs_y);
    const double d_ris_ue = std::hypot(geo.ue_center_x - geo.ris_x, geo.ue_center_y - geo.ris_y);
    const double d_bs_ue = std::hypot(geo.ue_center_x - geo.bs_x, geo.ue_center_y - geo.bs_y);
    const double amp_g = std::sqrt(path_loss(d_bs_ris, geo.pathloss_ris, geo));
    const double amp_r = std::sqrt(path_loss(d_ris_ue, geo.pathloss_ris, geo));
    const double amp_d = std::sqrt(path_loss(d_bs_ue, geo.pathloss_direct, geo));

    for (Eigen::Index n = 0; n < ch.G.rows(); ++n)
        for (Eigen::Index m = 0; m < ch.G.cols(); ++m)
            CHECK(std::abs(ch.G(n, m)) == doctest::Approx(amp_g).epsilon(1e-3));
    for (Eigen::Index k = 0; k < cfg.K; ++k)
    {
        for (Eigen::Index n = 0; n < cfg.N; ++n)
            CHECK(std::abs(ch.h_r(k, n)) == doctest::Approx(amp_r).epsilon(1e-3));
        for (Eigen::Index m = 0; m < cfg.M; ++m)
            CHECK(std::abs(ch.h_d(k, m)) == doctest::Approx(amp_d).epsilon(1e-3));
    }
}

TEST_CASE("fading keeps unit power per link under the default rician factor")
{
    SystemConfig cfg = small_system(2, 4, 4);
    GeometryConfig geo;
    geo.ue_radius = 1e-9; // pin the UE so the per-link path loss is known
    const double l_g = path_loss(std::hypot(geo.ris_x, geo.ris_y), geo.pathloss_ris, geo);
    const double l_r = path_loss(std::hypot(geo.ue_center_x - geo.ris_x, geo.ue_center_y - geo.ris_y),
                                 geo.pathloss_ris, geo);
    const double l_d = path_loss(std::hypot(geo.ue_center_x, geo.ue_center_y),
                                 geo.pathloss_direct, geo);

    double sum_g = 0.0, sum_r = 0.0, sum_d = 0.0;
    long cnt_g = 0, cnt_r = 0, cnt_d = 0;
    const int draws = 12500; // 1e5 samples for each of h_d and h_r
    Rng master(2026);
    for (int d = 0; d < draws; ++d)
    {
        ChannelSet ch = sample_channels(cfg, geo, master.substream(static_cast<std::uint64_t>(d)));
        sum_g += ch.G.cwiseAbs2().sum();
        cnt_g += ch.G.size();
        sum_r += ch.h_r.cwiseAbs2().sum();
        cnt_r += ch.h_r.size();
        sum_d += ch.h_d.cwiseAbs2().sum();
        cnt_d += ch.h_d.size();
    }
    CHECK(sum_g / (static_cast<double>(cnt_g) * l_g) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sum_r / (static_cast<double>(cnt_r) * l_r) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sum_d / (static_cast<double>(cnt_d) * l_d) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("the same seed reproduces the channel set bit for bit")
{
    SystemConfig cfg = small_system(3, 4, 8);
    GeometryConfig geo;
    ChannelSet a = sample_channels(cfg, geo, Rng(1234));
    ChannelSet b = sample_channels(cfg, geo, Rng(1234));
    CHECK(identical(a.G, b.G));
    CHECK(identical(a.h_d, b.h_d));
    CHECK(identical(a.h_r, b.h_r));
    ChannelSet c = sample_channels(cfg, geo, Rng(1235));
    CHECK_FALSE(identical(c.G, a.G));
}

TEST_CASE("shrinking the surface or the user count keeps the shared draws paired")
{
    GeometryConfig geo;
    SystemConfig big = small_system(3, 4, 8);
    ChannelSet full = sample_channels(big, geo, Rng(777));

    SystemConfig fewer_elems = small_system(3, 4, 5);
    ChannelSet trunc_n = sample_channels(fewer_elems, geo, Rng(777));
    CHECK(identical(trunc_n.G, full.G.topRows(5)));
    CHECK(identical(trunc_n.h_r, full.h_r.leftCols(5)));
    CHECK(identical(trunc_n.h_d, full.h_d));

    SystemConfig fewer_users = small_system(2, 4, 8);
    ChannelSet trunc_k = sample_channels(fewer_users, geo, Rng(777));
    CHECK(identical(trunc_k.h_d, full.h_d.topRows(2)));
    CHECK(identical(trunc_k.h_r, full.h_r.topRows(2)));
    CHECK(identical(trunc_k.G, full.G));
}

TEST_CASE("an absent surface yields empty ris channels")
{
    SystemConfig cfg = small_system(2, 4, 0);
    GeometryConfig geo;
    ChannelSet ch = sample_channels(cfg, geo, Rng(5));
    CHECK(ch.G.rows() == 0);
    CHECK(ch.h_r.cols() == 0);
    CHECK(ch.h_d.rows() == 2);
    CHECK(static_cast<int>(ch.H_r.size()) == 2);
    CHECK(ch.H_r[0].rows() == 0);
}

TEST_CASE("cascade matrices are the diagonal product of their factors")
{
    SystemConfig cfg = small_system(2, 3, 4);
    GeometryConfig geo;
    ChannelSet ch = sample_channels(cfg, geo, Rng(17));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N; ++n)
            for (int m = 0; m < cfg.M; ++m)
                CHECK(std::abs(ch.H_r[static_cast<std::size_t>(k)](n, m) -
                               ch.h_r(k, n) * ch.G(n, m)) <= 1e-15);
}
