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

#include "riswipt/channels.hpp"

#include <stdexcept>

namespace riswipt
{

// Substream tags for the per-object channel streams.
namespace
{
constexpr std::uint64_t tag_bs_ris = 0x10;
constexpr std::uint64_t tag_ue_pos = 0x20;
constexpr std::uint64_t tag_direct = 0x30;
constexpr std::uint64_t tag_ris_ue = 0x40;
} // namespace

void GeometryConfig::validate() const
{
    if (ue_radius <= 0.0 || d0 <= 0.0)
        throw std::invalid_argument("GeometryConfig: radii and distances must be > 0.");
    if (pathloss_ris <= 0.0 || pathloss_direct <= 0.0)
        throw std::invalid_argument("GeometryConfig: path-loss exponents must be > 0.");
    if (d_over_lambda <= 0.0)
        throw std::invalid_argument("GeometryConfig: d_over_lambda must be > 0.");
}

CVec steering_vector(int n, double angle, double d_over_lambda)
{
    if (n <= 0)
        throw std::invalid_argument("steering_vector: element count must be >= 1.");
    CVec a(n);
    double step = 2.0 * pi * d_over_lambda * std::sin(angle);
    for (int m = 0; m < n; ++m)
        a[m] = std::polar(1.0, step * static_cast<double>(m));
    return a;
}

double path_loss(double dist, double exponent, const GeometryConfig &geo)
{
    if (dist <= 0.0)
        throw std::invalid_argument("path_loss: distance must be > 0.");
    return db_to_linear(geo.c0_db) * std::pow(dist / geo.d0, -exponent);
}

namespace
{

double distance(double ax, double ay, double bx, double by)
{
    return std::hypot(bx - ax, by - ay);
}

// Angle of b as seen from a, against the +x boresight.
double bearing(double ax, double ay, double bx, double by)
{
    return std::atan2(by - ay, bx - ax);
}

// Rician mix of a unit-modulus LOS entry and a unit-variance NLOS draw,
// scaled so that E|entry|^2 equals the link path loss.
c64 rician_entry(double amp, double los_w, double nlos_w, c64 los, Rng &rng)
{
    return amp * (los_w * los + nlos_w * rng.cgauss());
}

} // namespace

ChannelSet sample_channels(const SystemConfig &cfg, const GeometryConfig &geo, const Rng &rng)
{
    cfg.validate();
    geo.validate();

    const double eps = geo.rician_eps_linear();
    const double los_w = std::sqrt(eps / (1.0 + eps));
    const double nlos_w = std::sqrt(1.0 / (1.0 + eps));

    ChannelSet ch;
    ch.G = CMat(cfg.N, cfg.M);
    ch.h_d = CMat(cfg.K, cfg.M);
    ch.h_r = CMat(cfg.K, cfg.N);

    // BS -> RIS matrix. The stream draws the two LOS angles first, then the
    // NLOS entries row by row, so a smaller N reuses the leading rows.
    if (cfg.N > 0)
    {
        Rng g_rng = rng.substream(tag_bs_ris);
        double aoa, aod;
        if (geo.geometry_angles)
        {
            // Burn the angle draws so the NLOS entries coincide between the
            // geometry-derived and random-angle modes under the same seed.
            aod = bearing(geo.bs_x, geo.bs_y, geo.ris_x, geo.ris_y);
            aoa = bearing(geo.ris_x, geo.ris_y, geo.bs_x, geo.bs_y);
            g_rng.uniform();
            g_rng.uniform();
        }
        else
        {
            aoa = g_rng.uniform(-pi / 2.0, pi / 2.0);
            aod = g_rng.uniform(-pi / 2.0, pi / 2.0);
        }
        CVec a_n = steering_vector(cfg.N, aoa, geo.d_over_lambda);
        CVec a_m = steering_vector(cfg.M, aod, geo.d_over_lambda);
        double amp = std::sqrt(
            path_loss(distance(geo.bs_x, geo.bs_y, geo.ris_x, geo.ris_y), geo.pathloss_ris, geo));
        for (int n = 0; n < cfg.N; ++n)
            for (int m = 0; m < cfg.M; ++m)
                ch.G(n, m) = rician_entry(amp, los_w, nlos_w, a_n[n] * std::conj(a_m[m]), g_rng);
    }

    for (int k = 0; k < cfg.K; ++k)
    {
        // UE position, uniform in the disk.
        Rng pos_rng = rng.substream(tag_ue_pos, static_cast<std::uint64_t>(k));
        double radius = geo.ue_radius * std::sqrt(pos_rng.uniform());
        double az = pos_rng.uniform(0.0, 2.0 * pi);
        double ue_x = geo.ue_center_x + radius * std::cos(az);
        double ue_y = geo.ue_center_y + radius * std::sin(az);

        // Direct link BS -> UE: 1 x M, steering on the transmit side only.
        {
            Rng d_rng = rng.substream(tag_direct, static_cast<std::uint64_t>(k));
            double aod = geo.geometry_angles ? bearing(geo.bs_x, geo.bs_y, ue_x, ue_y)
                                             : d_rng.uniform(-pi / 2.0, pi / 2.0);
            if (geo.geometry_angles)
                d_rng.uniform();
            CVec a_m = steering_vector(cfg.M, aod, geo.d_over_lambda);
            double amp = std::sqrt(
                path_loss(distance(geo.bs_x, geo.bs_y, ue_x, ue_y), geo.pathloss_direct, geo));
            for (int m = 0; m < cfg.M; ++m)
                ch.h_d(k, m) = rician_entry(amp, los_w, nlos_w, std::conj(a_m[m]), d_rng);
        }

        // Reflected link RIS -> UE: 1 x N, steering on the RIS side.
        if (cfg.N > 0)
        {
            Rng r_rng = rng.substream(tag_ris_ue, static_cast<std::uint64_t>(k));
            double aod = geo.geometry_angles ? bearing(geo.ris_x, geo.ris_y, ue_x, ue_y)
                                             : r_rng.uniform(-pi / 2.0, pi / 2.0);
            if (geo.geometry_angles)
                r_rng.uniform();
            CVec a_n = steering_vector(cfg.N, aod, geo.d_over_lambda);
            double amp = std::sqrt(
                path_loss(distance(geo.ris_x, geo.ris_y, ue_x, ue_y), geo.pathloss_ris, geo));
            for (int n = 0; n < cfg.N; ++n)
                ch.h_r(k, n) = rician_entry(amp, los_w, nlos_w, std::conj(a_n[n]), r_rng);
        }
    }

    ch.build_cascades();
    return ch;
}

} // namespace riswipt
