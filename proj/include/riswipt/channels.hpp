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

#ifndef riswipt_channels_H
#define riswipt_channels_H

#include "common.hpp"
#include "model.hpp"

namespace riswipt
{

// Site geometry and propagation constants. Distances in meters, reference
// path loss in dB, Rician factor in dB; boresight of both uniform linear
// arrays is the +x axis when geometry-derived angles are enabled.
struct GeometryConfig
{
    double bs_x = 0.0, bs_y = 0.0;       // base-station position
    double ris_x = 0.0, ris_y = 5.0;     // RIS position
    double ue_center_x = 5.0, ue_center_y = 5.0; // UE disk center
    double ue_radius = 1.0;              // UE disk radius
    double pathloss_ris = 2.2;           // exponent, RIS-aided links
    double pathloss_direct = 3.6;        // exponent, direct links
    double c0_db = -30.0;                // reference path loss at d0
    double d0 = 1.0;                     // reference distance
    double rician_eps_db = 5.0;          // Rician factor
    double d_over_lambda = 0.5;          // element spacing over wavelength
    bool geometry_angles = false;        // derive LOS angles from positions

    double rician_eps_linear() const { return db_to_linear(rician_eps_db); }
    void validate() const;
};

// Uniform linear array response: element m = exp(j 2 pi (d/lambda) m sin(angle)).
CVec steering_vector(int n, double angle, double d_over_lambda = 0.5);

// Distance-dependent gain 10^(c0_db/10) * (dist/d0)^(-exponent), linear scale.
double path_loss(double dist, double exponent, const GeometryConfig &geo);

// Draws one Rician channel realization. Every channel object consumes its own
// substream of `rng`, derived from the construction seed, so results do not
// depend on draw order, shrinking N truncates G/h_r without reshuffling, and
// shrinking K drops trailing users only. That keeps Monte-Carlo drops paired
// when a sweep changes N or K but reuses the same per-drop seed.
ChannelSet sample_channels(const SystemConfig &cfg, const GeometryConfig &geo, const Rng &rng);

} // namespace riswipt

#endif
