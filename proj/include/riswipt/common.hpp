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

#ifndef riswipt_common_H
#define riswipt_common_H

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace riswipt
{

using c64 = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

// splitmix64 step: advances the state and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Order-free combination of a seed with a stream tag. Used to derive
// independent substreams (per channel object, per Monte-Carlo drop) so that
// draw order elsewhere never shifts a stream.
inline std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t tag)
{
    std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL + (tag << 1));
    return splitmix64(s);
}

inline std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return seed_mix(seed_mix(seed, a), b);
}

// Deterministic random stream built directly on splitmix64. The standard
// library distributions are implementation-defined, which would break
// bit-reproducible outputs, so uniforms and normals are generated explicitly.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : base_(seed), state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the paired value is cached.
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    c64 cgauss()
    {
        const double s = std::numbers::sqrt2 / 2.0;
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    // Independent stream derived from the construction seed, not the current
    // state: substreams are stable no matter how much was drawn before.
    Rng substream(std::uint64_t tag) const { return Rng(seed_mix(base_, tag)); }
    Rng substream(std::uint64_t a, std::uint64_t b) const { return Rng(seed_mix(base_, a, b)); }

    std::uint64_t base_seed() const { return base_; }

  private:
    std::uint64_t base_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Golden-section search for the maximum of a unimodal scalar function on
// [lo, hi]; returns the abscissa once the bracket width drops below tol.
template <typename Fn> double golden_section_max(Fn &&f, double lo, double hi, double tol)
{
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol)
    {
        if (f1 < f2)
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        else
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace riswipt

#endif
