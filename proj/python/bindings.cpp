/* SPDX-License-Identifier: Apache-2.0
 *
 * Python bindings for the riswipt core: config parsing, the coupled
 * reflection model, and end-to-end solves returning plain dicts.
 */

#include "riswipt/harness.hpp"
#include "riswipt/reflection.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace py = pybind11;

namespace
{

riswipt::ReflectionModel make_model(double f_min, double alpha, double phi)
{
    riswipt::ReflectionModel model;
    model.f_min = f_min;
    model.alpha = alpha;
    model.phi = phi;
    model.validate();
    return model;
}

py::dict row_to_dict(const riswipt::ResultRow &r)
{
    py::dict d;
    d["param"] = r.param;
    d["value"] = r.value;
    d["drop"] = r.drop;
    d["seed"] = r.seed;
    d["method"] = r.method;
    d["sum_rate_bpshz"] = r.sum_rate_bpshz;
    d["rate_ph"] = r.rate_ph;
    d["harvested_power_mw_total"] = r.harvested_power_mw_total;
    d["objective"] = r.objective;
    d["inner_iters"] = r.inner_iters;
    d["outer_stages"] = r.outer_stages;
    d["c4_violation"] = r.c4_violation;
    d["max_residual"] = r.max_residual;
    d["wall_ms"] = r.wall_ms;
    d["status"] = r.status;
    return d;
}

} // namespace

PYBIND11_MODULE(_riswipt, m)
{
    m.doc() = "riswipt core bindings: SWIPT beamforming, RIS reflection, power-split solver";

    m.def(
        "reflection_amplitude",
        [](double f_min, double alpha, double phi, double theta) {
            return riswipt::reflection_amplitude(make_model(f_min, alpha, phi), theta);
        },
        py::arg("f_min"), py::arg("alpha"), py::arg("phi"), py::arg("theta"),
        "Coupled amplitude f(theta) of the practical reflection model.");

    m.def(
        "project_c4",
        [](double f_min, double alpha, double phi, const std::vector<double> &theta) {
            riswipt::RVec t = Eigen::Map<const riswipt::RVec>(
                theta.data(), static_cast<Eigen::Index>(theta.size()));
            riswipt::CVec v = riswipt::project_c4(make_model(f_min, alpha, phi), t);
            return std::vector<std::complex<double>>(v.data(), v.data() + v.size());
        },
        py::arg("f_min"), py::arg("alpha"), py::arg("phi"), py::arg("theta"),
        "Reflection coefficients v_n = f(theta_n) exp(j theta_n).");

    m.def(
        "optimal_theta",
        [](double f_min, double alpha, double phi, std::complex<double> v, int grid_points) {
            return riswipt::optimal_theta(make_model(f_min, alpha, phi), v, grid_points);
        },
        py::arg("f_min"), py::arg("alpha"), py::arg("phi"), py::arg("v"),
        py::arg("grid_points") = 2048,
        "Phase minimizing |v - f(theta) exp(j theta)| for one element.");

    m.def(
        "parse_config",
        [](const std::string &text) {
            riswipt::LoadedConfig cfg = riswipt::parse_config_text(text);
            py::dict d;
            d["m_antennas"] = cfg.system.M;
            d["k_users"] = cfg.system.K;
            d["n_ris"] = cfg.system.N;
            d["p_t_mw"] = cfg.system.p_t;
            d["sigma2_mw"] = cfg.system.sigma2;
            d["delta2_mw"] = cfg.system.delta2;
            d["eta"] = cfg.system.eta;
            d["xi"] = cfg.system.xi;
            d["lambda_bar"] = cfg.system.lambda_bar;
            d["gamma_min"] = cfg.system.gamma_min;
            d["p_min_mw"] = cfg.system.p_min;
            d["refl_f_min"] = cfg.system.reflection.f_min;
            d["refl_alpha"] = cfg.system.reflection.alpha;
            d["refl_phi"] = cfg.system.reflection.phi;
            return d;
        },
        py::arg("text"),
        "Parses key=value config text; dB/dBm keys come back in linear units.");

    m.def(
        "run_single",
        [](const std::string &config_text, std::uint64_t seed, bool timing) {
            riswipt::LoadedConfig cfg = riswipt::parse_config_text(config_text);
            riswipt::RunOptions ropts;
            ropts.timing = timing;
            std::vector<riswipt::ResultRow> rows = riswipt::run_single(cfg, seed, ropts);
            py::list out;
            for (const riswipt::ResultRow &r : rows)
                out.append(row_to_dict(r));
            return out;
        },
        py::arg("config_text"), py::arg("seed"), py::arg("timing") = false,
        "Solves one channel drop with the full method and both baselines.");

    m.def(
        "run_method",
        [](const std::string &config_text, std::uint64_t seed, const std::string &method,
           bool timing) {
            riswipt::LoadedConfig cfg = riswipt::parse_config_text(config_text);
            riswipt::RunOptions ropts;
            ropts.timing = timing;
            return row_to_dict(riswipt::run_method(cfg, seed, method, ropts));
        },
        py::arg("config_text"), py::arg("seed"), py::arg("method"), py::arg("timing") = false,
        "Solves one channel drop with a single method (full, no_ris, random_phase).");
}
