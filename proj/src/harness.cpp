/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#include "riswipt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace riswipt
{

namespace
{

[[noreturn]] void config_error(int line, const std::string &msg)
{
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string &value, const std::string &key, int line)
{
    std::size_t pos = 0;
    double out = 0.0;
    try
    {
        out = std::stod(value, &pos);
    }
    catch (const std::exception &)
    {
        config_error(line, "value of '" + key + "' is not a number: '" + value + "'");
    }
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
        ++pos;
    if (pos != value.size())
        config_error(line, "trailing characters after the value of '" + key + "'");
    return out;
}

int parse_int(const std::string &value, const std::string &key, int line)
{
    double d = parse_double(value, key, line);
    double r = std::round(d);
    if (std::abs(d - r) > 1e-9 || std::abs(r) > 2147483647.0)
        config_error(line, "value of '" + key + "' must be an integer");
    return static_cast<int>(r);
}

bool parse_bool(const std::string &value, const std::string &key, int line)
{
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    config_error(line, "value of '" + key + "' must be true/false/1/0");
}

std::string trim(const std::string &s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

LoadedConfig parse_config_text(const std::string &text)
{
    LoadedConfig cfg;

    // Handlers receive (value string, line) with dB/dBm conversion applied
    // where the key name calls for it.
    using Handler = std::function<void(const std::string &, int)>;
    std::map<std::string, Handler> keys;
    auto add_double = [&](const std::string &name, double *slot) {
        keys[name] = [slot, name](const std::string &v, int line_no) {
            *slot = parse_double(v, name, line_no);
        };
    };
    auto add_int = [&](const std::string &name, int *slot) {
        keys[name] = [slot, name](const std::string &v, int line_no) {
            *slot = parse_int(v, name, line_no);
        };
    };
    auto add_bool = [&](const std::string &name, bool *slot) {
        keys[name] = [slot, name](const std::string &v, int line_no) {
            *slot = parse_bool(v, name, line_no);
        };
    };
    auto add_dbm_mw = [&](const std::string &name, double *slot) {
        keys[name] = [slot, name](const std::string &v, int line_no) {
            *slot = dbm_to_mw(parse_double(v, name, line_no));
        };
    };
    auto add_db_linear = [&](const std::string &name, double *slot) {
        keys[name] = [slot, name](const std::string &v, int line_no) {
            *slot = db_to_linear(parse_double(v, name, line_no));
        };
    };

    add_int("m_antennas", &cfg.system.M);
    add_int("k_users", &cfg.system.K);
    add_int("n_ris", &cfg.system.N);
    add_dbm_mw("p_t_dbm", &cfg.system.p_t);
    add_dbm_mw("sigma2_dbm", &cfg.system.sigma2);
    add_dbm_mw("delta2_dbm", &cfg.system.delta2);
    add_double("eta", &cfg.system.eta);
    add_double("xi", &cfg.system.xi);
    add_double("lambda_bar", &cfg.system.lambda_bar);
    add_db_linear("gamma_min_db", &cfg.system.gamma_min);
    add_double("p_min_mw", &cfg.system.p_min);
    add_double("refl_f_min", &cfg.system.reflection.f_min);
    add_double("refl_alpha", &cfg.system.reflection.alpha);
    add_double("refl_phi", &cfg.system.reflection.phi);

    add_double("bs_x", &cfg.geometry.bs_x);
    add_double("bs_y", &cfg.geometry.bs_y);
    add_double("ris_x", &cfg.geometry.ris_x);
    add_double("ris_y", &cfg.geometry.ris_y);
    add_double("ue_center_x", &cfg.geometry.ue_center_x);
    add_double("ue_center_y", &cfg.geometry.ue_center_y);
    add_double("ue_radius", &cfg.geometry.ue_radius);
    add_double("pathloss_ris", &cfg.geometry.pathloss_ris);
    add_double("pathloss_direct", &cfg.geometry.pathloss_direct);
    add_double("c0_db", &cfg.geometry.c0_db);
    add_double("d0", &cfg.geometry.d0);
    add_double("rician_eps_db", &cfg.geometry.rician_eps_db);
    add_double("d_over_lambda", &cfg.geometry.d_over_lambda);
    add_bool("geometry_angles", &cfg.geometry.geometry_angles);

    add_double("gamma0", &cfg.solve.gamma0);
    add_double("gamma_factor", &cfg.solve.gamma_factor);
    add_double("gamma_max", &cfg.solve.gamma_max);
    add_double("inner_tol", &cfg.solve.inner_tol);
    add_int("inner_cap", &cfg.solve.inner_cap);
    add_double("c4_tol", &cfg.solve.c4_tol);
    add_int("ramp_stages", &cfg.solve.ramp_stages);
    add_double("rho_floor", &cfg.solve.rho_floor);
    add_double("aux_tol", &cfg.solve.aux_tol);
    add_int("aux_cap", &cfg.solve.aux_cap);
    add_int("theta_grid", &cfg.solve.theta_grid);
    add_double("sca_tol", &cfg.solve.sca.tol);
    add_int("sca_rounds", &cfg.solve.sca.max_rounds);
    add_double("qcqp_tol", &cfg.solve.sca.qcqp.tol);
    add_double("qcqp_mu", &cfg.solve.sca.qcqp.mu);
    add_int("qcqp_newton_cap", &cfg.solve.sca.qcqp.newton_cap);

    const std::vector<std::string> required = {
        "m_antennas", "k_users",   "n_ris", "p_t_dbm",      "sigma2_dbm", "delta2_dbm",
        "eta",        "xi",        "lambda_bar", "gamma_min_db", "p_min_mw"};

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            config_error(line_no, "expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            config_error(line_no, "empty key");
        auto it = keys.find(key);
        if (it == keys.end())
            config_error(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            config_error(line_no, "duplicate key '" + key + "'");
        it->second(value, line_no);
    }

    for (const std::string &key : required)
        if (seen.count(key) == 0)
            throw std::runtime_error("config: missing required key '" + key + "'");

    cfg.system.validate();
    cfg.geometry.validate();
    cfg.solve.validate();
    return cfg;
}

LoadedConfig load_config(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

SweepParam parse_sweep_param(const std::string &name)
{
    if (name == "n_ris")
        return SweepParam::n_ris;
    if (name == "lambda_bar")
        return SweepParam::lambda_bar;
    if (name == "f_min")
        return SweepParam::f_min;
    if (name == "k_users")
        return SweepParam::k_users;
    throw std::runtime_error("sweep: unknown parameter '" + name +
                             "' (expected n_ris, lambda_bar, f_min, or k_users)");
}

std::string to_string(SweepParam p)
{
    switch (p)
    {
    case SweepParam::n_ris: return "n_ris";
    case SweepParam::lambda_bar: return "lambda_bar";
    case SweepParam::f_min: return "f_min";
    case SweepParam::k_users: return "k_users";
    }
    return "unknown";
}

int sweep_param_ordinal(SweepParam p)
{
    return static_cast<int>(p);
}

void SweepSpec::validate() const
{
    if (values.empty())
        throw std::runtime_error("sweep: values must be non-empty");
    if (!std::is_sorted(values.begin(), values.end()))
        throw std::runtime_error("sweep: values must be ascending");
    if (drops < 1)
        throw std::runtime_error("sweep: drops must be >= 1");
}

LoadedConfig apply_sweep_value(const LoadedConfig &config, SweepParam param, double value)
{
    LoadedConfig out = config;
    auto as_int = [&](const char *name) {
        double r = std::round(value);
        if (std::abs(value - r) > 1e-9 || r < 0.0)
            throw std::runtime_error(std::string("sweep: ") + name +
                                     " requires a non-negative integer value");
        return static_cast<int>(r);
    };
    switch (param)
    {
    case SweepParam::n_ris: out.system.N = as_int("n_ris"); break;
    case SweepParam::lambda_bar: out.system.lambda_bar = value; break;
    case SweepParam::f_min: out.system.reflection.f_min = value; break;
    case SweepParam::k_users: out.system.K = as_int("k_users"); break;
    }
    out.system.validate();
    return out;
}

namespace
{

ResultRow row_from_result(const SolveResult &r, const char *method, std::uint64_t seed,
                          double wall_ms)
{
    ResultRow row;
    row.param = "single";
    row.value = 0.0;
    row.drop = 0;
    row.seed = seed;
    row.method = method;
    row.sum_rate_bpshz = r.metrics.rate_id;
    row.rate_ph = r.metrics.rate_ph;
    row.harvested_power_mw_total = r.metrics.p_harv.size() > 0 ? r.metrics.p_harv.sum() : 0.0;
    row.objective = r.metrics.objective;
    row.inner_iters = r.inner_iters;
    row.outer_stages = r.outer_stages;
    row.c4_violation = r.metrics.c4_violation;
    row.max_residual = r.residuals.max_inequality();
    row.wall_ms = wall_ms;
    row.status = to_string(r.status);
    return row;
}

} // namespace

namespace
{

ResultRow run_one_method(const LoadedConfig &c, const ChannelSet &channels, std::uint64_t seed,
                         const std::string &method, const RunOptions &ropts)
{
    if (method != "full" && method != "no_ris" && method != "random_phase")
        throw std::invalid_argument("run_method: unknown method '" + method + "'");
    auto t0 = std::chrono::steady_clock::now();
    SolveResult r;
    try
    {
        if (method == "full")
        {
            Rng rng(seed_mix(seed, 0xF0));
            r = penalty_solve(c.system, channels, c.solve, rng);
        }
        else if (method == "no_ris")
        {
            r = no_ris_baseline(c.system, channels, c.solve);
        }
        else
        {
            Rng rng(seed_mix(seed, 0xF1));
            r = random_phase_baseline(c.system, channels, c.solve, rng);
        }
    }
    catch (const std::exception &)
    {
        // Defensive: a block failure counts as an infeasible cell rather
        // than aborting the batch.
        r = SolveResult{};
        r.status = SolveStatus::infeasible;
        r.metrics.p_harv = RVec::Zero(c.system.K);
        r.residuals = ConstraintResiduals{};
    }
    double ms = 0.0;
    if (ropts.timing)
    {
        auto t1 = std::chrono::steady_clock::now();
        ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return row_from_result(r, method.c_str(), seed, ms);
}

} // namespace

std::vector<ResultRow> run_single(const LoadedConfig &config, std::uint64_t seed,
                                  const RunOptions &ropts)
{
    LoadedConfig c = config;
    c.solve.collect_trace = false; // rows carry the aggregate counters only

    Rng channel_rng(seed);
    ChannelSet channels = sample_channels(c.system, c.geometry, channel_rng);

    std::vector<ResultRow> rows;
    rows.push_back(run_one_method(c, channels, seed, "full", ropts));
    rows.push_back(run_one_method(c, channels, seed, "no_ris", ropts));
    rows.push_back(run_one_method(c, channels, seed, "random_phase", ropts));
    return rows;
}

ResultRow run_method(const LoadedConfig &config, std::uint64_t seed, const std::string &method,
                     const RunOptions &ropts)
{
    LoadedConfig c = config;
    c.solve.collect_trace = false;
    Rng channel_rng(seed);
    ChannelSet channels = sample_channels(c.system, c.geometry, channel_rng);
    return run_one_method(c, channels, seed, method, ropts);
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow> &rows)
{
    // Preserve first-appearance order of (value, method) groups so the
    // aggregate follows the sweep order.
    std::vector<AggregateRow> out;
    auto find_group = [&](const ResultRow &r) -> AggregateRow & {
        for (AggregateRow &g : out)
            if (g.value == r.value && g.method == r.method)
                return g;
        AggregateRow g;
        g.param = r.param;
        g.value = r.value;
        g.method = r.method;
        out.push_back(std::move(g));
        return out.back();
    };
    for (const ResultRow &r : rows)
    {
        AggregateRow &g = find_group(r);
        g.drops += 1;
        if (r.status == "converged")
        {
            g.converged += 1;
            g.mean_sum_rate_bpshz += r.sum_rate_bpshz;
            g.mean_rate_ph += r.rate_ph;
            g.mean_harvested_power_mw_total += r.harvested_power_mw_total;
            g.mean_objective += r.objective;
        }
    }
    for (AggregateRow &g : out)
        if (g.converged > 0)
        {
            g.mean_sum_rate_bpshz /= g.converged;
            g.mean_rate_ph /= g.converged;
            g.mean_harvested_power_mw_total /= g.converged;
            g.mean_objective /= g.converged;
        }
    return out;
}

std::string results_csv_text(const std::vector<ResultRow> &rows)
{
    std::ostringstream out;
    out << "param,value,drop,seed,method,sum_rate_bpshz,rate_ph,harvested_power_mw_total,"
           "objective,inner_iters,outer_stages,c4_violation,max_residual,wall_ms,status\r\n";
    for (const ResultRow &r : rows)
    {
        out << r.param << ',' << format_double(r.value) << ',' << r.drop << ',' << r.seed << ','
            << r.method << ',' << format_double(r.sum_rate_bpshz) << ','
            << format_double(r.rate_ph) << ',' << format_double(r.harvested_power_mw_total) << ','
            << format_double(r.objective) << ',' << r.inner_iters << ',' << r.outer_stages << ','
            << format_double(r.c4_violation) << ',' << format_double(r.max_residual) << ','
            << format_double(r.wall_ms) << ',' << r.status << "\r\n";
    }
    return out.str();
}

std::string aggregate_csv_text(const std::vector<AggregateRow> &rows)
{
    std::ostringstream out;
    out << "param,value,method,drops,converged,mean_sum_rate_bpshz,mean_rate_ph,"
           "mean_harvested_power_mw_total,mean_objective\r\n";
    for (const AggregateRow &r : rows)
    {
        out << r.param << ',' << format_double(r.value) << ',' << r.method << ',' << r.drops << ','
            << r.converged << ',' << format_double(r.mean_sum_rate_bpshz) << ','
            << format_double(r.mean_rate_ph) << ','
            << format_double(r.mean_harvested_power_mw_total) << ','
            << format_double(r.mean_objective) << "\r\n";
    }
    return out.str();
}

std::string plot_script_text(const SweepSpec &sweep)
{
    std::string param = to_string(sweep.parameter);
    std::string xlabel;
    switch (sweep.parameter)
    {
    case SweepParam::n_ris: xlabel = "RIS elements N"; break;
    case SweepParam::lambda_bar: xlabel = "harvested-power weight lambda"; break;
    case SweepParam::f_min: xlabel = "minimum reflection amplitude f_{min}"; break;
    case SweepParam::k_users: xlabel = "users K"; break;
    }
    std::ostringstream out;
    out << "# gnuplot script generated by the sweep harness; expects aggregate.csv next to it\n"
        << "set datafile separator ','\n"
        << "set key outside right\n"
        << "set grid\n"
        << "set xlabel '" << xlabel << "'\n"
        << "set terminal pngcairo size 1000,700\n"
        << "\n"
        << "set output 'sweep_" << param << "_rates.png'\n"
        << "set ylabel 'sum rate [bits/s/Hz]'\n"
        << "plot 'aggregate.csv' skip 1 using (strcol(3) eq 'full' ? column(2) : NaN):6 "
           "with linespoints title 'full', \\\n"
        << "     '' skip 1 using (strcol(3) eq 'no_ris' ? column(2) : NaN):6 "
           "with linespoints title 'no RIS', \\\n"
        << "     '' skip 1 using (strcol(3) eq 'random_phase' ? column(2) : NaN):6 "
           "with linespoints title 'random phase'\n"
        << "\n"
        << "set output 'sweep_" << param << "_harvest.png'\n"
        << "set ylabel 'total harvested power [mW]'\n"
        << "plot 'aggregate.csv' skip 1 using (strcol(3) eq 'full' ? column(2) : NaN):8 "
           "with linespoints title 'full', \\\n"
        << "     '' skip 1 using (strcol(3) eq 'no_ris' ? column(2) : NaN):8 "
           "with linespoints title 'no RIS', \\\n"
        << "     '' skip 1 using (strcol(3) eq 'random_phase' ? column(2) : NaN):8 "
           "with linespoints title 'random phase'\n";
    return out.str();
}

namespace
{

void write_text_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace

SweepOutput run_sweep(const LoadedConfig &config, const SweepSpec &sweep,
                      const std::string &out_dir, const RunOptions &ropts)
{
    sweep.validate();
    std::filesystem::create_directories(out_dir);

    const std::size_t drops = static_cast<std::size_t>(sweep.drops);
    const std::size_t cells = sweep.values.size() * drops;
    std::vector<std::vector<ResultRow>> cell_rows(cells);

    unsigned jobs = ropts.jobs > 0 ? static_cast<unsigned>(ropts.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;)
        {
            std::size_t i = next.fetch_add(1);
            if (i >= cells)
                return;
            std::size_t vi = i / drops;
            int drop = static_cast<int>(i % drops);
            std::uint64_t seed =
                seed_mix(sweep.master_seed,
                         static_cast<std::uint64_t>(sweep_param_ordinal(sweep.parameter)),
                         static_cast<std::uint64_t>(drop));
            std::vector<ResultRow> rows;
            try
            {
                LoadedConfig c = apply_sweep_value(config, sweep.parameter, sweep.values[vi]);
                rows = run_single(c, seed, ropts);
            }
            catch (const std::exception &)
            {
                ResultRow bad;
                bad.seed = seed;
                bad.method = "full";
                bad.status = "infeasible";
                rows = {bad};
            }
            for (ResultRow &r : rows)
            {
                r.param = to_string(sweep.parameter);
                r.value = sweep.values[vi];
                r.drop = drop;
            }
            cell_rows[i] = std::move(rows);
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t)
        pool.emplace_back(worker);
    worker();
    for (std::thread &t : pool)
        t.join();

    SweepOutput out;
    for (std::vector<ResultRow> &rows : cell_rows)
        for (ResultRow &r : rows)
            out.rows.push_back(std::move(r));
    out.all_converged =
        std::all_of(out.rows.begin(), out.rows.end(),
                    [](const ResultRow &r) { return r.status == "converged"; });

    out.results_path = (std::filesystem::path(out_dir) / "results.csv").string();
    out.aggregate_path = (std::filesystem::path(out_dir) / "aggregate.csv").string();
    out.plot_path = (std::filesystem::path(out_dir) / "plot.gp").string();
    write_text_file(out.results_path, results_csv_text(out.rows));
    write_text_file(out.aggregate_path, aggregate_csv_text(aggregate_rows(out.rows)));
    write_text_file(out.plot_path, plot_script_text(sweep));
    return out;
}

std::string write_results(const std::vector<ResultRow> &rows, const std::string &out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::string path = (std::filesystem::path(out_dir) / "results.csv").string();
    write_text_file(path, results_csv_text(rows));
    return path;
}

} // namespace riswipt
