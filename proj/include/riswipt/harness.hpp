/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt: joint transmit beamforming, RIS reflection, and power-split
 * optimization for SWIPT downlinks.
 */

#ifndef riswipt_harness_H
#define riswipt_harness_H

#include "riswipt/channels.hpp"
#include "riswipt/model.hpp"
#include "riswipt/optimizer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace riswipt
{

struct LoadedConfig
{
    SystemConfig system;
    GeometryConfig geometry;
    SolveOptions solve;
};

// Flat key=value text, one pair per line, '#' comments. dB/dBm-valued keys
// (p_t_dbm, sigma2_dbm, delta2_dbm, gamma_min_db, c0_db, rician_eps_db) are
// converted to linear milliwatt/ratio units here, so the returned structs
// carry linear values only. Unknown or duplicate keys are rejected with the
// key name and line number.
LoadedConfig parse_config_text(const std::string &text);
LoadedConfig load_config(const std::string &path);

enum class SweepParam
{
    n_ris,
    lambda_bar,
    f_min,
    k_users
};

SweepParam parse_sweep_param(const std::string &name);
std::string to_string(SweepParam p);

// Stable ordinal hashed into per-drop seeds. It identifies the swept
// parameter, not the position in the value list, so drop d of every value
// shares one seed and the sampled channels pair up across values.
int sweep_param_ordinal(SweepParam p);

struct SweepSpec
{
    SweepParam parameter = SweepParam::n_ris;
    std::vector<double> values; // non-empty, ascending
    int drops = 1;
    std::uint64_t master_seed = 0;

    void validate() const;
};

// One CSV row: a (scenario cell, method) pair.
struct ResultRow
{
    std::string param;   // swept parameter name, or "single"
    double value = 0.0;  // swept value, or 0
    int drop = 0;
    std::uint64_t seed = 0;
    std::string method;  // "full", "no_ris", "random_phase"
    double sum_rate_bpshz = 0.0;
    double rate_ph = 0.0;
    double harvested_power_mw_total = 0.0;
    double objective = 0.0;
    int inner_iters = 0;
    int outer_stages = 0;
    double c4_violation = 0.0;
    double max_residual = 0.0;
    double wall_ms = 0.0;
    std::string status;
};

struct RunOptions
{
    bool timing = true; // false writes wall_ms = 0 for byte-stable output
    int jobs = 0;       // sweep worker threads; 0 picks the hardware count
};

// Applies one sweep value to a parsed config. Integer-valued parameters
// (n_ris, k_users) reject non-integral values.
LoadedConfig apply_sweep_value(const LoadedConfig &config, SweepParam param, double value);

// Samples one channel set from the seed and runs the full solver plus both
// baselines on it. Solver failures land in the status column; this never
// throws for solver reasons.
std::vector<ResultRow> run_single(const LoadedConfig &config, std::uint64_t seed,
                                  const RunOptions &ropts = {});

// Same channel draw as run_single but solves one method only ("full",
// "no_ris", or "random_phase"). Rejects unknown method names.
ResultRow run_method(const LoadedConfig &config, std::uint64_t seed, const std::string &method,
                     const RunOptions &ropts = {});

// Per-(value, method) means over converged rows only.
struct AggregateRow
{
    std::string param;
    double value = 0.0;
    std::string method;
    int drops = 0;     // rows aggregated
    int converged = 0; // rows entering the means
    double mean_sum_rate_bpshz = 0.0;
    double mean_rate_ph = 0.0;
    double mean_harvested_power_mw_total = 0.0;
    double mean_objective = 0.0;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow> &rows);

// RFC 4180 serialization (CRLF line endings, %.17g numbers so every row
// parses back to the exact doubles).
std::string results_csv_text(const std::vector<ResultRow> &rows);
std::string aggregate_csv_text(const std::vector<AggregateRow> &rows);
std::string plot_script_text(const SweepSpec &sweep);

struct SweepOutput
{
    std::vector<ResultRow> rows;
    std::string results_path;
    std::string aggregate_path;
    std::string plot_path;
    bool all_converged = true;
};

// Runs every (value, drop) cell in a worker pool, gathers rows in
// deterministic order, and writes results.csv, aggregate.csv, and plot.gp
// under out_dir.
SweepOutput run_sweep(const LoadedConfig &config, const SweepSpec &sweep,
                      const std::string &out_dir, const RunOptions &ropts = {});

// Writes rows from a non-sweep invocation (run/baseline) to results.csv.
std::string write_results(const std::vector<ResultRow> &rows, const std::string &out_dir);

} // namespace riswipt

#endif
