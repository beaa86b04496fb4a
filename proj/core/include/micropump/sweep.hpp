#pragma once

#include <optional>
#include <string>
#include <vector>

#include "micropump/config.hpp"
#include "micropump/coupling.hpp"
#include "micropump/setup.hpp"

namespace micropump::sweep {

struct SweepRow {
    double frequency_hz = 0.0;
    bool ok = false;
    std::string error;
    coupling::CycleResult result;
};

struct SweepResult {
    std::vector<SweepRow> rows; // ascending frequency
    int argmax = -1;            // index of the peak net flow among ok rows
    double argmax_frequency_hz = 0.0;
    double peak_flow_ul_min = 0.0;
};

/// The sweep grid: the explicit config list, or a log-spaced grid from
/// fmin to fmax (fmax = 0 resolves to 1.5 x the coupled-f1 estimate).
std::vector<double> sweep_frequencies(const config::RunConfig& cfg, const setup::System& sys);

/// Runs one coupled simulation. When `timeseries_path` is set the per-step
/// CSV is written there (atomically).
coupling::CycleResult run_single(const setup::System& sys, const config::RunConfig& cfg,
                                 double frequency_hz,
                                 const std::optional<std::string>& timeseries_path,
                                 const std::optional<std::string>& snapshot_dir);

/// Fan-out over the grid with `jobs` workers. Results are merged in frequency
/// order; per-row failures are recorded and the sweep continues. Ties at the
/// peak resolve toward the lower frequency.
SweepResult run_sweep(const config::RunConfig& cfg, const setup::System& sys, int jobs);

/// sweep.csv content: `# micropump <version> config=<hash>` then one row per
/// frequency. Byte-identical for identical configs regardless of job count.
std::string sweep_csv(const SweepResult& res, const config::RunConfig& cfg,
                      const setup::System& sys);

/// Single CycleResult in the same row format (summary.csv).
std::string summary_csv(const coupling::CycleResult& r, const config::RunConfig& cfg,
                        const setup::System& sys);

/// Per-step CSV: t_s, voltage_v, w_center_m, q_<n>_<s>..., Q_out_m3s,
/// p_chamber_mean_pa.
std::string timeseries_csv(const std::vector<coupling::TimeSample>& samples,
                           const setup::System& sys);

} // namespace micropump::sweep
