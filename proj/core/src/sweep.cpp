#include "micropump/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "micropump/errors.hpp"
#include "micropump/io.hpp"

namespace micropump::sweep {

std::vector<double> sweep_frequencies(const config::RunConfig& cfg, const setup::System& sys) {
    if (!cfg.sweep.frequencies_hz.empty()) return cfg.sweep.frequencies_hz;
    const double fmin = cfg.sweep.fmin_hz;
    const double fmax = cfg.sweep.fmax_hz > 0.0 ? cfg.sweep.fmax_hz : 1.5 * sys.f1_wet_estimate_hz;
    if (!(fmax > fmin))
        throw ValidationError("sweep: resolved fmax " + std::to_string(fmax) +
                              " Hz is not above fmin " + std::to_string(fmin) + " Hz");
    const int n = cfg.sweep.points;
    std::vector<double> f(n);
    const double lmin = std::log(fmin), lmax = std::log(fmax);
    for (int i = 0; i < n; ++i)
        f[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) / (n - 1));
    f.front() = fmin;
    f.back() = fmax;
    return f;
}

coupling::CycleResult run_single(const setup::System& sys, const config::RunConfig& cfg,
                                 double frequency_hz,
                                 const std::optional<std::string>& timeseries_path,
                                 const std::optional<std::string>& snapshot_dir) {
    coupling::DriveSignal drive = setup::drive_from(cfg);
    drive.frequency = frequency_hz;
    coupling::CouplingConfig cc = setup::coupling_from(cfg);

    coupling::CoupledSim sim(sys.modes, sys.piezo_per_volt, sys.grid, sys.props, sys.geometry.depth,
                             drive, cc);
    if (snapshot_dir && cfg.output.snapshot_every > 0) {
        sim.snapshot_every = cfg.output.snapshot_every;
        const std::string dir = *snapshot_dir;
        const auto* gridp = &sys.grid;
        sim.snapshot_hook = [dir, gridp](int step, const fluid::FlowState& st) {
            write_file_atomic(dir + "/fields_" + std::to_string(step) + ".dat",
                              fluid::format_snapshot(st, *gridp));
        };
    }
    coupling::CycleResult res = sim.run_cycles();
    if (timeseries_path)
        write_file_atomic(*timeseries_path, timeseries_csv(sim.timeseries(), sys));
    return res;
}

SweepResult run_sweep(const config::RunConfig& cfg, const setup::System& sys, int jobs) {
    const std::vector<double> freqs = sweep_frequencies(cfg, sys);
    SweepResult out;
    out.rows.resize(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) out.rows[i].frequency_hz = freqs[i];

    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(freqs.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= freqs.size()) return;
            SweepRow& row = out.rows[i];
            try {
                std::optional<std::string> ts;
                if (cfg.output.timeseries)
                    ts = cfg.output.dir + "/timeseries_" + format_double(row.frequency_hz) + "hz.csv";
                row.result = run_single(sys, cfg, row.frequency_hz, ts, std::nullopt);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
                std::fprintf(stderr, "[micropump] sweep point %.6g Hz failed: %s\n",
                             row.frequency_hz, e.what());
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (!out.rows[i].ok) continue;
        const double q = out.rows[i].result.net_flow_ul_min;
        if (out.argmax < 0 || q > out.peak_flow_ul_min) {
            out.argmax = static_cast<int>(i);
            out.peak_flow_ul_min = q;
            out.argmax_frequency_hz = out.rows[i].frequency_hz;
        }
    }
    return out;
}

namespace {

std::string csv_header(const config::RunConfig& cfg) {
    std::string h = "# micropump ";
    h += kVersion;
    h += " config=";
    h += config::config_hash(cfg);
    h += "\n";
    h += "freq_hz,net_flow_ul_min,phase_lag_rad,frac_mode01,centroid_x_m,centroid_y_m,"
         "periodicity_residual\n";
    return h;
}

void append_row(std::string& out, double freq, const coupling::CycleResult* r, int idx01) {
    out += format_double(freq);
    if (!r) {
        out += ",nan,nan,nan,nan,nan,nan\n";
        return;
    }
    const double frac01 = (idx01 >= 0 && idx01 < static_cast<int>(r->modal_fraction.size()))
                              ? r->modal_fraction[static_cast<std::size_t>(idx01)]
                              : std::nan("");
    out += "," + format_double(r->net_flow_ul_min);
    out += "," + format_double(r->phase_lag_rad);
    out += "," + format_double(frac01);
    out += "," + format_double(r->centroid_x);
    out += "," + format_double(r->centroid_y);
    out += "," + format_double(r->periodicity_residual);
    out += "\n";
}

} // namespace

std::string sweep_csv(const SweepResult& res, const config::RunConfig& cfg, const setup::System& sys) {
    std::string out = csv_header(cfg);
    const int idx01 = sys.mode_index(0, 1);
    for (const auto& row : res.rows)
        append_row(out, row.frequency_hz, row.ok ? &row.result : nullptr, idx01);
    return out;
}

std::string summary_csv(const coupling::CycleResult& r, const config::RunConfig& cfg,
                        const setup::System& sys) {
    std::string out = csv_header(cfg);
    append_row(out, r.frequency_hz, &r, sys.mode_index(0, 1));
    return out;
}

std::string timeseries_csv(const std::vector<coupling::TimeSample>& samples,
                           const setup::System& sys) {
    std::string out = "t_s,voltage_v,w_center_m";
    for (const auto& m : sys.modes)
        out += ",q_" + std::to_string(m.n) + "_" + std::to_string(m.radial_order);
    out += ",Q_out_m3s,p_chamber_mean_pa\n";
    for (const auto& s : samples) {
        out += format_double(s.t);
        out += "," + format_double(s.voltage);
        out += "," + format_double(s.w_center);
        for (double q : s.q) out += "," + format_double(q);
        out += "," + format_double(s.q_out);
        out += "," + format_double(s.p_chamber_mean);
        out += "\n";
    }
    return out;
}

} // namespace micropump::sweep
