#include "micropump/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "micropump/errors.hpp"
#include "micropump/io.hpp"

namespace micropump::config {

namespace {

std::string trim(std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ValidationError(where + ": bad number '" + tok + "'");
    }
    if (pos != tok.size()) throw ValidationError(where + ": bad number '" + tok + "'");
    return v;
}

long parse_int(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw ValidationError(where + ": bad integer '" + tok + "'");
    }
    if (pos != tok.size()) throw ValidationError(where + ": bad integer '" + tok + "'");
    return v;
}

bool parse_bool(const std::string& tok, const std::string& where) {
    if (tok == "true" || tok == "1") return true;
    if (tok == "false" || tok == "0") return false;
    throw ValidationError(where + ": bad boolean '" + tok + "' (use true/false)");
}

struct KeyDef {
    std::string key;
    std::string doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

std::string fmt_list_d(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

std::string fmt_list_i(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> defs = [] {
        std::vector<KeyDef> r;
        auto D = [&r](std::string key, std::string doc, std::function<double&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); },
                         [ref](RunConfig& c, const std::string& v, const std::string& w) {
                             ref(c) = parse_double(v, w);
                         }});
        };
        auto I = [&r](std::string key, std::string doc, std::function<int&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) {
                             return std::to_string(ref(const_cast<RunConfig&>(c)));
                         },
                         [ref](RunConfig& c, const std::string& v, const std::string& w) {
                             ref(c) = static_cast<int>(parse_int(v, w));
                         }});
        };
        auto B = [&r](std::string key, std::string doc, std::function<bool&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) {
                             return ref(const_cast<RunConfig&>(c)) ? std::string("true") : std::string("false");
                         },
                         [ref](RunConfig& c, const std::string& v, const std::string& w) {
                             ref(c) = parse_bool(v, w);
                         }});
        };
        auto S = [&r](std::string key, std::string doc, std::function<std::string&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); },
                         [ref](RunConfig& c, const std::string& v, const std::string&) { ref(c) = v; }});
        };
        auto LD = [&r](std::string key, std::string doc, std::function<std::vector<double>&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) { return fmt_list_d(ref(const_cast<RunConfig&>(c))); },
                         [ref](RunConfig& c, const std::string& v, const std::string& w) {
                             std::vector<double> out;
                             for (const auto& tok : split_list(v)) out.push_back(parse_double(tok, w));
                             ref(c) = std::move(out);
                         }});
        };
        auto LI = [&r](std::string key, std::string doc, std::function<std::vector<int>&(RunConfig&)> ref) {
            r.push_back({std::move(key), std::move(doc),
                         [ref](const RunConfig& c) { return fmt_list_i(ref(const_cast<RunConfig&>(c))); },
                         [ref](RunConfig& c, const std::string& v, const std::string& w) {
                             std::vector<int> out;
                             for (const auto& tok : split_list(v)) out.push_back(static_cast<int>(parse_int(tok, w)));
                             ref(c) = std::move(out);
                         }});
        };
        S("materials.file", "optional material override file", [](RunConfig& c) -> std::string& { return c.materials.file; });
        D("materials.glass_density_kgm3", "substrate density override", [](RunConfig& c) -> double& { return c.materials.glass_density_kgm3; });
        D("materials.pzt_density_kgm3", "drive layer density override", [](RunConfig& c) -> double& { return c.materials.pzt_density_kgm3; });

        D("plate.radius_m", "clamped plate / chamber radius", [](RunConfig& c) -> double& { return c.plate.radius_m; });
        D("plate.damping_zeta", "modal damping ratio (all retained modes)", [](RunConfig& c) -> double& { return c.plate.damping_zeta; });
        LI("plate.harmonics", "circumferential wavenumbers kept in the basis", [](RunConfig& c) -> std::vector<int>& { return c.plate.harmonics; });
        I("plate.radial_orders", "radial orders per harmonic", [](RunConfig& c) -> int& { return c.plate.radial_orders; });
        I("plate.elements", "radial FEM elements", [](RunConfig& c) -> int& { return c.plate.elements; });
        D("plate.taper_width_frac", "piezo edge-moment taper width / radius", [](RunConfig& c) -> double& { return c.plate.taper_width_frac; });

        D("geometry.channel_width_m", "channel width W", [](RunConfig& c) -> double& { return c.geometry.channel_width_m; });
        D("geometry.obstacle_width_m", "wedge root width W1", [](RunConfig& c) -> double& { return c.geometry.obstacle_width_m; });
        D("geometry.channel_length_m", "channel length L", [](RunConfig& c) -> double& { return c.geometry.channel_length_m; });
        D("geometry.obstacle_section_m", "obstacle section length L1", [](RunConfig& c) -> double& { return c.geometry.obstacle_section_m; });
        D("geometry.wedge_half_angle_deg", "wedge half-angle alpha", [](RunConfig& c) -> double& { return c.geometry.wedge_half_angle_deg; });
        D("geometry.chamber_radius_m", "chamber radius r", [](RunConfig& c) -> double& { return c.geometry.chamber_radius_m; });
        D("geometry.depth_m", "channel/chamber depth h", [](RunConfig& c) -> double& { return c.geometry.depth_m; });
        I("geometry.inlet_wedge_dir", "+1 widens toward outlet, -1 mirrored", [](RunConfig& c) -> int& { return c.geometry.inlet_wedge_dir; });
        I("geometry.outlet_wedge_dir", "+1 widens toward outlet, -1 mirrored", [](RunConfig& c) -> int& { return c.geometry.outlet_wedge_dir; });

        D("fluid.density_kgm3", "liquid density", [](RunConfig& c) -> double& { return c.fluid.density_kgm3; });
        D("fluid.kinematic_visc_m2s", "liquid kinematic viscosity", [](RunConfig& c) -> double& { return c.fluid.kinematic_visc_m2s; });

        D("grid.target_dx_m", "grid spacing (dx = dy)", [](RunConfig& c) -> double& { return c.grid.target_dx_m; });

        D("drive.amplitude_v", "sinusoid amplitude (Vp-p / 2)", [](RunConfig& c) -> double& { return c.drive.amplitude_v; });
        D("drive.frequency_hz", "single-run drive frequency", [](RunConfig& c) -> double& { return c.drive.frequency_hz; });
        D("drive.phase_rad", "drive phase", [](RunConfig& c) -> double& { return c.drive.phase_rad; });

        LD("sweep.frequencies_hz", "explicit sweep grid (empty = log-spaced)", [](RunConfig& c) -> std::vector<double>& { return c.sweep.frequencies_hz; });
        I("sweep.points", "points in the auto log grid", [](RunConfig& c) -> int& { return c.sweep.points; });
        D("sweep.fmin_hz", "auto grid lower bound", [](RunConfig& c) -> double& { return c.sweep.fmin_hz; });
        D("sweep.fmax_hz", "auto grid upper bound (0 = 1.5 x coupled-f1 estimate)", [](RunConfig& c) -> double& { return c.sweep.fmax_hz; });

        D("coupling.dt_s", "time step (0 = period/steps_per_cycle)", [](RunConfig& c) -> double& { return c.coupling.dt_s; });
        I("coupling.steps_per_cycle", "steps per drive period", [](RunConfig& c) -> int& { return c.coupling.steps_per_cycle; });
        I("coupling.subiterations_max", "interface sub-iterations per step", [](RunConfig& c) -> int& { return c.coupling.subiterations_max; });
        D("coupling.relaxation_omega0", "initial under-relaxation", [](RunConfig& c) -> double& { return c.coupling.relaxation_omega0; });
        D("coupling.interface_tolerance", "relative interface convergence tolerance", [](RunConfig& c) -> double& { return c.coupling.interface_tolerance; });
        I("coupling.cycles_total", "drive periods simulated", [](RunConfig& c) -> int& { return c.coupling.cycles_total; });
        I("coupling.cycles_averaged", "final periods averaged", [](RunConfig& c) -> int& { return c.coupling.cycles_averaged; });
        D("coupling.ramp_cycles", "cosine amplitude ramp length, periods", [](RunConfig& c) -> double& { return c.coupling.ramp_cycles; });

        S("output.dir", "output directory", [](RunConfig& c) -> std::string& { return c.output.dir; });
        B("output.timeseries", "write per-run time series CSV", [](RunConfig& c) -> bool& { return c.output.timeseries; });
        I("output.snapshot_every", "field snapshot cadence in steps (0 = never)", [](RunConfig& c) -> int& { return c.output.snapshot_every; });
        I("output.jobs", "sweep workers (0 = hardware)", [](RunConfig& c) -> int& { return c.output.jobs; });
        return r;
    }();
    return defs;
}

const KeyDef* find_key(const std::string& key) {
    for (const auto& def : registry())
        if (def.key == key) return &def;
    return nullptr;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source_name, RunConfig base) {
    IssueList issues;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) {
            issues.add(source_name + ":" + std::to_string(line) + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        const KeyDef* def = find_key(key);
        if (!def) {
            issues.add(source_name + ":" + std::to_string(line) + ": unknown key '" + key + "'");
            continue;
        }
        try {
            def->set(base, val, source_name + ":" + std::to_string(line) + ": key '" + key + "'");
        } catch (const ValidationError& e) {
            issues.add(e.what());
        }
    }
    issues.throw_if_any();
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file not found: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path, std::move(base));
}

void validate(const RunConfig& cfg) {
    IssueList issues;
    auto pos = [&](double v, const char* key) {
        if (!(v > 0.0)) issues.add(std::string("config: ") + key + " must be > 0");
    };
    pos(cfg.materials.glass_density_kgm3, "materials.glass_density_kgm3");
    pos(cfg.materials.pzt_density_kgm3, "materials.pzt_density_kgm3");
    pos(cfg.plate.radius_m, "plate.radius_m");
    if (!(cfg.plate.damping_zeta >= 0.0 && cfg.plate.damping_zeta < 1.0))
        issues.add("config: plate.damping_zeta must be in [0, 1)");
    if (cfg.plate.harmonics.empty()) issues.add("config: plate.harmonics must not be empty");
    for (int n : cfg.plate.harmonics)
        if (n < 0) issues.add("config: plate.harmonics entries must be >= 0");
    if (cfg.plate.radial_orders < 1) issues.add("config: plate.radial_orders must be >= 1");
    if (cfg.plate.elements < 8) issues.add("config: plate.elements must be >= 8");
    if (!(cfg.plate.taper_width_frac > 0.0 && cfg.plate.taper_width_frac <= 0.5))
        issues.add("config: plate.taper_width_frac must be in (0, 0.5]");
    pos(cfg.geometry.channel_width_m, "geometry.channel_width_m");
    pos(cfg.geometry.obstacle_width_m, "geometry.obstacle_width_m");
    pos(cfg.geometry.channel_length_m, "geometry.channel_length_m");
    pos(cfg.geometry.obstacle_section_m, "geometry.obstacle_section_m");
    pos(cfg.geometry.wedge_half_angle_deg, "geometry.wedge_half_angle_deg");
    pos(cfg.geometry.chamber_radius_m, "geometry.chamber_radius_m");
    pos(cfg.geometry.depth_m, "geometry.depth_m");
    if (std::abs(cfg.geometry.inlet_wedge_dir) != 1)
        issues.add("config: geometry.inlet_wedge_dir must be +1 or -1");
    if (std::abs(cfg.geometry.outlet_wedge_dir) != 1)
        issues.add("config: geometry.outlet_wedge_dir must be +1 or -1");
    pos(cfg.fluid.density_kgm3, "fluid.density_kgm3");
    pos(cfg.fluid.kinematic_visc_m2s, "fluid.kinematic_visc_m2s");
    pos(cfg.grid.target_dx_m, "grid.target_dx_m");
    if (!(cfg.drive.amplitude_v >= 0.0)) issues.add("config: drive.amplitude_v must be >= 0");
    pos(cfg.drive.frequency_hz, "drive.frequency_hz");
    for (std::size_t i = 0; i < cfg.sweep.frequencies_hz.size(); ++i) {
        if (!(cfg.sweep.frequencies_hz[i] > 0.0))
            issues.add("config: sweep.frequencies_hz[" + std::to_string(i) + "] must be > 0");
        if (i > 0 && !(cfg.sweep.frequencies_hz[i] > cfg.sweep.frequencies_hz[i - 1]))
            issues.add("config: sweep.frequencies_hz must be strictly increasing at index " +
                       std::to_string(i));
    }
    if (cfg.sweep.points < 2) issues.add("config: sweep.points must be >= 2");
    pos(cfg.sweep.fmin_hz, "sweep.fmin_hz");
    if (cfg.sweep.fmax_hz != 0.0 && !(cfg.sweep.fmax_hz > cfg.sweep.fmin_hz))
        issues.add("config: sweep.fmax_hz must be 0 (auto) or > sweep.fmin_hz");
    if (!(cfg.coupling.dt_s >= 0.0)) issues.add("config: coupling.dt_s must be >= 0");
    if (cfg.coupling.steps_per_cycle < 8) issues.add("config: coupling.steps_per_cycle must be >= 8");
    if (cfg.coupling.subiterations_max < 1)
        issues.add("config: coupling.subiterations_max must be >= 1");
    if (!(cfg.coupling.relaxation_omega0 > 0.0 && cfg.coupling.relaxation_omega0 <= 1.0))
        issues.add("config: coupling.relaxation_omega0 must be in (0, 1]");
    if (!(cfg.coupling.interface_tolerance > 0.0))
        issues.add("config: coupling.interface_tolerance must be > 0");
    if (cfg.coupling.cycles_total < 1) issues.add("config: coupling.cycles_total must be >= 1");
    if (cfg.coupling.cycles_averaged < 1 || cfg.coupling.cycles_averaged > cfg.coupling.cycles_total)
        issues.add("config: coupling.cycles_averaged must be in [1, cycles_total]");
    if (!(cfg.coupling.ramp_cycles >= 0.0)) issues.add("config: coupling.ramp_cycles must be >= 0");
    if (cfg.output.snapshot_every < 0) issues.add("config: output.snapshot_every must be >= 0");
    if (cfg.output.jobs < 0) issues.add("config: output.jobs must be >= 0");
    issues.throw_if_any();
}

std::string serialize(const RunConfig& cfg) {
    std::string out;
    for (const auto& def : registry()) {
        out += def.key;
        out += " = ";
        out += def.get(cfg);
        out += "\n";
    }
    return out;
}

std::string serialize_documented(const RunConfig& cfg) {
    std::string out = "# micropump configuration (key = value, '#' comments)\n";
    std::string section;
    for (const auto& def : registry()) {
        std::string sec = def.key.substr(0, def.key.find('.'));
        if (sec != section) {
            section = sec;
            out += "\n# [" + section + "]\n";
        }
        out += def.key + " = " + def.get(cfg) + "  # " + def.doc + "\n";
    }
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::string hashed;
    for (const auto& def : registry()) {
        if (def.key.rfind("output.", 0) == 0) continue; // runtime-only keys
        hashed += def.key + "=" + def.get(cfg) + ";";
    }
    return hash_hex(hashed);
}

} // namespace micropump::config
