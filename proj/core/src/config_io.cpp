#include "pairtime/config_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "pairtime/errors.hpp"

namespace pairtime {

namespace {

struct IniEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<IniEntry> parse_ini(const std::string& text) {
    std::vector<IniEntry> entries;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        IniEntry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.line = lineno;
        if (e.section.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any section");
        if (e.key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

[[noreturn]] void bad_entry(const IniEntry& e, const std::string& why) {
    throw ConfigError("line " + std::to_string(e.line) + ": [" + e.section +
                      "] " + e.key + ": " + why);
}

double parse_double(const IniEntry& e) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        bad_entry(e, "expected a number, got '" + e.value + "'");
    return v;
}

uint64_t parse_u64(const IniEntry& e) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE ||
        e.value.find('-') != std::string::npos)
        bad_entry(e, "expected a non-negative integer, got '" + e.value + "'");
    return v;
}

FiberSegment parse_segment(const IniEntry& e) {
    FiberSegment seg;
    std::istringstream in(e.value);
    if (!(in >> seg.length_km >> seg.lambda0_nm >> seg.s0_ps_per_nm2_km >>
          seg.attenuation_db_per_km))
        bad_entry(e, "expected: length_km lambda0_nm s0 attenuation_db_per_km");
    std::string extra;
    if (in >> extra) bad_entry(e, "trailing tokens after segment fields");
    return seg;
}

void apply_source(const IniEntry& e, SourceSpec& s) {
    if (e.key == "pump_wavelength_nm") s.pump_wavelength_nm = parse_double(e);
    else if (e.key == "window_full_width_nm") s.window_full_width_nm = parse_double(e);
    else if (e.key == "wdm_edge_nm") s.wdm_edge_nm = parse_double(e);
    else if (e.key == "spectral_shape") s.spectral_shape = spectral_shape_from_string(e.value);
    else if (e.key == "shape_width_nm") s.shape_width_nm = parse_double(e);
    else if (e.key == "pair_rate_hz") s.pair_rate_hz = parse_double(e);
    else if (e.key == "sigma0_ps") s.sigma0_ps = parse_double(e);
    else bad_entry(e, "unknown key");
}

void apply_chain(const IniEntry& e, FiberChain& c) {
    if (e.key == "segment") c.segments.push_back(parse_segment(e));
    else if (e.key == "label") c.label = e.value;
    else if (e.key == "bulk_latency_ps_per_km") c.bulk_latency_ps_per_km = parse_double(e);
    else bad_entry(e, "unknown key");
}

void apply_detector(const IniEntry& e, DetectorSpec& d) {
    if (e.key == "jitter_fwhm_ps") d.jitter_fwhm_ps = parse_double(e);
    else if (e.key == "efficiency") d.efficiency = parse_double(e);
    else if (e.key == "dark_count_rate_hz") d.dark_count_rate_hz = parse_double(e);
    else if (e.key == "dead_time_ps") d.dead_time_ps = parse_double(e);
    else if (e.key == "resolution_ps") d.resolution_ps = parse_double(e);
    else bad_entry(e, "unknown key");
}

void apply_correlator(const IniEntry& e, CorrelatorSettings& c) {
    if (e.key == "bin_width_ps") c.bin_width_ps = parse_double(e);
    else if (e.key == "window_ps") c.window_ps = parse_double(e);
    else if (e.key == "tau_center_ps") {
        if (e.value == "auto") {
            c.auto_center = true;
        } else {
            c.auto_center = false;
            c.tau_center_ps = parse_double(e);
        }
    } else bad_entry(e, "unknown key");
}

void apply_run(const IniEntry& e, ExperimentConfig& cfg) {
    if (e.key == "duration_s") cfg.duration_s = parse_double(e);
    else if (e.key == "seed") cfg.seed = parse_u64(e);
    else if (e.key == "output_dir") cfg.output_dir = e.value;
    else bad_entry(e, "unknown key");
}

void apply_sweep(const IniEntry& e, SweepSpec& sw) {
    if (e.key == "parameter") {
        sw.swept_parameter = e.value;
    } else if (e.key == "mode") {
        sw.mode = sweep_mode_from_string(e.value);
    } else if (e.key == "values_km") {
        sw.values_km.clear();
        std::string item;
        std::istringstream in(e.value);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) bad_entry(e, "empty value in list");
            errno = 0;
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (end == item.c_str() || *end != '\0' || errno == ERANGE)
                bad_entry(e, "expected a number, got '" + item + "'");
            sw.values_km.push_back(v);
        }
        if (sw.values_km.empty()) bad_entry(e, "empty value list");
    } else bad_entry(e, "unknown key");
}

void apply_entries(const std::vector<IniEntry>& entries, ExperimentConfig& cfg,
                   SweepSpec* sweep, bool* saw_sweep) {
    for (const auto& e : entries) {
        if (e.section == "source") apply_source(e, cfg.source);
        else if (e.section == "arm_signal") apply_chain(e, cfg.arm_signal);
        else if (e.section == "arm_idler") apply_chain(e, cfg.arm_idler);
        else if (e.section == "detector_signal") apply_detector(e, cfg.detector_signal);
        else if (e.section == "detector_idler") apply_detector(e, cfg.detector_idler);
        else if (e.section == "correlator") apply_correlator(e, cfg.correlator);
        else if (e.section == "run") apply_run(e, cfg);
        else if (e.section == "sweep") {
            if (!sweep)
                throw ConfigError("config contains a [sweep] section; use the sweep command");
            *saw_sweep = true;
            apply_sweep(e, *sweep);
        } else {
            throw ConfigError("line " + std::to_string(e.line) +
                              ": unknown section [" + e.section + "]");
        }
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void serialize_chain(std::string& out, const char* name, const FiberChain& c) {
    out += std::string("[") + name + "]\n";
    if (!c.label.empty()) out += "label = " + c.label + "\n";
    out += "bulk_latency_ps_per_km = " + fmt(c.bulk_latency_ps_per_km) + "\n";
    for (const auto& s : c.segments)
        out += "segment = " + fmt(s.length_km) + " " + fmt(s.lambda0_nm) + " " +
               fmt(s.s0_ps_per_nm2_km) + " " + fmt(s.attenuation_db_per_km) + "\n";
    out += "\n";
}

void serialize_detector(std::string& out, const char* name, const DetectorSpec& d) {
    out += std::string("[") + name + "]\n";
    out += "jitter_fwhm_ps = " + fmt(d.jitter_fwhm_ps) + "\n";
    out += "efficiency = " + fmt(d.efficiency) + "\n";
    out += "dark_count_rate_hz = " + fmt(d.dark_count_rate_hz) + "\n";
    out += "dead_time_ps = " + fmt(d.dead_time_ps) + "\n";
    out += "resolution_ps = " + fmt(d.resolution_ps) + "\n\n";
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    apply_entries(parse_ini(text), cfg, nullptr, nullptr);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_experiment_file(const std::filesystem::path& path) {
    return parse_experiment_config(read_file(path));
}

SweepSpec parse_sweep_config(const std::string& text) {
    SweepSpec sweep;
    bool saw_sweep = false;
    apply_entries(parse_ini(text), sweep.base, &sweep, &saw_sweep);
    if (!saw_sweep)
        throw ConfigError("config has no [sweep] section; use the run command");
    sweep.validate();
    return sweep;
}

SweepSpec parse_sweep_file(const std::filesystem::path& path) {
    return parse_sweep_config(read_file(path));
}

bool config_has_sweep_section(const std::string& text) {
    for (const auto& e : parse_ini(text))
        if (e.section == "sweep") return true;
    return false;
}

std::string serialize_config(const ExperimentConfig& config,
                             bool include_output_dir) {
    std::string out;
    out += "[source]\n";
    out += "pump_wavelength_nm = " + fmt(config.source.pump_wavelength_nm) + "\n";
    out += "window_full_width_nm = " + fmt(config.source.window_full_width_nm) + "\n";
    out += "wdm_edge_nm = " + fmt(config.source.wdm_edge_nm) + "\n";
    out += "spectral_shape = " + to_string(config.source.spectral_shape) + "\n";
    out += "shape_width_nm = " + fmt(config.source.shape_width_nm) + "\n";
    out += "pair_rate_hz = " + fmt(config.source.pair_rate_hz) + "\n";
    out += "sigma0_ps = " + fmt(config.source.sigma0_ps) + "\n\n";

    serialize_chain(out, "arm_signal", config.arm_signal);
    serialize_chain(out, "arm_idler", config.arm_idler);
    serialize_detector(out, "detector_signal", config.detector_signal);
    serialize_detector(out, "detector_idler", config.detector_idler);

    out += "[correlator]\n";
    out += "bin_width_ps = " + fmt(config.correlator.bin_width_ps) + "\n";
    out += "window_ps = " + fmt(config.correlator.window_ps) + "\n";
    out += "tau_center_ps = ";
    out += config.correlator.auto_center ? "auto" : fmt(config.correlator.tau_center_ps);
    out += "\n\n";

    out += "[run]\n";
    out += "duration_s = " + fmt(config.duration_s) + "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%llu",
                  static_cast<unsigned long long>(config.seed));
    out += std::string("seed = ") + buf + "\n";
    if (include_output_dir && !config.output_dir.empty())
        out += "output_dir = " + config.output_dir + "\n";
    return out;
}

std::string serialize_sweep(const SweepSpec& sweep, bool include_output_dir) {
    std::string out = serialize_config(sweep.base, include_output_dir);
    out += "\n[sweep]\n";
    out += "parameter = " + sweep.swept_parameter + "\n";
    out += "mode = " + to_string(sweep.mode) + "\n";
    out += "values_km = ";
    for (std::size_t i = 0; i < sweep.values_km.size(); ++i) {
        if (i) out += ",";
        out += fmt(sweep.values_km[i]);
    }
    out += "\n";
    return out;
}

}  // namespace pairtime
