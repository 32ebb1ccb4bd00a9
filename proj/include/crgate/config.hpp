// Run configuration: a flat "dotted.key = value" text format with '#'
// comments. Rates are given as ordinary frequencies in Hz and converted to
// angular units when the device parameters are built.
//
//   protocol.n = 6
//   protocol.theta = hadamard-pi4
//   device.f_g_hz = 220e6
//   sweep.lambda_over_omega = 10, 20, 40

#pragma once

#include "crgate/hamiltonians.hpp"
#include "crgate/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crgate {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kHadamardPreset = "hadamard-pi4";

inline const std::vector<std::string>& sweep_axis_names() {
    static const std::vector<std::string> names{"n", "lambda_over_omega", "delta_c_ratio", "theta", "f_omega_hz"};
    return names;
}

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct RunConfig {
    int n = 3;
    double theta = std::numbers::pi / 4.0;
    bool theta_preset = true;  // theta came from "hadamard-pi4"
    Tier tier = Tier::T0;

    double f_g_hz = 220e6;
    double f_gprime_hz = 220e6;
    double f_gdprime_hz = 220e6;
    double f_omega_hz = 1.1e6;
    double delta_c_ratio = 10.0;
    double nu_c_hz = 3e9;
    double q_factor = 5e4;
    double tau_a_s = 1e-9;
    double gamma2r_inv_s = 1e-6;
    double gamma2p_inv_s = 1e-6;
    std::optional<double> delta_p_override_hz;

    int photon_cutoff = kDefaultPhotonCutoff;
    double dt_fraction = 50.0;
    int leakage_samples = 200;

    Thresholds thresholds;
    std::vector<SweepAxis> sweep;

    // omega_c = 2 pi nu_c, omega0 = omega_c - Delta_c, drive detuned by
    // Delta_p = (n-1) lambda unless overridden.
    DeviceParams device() const {
        DeviceParams p;
        p.g = angular(f_g_hz);
        p.g_prime = angular(f_gprime_hz);
        p.g_dprime = angular(f_gdprime_hz);
        p.Omega = angular(f_omega_hz);
        p.nu_c = nu_c_hz;
        p.omega_c = angular(nu_c_hz);
        p.omega0 = p.omega_c - delta_c_ratio * p.g;
        p.theta = theta;
        p.tau_a = tau_a_s;
        p.Q = q_factor;
        p.gamma2r_inv = gamma2r_inv_s;
        p.gamma2p_inv = gamma2p_inv_s;
        p.omega_drive = delta_p_override_hz ? p.omega0 - angular(*delta_p_override_hz) : p.resonant_drive(n);
        return p;
    }

    void validate() const {
        auto pos = [](double v, const char* key) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive");
        };
        if (n < 2 || n > 12) throw ConfigError("protocol.n must lie in [2, 12]");
        if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi)) throw ConfigError("protocol.theta must lie in [0, 2 pi)");
        pos(f_g_hz, "device.f_g_hz");
        pos(f_gprime_hz, "device.f_gprime_hz");
        pos(f_gdprime_hz, "device.f_gdprime_hz");
        pos(f_omega_hz, "device.f_omega_hz");
        pos(delta_c_ratio, "device.delta_c_ratio");
        pos(nu_c_hz, "device.nu_c_hz");
        pos(q_factor, "device.q_factor");
        pos(gamma2r_inv_s, "device.gamma2r_inv_s");
        pos(gamma2p_inv_s, "device.gamma2p_inv_s");
        if (!(tau_a_s >= 0.0)) throw ConfigError("device.tau_a_s must be non-negative");
        if (delta_c_ratio * f_g_hz >= nu_c_hz) throw ConfigError("device.delta_c_ratio puts the qutrit transition below zero");
        if (photon_cutoff < 2) throw ConfigError("numerics.photon_cutoff must be at least 2");
        pos(dt_fraction, "numerics.dt_fraction");
        if (leakage_samples < 100) throw ConfigError("numerics.leakage_samples must be at least 100");
        pos(thresholds.dispersive, "thresholds.dispersive");
        pos(thresholds.blockade, "thresholds.blockade");
        pos(thresholds.coherence, "thresholds.coherence");
        for (const auto& ax : sweep) {
            if (ax.values.empty()) throw ConfigError("sweep." + ax.name + " is empty");
            for (double v : ax.values) pos(v, ("sweep." + ax.name).c_str());
        }
    }
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ConfigError(key + ": '" + t + "' is not a number");
    }
    return v;
}

inline int parse_int(const std::string& text, const std::string& key) {
    const double v = parse_number(text, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer");
    return static_cast<int>(v);
}

// Returns theta and whether it was the named preset.
inline std::pair<double, bool> parse_theta(const std::string& text) {
    const std::string t = trim(text);
    if (t == kHadamardPreset) return {std::numbers::pi / 4.0, true};
    return {parse_number(t, "protocol.theta"), false};
}

inline Tier parse_tier_or_throw(const std::string& text) {
    try {
        return parse_tier(trim(text));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
    static const std::map<std::string, double RunConfig::*> doubles{
        {"device.f_g_hz", &RunConfig::f_g_hz},
        {"device.f_gprime_hz", &RunConfig::f_gprime_hz},
        {"device.f_gdprime_hz", &RunConfig::f_gdprime_hz},
        {"device.f_omega_hz", &RunConfig::f_omega_hz},
        {"device.delta_c_ratio", &RunConfig::delta_c_ratio},
        {"device.nu_c_hz", &RunConfig::nu_c_hz},
        {"device.q_factor", &RunConfig::q_factor},
        {"device.tau_a_s", &RunConfig::tau_a_s},
        {"device.gamma2r_inv_s", &RunConfig::gamma2r_inv_s},
        {"device.gamma2p_inv_s", &RunConfig::gamma2p_inv_s},
        {"numerics.dt_fraction", &RunConfig::dt_fraction},
    };
    if (auto it = doubles.find(key); it != doubles.end()) {
        c.*(it->second) = parse_number(value, key);
    } else if (key == "protocol.n") {
        c.n = parse_int(value, key);
    } else if (key == "protocol.theta") {
        std::tie(c.theta, c.theta_preset) = parse_theta(value);
    } else if (key == "protocol.tier") {
        c.tier = parse_tier_or_throw(value);
    } else if (key == "device.delta_p_override_hz") {
        c.delta_p_override_hz = parse_number(value, key);
    } else if (key == "numerics.photon_cutoff") {
        c.photon_cutoff = parse_int(value, key);
    } else if (key == "numerics.leakage_samples") {
        c.leakage_samples = parse_int(value, key);
    } else if (key == "thresholds.dispersive") {
        c.thresholds.dispersive = parse_number(value, key);
    } else if (key == "thresholds.blockade") {
        c.thresholds.blockade = parse_number(value, key);
    } else if (key == "thresholds.coherence") {
        c.thresholds.coherence = parse_number(value, key);
    } else if (key.rfind("sweep.", 0) == 0) {
        const std::string axis = key.substr(6);
        const auto& names = sweep_axis_names();
        if (std::find(names.begin(), names.end(), axis) == names.end()) throw ConfigError("unknown sweep axis '" + axis + "'");
        SweepAxis ax{axis, {}};
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const double v = parse_number(item, key);
            if (axis == "n" && v != std::floor(v)) throw ConfigError("sweep.n values must be integers");
            ax.values.push_back(v);
        }
        std::sort(ax.values.begin(), ax.values.end());
        ax.values.erase(std::unique(ax.values.begin(), ax.values.end()), ax.values.end());
        auto same = [&](const SweepAxis& a) { return a.name == axis; };
        if (std::any_of(c.sweep.begin(), c.sweep.end(), same)) throw ConfigError("duplicate sweep axis '" + axis + "'");
        c.sweep.push_back(std::move(ax));
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        try {
            set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "protocol.n = " << c.n << '\n';
    if (c.theta_preset) {
        os << "protocol.theta = " << kHadamardPreset << '\n';
    } else {
        os << "protocol.theta = " << c.theta << '\n';
    }
    os << "protocol.tier = " << to_string(c.tier) << '\n';
    os << "device.f_g_hz = " << c.f_g_hz << '\n';
    os << "device.f_gprime_hz = " << c.f_gprime_hz << '\n';
    os << "device.f_gdprime_hz = " << c.f_gdprime_hz << '\n';
    os << "device.f_omega_hz = " << c.f_omega_hz << '\n';
    os << "device.delta_c_ratio = " << c.delta_c_ratio << '\n';
    os << "device.nu_c_hz = " << c.nu_c_hz << '\n';
    os << "device.q_factor = " << c.q_factor << '\n';
    os << "device.tau_a_s = " << c.tau_a_s << '\n';
    os << "device.gamma2r_inv_s = " << c.gamma2r_inv_s << '\n';
    os << "device.gamma2p_inv_s = " << c.gamma2p_inv_s << '\n';
    if (c.delta_p_override_hz) os << "device.delta_p_override_hz = " << *c.delta_p_override_hz << '\n';
    os << "numerics.photon_cutoff = " << c.photon_cutoff << '\n';
    os << "numerics.dt_fraction = " << c.dt_fraction << '\n';
    os << "numerics.leakage_samples = " << c.leakage_samples << '\n';
    os << "thresholds.dispersive = " << c.thresholds.dispersive << '\n';
    os << "thresholds.blockade = " << c.thresholds.blockade << '\n';
    os << "thresholds.coherence = " << c.thresholds.coherence << '\n';
    for (const auto& ax : c.sweep) {
        os << "sweep." << ax.name << " = ";
        for (std::size_t i = 0; i < ax.values.size(); ++i) os << (i ? ", " : "") << ax.values[i];
        os << '\n';
    }
    return os.str();
}

// Applies one sweep coordinate on top of a base config.
inline void apply_sweep_value(RunConfig& c, const std::string& axis, double v) {
    if (axis == "n") {
        c.n = static_cast<int>(v);
    } else if (axis == "lambda_over_omega") {
        const double g = c.f_g_hz;
        c.f_omega_hz = (g / c.delta_c_ratio) / v;  // lambda/2pi = g^2/Delta_c /2pi
    } else if (axis == "delta_c_ratio") {
        c.delta_c_ratio = v;
    } else if (axis == "theta") {
        c.theta = v;
        c.theta_preset = false;
    } else if (axis == "f_omega_hz") {
        c.f_omega_hz = v;
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
}

}  // namespace crgate
