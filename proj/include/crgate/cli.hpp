// Batch commands behind the crgate_cli executable. Each command takes a
// validated RunConfig, prints a short report, writes its files into an output
// directory and returns a process exit code.

#pragma once

#include "crgate/config.hpp"
#include "crgate/dicke.hpp"
#include "crgate/protocol.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

namespace crgate {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2 };

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
}

inline void write_meta(const std::filesystem::path& dir, const std::string& command, double wall_seconds,
                       unsigned threads) {
    auto f = open_output(dir, "meta.txt");
    f << "crgate " << kVersion << '\n';
    f << "command " << command << '\n';
    f << "eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
    f << "compiler " << __VERSION__ << '\n';
    f << "threads " << threads << '\n';
    f << "wall_time_s " << wall_seconds << '\n';
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

inline std::string fmt(cplx v) {
    std::ostringstream os;
    os << std::setprecision(6) << '(' << v.real() << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i)";
    return os.str();
}

// Components of psi along |J,-J+k> (x) |t> (x) |m>_c with |amplitude| >= cut,
// printed as a sum.
inline std::string dicke_description(const KetState& psi, double cut = 1e-3) {
    const SpaceDescriptor& sp = psi.space;
    const int nc = sp.n_controls();
    std::ostringstream os;
    double captured = 0.0, dropped = 0.0;
    bool first = true;
    for (int k = 0; k <= nc; ++k)
        for (int t = 0; t < kLevels; ++t)
            for (int m = 0; m < sp.photon_cutoff(); ++m) {
                const cplx a = inner_product(dicke_state(sp, k, 0, t, m), psi);
                captured += std::norm(a);
                if (std::abs(a) < cut) {
                    dropped += std::norm(a);
                    continue;
                }
                if (!first) os << " + ";
                first = false;
                os << fmt(a) << " |J,-J+" << k << ">|" << t << ">|" << m << ">c";
            }
    if (first) os << "0";
    const double rest = std::max(0.0, 1.0 - captured / std::max(psi.norm() * psi.norm(), 1e-300));
    if (dropped > 1e-12) os << "  [smaller terms: " << fmt(dropped) << "]";
    if (rest > 1e-6) os << "  [outside symmetric sector: " << fmt(rest) << "]";
    return os.str();
}

}  // namespace detail

inline unsigned thread_budget() {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CRGATE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

inline Schedule schedule_for(const RunConfig& c) {
    return build_schedule(c.n, c.device(), c.tier, c.photon_cutoff, c.dt_fraction, c.thresholds);
}

// ---- validate --------------------------------------------------------------

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline std::vector<ValidationCheck> run_validation(const RunConfig& c, std::vector<std::string>& warnings) {
    std::vector<ValidationCheck> out;
    const DeviceParams p = c.device();

    {  // Dicke states against H0, rates in units of g
        DeviceParams u = p;
        const double g = p.g;
        u.omega0 /= g;
        u.omega_c /= g;
        u.g = 1.0;
        const auto sp = build_space(c.n, 2);
        const auto h0 = h_h0(sp, control_systems(sp), u);
        const int nc = c.n - 1;
        double worst = 0.0;
        for (int l = 0; l <= nc; ++l)
            for (int k = 0; k + l <= nc; ++k) {
                const auto psi = dicke_state(sp, k, l);
                const double Jl = 0.5 * (nc - l);
                const double eps = Jl > 0 ? dicke_energy(k, Jl, u.omega0, u.lambda()) : 0.0;
                worst = std::max(worst, (apply(h0, psi) - eps * psi).norm());
            }
        out.push_back({"dicke eigenstructure", worst < 1e-10, "max residual " + detail::fmt(worst) + " (units of g)"});
    }

    const Schedule sched = schedule_for(c);
    warnings = sched.warnings;
    {
        const ProtocolExecutor ex(sched);
        double worst = 0.0;
        for (std::size_t k = 0; k < kProtocolSteps; ++k)
            if (ex.propagator(k)) worst = std::max(worst, ex.propagator(k)->unitarity_error());
        out.push_back({"step unitarity (" + to_string(c.tier) + ")", worst < 1e-9, "max |U+U - I| " + detail::fmt(worst)});
    }
    {
        auto t0 = c;
        t0.tier = Tier::T0;
        const auto r = extract_gate(schedule_for(t0));
        out.push_back({"T0 exactness", r.max_deviation < 1e-8, "max |U - ideal| " + detail::fmt(r.max_deviation)});
    }
    return out;
}

inline int cmd_validate(const RunConfig& c, std::ostream& log) {
    std::vector<std::string> warnings;
    const auto checks = run_validation(c, warnings);
    bool ok = true;
    for (const auto& ch : checks) {
        log << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << '\n';
        ok = ok && ch.passed;
    }
    for (const auto& w : warnings) log << "WARN " << w << '\n';
    if (c.delta_p_override_hz) log << "WARN Delta_p overridden to " << detail::fmt(*c.delta_p_override_hz) << " Hz\n";
    return ok ? kExitOk : kExitValidation;
}

// ---- run -------------------------------------------------------------------

inline void write_gate_csv(std::ostream& f, const GateReport& r, const SpaceDescriptor& sp) {
    const auto comp = computational_indices(sp);
    f << std::setprecision(17);
    f << "input,fidelity,leakage,residual_phase,cavity_population";
    for (std::size_t i = 0; i < comp.size(); ++i) f << ",re " << sp.label(comp[i]) << ",im " << sp.label(comp[i]);
    f << '\n';
    for (std::size_t j = 0; j < comp.size(); ++j) {
        f << r.input_labels[j] << ',' << r.fidelity[j] << ',' << r.leakage[j] << ',' << r.residual_phase[j] << ','
          << r.cavity_population[j];
        const auto col = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < comp.size(); ++i) {
            const cplx v = r.realized_gate(static_cast<Eigen::Index>(i), col);
            f << ',' << v.real() << ',' << v.imag();
        }
        f << '\n';
    }
}

inline int cmd_run(const RunConfig& c, const std::filesystem::path& outdir, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const Schedule sched = schedule_for(c);
    const ProtocolExecutor ex(sched);
    const GateReport r = extract_gate(ex);
    const DeviceParams p = sched.params;

    std::ostringstream s;
    s << "tier " << to_string(c.tier) << ", n = " << c.n << ", theta = " << detail::fmt(c.theta)
      << (c.theta_preset ? " (controlled-Hadamard preset)" : "") << '\n';
    s << "lambda/Omega = " << detail::fmt(p.lambda() / p.Omega) << ", Delta_c/g = " << detail::fmt(p.delta_c() / p.g)
      << '\n';
    s << "step durations [s]:";
    for (const auto& st : sched.steps) s << ' ' << st.label << '=' << detail::fmt(st.duration);
    s << '\n';
    for (int t : {0, 1}) {
        std::vector<int> digits(static_cast<std::size_t>(c.n), 1);
        digits.back() = t;
        const auto run = ex.run(basis_state(sched.space, digits, 0));
        s << "trace of |1...1>|" << t << ">|0>c:\n";
        for (std::size_t k = 0; k < kProtocolSteps; ++k)
            s << "  step " << std::setw(3) << std::left << sched.steps[k].label << std::right << ' '
              << detail::dicke_description(run.trace[k]) << '\n';
    }
    const auto worst_leak = std::max_element(r.leakage.begin(), r.leakage.end()) - r.leakage.begin();
    const auto worst_fid = std::min_element(r.fidelity.begin(), r.fidelity.end()) - r.fidelity.begin();
    s << "min per-input fidelity = " << detail::fmt(r.min_fidelity()) << " (input "
      << r.input_labels[static_cast<std::size_t>(worst_fid)] << ")\n";
    s << "worst-case leakage = " << detail::fmt(r.max_leakage()) << " (input "
      << r.input_labels[static_cast<std::size_t>(worst_leak)] << ")\n";
    const auto est = leakage_estimates(c.n, p);
    if (est.applicable) {
        s << "leakage estimates: p1 = " << detail::fmt(est.p1) << ", p2 bound = " << detail::fmt(est.p2_bound)
          << ", 3 p1 = " << detail::fmt(3.0 * est.p1) << '\n';
    }
    s << "max |U - ideal| = " << detail::fmt(r.max_deviation) << (c.theta == 0.0 ? " (ideal gate is the identity)" : "")
      << '\n';
    s << "gate fidelity = " << detail::fmt(r.gate_fidelity) << ", best global phase = "
      << detail::fmt(r.gate_fidelity_best_phase) << '\n';
    double worst_phase = 0.0;
    for (double ph : r.residual_phase) worst_phase = std::max(worst_phase, std::abs(ph));
    s << "largest residual phase = " << detail::fmt(worst_phase) << " rad\n";
    s << "total time = " << detail::fmt(r.timings.total) << " s\n";
    for (const auto& w : sched.warnings) s << "warning: " << w << '\n';

    log << s.str();
    detail::open_output(outdir, "summary.txt") << s.str();
    {
        auto f = detail::open_output(outdir, "gate_report.csv");
        write_gate_csv(f, r, sched.space);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::write_meta(outdir, "run", wall, 1);
    return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepRow {
    std::vector<double> coords;
    double p1_formula = std::numeric_limits<double>::quiet_NaN();
    double p2_bound = std::numeric_limits<double>::quiet_NaN();
    double p1_simulated = 0.0;
    double min_fidelity = 0.0;
    double tau_total = 0.0;
};

// Grid points in lexicographic order: first axis outermost, values ascending.
inline std::vector<std::vector<double>> sweep_grid(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<double>> grid{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : grid)
            for (double v : ax.values) {
                next.push_back(prefix);
                next.back().push_back(v);
            }
        grid = std::move(next);
    }
    return grid;
}

inline RunConfig sweep_point_config(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                    const std::vector<double>& coords) {
    RunConfig c = base;
    c.sweep.clear();
    // lambda/Omega depends on Delta_c/g, so it is applied last.
    for (std::size_t a = 0; a < axes.size(); ++a)
        if (axes[a].name != "lambda_over_omega") apply_sweep_value(c, axes[a].name, coords[a]);
    for (std::size_t a = 0; a < axes.size(); ++a)
        if (axes[a].name == "lambda_over_omega") apply_sweep_value(c, axes[a].name, coords[a]);
    c.validate();
    return c;
}

inline SweepRow evaluate_point(const RunConfig& c, std::vector<double> coords) {
    SweepRow row;
    row.coords = std::move(coords);
    const DeviceParams p = c.device();
    const auto est = leakage_estimates(c.n, p);
    if (est.applicable) {
        row.p1_formula = est.p1;
        row.p2_bound = est.p2_bound;
    }
    row.p1_simulated = simulated_leakage(c.n, p, c.leakage_samples, c.photon_cutoff).max();
    row.min_fidelity = extract_gate(schedule_for(c)).min_fidelity();
    row.tau_total = total_time(c.n, p).total;
    return row;
}

inline std::vector<SweepRow> run_sweep(const RunConfig& c, unsigned threads) {
    if (c.sweep.empty()) throw ConfigError("sweep requires at least one sweep.<axis> entry");
    const auto grid = sweep_grid(c.sweep);
    std::vector<RunConfig> configs;
    for (const auto& coords : grid) configs.push_back(sweep_point_config(c, c.sweep, coords));

    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size() && !failed; i = next++) {
            try {
                rows[i] = evaluate_point(configs[i], grid[i]);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const unsigned nt = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

inline void write_sweep_csv(std::ostream& f, const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
    f << std::setprecision(17);
    for (const auto& ax : axes) f << ax.name << ',';
    f << "p1_formula,p2_bound,p1_simulated,min_fidelity,tau_total\n";
    for (const auto& r : rows) {
        for (double v : r.coords) f << v << ',';
        f << r.p1_formula << ',' << r.p2_bound << ',' << r.p1_simulated << ',' << r.min_fidelity << ',' << r.tau_total
          << '\n';
    }
}

inline int cmd_sweep(const RunConfig& c, const std::filesystem::path& outdir, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = thread_budget();
    const auto rows = run_sweep(c, threads);
    {
        auto f = detail::open_output(outdir, "sweep.csv");
        write_sweep_csv(f, c.sweep, rows);
    }
    log << rows.size() << " sweep points written to " << (outdir / "sweep.csv").string() << '\n';
    for (const auto& r : rows) {
        for (std::size_t a = 0; a < c.sweep.size(); ++a) log << c.sweep[a].name << '=' << detail::fmt(r.coords[a]) << ' ';
        log << "p1=" << detail::fmt(r.p1_formula) << " p1_sim=" << detail::fmt(r.p1_simulated)
            << " min_fid=" << detail::fmt(r.min_fidelity) << " tau=" << detail::fmt(r.tau_total) << '\n';
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::write_meta(outdir, "sweep", wall, threads);
    return kExitOk;
}

// ---- timing ----------------------------------------------------------------

inline int cmd_timing(const RunConfig& c, std::ostream& log) {
    const DeviceParams p = c.device();
    const auto t = total_time(c.n, p);
    const auto rep = feasibility_check(c.n, p, c.thresholds);
    log << "total time for n = " << c.n << ": " << detail::fmt(t.total) << " s\n";
    log << "  drive (steps i, vii)          " << detail::fmt(t.drive) << '\n';
    log << "  photon transfer (ii, vi)      " << detail::fmt(t.photon_transfer) << '\n';
    log << "  target swaps (iii, v)         " << detail::fmt(t.target_swaps) << '\n';
    log << "  rotation (iv)                 " << detail::fmt(t.rotation) << '\n';
    log << "  level adjustments (8 tau_a)   " << detail::fmt(t.adjustments) << '\n';
    log << "cavity lifetime kappa^-1 = " << detail::fmt(rep.kappa_inv) << " s\n";
    for (const auto& cond : rep.conditions)
        log << "  " << std::setw(24) << std::left << cond.name << std::right << ' ' << detail::fmt(cond.value) << "  "
            << to_string(cond.status) << '\n';
    log << "   n  two-qubit gates  protocol steps\n";
    for (int n = 3; n <= std::max(8, c.n); ++n)
        log << std::setw(4) << n << std::setw(17) << *decomposition_step_count(n) << std::setw(16) << kProtocolSteps
            << '\n';
    return kExitOk;
}

}  // namespace crgate
