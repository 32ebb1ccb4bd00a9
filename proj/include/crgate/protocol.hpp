// Seven-step controlled-rotation protocol: schedule construction, execution at
// three model tiers, gate extraction, and the closed-form estimates used to
// judge a parameter set (leakage, total time, coherence budget).
//
// Tiers:
//   T0  steps i/vii use the two-level Dicke Hamiltonian; exact by construction.
//   T1  steps i/vii use the rotating-frame Hamiltonian on the full register,
//       so higher Dicke rungs and the l != 0 sectors are simulated.
//   T2  steps i/vii run the lab-frame Jaynes-Cummings Hamiltonian plus the
//       classical drive, sampled in time, then mapped into the T1 frame.
// Steps ii-vi are the resonant exchange Hamiltonians at every tier.

#pragma once

#include "crgate/dicke.hpp"
#include "crgate/evolution.hpp"
#include "crgate/hamiltonians.hpp"
#include "crgate/hilbert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crgate {

enum class Tier { T0, T1, T2 };

inline std::string to_string(Tier t) {
    switch (t) {
        case Tier::T0: return "T0";
        case Tier::T1: return "T1";
        case Tier::T2: return "T2";
    }
    return "?";
}

inline Tier parse_tier(const std::string& s) {
    if (s == "T0" || s == "t0") return Tier::T0;
    if (s == "T1" || s == "t1") return Tier::T1;
    if (s == "T2" || s == "t2") return Tier::T2;
    throw std::invalid_argument("unknown tier '" + s + "' (expected T0, T1 or T2)");
}

inline constexpr int kProtocolSteps = 7;

// Ratio thresholds standing in for "much less than".
struct Thresholds {
    double dispersive = 0.1;  // g / Delta_c
    double blockade = 0.1;    // Omega sqrt(n-1) / lambda
    double coherence = 0.1;   // tau / lifetime
};

struct ProtocolStep {
    std::string label;
    std::string hamiltonian_tag;
    double duration = 0.0;
    std::vector<std::size_t> active_systems;
    Tier tier = Tier::T0;
};

struct Schedule {
    int n = 0;
    Tier tier = Tier::T0;
    DeviceParams params;
    SpaceDescriptor space;
    std::vector<ProtocolStep> steps;
    double lab_dt = 0.0;  // T2 sampling interval
    std::vector<std::string> warnings;
};

// t1..t7
inline std::array<double, kProtocolSteps> step_durations(int n, const DeviceParams& p) {
    const double root = std::sqrt(static_cast<double>(n - 1));  // sqrt(2J)
    const double t_drive = std::numbers::pi / (2.0 * root * p.Omega);
    const double t_collective = std::numbers::pi / (2.0 * root * p.g_prime);
    return {t_drive,
            t_collective,
            std::numbers::pi / (2.0 * p.g_prime),
            p.theta / p.g_dprime,
            3.0 * std::numbers::pi / (2.0 * p.g_prime),
            t_collective,
            t_drive};
}

struct TimingBreakdown {
    double drive = 0.0;           // pi / (Omega sqrt(n-1)), steps i + vii
    double photon_transfer = 0.0; // pi / (g' sqrt(n-1)), steps ii + vi
    double target_swaps = 0.0;    // 2 pi / g', steps iii + v
    double rotation = 0.0;        // theta / g'', step iv
    double adjustments = 0.0;     // 8 tau_a
    double total = 0.0;

    double n_dependent() const { return drive + photon_transfer; }
};

inline TimingBreakdown total_time(int n, const DeviceParams& p) {
    if (n < 2) throw std::invalid_argument("total_time: n must be >= 2");
    const double root = std::sqrt(static_cast<double>(n - 1));
    TimingBreakdown t;
    t.drive = std::numbers::pi / (p.Omega * root);
    t.photon_transfer = std::numbers::pi / (p.g_prime * root);
    t.target_swaps = 2.0 * std::numbers::pi / p.g_prime;
    t.rotation = p.theta / p.g_dprime;
    t.adjustments = 8.0 * p.tau_a;
    t.total = t.drive + t.photon_transfer + t.target_swaps + t.rotation + t.adjustments;
    return t;
}

// Two-qubit controlled gates needed by a standard decomposition; n >= 3 only.
inline std::optional<long long> decomposition_step_count(int n) {
    if (n < 3 || n > 62) return std::nullopt;
    return (1LL << n) - 3;
}

struct LeakageEstimates {
    bool applicable = false;
    double p1 = 0.0;        // population of |J,-J+2> during steps i/vii
    double p2_bound = 0.0;  // worst l-sector excitation
};

inline LeakageEstimates leakage_estimates(int n, const DeviceParams& p) {
    LeakageEstimates e;
    if (n < 3) return e;
    const double lam = p.lambda();
    const double om2 = p.Omega * p.Omega;
    e.applicable = true;
    e.p1 = om2 / (om2 + lam * lam / (2.0 * (n - 2)));
    e.p2_bound = om2 / (om2 + lam * lam / (4.0 * (n - 2)));
    return e;
}

// Two-level estimate for a single l-sector, 1 <= l <= n-2.
inline double p2_estimate(int n, int l, const DeviceParams& p) {
    if (l < 1 || l > n - 2) throw std::out_of_range("p2_estimate: l outside [1, n-2]");
    const double lam = p.lambda();
    const double om2 = p.Omega * p.Omega;
    return om2 / (om2 + (l * lam) * (l * lam) / (4.0 * (n - l - 1)));
}

enum class CheckStatus { pass, warn, inconsistent };

inline std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::warn: return "warn";
        case CheckStatus::inconsistent: return "inconsistent";
    }
    return "?";
}

struct FeasibilityCondition {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    CheckStatus status = CheckStatus::pass;
};

struct FeasibilityReport {
    std::vector<FeasibilityCondition> conditions;
    TimingBreakdown timing;
    double kappa_inv = 0.0;

    bool all_pass() const {
        return std::all_of(conditions.begin(), conditions.end(),
                           [](const auto& c) { return c.status == CheckStatus::pass; });
    }
    const FeasibilityCondition& at(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return c;
        throw std::out_of_range("FeasibilityReport: no condition named " + name);
    }
};

inline FeasibilityReport feasibility_check(int n, const DeviceParams& p, const Thresholds& th = {}) {
    auto ratio = [](const std::string& name, double value, double threshold) {
        // Equality counts as a warning; "much less" is never met at the boundary.
        const CheckStatus st = value < threshold * (1.0 - 1e-9) ? CheckStatus::pass : CheckStatus::warn;
        return FeasibilityCondition{name, value, threshold, st};
    };
    FeasibilityReport r;
    r.timing = total_time(n, p);
    r.kappa_inv = p.kappa_inv();
    const double lam = p.lambda();
    r.conditions.push_back(ratio("g/Delta_c", p.g / p.delta_c(), th.dispersive));
    r.conditions.push_back(ratio("Omega*sqrt(n-1)/lambda", blockade_margin(n, p.Omega, lam), th.blockade));
    {
        const double expected = (n - 1) * lam;
        const double mismatch = std::abs(p.delta_p() - expected);
        FeasibilityCondition c{"Delta_p-(n-1)lambda", p.delta_p() - expected, 0.0, CheckStatus::pass};
        if (mismatch > 1e-9 * std::max(std::abs(expected), 1.0)) c.status = CheckStatus::inconsistent;
        r.conditions.push_back(c);
    }
    r.conditions.push_back(ratio("tau/kappa^-1", r.timing.total / r.kappa_inv, th.coherence));
    r.conditions.push_back(ratio("tau/gamma2r^-1", r.timing.total / p.gamma2r_inv, th.coherence));
    r.conditions.push_back(ratio("tau/gamma2p^-1", r.timing.total / p.gamma2p_inv, th.coherence));
    return r;
}

inline Schedule build_schedule(int n, const DeviceParams& p, Tier tier, int photon_cutoff = kDefaultPhotonCutoff,
                               double dt_fraction = 50.0, const Thresholds& th = {}) {
    if (n < 2) throw std::invalid_argument("build_schedule: n must be >= 2");
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("build_schedule: ") + name + " must be positive");
        }
    };
    positive(p.Omega, "Omega");
    positive(p.g_prime, "g'");
    positive(p.g_dprime, "g''");
    if (!(p.theta >= 0.0 && p.theta < 2.0 * std::numbers::pi)) {
        throw std::invalid_argument("build_schedule: theta must lie in [0, 2 pi)");
    }
    if (tier != Tier::T0) {
        positive(p.g, "g");
        positive(p.delta_c(), "Delta_c");
        positive(p.omega_c, "omega_c");
    }
    if (tier == Tier::T2 && !(dt_fraction > 0.0)) throw std::invalid_argument("build_schedule: dt_fraction must be positive");

    Schedule s;
    s.n = n;
    s.tier = tier;
    s.params = p;
    s.space = build_space(n, photon_cutoff);
    if (tier == Tier::T2) s.lab_dt = (kTwoPi / p.omega_c) / dt_fraction;

    const auto controls = control_systems(s.space);
    const std::vector<std::size_t> target{s.space.target()};
    const auto t = step_durations(n, p);
    const std::string drive_tag =
        tier == Tier::T0 ? "two_level" : (tier == Tier::T1 ? "engineered" : "lab_jc_drive");
    const std::array<std::pair<const char*, std::string>, kProtocolSteps> layout{{
        {"i", drive_tag},
        {"ii", "resonant_collective"},
        {"iii", "resonant_target_12"},
        {"iv", "resonant_target_02"},
        {"v", "resonant_target_12"},
        {"vi", "resonant_collective"},
        {"vii", drive_tag},
    }};
    for (int k = 0; k < kProtocolSteps; ++k) {
        const bool on_controls = k <= 1 || k >= 5;
        s.steps.push_back(ProtocolStep{layout[static_cast<std::size_t>(k)].first, layout[static_cast<std::size_t>(k)].second,
                                       t[static_cast<std::size_t>(k)], on_controls ? controls : target, tier});
    }

    if (p.delta_c() > 0.0 && p.g > 0.0 && p.nu_c > 0.0 && p.gamma2r_inv > 0.0 && p.gamma2p_inv > 0.0) {
        for (const auto& c : feasibility_check(n, p, th).conditions) {
            if (c.status != CheckStatus::pass) {
                std::ostringstream os;
                os << c.name << " = " << c.value << " (" << to_string(c.status) << ", threshold " << c.threshold << ")";
                s.warnings.push_back(os.str());
            }
        }
    }
    return s;
}

// Computational basis state |i_1 ... i_n> (bits of `c`, i_1 most significant), cavity empty.
inline std::size_t computational_index(const SpaceDescriptor& space, std::size_t c) {
    std::vector<int> digits(static_cast<std::size_t>(space.n_systems()));
    for (int s = space.n_systems() - 1; s >= 0; --s) {
        digits[static_cast<std::size_t>(s)] = static_cast<int>(c & 1U);
        c >>= 1U;
    }
    return space.index(digits, 0);
}

inline std::vector<std::size_t> computational_indices(const SpaceDescriptor& space) {
    std::vector<std::size_t> out(std::size_t{1} << space.n_systems());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = computational_index(space, c);
    return out;
}

// Parses "110|1|0c" or a plain digit string "1101" (cavity empty).
inline KetState parse_basis_label(const SpaceDescriptor& space, const std::string& label) {
    std::vector<int> digits;
    int photons = 0;
    std::string rest = label;
    const auto bar = label.find('|');
    if (bar != std::string::npos) {
        const auto bar2 = label.find('|', bar + 1);
        if (bar2 == std::string::npos) throw std::invalid_argument("basis label '" + label + "' needs controls|target|Nc");
        rest = label.substr(0, bar) + label.substr(bar + 1, bar2 - bar - 1);
        std::string ph = label.substr(bar2 + 1);
        if (!ph.empty() && ph.back() == 'c') ph.pop_back();
        try {
            photons = std::stoi(ph);
        } catch (const std::exception&) {
            throw std::invalid_argument("basis label '" + label + "': bad photon count");
        }
    }
    for (char ch : rest) {
        if (ch < '0' || ch > '9') throw std::invalid_argument("basis label '" + label + "': bad digit");
        digits.push_back(ch - '0');
    }
    return basis_state(space, digits, photons);
}

inline Eigen::MatrixXcd ideal_gate(int n, double theta) {
    if (n < 1 || n > 20) throw std::invalid_argument("ideal_gate: n out of range");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    // Controls all |1>: the last two computational states.
    const Eigen::Index a = dim - 2;
    const Eigen::Index b = dim - 1;
    u(a, a) = std::cos(theta);
    u(a, b) = -std::sin(theta);
    u(b, a) = std::sin(theta);
    u(b, b) = std::cos(theta);
    return u;
}

struct ProtocolRun {
    KetState final_state;
    std::vector<KetState> trace;  // state after each of the seven steps
};

// Precomputes one propagator per step and evolves batches of states.
class ProtocolExecutor {
public:
    explicit ProtocolExecutor(Schedule schedule) : sched_(std::move(schedule)) {
        const SpaceDescriptor& sp = sched_.space;
        const auto controls = control_systems(sp);
        const std::size_t target = sp.target();
        const DeviceParams& p = sched_.params;
        props_.resize(kProtocolSteps);
        for (std::size_t k = 0; k < sched_.steps.size(); ++k) {
            const ProtocolStep& st = sched_.steps[k];
            LinearOperator h;
            if (st.hamiltonian_tag == "two_level") {
                h = h_two_level(sp, p);
            } else if (st.hamiltonian_tag == "engineered") {
                h = h_engineered(sp, controls, p);
            } else if (st.hamiltonian_tag == "resonant_collective") {
                h = h_resonant_collective(sp, controls, p);
            } else if (st.hamiltonian_tag == "resonant_target_12") {
                h = h_resonant_target_12(sp, target, p);
            } else if (st.hamiltonian_tag == "resonant_target_02") {
                h = h_resonant_target_02(sp, target, p);
            } else if (st.hamiltonian_tag == "lab_jc_drive") {
                continue;
            } else {
                throw std::invalid_argument("ProtocolExecutor: unknown step Hamiltonian " + st.hamiltonian_tag);
            }
            props_[k] = expm_propagator(h, st.duration, st.hamiltonian_tag);
        }
        if (sched_.tier == Tier::T2) {
            static_part_ = h_jc(sp, controls, p);
            auto ops = collective_ops(sp, controls);
            splus_ = ops.splus;
            sminus_ = ops.sminus;
            sz_diag_.resize(static_cast<Eigen::Index>(sp.dim()));
            for (std::size_t i = 0; i < sp.dim(); ++i) sz_diag_[static_cast<Eigen::Index>(i)] = ops.sz.matrix.coeff(
                static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        }
    }

    const Schedule& schedule() const { return sched_; }

    // Exact step propagator; empty for sampled lab-frame steps.
    const std::optional<Propagator>& propagator(std::size_t step) const { return props_.at(step); }

    Eigen::MatrixXcd apply_step(std::size_t step, const Eigen::MatrixXcd& states) const {
        if (props_.at(step)) return props_[step]->apply(states);
        return lab_frame_step(sched_.steps[step].duration, states);
    }

    Eigen::MatrixXcd run_columns(Eigen::MatrixXcd states) const {
        for (std::size_t k = 0; k < kProtocolSteps; ++k) states = apply_step(k, states);
        return states;
    }

    ProtocolRun run(const KetState& input) const {
        require_same_space(sched_.space, input.space, "run_protocol");
        ProtocolRun out;
        Eigen::MatrixXcd psi = input.amplitudes;
        for (std::size_t k = 0; k < kProtocolSteps; ++k) {
            psi = apply_step(k, psi);
            out.trace.emplace_back(input.space, Eigen::VectorXcd(psi));
        }
        out.final_state = out.trace.back();
        return out;
    }

private:
    // Lab-frame evolution followed by the map into the frame of the T1 step:
    // exp(i omega t Sz) exp(i omega_c t a+a) and removal of the -2 J^2 lambda offset.
    Eigen::MatrixXcd lab_frame_step(double duration, const Eigen::MatrixXcd& states) const {
        const DeviceParams& p = sched_.params;
        const SpaceDescriptor& sp = sched_.space;
        auto h_of_t = [&](double t) {
            const cplx ph = std::polar(1.0, -p.omega_drive * t);
            LinearOperator h = static_part_;
            h += p.Omega * (ph * splus_ + std::conj(ph) * sminus_);
            return h;
        };
        if (duration == 0.0) return states;
        const double dt = std::min(sched_.lab_dt, 0.5 * duration);
        Eigen::MatrixXcd out = evolve_sampled(states, h_of_t, duration, dt);
        const double J = 0.5 * sp.n_controls();
        const double offset = 2.0 * J * J * p.lambda();
        for (std::size_t i = 0; i < sp.dim(); ++i) {
            const double phase = p.omega_drive * duration * sz_diag_[static_cast<Eigen::Index>(i)] +
                                 p.omega_c * duration * sp.photons(i) - offset * duration;
            out.row(static_cast<Eigen::Index>(i)) *= std::polar(1.0, phase);
        }
        return out;
    }

    Schedule sched_;
    std::vector<std::optional<Propagator>> props_;
    LinearOperator static_part_, splus_, sminus_;
    Eigen::VectorXd sz_diag_;
};

inline ProtocolRun run_protocol(const KetState& input, const Schedule& schedule) {
    return ProtocolExecutor(schedule).run(input);
}

inline ProtocolRun run_protocol(const std::string& basis_label, const Schedule& schedule) {
    return run_protocol(parse_basis_label(schedule.space, basis_label), schedule);
}

struct GateReport {
    Tier tier = Tier::T0;
    int n = 0;
    double theta = 0.0;
    Eigen::MatrixXcd realized_gate;  // projection onto computational (x) vacuum
    Eigen::MatrixXcd ideal;
    std::vector<std::string> input_labels;
    std::vector<double> fidelity;        // |<ideal_j|final_j>|^2
    std::vector<double> leakage;         // 1 - |projection|^2
    std::vector<double> residual_phase;  // arg <ideal_j|final_j>
    std::vector<double> cavity_population;
    double max_deviation = 0.0;           // max |realized - ideal|, no phase fitting
    double gate_fidelity = 0.0;           // Re Tr(ideal+ U) / 2^n
    double gate_fidelity_best_phase = 0.0;  // |Tr(ideal+ U)| / 2^n
    TimingBreakdown timings;

    double min_fidelity() const { return *std::min_element(fidelity.begin(), fidelity.end()); }
    double max_leakage() const { return *std::max_element(leakage.begin(), leakage.end()); }
};

// Runs all 2^n computational inputs and projects the outputs back onto the
// computational (x) vacuum sector.
inline GateReport extract_gate(const ProtocolExecutor& exec) {
    const Schedule& s = exec.schedule();
    const SpaceDescriptor& sp = s.space;
    const auto comp = computational_indices(sp);
    const auto d = static_cast<Eigen::Index>(comp.size());

    Eigen::MatrixXcd inputs = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sp.dim()), d);
    for (Eigen::Index j = 0; j < d; ++j) inputs(static_cast<Eigen::Index>(comp[static_cast<std::size_t>(j)]), j) = 1.0;
    const Eigen::MatrixXcd outputs = exec.run_columns(std::move(inputs));

    GateReport r;
    r.tier = s.tier;
    r.n = s.n;
    r.theta = s.params.theta;
    r.ideal = ideal_gate(s.n, s.params.theta);
    r.realized_gate.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) r.realized_gate.row(i) = outputs.row(static_cast<Eigen::Index>(comp[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < d; ++j) {
        r.input_labels.push_back(sp.label(comp[static_cast<std::size_t>(j)]));
        const cplx overlap = r.ideal.col(j).dot(r.realized_gate.col(j));
        r.fidelity.push_back(std::min(1.0, std::norm(overlap)));
        r.leakage.push_back(std::max(0.0, 1.0 - r.realized_gate.col(j).squaredNorm()));
        r.residual_phase.push_back(std::abs(overlap) > 1e-12 ? std::arg(overlap) : 0.0);
        double cav = 0.0;
        for (std::size_t i = 0; i < sp.dim(); ++i)
            if (sp.photons(i) > 0) cav += std::norm(outputs(static_cast<Eigen::Index>(i), j));
        r.cavity_population.push_back(cav);
    }
    r.max_deviation = (r.realized_gate - r.ideal).cwiseAbs().maxCoeff();
    const cplx tr = (r.ideal.adjoint() * r.realized_gate).trace();
    r.gate_fidelity = tr.real() / static_cast<double>(d);
    r.gate_fidelity_best_phase = std::abs(tr) / static_cast<double>(d);
    r.timings = total_time(s.n, s.params);
    return r;
}

inline GateReport extract_gate(const Schedule& schedule) { return extract_gate(ProtocolExecutor(schedule)); }

struct SimulatedLeakage {
    double step_i = 0.0;    // from |J,-J>
    double step_vii = 0.0;  // from |J,-J+1>
    double max() const { return std::max(step_i, step_vii); }
};

// Peak transient population of |J,-J+2> under the rotating-frame drive
// Hamiltonian, sampled over one drive step (duration t1) starting from the
// step-i input |J,-J> and from the step-vii input |J,-J+1>.
inline SimulatedLeakage simulated_leakage(int n, const DeviceParams& p, int samples = 200,
                                          int photon_cutoff = kDefaultPhotonCutoff) {
    if (n < 2) throw std::invalid_argument("simulated_leakage: n must be >= 2");
    if (samples < 1) throw std::invalid_argument("simulated_leakage: need at least one sample");
    SimulatedLeakage out;
    if (n < 3 || p.Omega == 0.0) return out;  // no second rung, or nothing driven
    const SpaceDescriptor sp = build_space(n, photon_cutoff);
    const auto controls = control_systems(sp);
    const double t1 = step_durations(n, p)[0];
    const Propagator u = expm_propagator(h_engineered(sp, controls, p), t1 / samples, "engineered");
    const KetState rung2 = dicke_state(sp, 2);
    auto peak = [&](KetState psi) {
        double best = fidelity(rung2, psi);
        for (int s = 0; s < samples; ++s) {
            psi = u.apply(psi);
            best = std::max(best, fidelity(rung2, psi));
        }
        return best;
    };
    out.step_i = peak(dicke_state(sp, 0));
    out.step_vii = peak(dicke_state(sp, 1));
    return out;
}

}  // namespace crgate
