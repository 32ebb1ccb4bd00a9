// Hamiltonians of the controlled-rotation protocol (hbar = 1, angular units).

#pragma once

#include "crgate/dicke.hpp"
#include "crgate/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace crgate {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double angular(double hz) { return kTwoPi * hz; }

struct DeviceParams {
    double omega0 = 0.0;       // |1> <-> |2> transition
    double omega_c = 0.0;      // cavity mode
    double g = 0.0;            // dispersive coupling (steps i, vii)
    double g_prime = 0.0;      // resonant |1> <-> |2> coupling
    double g_dprime = 0.0;     // resonant |0> <-> |2> coupling of the target
    double Omega = 0.0;        // drive Rabi rate
    double omega_drive = 0.0;  // drive frequency
    double theta = 0.0;        // rotation angle
    double tau_a = 0.0;        // level-spacing adjustment time [s]
    double Q = 0.0;            // loaded quality factor
    double nu_c = 0.0;         // cavity frequency [Hz]
    double gamma2r_inv = 0.0;  // relaxation time of |2> [s]
    double gamma2p_inv = 0.0;  // dephasing time of |2> [s]

    double delta_c() const { return omega_c - omega0; }
    double lambda() const {
        if (!(delta_c() > 0.0)) throw std::invalid_argument("DeviceParams: Delta_c = omega_c - omega0 must be positive");
        return g * g / delta_c();
    }
    double delta_p() const { return omega0 - omega_drive; }

    // Drive frequency resonant with |J,-J> <-> |J,-J+1>: omega = omega0 - (n-1) lambda.
    double resonant_drive(int n) const { return omega0 - (n - 1) * lambda(); }
    double kappa_inv() const { return Q / (kTwoPi * nu_c); }
};

// The six-qubit controlled-Hadamard estimate: g/2pi = 220 MHz, g' = g'' = g,
// Delta_c = 10 g, Omega/2pi = 1.1 MHz, theta = pi/4, tau_a = 1 ns,
// nu_c = 3 GHz, Q = 5e4, gamma^-1 = 1 us. The cavity sits at nu_c and the
// qutrit transition at nu_c - Delta_c.
inline DeviceParams reference_params(int n = 6) {
    DeviceParams p;
    p.g = angular(220e6);
    p.g_prime = p.g;
    p.g_dprime = p.g;
    p.nu_c = 3e9;
    p.omega_c = angular(p.nu_c);
    p.omega0 = p.omega_c - 10.0 * p.g;
    p.Omega = angular(1.1e6);
    p.theta = std::numbers::pi / 4.0;
    p.tau_a = 1e-9;
    p.Q = 5e4;
    p.gamma2r_inv = 1e-6;
    p.gamma2p_inv = 1e-6;
    p.omega_drive = p.resonant_drive(n);
    return p;
}

namespace detail {
inline LinearOperator photon_projector_sum(const SpaceDescriptor& space, const std::vector<std::size_t>& systems) {
    // sum_j (|2><2|_j - |1><1|_j)
    LinearOperator out(space);
    for (std::size_t j : systems) out += projector_op(space, j, 2) - projector_op(space, j, 1);
    return out;
}
}  // namespace detail

// H = omega0 Sz + omega_c a+a + g (a+ S- + a S+)
inline LinearOperator h_jc(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                           const DeviceParams& p) {
    auto [sp, sm, sz] = collective_ops(space, controls);
    const LinearOperator a = annihilation_op(space);
    const LinearOperator ad = creation_op(space);
    return p.omega0 * sz + p.omega_c * number_op(space) + p.g * (ad * sm + a * sp);
}

// Photon-number dependent Stark shift form valid for Delta_c >> g:
// H = omega0 Sz + omega_c a+a - lambda sum_j(|2><2|_j - |1><1|_j) a+a - lambda S+ S-
inline LinearOperator h_dispersive(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                                   const DeviceParams& p) {
    const double lambda = p.lambda();
    auto [sp, sm, sz] = collective_ops(space, controls);
    const LinearOperator n = number_op(space);
    return p.omega0 * sz + p.omega_c * n - lambda * (detail::photon_projector_sum(space, controls) * n) -
           lambda * (sp * sm);
}

// Vacuum-sector reduction: H0 = omega0 Sz - lambda S+ S-
inline LinearOperator h_h0(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                           const DeviceParams& p) {
    const double lambda = p.lambda();
    auto [sp, sm, sz] = collective_ops(space, controls);
    return p.omega0 * sz - lambda * (sp * sm);
}

// Lab-frame classical drive Omega (e^{-i omega t} S+ + e^{i omega t} S-).
inline LinearOperator h_drive(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                              const DeviceParams& p, double t) {
    auto [sp, sm, sz] = collective_ops(space, controls);
    const cplx ph = std::polar(1.0, -p.omega_drive * t);
    return p.Omega * (ph * sp + std::conj(ph) * sm);
}

// Rotating-frame drive Hamiltonian U (H0 + H_sp) U+ - omega Sz with U = exp(i omega t Sz):
// (omega0 - omega) Sz - lambda S+ S- + Omega (S+ + S-) + 2 J^2 lambda.
// The constant shift puts |J,-J> at zero energy. Acts as the identity on the
// target and on the cavity.
inline LinearOperator h_engineered(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                                   const DeviceParams& p) {
    const double lambda = p.lambda();
    const double J = 0.5 * static_cast<double>(controls.size());
    auto [sp, sm, sz] = collective_ops(space, controls);
    return (p.omega0 - p.omega_drive) * sz - lambda * (sp * sm) + p.Omega * (sp + sm) +
           (2.0 * J * J * lambda) * identity_op(space);
}

// Omega sqrt(2J) (|J,-J+1><J,-J| + h.c.) on the full control register,
// identity on target and cavity. Every l != 0 sector is annihilated.
inline LinearOperator h_two_level(const SpaceDescriptor& space, const DeviceParams& p) {
    const int nc = space.n_controls();
    const double J = 0.5 * nc;
    const std::vector<bool> no_zeros(static_cast<std::size_t>(nc), false);
    const Eigen::VectorXcd ground = dicke_register(nc, 0, no_zeros);
    const Eigen::VectorXcd w = dicke_register(nc, 1, no_zeros);
    const Eigen::MatrixXcd up = w * ground.adjoint();
    const Eigen::MatrixXcd reg = p.Omega * std::sqrt(2.0 * J) * (up + up.adjoint());
    return embed_register_op(space, reg);
}

// Resonant collective exchange g' (a S+ + a+ S-), interaction picture.
inline LinearOperator h_resonant_collective(const SpaceDescriptor& space, const std::vector<std::size_t>& controls,
                                            const DeviceParams& p) {
    auto [sp, sm, sz] = collective_ops(space, controls);
    return p.g_prime * (annihilation_op(space) * sp + creation_op(space) * sm);
}

namespace detail {
inline LinearOperator target_exchange(const SpaceDescriptor& space, std::size_t target, int lower, double coupling) {
    if (target >= static_cast<std::size_t>(space.n_systems())) {
        throw std::out_of_range("target index " + std::to_string(target) + " out of range");
    }
    const LinearOperator down = creation_op(space) * transition_op(space, target, lower, 2);
    return coupling * (down + down.adjoint());
}
}  // namespace detail

// g' (a+ |1><2| + h.c.) on the target.
inline LinearOperator h_resonant_target_12(const SpaceDescriptor& space, std::size_t target, const DeviceParams& p) {
    return detail::target_exchange(space, target, 1, p.g_prime);
}

// g'' (a+ |0><2| + h.c.) on the target.
inline LinearOperator h_resonant_target_02(const SpaceDescriptor& space, std::size_t target, const DeviceParams& p) {
    return detail::target_exchange(space, target, 0, p.g_dprime);
}

// Excitation number a+a + sum_j |2><2|_j over `systems`, conserved by the
// collective exchange and Jaynes-Cummings forms.
inline LinearOperator excitation_number(const SpaceDescriptor& space, const std::vector<std::size_t>& systems) {
    LinearOperator n = number_op(space);
    for (std::size_t j : systems) n += projector_op(space, j, 2);
    return n;
}

}  // namespace crgate
