// Symmetric Dicke states of the control register and the closed-form ladder
// spectrum of the collective Stark-shift Hamiltonian.
//
// |J,-J+k> over n_c controls: k systems in |2>, the rest in |1>, equal positive
// amplitudes, J = n_c/2. The l-sector generalisation pins l designated controls
// to |0> and symmetrises over the remaining n_c - l.

#pragma once

#include "crgate/hilbert.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crgate {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Dicke state on a bare register of n_controls qutrits (system 0 most significant).
inline Eigen::VectorXcd dicke_register(int n_controls, int k, const std::vector<bool>& zero_mask) {
    if (n_controls < 1) throw std::invalid_argument("dicke_register: need at least one control");
    if (static_cast<int>(zero_mask.size()) != n_controls) {
        throw std::invalid_argument("dicke_register: zero mask length must equal n_controls");
    }
    int l = 0;
    for (bool z : zero_mask) l += z ? 1 : 0;
    const int active = n_controls - l;
    if (k < 0 || k > active) {
        throw std::invalid_argument("dicke_state: k + l = " + std::to_string(k + l) + " exceeds n_controls = " +
                                    std::to_string(n_controls));
    }
    std::size_t reg_dim = 1;
    for (int i = 0; i < n_controls; ++i) reg_dim *= kLevels;
    const double amp = 1.0 / std::sqrt(binomial(active, k));
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(reg_dim));
    std::vector<int> digits(static_cast<std::size_t>(n_controls));
    for (std::size_t r = 0; r < reg_dim; ++r) {
        std::size_t q = r;
        for (int s = n_controls - 1; s >= 0; --s) {
            digits[static_cast<std::size_t>(s)] = static_cast<int>(q % kLevels);
            q /= kLevels;
        }
        bool ok = true;
        int twos = 0;
        for (int s = 0; s < n_controls && ok; ++s) {
            const int d = digits[static_cast<std::size_t>(s)];
            if (zero_mask[static_cast<std::size_t>(s)]) {
                ok = d == 0;
            } else {
                ok = d != 0;
                twos += d == 2 ? 1 : 0;
            }
        }
        if (ok && twos == k) out[static_cast<Eigen::Index>(r)] = amp;
    }
    return out;
}

// Zeros on the last l controls.
inline std::vector<bool> trailing_zero_mask(int n_controls, int l) {
    if (l < 0 || l > n_controls) throw std::invalid_argument("dicke_state: zero count out of range");
    std::vector<bool> mask(static_cast<std::size_t>(n_controls), false);
    for (int i = n_controls - l; i < n_controls; ++i) mask[static_cast<std::size_t>(i)] = true;
    return mask;
}

inline KetState dicke_state_masked(const SpaceDescriptor& space, int k, const std::vector<bool>& zero_mask,
                                   int target_level = 0, int photons = 0) {
    return embed_register_state(space, dicke_register(space.n_controls(), k, zero_mask), target_level, photons);
}

// |J-l/2, -(J-l/2)+k> on the controls, target in `target_level`, `photons` in the cavity.
inline KetState dicke_state(const SpaceDescriptor& space, int k, int zeros = 0, int target_level = 0,
                            int photons = 0) {
    const int nc = space.n_controls();
    if (zeros < 0 || k < 0 || k + zeros > nc) {
        throw std::invalid_argument("dicke_state: k + l = " + std::to_string(k + zeros) + " exceeds n_controls = " +
                                    std::to_string(nc));
    }
    return dicke_state_masked(space, k, trailing_zero_mask(nc, zeros), target_level, photons);
}

// The W state |J,-J+1> of the full control register.
inline KetState w_state(const SpaceDescriptor& space, int target_level = 0, int photons = 0) {
    return dicke_state(space, 1, 0, target_level, photons);
}

namespace detail {
inline int twice_j(double J) {
    const double twoj = 2.0 * J;
    const long r = std::lround(twoj);
    if (r < 1 || std::abs(twoj - static_cast<double>(r)) > 1e-12) {
        throw std::invalid_argument("J must be a positive half-integer");
    }
    return static_cast<int>(r);
}
}  // namespace detail

// eps_k = omega0 (-J + k) - k (2J - k + 1) lambda
inline double dicke_energy(int k, double J, double omega0, double lambda) {
    const int tj = detail::twice_j(J);
    if (k < 0 || k > tj) throw std::out_of_range("dicke_energy: k outside [0, 2J]");
    return omega0 * (-J + k) - k * (2.0 * J - k + 1.0) * lambda;
}

struct LadderParams {
    double rabi;      // Omega_k
    double detuning;  // delta_k, constant -2 J^2 lambda removed
};

// Rotating-frame ladder coupling and diagonal for rung k. With the resonant
// drive omega = omega0 - 2 J lambda this reduces to delta_k = k (k-1) lambda.
inline LadderParams ladder_params(int k, double J, double Omega, double lambda, double omega0, double omega) {
    const int tj = detail::twice_j(J);
    if (k < 0 || k > tj - 1) throw std::out_of_range("ladder_params: k outside [0, 2J-1]");
    const double rabi = Omega * std::sqrt((2.0 * J - k) * (k + 1.0));
    const double delta = dicke_energy(k, J, omega0, lambda) - omega * (-J + k) + 2.0 * J * J * lambda;
    return {rabi, delta};
}

struct DickeLadder {
    int n_controls = 0;
    double J = 0.0;
    std::vector<double> energies;   // eps_k, k = 0..n_controls
    std::vector<double> rabi;       // Omega_k, k = 0..n_controls-1
    std::vector<double> detunings;  // delta_k, k = 0..n_controls
};

inline DickeLadder make_ladder(int n_controls, double omega0, double lambda, double Omega) {
    if (n_controls < 1) throw std::invalid_argument("make_ladder: need at least one control");
    DickeLadder lad;
    lad.n_controls = n_controls;
    lad.J = 0.5 * n_controls;
    const double omega = omega0 - 2.0 * lad.J * lambda;
    for (int k = 0; k <= n_controls; ++k) {
        lad.energies.push_back(dicke_energy(k, lad.J, omega0, lambda));
        lad.detunings.push_back(static_cast<double>(k) * (k - 1) * lambda);
        if (k < n_controls) lad.rabi.push_back(ladder_params(k, lad.J, Omega, lambda, omega0, omega).rabi);
    }
    return lad;
}

// Omega sqrt(n-1) / lambda; the blockade holds when this is well below 1.
inline double blockade_margin(int n, double Omega, double lambda) {
    if (n < 2) throw std::invalid_argument("blockade_margin: n must be >= 2");
    if (!(lambda > 0.0)) throw std::invalid_argument("blockade_margin: lambda must be positive");
    return Omega * std::sqrt(static_cast<double>(n - 1)) / lambda;
}

inline bool blockade_satisfied(int n, double Omega, double lambda, double threshold = 0.1) {
    return blockade_margin(n, Omega, lambda) <= threshold;
}

// Drive detuning seen by the lowest transition of the l-sector.
inline double l_sector_detuning(int l, double J, double lambda) {
    const int tj = detail::twice_j(J);
    if (l < 1 || l > tj) throw std::out_of_range("l_sector_detuning: l outside [1, 2J]");
    return -l * lambda;
}

inline double l_sector_rabi(int l, double J, double Omega) {
    const int tj = detail::twice_j(J);
    if (l < 1 || l > tj) throw std::out_of_range("l_sector_rabi: l outside [1, 2J]");
    return Omega * std::sqrt(2.0 * J - l);
}

}  // namespace crgate
