#include <catch_amalgamated.hpp>

#include "crgate/dicke.hpp"
#include "crgate/hamiltonians.hpp"

#include <algorithm>
#include <set>

using namespace crgate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Oracle: enumerate distinct permutations of the control digit multiset.
KetState permutation_oracle(const SpaceDescriptor& sp, int k, int l) {
    const int nc = sp.n_controls();
    std::vector<int> active;
    for (int i = 0; i < nc - l - k; ++i) active.push_back(1);
    for (int i = 0; i < k; ++i) active.push_back(2);
    std::sort(active.begin(), active.end());
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(active);
    } while (std::next_permutation(active.begin(), active.end()));
    KetState out(sp);
    for (auto digits : perms) {
        for (int i = 0; i < l; ++i) digits.push_back(0);
        digits.push_back(0);  // target
        out += basis_state(sp, digits, 0);
    }
    out.normalize();
    return out;
}

double max_diff(const KetState& a, const KetState& b) { return (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("dicke_state examples", "[dicke]") {
    const auto sp4 = build_space(4, 2);  // three controls
    const auto w3 = dicke_state(sp4, 1, 0);
    const auto expect = (1.0 / std::sqrt(3.0)) * (basis_state(sp4, {1, 1, 2, 0}, 0) + basis_state(sp4, {1, 2, 1, 0}, 0) +
                                                  basis_state(sp4, {2, 1, 1, 0}, 0));
    CHECK(max_diff(w3, expect) < 1e-15);
    CHECK(max_diff(dicke_state(sp4, 0, 0), basis_state(sp4, {1, 1, 1, 0}, 0)) == 0.0);

    const auto sp3 = build_space(3, 2);
    const auto w2 = (1.0 / std::sqrt(2.0)) * (basis_state(sp3, {1, 2, 0}, 0) + basis_state(sp3, {2, 1, 0}, 0));
    CHECK(max_diff(dicke_state(sp3, 1, 0), w2) < 1e-15);
    CHECK(max_diff(w_state(sp3), w2) < 1e-15);
    CHECK_THROWS_AS(dicke_state(sp4, 2, 2), std::invalid_argument);
}

TEST_CASE("dicke_state matches permutation enumeration", "[dicke]") {
    for (int n = 2; n <= 7; ++n) {
        const auto sp = build_space(n, 2);
        const int nc = n - 1;
        for (int l = 0; l <= nc; ++l)
            for (int k = 0; k + l <= nc; ++k) REQUIRE(max_diff(dicke_state(sp, k, l), permutation_oracle(sp, k, l)) < 1e-14);
        REQUIRE_THAT(w_state(sp).norm(), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("dicke states are orthonormal within a sector", "[dicke]") {
    const auto sp = build_space(5, 2);
    for (int l = 0; l <= 4; ++l)
        for (int k1 = 0; k1 + l <= 4; ++k1)
            for (int k2 = 0; k2 + l <= 4; ++k2) {
                const double ov = std::abs(inner_product(dicke_state(sp, k1, l), dicke_state(sp, k2, l)));
                REQUIRE_THAT(ov, WithinAbs(k1 == k2 ? 1.0 : 0.0, 1e-14));
            }
}

TEST_CASE("explicit zero mask", "[dicke]") {
    const auto sp = build_space(4, 2);
    const auto s = dicke_state_masked(sp, 1, {true, false, false});
    const auto expect = (1.0 / std::sqrt(2.0)) * (basis_state(sp, {0, 1, 2, 0}, 0) + basis_state(sp, {0, 2, 1, 0}, 0));
    CHECK(max_diff(s, expect) < 1e-15);
}

TEST_CASE("dicke_energy", "[dicke]") {
    const double lam = 0.37;
    CHECK_THAT(dicke_energy(1, 1.0, 0.0, lam), WithinAbs(-2.0 * lam, 1e-15));
    CHECK(dicke_energy(0, 1.0, 0.0, lam) == 0.0);
    for (double J : {0.5, 1.0, 1.5, 2.5, 3.0})
        for (int k = 0; k < static_cast<int>(2 * J); ++k) {
            const double w0 = 1.3;
            REQUIRE_THAT(dicke_energy(k + 1, J, w0, lam) - dicke_energy(k, J, w0, lam),
                         WithinAbs(w0 - 2.0 * (J - k) * lam, 1e-13));
        }
    CHECK_THROWS_AS(dicke_energy(3, 1.0, 0.0, lam), std::out_of_range);
    CHECK_THROWS_AS(dicke_energy(0, 0.7, 0.0, lam), std::invalid_argument);
}

TEST_CASE("ladder_params", "[dicke]") {
    const double Om = 0.01, lam = 0.2, w0 = 3.0;
    const double J = 2.5;
    const double omega = w0 - 2 * J * lam;
    const auto r0 = ladder_params(0, J, Om, lam, w0, omega);
    CHECK_THAT(r0.rabi, WithinRel(Om * std::sqrt(5.0), 1e-14));
    CHECK_THAT(r0.detuning, WithinAbs(0.0, 1e-13));
    CHECK_THAT(ladder_params(1, J, Om, lam, w0, omega).detuning, WithinAbs(0.0, 1e-13));
    CHECK_THAT(ladder_params(2, J, Om, lam, w0, omega).detuning, WithinAbs(2.0 * lam, 1e-13));
    CHECK_THAT(ladder_params(0, 0.5, Om, lam, w0, w0 - lam).rabi, WithinRel(Om, 1e-15));
    CHECK_THROWS_AS(ladder_params(5, J, Om, lam, w0, omega), std::out_of_range);

    const auto lad = make_ladder(5, w0, lam, Om);
    for (int k = 0; k <= 5; ++k) REQUIRE_THAT(lad.detunings[static_cast<std::size_t>(k)], WithinAbs(k * (k - 1) * lam, 1e-15));
    CHECK(lad.rabi.size() == 5);
}

TEST_CASE("blockade margin and l-sector parameters", "[dicke]") {
    CHECK_THAT(blockade_margin(6, 1.0, 20.0), WithinRel(std::sqrt(5.0) / 20.0, 1e-15));
    CHECK_THAT(blockade_margin(6, 1.0, 20.0), WithinAbs(0.1118, 1e-4));
    CHECK(blockade_margin(2, 1.0, 1.0) == 1.0);
    CHECK_THAT(blockade_margin(5, 1.0, 40.0), WithinRel(0.5 * blockade_margin(5, 1.0, 20.0), 1e-15));
    CHECK_THROWS_AS(blockade_margin(4, 1.0, 0.0), std::invalid_argument);
    CHECK_FALSE(blockade_satisfied(6, 1.0, 20.0));
    CHECK(blockade_satisfied(6, 1.0, 40.0));

    CHECK(l_sector_detuning(1, 2.5, 0.3) == -0.3);
    CHECK(l_sector_rabi(5, 2.5, 0.7) == 0.0);
    CHECK_THAT(l_sector_rabi(2, 2.5, 0.7), WithinRel(0.7 * std::sqrt(3.0), 1e-15));
    CHECK_THROWS_AS(l_sector_rabi(0, 2.5, 0.7), std::out_of_range);
    CHECK_THROWS_AS(l_sector_detuning(6, 2.5, 0.3), std::out_of_range);

    // Every l-sector ratio is bounded by the global blockade ratio.
    for (int n = 3; n <= 8; ++n) {
        const double J = 0.5 * (n - 1);
        for (int l = 1; l <= n - 1; ++l) {
            const double ratio = l_sector_rabi(l, J, 1.0) / (l * 20.0);
            REQUIRE(ratio <= blockade_margin(n, 1.0, 20.0) + 1e-15);
        }
    }
}

TEST_CASE("dicke states are eigenstates of the Stark-shift Hamiltonian", "[dicke]") {
    DeviceParams p;
    p.omega0 = 1.7;
    p.omega_c = 4.2;
    p.g = 0.6;
    const double lam = p.lambda();
    for (int nc = 1; nc <= 5; ++nc) {
        const auto sp = build_space(nc + 1, 2);
        const auto h0 = h_h0(sp, control_systems(sp), p);
        const double J = 0.5 * nc;
        for (int l = 0; l <= nc; ++l)
            for (int k = 0; k + l <= nc; ++k) {
                const auto psi = dicke_state(sp, k, l);
                const double Jl = J - 0.5 * l;
                const double eps = Jl > 0 ? dicke_energy(k, Jl, p.omega0, lam) : 0.0;
                REQUIRE((apply(h0, psi) - eps * psi).norm() < 1e-10);
            }
    }
}

TEST_CASE("engineered Hamiltonian reproduces the ladder in the Dicke basis", "[dicke]") {
    DeviceParams p;
    p.omega0 = 2.0;
    p.omega_c = 5.0;
    p.g = 0.9;
    p.Omega = 0.013;
    for (int nc = 1; nc <= 5; ++nc) {
        const int n = nc + 1;
        p.omega_drive = p.resonant_drive(n);
        const auto sp = build_space(n, 2);
        const auto h = h_engineered(sp, control_systems(sp), p);
        const auto lad = make_ladder(nc, p.omega0, p.lambda(), p.Omega);
        for (int k = 0; k <= nc; ++k) {
            const auto dk = dicke_state(sp, k);
            REQUIRE_THAT(inner_product(dk, apply(h, dk)).real(), WithinAbs(lad.detunings[static_cast<std::size_t>(k)], 1e-10));
            if (k < nc) {
                const auto up = inner_product(dicke_state(sp, k + 1), apply(h, dk));
                REQUIRE_THAT(up.real(), WithinAbs(lad.rabi[static_cast<std::size_t>(k)], 1e-10));
            }
        }
    }
}
