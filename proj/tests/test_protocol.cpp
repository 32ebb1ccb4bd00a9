#include <catch_amalgamated.hpp>

#include "crgate/protocol.hpp"
#include "trace_oracle.hpp"

#include <numbers>

using namespace crgate;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

double max_diff(const KetState& a, const KetState& b) { return (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff(); }

// Reference device with Omega rescaled so that lambda / Omega = ratio.
DeviceParams with_blockade_ratio(int n, double ratio) {
    auto p = reference_params(n);
    p.Omega = p.lambda() / ratio;
    return p;
}

}  // namespace

TEST_CASE("schedule layout and durations", "[protocol]") {
    const auto p = reference_params(6);
    const auto s = build_schedule(6, p, Tier::T0);
    REQUIRE(s.steps.size() == 7);
    CHECK_THAT(s.steps[0].duration, WithinRel(0.1017e-6, 1e-3));
    CHECK(s.steps[1].duration == s.steps[5].duration);
    CHECK(s.steps[0].duration == s.steps[6].duration);
    CHECK(s.steps[0].hamiltonian_tag == "two_level");
    CHECK(s.steps[2].active_systems == std::vector<std::size_t>{5});
    CHECK(s.steps[1].active_systems.size() == 5);

    auto q = reference_params(3);
    q.theta = 0.0;
    CHECK(build_schedule(3, q, Tier::T0).steps[3].duration == 0.0);

    CHECK(build_schedule(3, reference_params(3), Tier::T1).steps[6].hamiltonian_tag == "engineered");
    CHECK_THAT(build_schedule(3, reference_params(3), Tier::T2).lab_dt, WithinRel(1.0 / (3e9 * 50), 1e-12));

    CHECK_THROWS_AS(build_schedule(1, p, Tier::T0), std::invalid_argument);
    auto bad = p;
    bad.Omega = 0.0;
    CHECK_THROWS_AS(build_schedule(6, bad, Tier::T0), std::invalid_argument);
    bad = p;
    bad.g_prime = -1.0;
    CHECK_THROWS_AS(build_schedule(6, bad, Tier::T1), std::invalid_argument);
    // reference parameters sit on the "much less" boundaries
    CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("T0 per-step trace", "[protocol]") {
    for (int n : {2, 3, 4, 5})
        for (double theta : {0.0, pi / 4, 1.0}) {
            auto p = reference_params(n);
            p.theta = theta;
            const auto s = build_schedule(n, p, Tier::T0);
            for (int t : {0, 1}) {
                std::vector<int> digits(static_cast<std::size_t>(n), 1);
                digits.back() = t;
                const auto run = run_protocol(basis_state(s.space, digits, 0), s);
                const auto expect = testing::expected_trace(s.space, t, theta);
                REQUIRE(run.trace.size() == 7);
                for (std::size_t k = 0; k < 7; ++k) REQUIRE(max_diff(run.trace[k], expect[k]) < 1e-8);
            }
        }
}

TEST_CASE("trace from a basis label", "[protocol]") {
    const auto s = build_schedule(3, reference_params(3), Tier::T0);
    const auto a = run_protocol("11|1|0c", s);
    const auto b = run_protocol("111", s);
    CHECK(max_diff(a.final_state, b.final_state) == 0.0);
    CHECK_THROWS_AS(run_protocol("11|1", s), std::invalid_argument);
    CHECK_THROWS_AS(run_protocol(basis_state(build_space(4), {1, 1, 1, 1}, 0), s), std::invalid_argument);
}

TEST_CASE("ideal_gate", "[protocol]") {
    const auto u = ideal_gate(2, pi / 2);
    CHECK(std::abs(u(3, 2) - 1.0) < 1e-15);
    CHECK(std::abs(u(2, 3) + 1.0) < 1e-15);
    CHECK(std::abs(u(0, 0) - 1.0) == 0.0);
    CHECK((ideal_gate(4, 0.0) - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
    const auto v = ideal_gate(3, 0.3);
    CHECK((v.adjoint() * v - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("T0 realises the ideal gate exactly", "[protocol]") {
    for (int n : {2, 3, 4})
        for (double theta : {0.0, pi / 4, pi / 2, 1.0}) {
            auto p = reference_params(n);
            p.theta = theta;
            const auto r = extract_gate(build_schedule(n, p, Tier::T0));
            REQUIRE(r.max_deviation < 1e-8);
            REQUIRE_THAT(r.min_fidelity(), WithinAbs(1.0, 1e-8));
            REQUIRE(r.max_leakage() < 1e-8);
            REQUIRE_THAT(r.gate_fidelity, WithinAbs(1.0, 1e-8));
        }
}

TEST_CASE("non-triggering inputs", "[protocol]") {
    const int n = 4;
    const auto p = reference_params(n);
    const auto s0 = build_schedule(n, p, Tier::T0);
    const ProtocolExecutor e0(s0);
    const auto s1 = build_schedule(n, p, Tier::T1);
    const ProtocolExecutor e1(s1);
    const double floor = 1.0 - 5.0 * leakage_estimates(n, p).p2_bound;
    int count = 0;
    for (std::size_t c = 0; c < 16; ++c) {
        if ((c >> 1U) == 7U) continue;  // all controls set
        ++count;
        const auto in = basis_state(s0.space, s0.space.decode(computational_index(s0.space, c)).first, 0);
        REQUIRE(max_diff(e0.run(in).final_state, in) < 1e-8);
        REQUIRE(fidelity(in, e1.run(in).final_state) >= floor);
    }
    CHECK(count == 14);
}

TEST_CASE("linearity and cavity disentanglement", "[protocol]") {
    for (Tier tier : {Tier::T0, Tier::T1}) {
        const auto s = build_schedule(3, reference_params(3), tier);
        const ProtocolExecutor ex(s);
        const auto sp = s.space;
        KetState sup(sp);
        std::vector<KetState> outs;
        const cplx coeffs[] = {{0.3, 0.1}, {-0.2, 0.5}, {0.6, 0.0}, {0.1, -0.4}};
        const std::size_t picks[] = {1, 5, 6, 7};
        for (std::size_t k = 0; k < 4; ++k) {
            const auto in = basis_state(sp, sp.decode(computational_index(sp, picks[k])).first, 0);
            sup += coeffs[k] * in;
            outs.push_back(ex.run(in).final_state);
        }
        KetState combined(sp);
        for (std::size_t k = 0; k < 4; ++k) combined += coeffs[k] * outs[k];
        REQUIRE(max_diff(ex.run(sup).final_state, combined) < 1e-9);

        const auto r = extract_gate(ex);
        for (std::size_t j = 0; j < r.cavity_population.size(); ++j) REQUIRE(r.cavity_population[j] <= r.leakage[j] + 1e-9);
        for (std::size_t k = 0; k < 7; ++k)
            if (ex.propagator(k)) REQUIRE(ex.propagator(k)->unitarity_error() < 1e-9);
    }
}

TEST_CASE("leakage estimates", "[protocol]") {
    const auto p = reference_params(6);
    CHECK_THAT(p.lambda() / p.Omega, WithinRel(20.0, 1e-12));
    const auto e = leakage_estimates(6, p);
    CHECK(e.applicable);
    CHECK_THAT(e.p1, WithinRel(1.0 / 51.0, 1e-12));
    CHECK_THAT(e.p2_bound, WithinRel(1.0 / 26.0, 1e-12));
    CHECK_FALSE(leakage_estimates(2, reference_params(2)).applicable);
    CHECK(leakage_estimates(6, with_blockade_ratio(6, 1e6)).p1 < 1e-11);
    for (int l = 1; l <= 4; ++l) REQUIRE(p2_estimate(6, l, p) <= e.p2_bound + 1e-15);
    CHECK_THROWS_AS(p2_estimate(6, 5, p), std::out_of_range);
}

TEST_CASE("simulated leakage", "[protocol]") {
    const auto p = reference_params(6);
    const auto sim = simulated_leakage(6, p, 200);
    const double p1 = leakage_estimates(6, p).p1;
    CHECK(sim.max() <= 3.0 * p1);
    CHECK(sim.max() >= p1 / 3.0);

    auto off = p;
    off.Omega = 0.0;
    CHECK(simulated_leakage(6, off).max() == 0.0);

    double prev = 1.0;
    for (double ratio : {10.0, 20.0, 40.0}) {
        const double v = simulated_leakage(5, with_blockade_ratio(5, ratio), 150).max();
        REQUIRE(v < prev);
        prev = v;
    }
}

TEST_CASE("T1 leakage at six qubits", "[protocol][slow]") {
    const auto p = reference_params(6);
    const auto s = build_schedule(6, p, Tier::T1);
    const auto run = run_protocol(basis_state(s.space, {1, 1, 1, 1, 1, 0}, 0), s);
    const auto comp = computational_indices(s.space);
    double in_sector = 0.0;
    for (auto idx : comp) in_sector += std::norm(run.final_state[idx]);
    CHECK(1.0 - in_sector <= 3.0 * leakage_estimates(6, p).p1);
}

TEST_CASE("total time", "[protocol]") {
    const auto p = reference_params(6);
    const auto t = total_time(6, p);
    CHECK_THAT(t.total, WithinRel(0.2174e-6, 2e-3));
    CHECK_THAT(t.adjustments, WithinRel(8e-9, 1e-12));
    CHECK_THAT(t.total, WithinRel(t.drive + t.photon_transfer + t.target_swaps + t.rotation + t.adjustments, 1e-14));
    for (int n = 3; n < 12; ++n) {
        REQUIRE(total_time(n + 1, p).drive < total_time(n, p).drive);
        REQUIRE(total_time(n + 1, p).photon_transfer < total_time(n, p).photon_transfer);
    }
    auto q = p;
    q.tau_a = 0.0;
    q.theta = 0.0;
    CHECK(total_time(100000001, q).n_dependent() < 2e-4 * total_time(2, q).n_dependent());
}

TEST_CASE("decomposition step count", "[protocol]") {
    CHECK(decomposition_step_count(3) == 5);
    CHECK(decomposition_step_count(5) == 29);
    CHECK(decomposition_step_count(6) == 61);
    CHECK_FALSE(decomposition_step_count(2).has_value());
    for (int n = 3; n < 20; ++n) REQUIRE(*decomposition_step_count(n + 1) > *decomposition_step_count(n));
}

TEST_CASE("feasibility check", "[protocol]") {
    const auto p = reference_params(6);
    const auto r = feasibility_check(6, p);
    CHECK_THAT(r.kappa_inv, WithinRel(2.6526e-6, 1e-3));
    CHECK_THAT(r.at("g/Delta_c").value, WithinRel(0.1, 1e-12));
    CHECK(r.at("g/Delta_c").status == CheckStatus::warn);
    CHECK(r.at("Delta_p-(n-1)lambda").status == CheckStatus::pass);
    CHECK(r.at("tau/kappa^-1").status == CheckStatus::pass);
    CHECK_FALSE(r.all_pass());

    auto q = p;
    q.omega_drive += 0.01 * p.lambda();
    CHECK(feasibility_check(6, q).at("Delta_p-(n-1)lambda").status == CheckStatus::inconsistent);

    Thresholds loose{0.5, 0.5, 0.5};
    CHECK(feasibility_check(6, p, loose).all_pass());
    CHECK_THROWS_AS(r.at("nope"), std::out_of_range);
}

TEST_CASE("T2 drive step tracks the engineered Hamiltonian", "[protocol][slow]") {
    // One control plus target; large nu_c keeps omega0 positive at Delta_c = 40 g.
    double prev = 1.0;
    for (double ratio : {10.0, 20.0, 40.0}) {
        auto p = reference_params(2);
        p.nu_c = 12e9;
        p.omega_c = angular(p.nu_c);
        p.omega0 = p.omega_c - ratio * p.g;
        p.omega_drive = p.resonant_drive(2);
        const auto s2 = build_schedule(2, p, Tier::T2);
        const auto s1 = build_schedule(2, p, Tier::T1);
        const auto in = basis_state(s2.space, {1, 1}, 0);
        const ProtocolExecutor e2(s2), e1(s1);
        const KetState a(s2.space, Eigen::VectorXcd(e2.apply_step(0, in.amplitudes)));
        const KetState b(s1.space, Eigen::VectorXcd(e1.apply_step(0, in.amplitudes)));
        const double infid = 1.0 - fidelity(a, b);
        if (ratio == 20.0) REQUIRE(infid <= 0.05);
        REQUIRE(infid < prev);
        prev = infid;
    }
}
