// test_clock.cpp -- clock states, effects, moments, covariance, phase freedom

#include <catch2/catch_amalgamated.hpp>

#include "trinity/clock.hpp"

#include <cmath>

using namespace trinity;

namespace {

ClockSpec four_level_spec() {
    ClockSpec s;
    s.regime = ClockRegime::Compact;
    s.energies = {0.0, 1.0, 2.0, 3.0};
    s.t_max = 2.0 * M_PI;
    return s;
}

ClockSpec ideal_grid_spec() {
    ClockSpec s;
    s.regime = ClockRegime::ContinuumApprox;
    for (int j = -128; j < 128; ++j) s.energies.push_back(0.1 * j);
    return s;
}

// composite Simpson reference for int_a^b t^n e^{i omega t} dt
Complex simpson_reference(int n, double omega, double a, double b) {
    const int segments = 200000; // even
    const double h = (b - a) / segments;
    Complex acc = 0.0;
    for (int k = 0; k <= segments; ++k) {
        const double t = a + h * k;
        const double wgt = (k == 0 || k == segments) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += wgt * std::pow(t, n) * std::exp(iu * omega * t);
    }
    return acc * (h / 3.0);
}

} // namespace

TEST_CASE("oscillatory integrals", "[clock][unit]") {
    SECTION("closed forms for n = 0, 1") {
        const double w = 2.7, a = -1.3, b = 2.1;
        const Complex i0 = (std::exp(iu * w * b) - std::exp(iu * w * a)) / (iu * w);
        REQUIRE(std::abs(poly_phase_integral(0, w, a, b) - i0) < 1e-13);
        auto anti1 = [&](double t) { return std::exp(iu * w * t) * (t / (iu * w) + 1.0 / (w * w)); };
        REQUIRE(std::abs(poly_phase_integral(1, w, a, b) - (anti1(b) - anti1(a))) < 1e-13);
    }
    SECTION("zero-frequency reduces to plain moments") {
        REQUIRE(std::abs(poly_phase_integral(0, 0.0, -1.0, 3.0) - 4.0) < 1e-14);
        REQUIRE(std::abs(poly_phase_integral(2, 0.0, 0.0, 3.0) - 9.0) < 1e-13);
    }
    SECTION("both branches against quadrature") {
        for (const int n : {0, 1, 2, 5, 10}) {
            for (const double w : {0.3, 3.0, 30.0}) {
                const Complex ref = simpson_reference(n, w, -M_PI, M_PI);
                const Complex got = poly_phase_integral(n, w, -M_PI, M_PI);
                REQUIRE(std::abs(got - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
            }
        }
    }
    SECTION("empty interval and bad order") {
        REQUIRE(poly_phase_integral(3, 5.0, 1.0, 1.0) == Complex(0.0));
        REQUIRE_THROWS_AS(poly_phase_integral(-1, 1.0, 0.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("compact clock construction", "[clock][unit]") {
    const ClockSystem c = build_clock(four_level_spec());

    SECTION("measure and domain") {
        REQUIRE(c.dim == 4);
        REQUIRE(c.mu == Catch::Approx(1.0 / (2.0 * M_PI)));
        REQUIRE(c.weight == 1.0);
        REQUIRE(c.phi == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(c.period() == Catch::Approx(2.0 * M_PI));
    }
    SECTION("clock states") {
        for (const double t : {0.0, 0.9, 4.4}) {
            REQUIRE(clock_state(c, t).squaredNorm() == Catch::Approx(4.0));
        }
        const Vector at_pi = clock_state(c, M_PI);
        REQUIRE(std::abs(at_pi(0) - 1.0) < 1e-14);
        REQUIRE(std::abs(at_pi(1) + 1.0) < 1e-14);
        REQUIRE(std::abs(at_pi(2) - 1.0) < 1e-13);
        REQUIRE(std::abs(at_pi(3) + 1.0) < 1e-13);
        // trivial periodicity phase: the state at t_max returns to the one at 0
        REQUIRE((clock_state(c, c.t_end) - clock_state(c, 0.0)).norm() < 1e-12);
    }
    SECTION("validation") {
        ClockSpec bad = four_level_spec();
        bad.energies = {0.0, 0.5, 2.0, 3.0}; // 0.5 * 2pi is off the 2pi lattice
        REQUIRE_THROWS_AS(build_clock(bad), std::invalid_argument);
        bad = four_level_spec();
        bad.energies = {0.0, 1.0, 1.0, 3.0};
        REQUIRE_THROWS_AS(build_clock(bad), std::invalid_argument);
        bad = four_level_spec();
        bad.t_max = 0.0;
        REQUIRE_THROWS_AS(build_clock(bad), std::invalid_argument);
        bad = four_level_spec();
        bad.phases = {0.0, 0.1};
        REQUIRE_THROWS_AS(build_clock(bad), std::invalid_argument);
    }
    SECTION("offset spectrum picks up a periodicity phase") {
        ClockSpec s = four_level_spec();
        for (auto& e : s.energies) e += 0.25; // eps * t_max = 2 pi n + pi/2
        const ClockSystem shifted = build_clock(s);
        REQUIRE(shifted.phi == Catch::Approx(M_PI / 2.0));
        REQUIRE(resolution_defect(shifted) < 1e-12);
    }
}

TEST_CASE("effects and moments", "[clock][unit]") {
    const ClockSystem c = build_clock(four_level_spec());

    SECTION("resolution of the identity") {
        REQUIRE(resolution_defect(c) < 1e-12);
    }
    SECTION("sigma additivity and positivity") {
        const Matrix left = effect(c, 0.0, M_PI);
        const Matrix right = effect(c, M_PI, 2.0 * M_PI);
        REQUIRE(max_abs(left + right - effect(c, 0.0, 2.0 * M_PI)) < 1e-13);
        const SpectralDecomposition es = eig(left);
        REQUIRE(es.eigenvalues.minCoeff() > -1e-12);
        REQUIRE(es.eigenvalues.maxCoeff() < 1.0 + 1e-12);
    }
    SECTION("degenerate interval vanishes") {
        REQUIRE(max_abs(effect(c, 1.0, 1.0)) == 0.0);
    }
    SECTION("interval validation") {
        REQUIRE_THROWS_AS(effect(c, -0.5, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(effect(c, 1.0, 0.5), std::invalid_argument);
        REQUIRE_THROWS_AS(effect(c, 5.0, 7.0), std::invalid_argument);
    }
    SECTION("first moment entries") {
        const Matrix t_op = moment_operator(c, 1);
        REQUIRE(is_hermitian(t_op));
        for (Index j = 0; j < 4; ++j)
            REQUIRE(std::abs(t_op(j, j) - M_PI) < 1e-12);
        for (Index j = 0; j < 4; ++j)
            for (Index k = 0; k < 4; ++k)
                if (j != k)
                    REQUIRE(std::abs(t_op(j, k) - iu / (c.energy(j) - c.energy(k))) < 1e-12);
    }
    SECTION("shifted moments match binomial expansion") {
        const double tau = 0.7;
        const Matrix direct = shifted_moment_operator(c, 1, tau);
        const Matrix expanded = moment_operator(c, 1) - tau * moment_operator(c, 0);
        REQUIRE(max_abs(direct - expanded) < 1e-12);
    }
}

TEST_CASE("compact clock identities", "[clock][unit]") {
    const ClockSystem c = build_clock(four_level_spec());

    SECTION("commutator defect operator is zero once the edge term is kept") {
        REQUIRE(max_abs(ccr_defect(c)) < 1e-12);
        REQUIRE(ccr_boundary_identity_defect(c) < 1e-12);
    }
    SECTION("edge projector is the all-ones matrix for zero phases") {
        const Vector edge = clock_state(c, c.t_end);
        const Matrix p = (c.mu * c.period()) * projector_onto(edge);
        REQUIRE(max_abs(p - Matrix::Ones(4, 4)) < 1e-12);
    }
    SECTION("covariance under time translation, including wrap-around") {
        REQUIRE(covariance_defect(c, 0.0, M_PI / 2.0, 0.37) < 1e-12);
        REQUIRE(covariance_defect(c, 1.5 * M_PI, 2.0 * M_PI, M_PI) < 1e-12);
        for (const double t : {0.0, 1.1, 6.0})
            REQUIRE(state_covariance_defect(c, 0.4, t) < 1e-12);
    }
    SECTION("monotone sweep of the first moment") {
        for (const double s : {0.3, 1.7, 5.9})
            REQUIRE(monotonicity_defect(c, s) < 1e-10);
        REQUIRE_THROWS_AS(monotonicity_defect(c, -0.1), std::invalid_argument);
    }
    SECTION("energy states recovered from clock states") {
        REQUIRE(fourier_defect(c) < 1e-12);
    }
    SECTION("single-energy clock is trivial") {
        ClockSpec s;
        s.energies = {1.0};
        s.t_max = 2.0 * M_PI;
        const ClockSystem tiny = build_clock(s);
        REQUIRE(max_abs(ccr_defect(tiny)) < 1e-13);
        REQUIRE(std::abs(moment_operator(tiny, 1)(0, 0) - M_PI) < 1e-13);
    }
}

TEST_CASE("reparametrization", "[clock][unit]") {
    const ClockSystem c = build_clock(four_level_spec());
    const ClockSystem r = reparametrize(c, [](double e) { return 0.3 * e * e; });

    SECTION("phases enter the clock states") {
        const Vector v = clock_state(r, 0.0);
        for (Index j = 0; j < 4; ++j) {
            const double g = 0.3 * r.energy(j) * r.energy(j);
            REQUIRE(std::abs(v(j) - std::exp(iu * g)) < 1e-14);
        }
    }
    SECTION("covariant structure survives") {
        REQUIRE(resolution_defect(r) < 1e-12);
        REQUIRE(max_abs(ccr_defect(r)) < 1e-12);
        REQUIRE(covariance_defect(r, 0.2, 1.8, 2.9) < 1e-12);
        REQUIRE(fourier_defect(r) < 1e-12);
    }
}

TEST_CASE("continuum-approximation grid", "[clock][unit]") {
    const ClockSystem c = build_clock(ideal_grid_spec());

    SECTION("window defaults to the grid-conjugate value") {
        REQUIRE(c.dim == 256);
        REQUIRE(c.t_end == Catch::Approx(M_PI / 0.1));
        REQUIRE(c.weight == Catch::Approx(std::sqrt(0.1)));
        REQUIRE(c.mu == Catch::Approx(1.0 / (2.0 * M_PI)));
    }
    SECTION("grid validation") {
        ClockSpec bad = ideal_grid_spec();
        bad.energies[5] += 0.01;
        REQUIRE_THROWS_AS(build_clock(bad), std::invalid_argument);
        ClockSpec tiny;
        tiny.regime = ClockRegime::ContinuumApprox;
        tiny.energies = {0.0};
        REQUIRE_THROWS_AS(build_clock(tiny), std::invalid_argument);
    }
    SECTION("resolution and Fourier relations are exact at this window") {
        REQUIRE(resolution_defect(c) < 1e-12);
        REQUIRE(fourier_defect(c) < 1e-12);
    }
    SECTION("boundary-corrected commutator identity") {
        REQUIRE(ccr_boundary_identity_defect(c) < 1e-10);
    }
    SECTION("canonical commutator on interior packets") {
        const Matrix defect = ccr_defect(c);
        const double span = c.energy(c.dim - 1) - c.energy(0);
        for (const double t0 : {0.0, -c.t_end / 3.0, c.t_end / 3.0}) {
            const Vector psi = gaussian_packet(c, span / 20.0, t0);
            REQUIRE((defect * psi).norm() < 1e-9);
        }
    }
    SECTION("packets read out their time stamp") {
        const double span = c.energy(c.dim - 1) - c.energy(0);
        const Vector psi = gaussian_packet(c, span / 20.0, 1.3);
        REQUIRE(std::abs(mean_time(c, psi) - 1.3) < 1e-12);
        REQUIRE(packet_monotonicity_defect(c, psi, 0.8) < 1e-10);
    }
    SECTION("covariance inside the window") {
        REQUIRE(covariance_defect(c, -1.0, 1.0, 0.37) < 1e-12);
        REQUIRE_THROWS_AS(covariance_defect(c, 0.0, c.t_end, 1.0), std::invalid_argument);
    }
    SECTION("phase freedom holds on packets, not in full norm") {
        const auto linear = check_phase_freedom(
            c, [](double e) { return 0.3 * e; }, [](double) { return 0.3; });
        REQUIRE(linear.packet_defect < 1e-9);
        const auto quadratic = check_phase_freedom(
            c, [](double e) { return 0.05 * e * e; }, [](double e) { return 0.1 * e; });
        REQUIRE(quadratic.packet_defect < 1e-9);
        // full-matrix norms are window-edge dominated and stay order ten
        REQUIRE(linear.full_defect > 1.0);
        REQUIRE(quadratic.full_defect > 1.0);
    }
}
