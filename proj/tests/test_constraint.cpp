// test_constraint.cpp -- physical projector, group averaging, trivialization

#include <catch2/catch_amalgamated.hpp>

#include "trinity/constraint.hpp"

#include <cmath>
#include <random>

using namespace trinity;

namespace {

ConstraintModel m1_model() {
    ClockSpec s;
    s.energies = {0.0, 1.0, 2.0, 3.0};
    s.t_max = 2.0 * M_PI;
    Matrix h_s = Matrix::Zero(2, 2);
    h_s(0, 0) = -1.0;
    h_s(1, 1) = -2.0;
    return build_model(build_clock(s), h_s);
}

ConstraintModel m2_model() {
    ClockSpec s;
    s.energies = {-2.0, -1.0, 0.0, 1.0, 2.0};
    s.t_max = 2.0 * M_PI;
    Matrix h_s(2, 2);
    h_s << 0.0, 1.0, 1.0, 0.0;
    return build_model(build_clock(s), h_s);
}

bool contains_energy(const std::vector<double>& v, double e) {
    for (const double x : v)
        if (std::abs(x - e) < 1e-9) return true;
    return false;
}

} // namespace

TEST_CASE("model construction", "[constraint][unit]") {
    SECTION("diagonal system") {
        const ConstraintModel m = m1_model();
        REQUIRE(m.dim == 8);
        REQUIRE(m.matched_pairs.size() == 2);
        REQUIRE(std::abs(m.p_phys.trace().real() - 2.0) < 1e-12);
        REQUIRE(m.sigma_sc.size() == 2);
        REQUIRE(contains_energy(m.sigma_sc, -1.0));
        REQUIRE(contains_energy(m.sigma_sc, -2.0));
        REQUIRE(max_abs(m.pi_sigma - Matrix::Identity(2, 2)) < 1e-12);
        REQUIRE(!m.empty_physical);
    }
    SECTION("coupled system") {
        const ConstraintModel m = m2_model();
        REQUIRE(m.dim == 10);
        REQUIRE(std::abs(m.p_phys.trace().real() - 2.0) < 1e-12);
        REQUIRE(contains_energy(m.sigma_sc, -1.0));
        REQUIRE(contains_energy(m.sigma_sc, 1.0));
        REQUIRE(max_abs(m.pi_sigma - Matrix::Identity(2, 2)) < 1e-12);
    }
    SECTION("projector annihilates the constraint") {
        for (const ConstraintModel& m : {m1_model(), m2_model()}) {
            const Matrix c_op = constraint_operator(m);
            REQUIRE(max_abs(c_op * m.p_phys) < 1e-12);
            REQUIRE(max_abs(m.p_phys * m.p_phys - m.p_phys) < 1e-12);
            REQUIRE(is_hermitian(m.p_phys));
        }
    }
    SECTION("no matched energies leaves a flagged model") {
        ClockSpec s;
        s.energies = {0.0, 1.0, 2.0, 3.0};
        s.t_max = 2.0 * M_PI;
        Matrix h_s = Matrix::Zero(2, 2);
        h_s(0, 0) = 0.5;
        h_s(1, 1) = 5.0;
        const ConstraintModel m = build_model(build_clock(s), h_s);
        REQUIRE(m.empty_physical);
        REQUIRE(max_abs(m.p_phys) == 0.0);
        Vector v = Vector::Ones(8);
        REQUIRE_THROWS_AS(physical_inner(m, v, v), EmptyPhysicalSpace);
        REQUIRE_THROWS_AS(default_eps_star(m), EmptyPhysicalSpace);
    }
    SECTION("dense guard") {
        ClockSpec s;
        s.regime = ClockRegime::ContinuumApprox;
        for (int j = -128; j < 128; ++j) s.energies.push_back(0.1 * j);
        const Matrix big = Matrix::Zero(17, 17);
        REQUIRE_THROWS_AS(build_model(build_clock(s), big), std::invalid_argument);
    }
}

TEST_CASE("group averaging", "[constraint][unit]") {
    const ConstraintModel m = m2_model();
    std::mt19937_64 rng(7);
    const Matrix a = random_hermitian(m.dim, rng);
    const Matrix g = group_average(m, a);

    SECTION("commutes with the constraint flow") {
        for (const double s : {0.77, 2.4}) {
            const Matrix u = evolve_constraint(m, s);
            REQUIRE(max_abs(u * g * u.adjoint() - g) < 1e-10);
        }
    }
    SECTION("idempotent as a superoperator") {
        REQUIRE(max_abs(group_average(m, g) - g) < 1e-10);
    }
    SECTION("matches the dephasing decomposition") {
        Matrix dephased = Matrix::Zero(m.dim, m.dim);
        for (const auto& grp : m.omega_groups) {
            Matrix p = Matrix::Zero(m.dim, m.dim);
            for (const Index i : grp) {
                const Index j = i / m.dim_s, s = i % m.dim_s;
                p += projector_onto(
                    tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s))));
            }
            dephased += p * a * p;
        }
        REQUIRE(max_abs(g - dephased) < 1e-10);
    }
    SECTION("off-lattice spectrum is rejected") {
        ClockSpec s;
        s.energies = {0.0, 1.0};
        s.t_max = 2.0 * M_PI;
        Matrix h_s = Matrix::Zero(2, 2);
        h_s(0, 0) = -1.0;
        h_s(1, 1) = std::sqrt(2.0);
        const ConstraintModel off = build_model(build_clock(s), h_s);
        REQUIRE_THROWS_AS(group_average(off, Matrix::Identity(4, 4)), std::invalid_argument);
    }
}

TEST_CASE("physical inner product", "[constraint][unit]") {
    const ConstraintModel m = m1_model();
    std::mt19937_64 rng(11);

    SECTION("representative independence") {
        const Vector psi = random_state(m.dim, rng);
        const Vector phi = random_state(m.dim, rng);
        const Vector junk = random_state(m.dim, rng);
        const Matrix q = Matrix::Identity(m.dim, m.dim) - m.p_phys;
        const Complex base = physical_inner(m, phi, psi);
        REQUIRE(std::abs(physical_inner(m, phi, Vector(psi + q * junk)) - base) < 1e-12);
        REQUIRE(std::abs(physical_inner(m, Vector(phi + q * junk), psi) - base) < 1e-12);
    }
    SECTION("random physical states are normalized kernel elements") {
        const Vector psi = random_physical_state(m, rng);
        REQUIRE(psi.norm() == Catch::Approx(1.0));
        REQUIRE((constraint_operator(m) * psi).norm() < 1e-10);
        REQUIRE(validate_physical(m, psi) < 1e-10);
    }
    SECTION("validation rejects kinematical directions") {
        const Vector bad = tensor(unit_vector(4, 0), unit_vector(2, 0));
        REQUIRE_THROWS_AS(validate_physical(m, bad), std::invalid_argument);
    }
}

TEST_CASE("system projector identity", "[constraint][unit]") {
    REQUIRE(system_projector_identity_defect(m1_model()) < 1e-12);
    REQUIRE(system_projector_identity_defect(m2_model()) < 1e-12);
    REQUIRE(max_abs(system_projector(m2_model()) - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("trivialization matrix", "[constraint][unit]") {
    const ConstraintModel m = m1_model();
    const double eps_star = default_eps_star(m);
    REQUIRE(eps_star == Catch::Approx(1.0));
    const Matrix t = trivialization_matrix(m, eps_star);

    SECTION("ladder shifts on basis states") {
        // E = -1 sector shifts by zero, E = -2 sector shifts down one clock level
        const Vector stay = tensor(unit_vector(4, 1), unit_vector(2, 0));
        REQUIRE((t * stay - stay).norm() < 1e-12);
        const Vector from = tensor(unit_vector(4, 2), unit_vector(2, 1));
        const Vector to = tensor(unit_vector(4, 1), unit_vector(2, 1));
        REQUIRE((t * from - to).norm() < 1e-12);
        const Vector killed = tensor(unit_vector(4, 0), unit_vector(2, 1));
        REQUIRE((t * killed).norm() < 1e-12);
    }
    SECTION("conjugation strips the system part of the constraint") {
        const Matrix c_op = constraint_operator(m);
        const Matrix reduced =
            tensor(Matrix(m.clock.h_c - eps_star * Matrix::Identity(4, 4)), Matrix::Identity(2, 2));
        for (Index j = 0; j < m.dim_c; ++j)
            for (Index s = 0; s < m.dim_s; ++s) {
                const Vector x = t * tensor(unit_vector(4, j), Vector(m.sys.eigenvectors.col(s)));
                if (x.norm() < 0.5) continue; // shifted off the grid
                REQUIRE((t * c_op * t.adjoint() * x - reduced * x).norm() < 1e-12);
            }
    }
    SECTION("matches the time-integral definition") {
        // mu * integral dt |t><t| (x) e^{i t (H_S + eps*)} by exact trigonometric quadrature
        const Index n = 32;
        Matrix quad = Matrix::Zero(m.dim, m.dim);
        for (Index k = 0; k < n; ++k) {
            const double tk = m.clock.period() * static_cast<double>(k) / static_cast<double>(n);
            const Vector ct = clock_state(m.clock, tk);
            quad += tensor(Matrix(ct * ct.adjoint()), evolve(m.h_s, -tk)) *
                    std::exp(iu * eps_star * tk);
        }
        quad *= m.clock.mu * m.clock.period() / static_cast<double>(n);
        REQUIRE(max_abs(quad - t) < 1e-12);
    }
}
