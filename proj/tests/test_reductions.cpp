// test_reductions.cpp -- reduction maps, trivialization, encodings, verification report

#include <catch2/catch_amalgamated.hpp>

#include "trinity/reductions.hpp"

#include <cmath>
#include <random>

using namespace trinity;

namespace {

ConstraintModel m1_model() {
    ClockSpec spec;
    spec.regime = ClockRegime::Compact;
    spec.energies = {0.0, 1.0, 2.0, 3.0};
    spec.t_max = 2.0 * M_PI;
    Matrix h_s = Matrix::Zero(2, 2);
    h_s(0, 0) = -1.0;
    h_s(1, 1) = -2.0;
    return build_model(build_clock(spec), h_s);
}

ConstraintModel m2_model() {
    ClockSpec spec;
    spec.regime = ClockRegime::Compact;
    spec.energies = {-2.0, -1.0, 0.0, 1.0, 2.0};
    spec.t_max = 2.0 * M_PI;
    Matrix h_s = Matrix::Zero(2, 2);
    h_s(0, 1) = 1.0;
    h_s(1, 0) = 1.0;
    return build_model(build_clock(spec), h_s);
}

// three-level system where only two levels find a clock partner
ConstraintModel partial_model() {
    ClockSpec spec;
    spec.regime = ClockRegime::Compact;
    spec.energies = {0.0, 1.0, 2.0, 3.0};
    spec.t_max = 2.0 * M_PI;
    Matrix h_s = Matrix::Zero(3, 3);
    h_s(0, 0) = -1.0;
    h_s(1, 1) = -2.0;
    h_s(2, 2) = 0.5;
    return build_model(build_clock(spec), h_s);
}

// canonical two-branch state: system starts in the first computational level
Vector m2_canonical_state(const ConstraintModel& m) {
    Vector psi = Vector::Zero(m.dim);
    for (const auto& [j, s] : m.matched_pairs)
        psi += std::conj(m.sys.eigenvectors(0, s)) *
               tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s)));
    psi.normalize();
    return psi;
}

Index clock_level(const ConstraintModel& m, double e) {
    const Index j = find_clock_level(m.clock, e);
    REQUIRE(j >= 0);
    return j;
}

Index system_level(const ConstraintModel& m, double e) {
    for (Index s = 0; s < m.dim_s; ++s)
        if (std::abs(m.sys.eigenvalues(s) - e) < 1e-9) return s;
    FAIL("system level not found");
    return -1;
}

} // namespace

TEST_CASE("conditional reduction", "[reductions][unit]") {
    const ConstraintModel m = m1_model();

    SECTION("single matched level picks up the clock phase") {
        const Index j = clock_level(m, 1.0);
        const Index s = system_level(m, -1.0);
        const Vector psi = tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s)));
        for (const double tau : {0.0, 0.7, 2.0 * M_PI - 0.1}) {
            const ReducedState red = pw_reduce(m, tau, psi);
            CHECK(red.picture == Picture::Schrodinger);
            const Vector expected = std::exp(iu * tau) * Vector(m.sys.eigenvectors.col(s));
            CHECK((red.vec - expected).norm() < 1e-12);
        }
    }

    SECTION("reduction preserves the physical norm at every reading") {
        std::mt19937_64 rng(7);
        const Vector psi = random_physical_state(m, rng);
        const double w2 = m.clock.weight * m.clock.weight;
        const double phys = physical_inner(m, psi, psi).real();
        for (const double tau : default_tau_grid(m))
            CHECK(std::abs(pw_reduce(m, tau, psi).vec.squaredNorm() / w2 - phys) < 1e-12);
    }

    SECTION("canonical two-branch state conditions to the first level") {
        const ConstraintModel m2 = m2_model();
        const Vector psi = m2_canonical_state(m2);
        const Vector at0 = pw_reduce(m2, 0.0, psi).vec;
        const Vector target = unit_vector(m2.dim_s, 0) * at0.norm();
        CHECK((at0 - target).norm() < 1e-12);
    }

    SECTION("non-physical input is rejected") {
        Vector bad = Vector::Zero(m.dim);
        bad(0) = 1.0; // clock level 0 has no system partner
        CHECK_THROWS_AS(pw_reduce(m, 0.0, bad), std::invalid_argument);
    }
}

TEST_CASE("conditional insertion and round trips", "[reductions][unit]") {
    const ConstraintModel m = m1_model();

    SECTION("insertion at the conditioning reading undoes the reduction") {
        std::mt19937_64 rng(11);
        const Vector psi = random_physical_state(m, rng);
        for (const double tau : {0.0, 1.3, 4.9})
            CHECK((pw_inverse(m, tau, pw_reduce(m, tau, psi).vec) - psi).norm() < 1e-12);
    }

    SECTION("reduction of an inserted system vector projects it") {
        const ConstraintModel p = partial_model();
        const Vector matched = p.sys.eigenvectors.col(system_level(p, -2.0));
        const Vector round = pw_reduce(p, 0.8, pw_inverse(p, 0.8, matched)).vec;
        CHECK((round - matched).norm() < 1e-12);

        const Vector unmatched = p.sys.eigenvectors.col(system_level(p, 0.5));
        CHECK(pw_inverse(p, 0.8, unmatched).norm() < 1e-14);
    }

    SECTION("insertion places the partner clock level explicitly") {
        const Index s = system_level(m, -1.0);
        const Vector phi = m.sys.eigenvectors.col(s);
        const Vector expected =
            tensor(unit_vector(m.dim_c, clock_level(m, 1.0)), Vector(phi));
        CHECK((pw_inverse(m, 0.0, phi) - expected).norm() < 1e-12);
    }
}

TEST_CASE("conditional inner product is reading independent", "[reductions][unit]") {
    for (const ConstraintModel& m : {m1_model(), m2_model()}) {
        std::mt19937_64 rng(23);
        const Vector psi = random_physical_state(m, rng);
        const Vector phi = random_physical_state(m, rng);
        const Complex phys = physical_inner(m, phi, psi);
        for (const double tau : default_tau_grid(m))
            CHECK(std::abs(pw_inner(m, tau, phi, psi) - phys) < 1e-10);
    }
}

TEST_CASE("trivialization", "[reductions][unit]") {
    const ConstraintModel m = m1_model();

    SECTION("reference energy must sit in the clock spectrum") {
        CHECK_THROWS_AS(trivialize(m, 0.4), std::invalid_argument);
        CHECK(trivialize(m).eps_star == Catch::Approx(1.0));
    }

    SECTION("left inverse and constraint conjugation") {
        for (const ConstraintModel& mm : {m1_model(), m2_model()}) {
            const TrivializationContext ctx = trivialize(mm);
            CHECK(trivialization_left_inverse_defect(mm, ctx) < 1e-10);
            CHECK(trivialization_conjugation_defect(mm, ctx) < 1e-9);
        }
    }

    SECTION("entangled physical states factorize") {
        std::mt19937_64 rng(31);
        for (const ConstraintModel& mm : {m1_model(), m2_model()}) {
            const TrivializationContext ctx = trivialize(mm);
            const Vector psi = random_physical_state(mm, rng);
            const RealVector before = schmidt_coefficients(psi, mm.dim_c, mm.dim_s);
            CHECK(before(1) > 0.05); // genuinely entangled across clock|system
            CHECK(trivialized_schmidt_ratio(mm, ctx, psi) < 1e-9);
        }
    }
}

TEST_CASE("symmetry reduction", "[reductions][unit]") {
    const ConstraintModel m = m1_model();
    const TrivializationContext ctx = trivialize(m);
    std::mt19937_64 rng(43);
    const Vector psi = random_physical_state(m, rng);

    SECTION("amplitudes transfer branch by branch") {
        Vector expected = Vector::Zero(m.dim_s);
        for (const auto& [j, s] : m.matched_pairs) {
            const Complex c =
                tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s))).dot(psi);
            expected += m.clock.weight * std::conj(m.clock.phase_factors(j)) * c *
                        Vector(m.sys.eigenvectors.col(s));
        }
        CHECK((sym_reduce(m, ctx, psi).vec - expected).norm() < 1e-12);
    }

    SECTION("result does not depend on the reading used") {
        const Vector ref = sym_reduce_at(m, ctx, psi, 0.0);
        for (const double tau : default_tau_grid(m))
            CHECK((sym_reduce_at(m, ctx, psi, tau) - ref).norm() < 1e-12);
    }

    SECTION("equals the de-evolved conditional reduction") {
        for (const double tau : {0.4, 2.2, 5.5}) {
            const Vector via_cond =
                Matrix(u_system(m, tau).adjoint()) * pw_reduce(m, tau, psi).vec;
            CHECK((sym_reduce_at(m, ctx, psi, tau) - via_cond).norm() < 1e-12);
        }
    }

    SECTION("round trips in both directions") {
        CHECK((sym_inverse(m, ctx, sym_reduce(m, ctx, psi).vec) - psi).norm() < 1e-12);
        const Vector chi = (unit_vector(m.dim_s, 0) + 2.0 * unit_vector(m.dim_s, 1)).normalized();
        const Vector proj_chi = m.pi_sigma * chi;
        CHECK((sym_reduce(m, ctx, sym_inverse(m, ctx, chi)).vec - proj_chi).norm() < 1e-12);
    }

    SECTION("insertion places the reference clock level") {
        const Index s = system_level(m, -1.0);
        const Vector phi = m.sys.eigenvectors.col(s);
        const Vector expected =
            tensor(unit_vector(m.dim_c, clock_level(m, 1.0)), Vector(phi));
        CHECK((sym_inverse(m, ctx, phi) - expected).norm() < 1e-12);
    }
}

TEST_CASE("observable encodings", "[reductions][unit]") {
    const ConstraintModel m = m2_model();
    const TrivializationContext ctx = trivialize(m);
    Matrix sz = Matrix::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;

    SECTION("conditioned encoding is weakly the dressed observable") {
        for (const double tau : {0.0, 0.3, 2.9}) {
            const Matrix dressed = relational_observable(m, sz, tau).matrix;
            CHECK(weak_defect(m, encode_S(m, sz, tau), dressed) < 1e-9);
            CHECK(weak_defect(m, encode_H(m, ctx, heisenberg_op(m, sz, tau)), dressed) < 1e-9);
        }
    }

    SECTION("reducing the dressed observable returns the projected original") {
        for (const double tau : {0.0, 1.1}) {
            const Matrix dressed = relational_observable(m, sz, tau).matrix;
            CHECK(max_abs(reduce_observable_S(m, dressed, tau) - m.pi_sigma * sz * m.pi_sigma) <
                  1e-9);
        }
    }

    SECTION("identity encodes to the kernel projector block") {
        const Matrix enc = encode_S(m, Matrix::Identity(2, 2), 0.6);
        CHECK(max_abs(enc - m.p_phys * enc * m.p_phys) < 1e-12);
        std::mt19937_64 rng(3);
        const Vector psi = random_physical_state(m, rng);
        CHECK(std::abs((psi.adjoint() * enc * psi)(0).real() - 1.0) < 1e-10);
    }

    SECTION("operators leaking out of the matched block are rejected") {
        const ConstraintModel p = partial_model();
        const TrivializationContext pctx = trivialize(p);
        Matrix leak = Matrix::Zero(3, 3);
        leak(0, 2) = 1.0;
        leak(2, 0) = 1.0;
        CHECK_THROWS_AS(encode_S(p, leak, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(encode_H(p, pctx, leak), std::invalid_argument);
    }
}

TEST_CASE("conditional evolution residual scalings", "[reductions][unit]") {
    const ConstraintModel m = m1_model();
    std::mt19937_64 rng(5);
    const Vector psi = random_physical_state(m, rng);
    const double tau0 = 1.9;

    SECTION("central difference converges at second order") {
        std::vector<double> deltas{1e-2, 1e-3, 1e-4}, res;
        for (const double d : deltas) res.push_back(schrodinger_residual(m, psi, tau0, d));
        CHECK(res[0] > 1e-8); // discretization error, not roundoff
        const double slope = loglog_slope(deltas, res);
        CHECK(slope == Catch::Approx(2.0).margin(0.1));
    }

    SECTION("extrapolated stencil converges at fourth order") {
        std::vector<double> deltas{0.3, 0.1, 0.03}, res;
        for (const double d : deltas)
            res.push_back(schrodinger_residual_richardson(m, psi, tau0, d));
        const double slope = loglog_slope(deltas, res);
        CHECK(slope == Catch::Approx(4.0).margin(0.2));
    }
}

TEST_CASE("full verification report", "[reductions][integration]") {
    Matrix sx = Matrix::Zero(2, 2), sz = Matrix::Zero(2, 2);
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;

    SECTION("diagonal-clock model passes every row") {
        const ConstraintModel m = m1_model();
        const Report rep =
            verify_trinity(m, {{"identity", Matrix::Identity(2, 2)}, {"sz", sz}},
                           default_tau_grid(m));
        CAPTURE(rep.failures());
        CHECK(rep.all_pass());
        CHECK(rep.rows.size() == 25);
        for (const CheckRow& row : rep.rows) {
            CHECK(!row.name.empty());
            CHECK(!row.anchor.empty());
            CHECK(row.tolerance > 0.0);
        }
    }

    SECTION("two-branch model passes with non-commuting observables") {
        const ConstraintModel m = m2_model();
        const Report rep = verify_trinity(m, {{"sx", sx}, {"sz", sz}}, default_tau_grid(m));
        CAPTURE(rep.failures());
        CHECK(rep.all_pass());
    }

    SECTION("empty observable set yields an empty report") {
        const ConstraintModel m = m1_model();
        CHECK(verify_trinity(m, {}, default_tau_grid(m)).rows.empty());
    }

    SECTION("report serializes to csv") {
        const ConstraintModel m = m1_model();
        const Report rep = verify_trinity(m, {{"sz", sz}}, default_tau_grid(m));
        const std::string csv = report_to_csv(rep);
        CHECK(csv.rfind("name,anchor,defect,tolerance,pass,note\n", 0) == 0);
        CHECK(csv.find("Thm 5 / Eq. encodeQR") != std::string::npos);
    }
}
