#include "ddspin/spin_core.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace ddspin;
using std::numbers::pi;

TEST_CASE("system validation") {
    CHECK_THROWS_AS(SpinSystem::uncoupled(0), std::invalid_argument);
    CHECK_THROWS_AS(SpinSystem::uncoupled(kMaxSpins + 1), std::invalid_argument);
    RealMatrix asym = RealMatrix::Zero(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(SpinSystem({0.0, 0.0}, asym), std::invalid_argument);
    RealMatrix diag = RealMatrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    CHECK_THROWS_AS(SpinSystem({0.0, 0.0}, diag), std::invalid_argument);
    CHECK_THROWS_AS(SpinSystem({0.0, 0.0, 0.0}, RealMatrix::Zero(2, 2)), std::invalid_argument);

    const auto a = SpinSystem::random_couplings(4, 2 * pi * 1e3, 9);
    const auto b = SpinSystem::random_couplings(4, 2 * pi * 1e3, 9);
    CHECK(a.couplings() == b.couplings());
    CHECK(a.couplings().cwiseAbs().maxCoeff() <= 2 * pi * 1e3);
    CHECK(a.has_couplings());
    CHECK_FALSE(SpinSystem::uncoupled(3).has_couplings());
}

TEST_CASE("single-spin operators match Kronecker embeddings") {
    for (int m : {1, 2, 3}) {
        const auto sys = SpinSystem::uncoupled(m);
        for (int i = 0; i < m; ++i) {
            CHECK((single_spin_op(sys, i, Axis::x).matrix - oracle::embed(oracle::sx(), i, m)).norm() == 0.0);
            CHECK((single_spin_op(sys, i, Axis::y).matrix - oracle::embed(oracle::sy(), i, m)).norm() == 0.0);
            CHECK((single_spin_op(sys, i, Axis::z).matrix - oracle::embed(oracle::sz(), i, m)).norm() == 0.0);
            CHECK((single_spin_op(sys, i, Axis::plus).matrix - oracle::embed(oracle::sp(), i, m)).norm() == 0.0);
            CHECK((single_spin_op(sys, i, Axis::minus).matrix - oracle::embed(oracle::sm(), i, m)).norm() == 0.0);
        }
    }
    CHECK_THROWS_AS(single_spin_op(SpinSystem::uncoupled(2), 2, Axis::z), std::out_of_range);
    CHECK_THROWS_AS(single_spin_op(SpinSystem::uncoupled(2), -1, Axis::z), std::out_of_range);
}

TEST_CASE("spin algebra") {
    const auto sys = SpinSystem::uncoupled(1);
    const Matrix z = single_spin_op(sys, 0, Axis::z).matrix;
    CHECK(z(0, 0).real() == 0.5);
    CHECK(z(1, 1).real() == -0.5);

    const auto three = SpinSystem::uncoupled(3);
    for (int i = 0; i < 3; ++i) {
        const Matrix x = single_spin_op(three, i, Axis::x).matrix;
        const Matrix y = single_spin_op(three, i, Axis::y).matrix;
        const Matrix zi = single_spin_op(three, i, Axis::z).matrix;
        CHECK((commutator(x, y) - cplx(0, 1) * zi).norm() < 1e-15);
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            for (Axis a : {Axis::x, Axis::y, Axis::z, Axis::plus, Axis::minus}) {
                CHECK(commutator(x, single_spin_op(three, j, a).matrix).norm() == 0.0);
            }
        }
    }

    // Raising spin 1 of |down down down> (index 7) gives |down up down> (index 5).
    const Matrix plus = single_spin_op(three, 1, Axis::plus).matrix;
    CHECK(plus(5, 7) == cplx(1.0, 0.0));
    CHECK(plus.col(7).norm() == doctest::Approx(1.0));
}

TEST_CASE("thermal state") {
    const auto one = thermal_state(SpinSystem::uncoupled(1));
    CHECK(one.rho(0, 0).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(one.rho(1, 1).real() == doctest::Approx(-1 / std::sqrt(2.0)));

    const auto sys = SpinSystem::uncoupled(2);
    const auto two = thermal_state(sys);
    CHECK(two.rho.norm() == doctest::Approx(1.0));
    CHECK(std::abs(two.rho.trace()) < 1e-15);
    const oracle::Mat ref = oracle::total(oracle::sz(), 2);
    CHECK((two.rho - ref / ref.norm()).norm() < 1e-15);
    CHECK(two.scale == doctest::Approx(ref.norm()));

    const auto spec = coherence_decompose(sys, two);
    CHECK(spec.at(0) == doctest::Approx(1.0));
    CHECK(spec.at(1) == 0.0);
    CHECK(spec.at(-2) == 0.0);
}

TEST_CASE("coherence orders") {
    const auto sys = SpinSystem::uncoupled(2);
    const Matrix ix = single_spin_op(sys, 0, Axis::x).matrix;
    const auto spec = coherence_decompose(sys, {ix, 1.0});
    CHECK(spec.at(1) == doctest::Approx(spec.at(-1)));
    CHECK(spec.at(1) + spec.at(-1) == doctest::Approx(ix.squaredNorm()));
    CHECK(spec.at(0) == 0.0);

    const Matrix pp = single_spin_op(sys, 0, Axis::plus).matrix * single_spin_op(sys, 1, Axis::plus).matrix;
    const auto two = coherence_decompose(sys, {pp, 1.0});
    CHECK(two.at(2) == doctest::Approx(pp.squaredNorm()));
    CHECK(two.total() == doctest::Approx(two.at(2)));

    // Orthogonal decomposition of a generic operator, each block pure in order.
    const auto four = SpinSystem::uncoupled(4);
    Matrix rho = Matrix::Random(16, 16);
    rho = (rho + rho.adjoint()).eval();
    const auto full = coherence_decompose(four, {rho, 1.0});
    CHECK(full.total() == doctest::Approx(rho.squaredNorm()));
    for (int n = -4; n <= 4; ++n) {
        const Matrix block = coherence_block(four, rho, n);
        const auto pure = coherence_decompose(four, {block, 1.0});
        CHECK(pure.at(n) == doctest::Approx(block.squaredNorm()));
        // z-rotation picks up exp(-i n phi)
        const Matrix rotated = conjugate_by_z_rotation(four, block, 0.3);
        CHECK((rotated - std::exp(cplx(0, -n * 0.3)) * block).norm() < 1e-13);
        // independent order rule: twice_m difference over 2
        for (Eigen::Index r = 0; r < 16; ++r) {
            for (Eigen::Index c = 0; c < 16; ++c) {
                if (std::abs(block(r, c)) > 0) {
                    CHECK((oracle::twice_m(r, 4) - oracle::twice_m(c, 4)) / 2 == n);
                }
            }
        }
    }
    CHECK_THROWS(coherence_decompose(four, {Matrix::Zero(8, 8), 1.0}));

    CoherenceSpectrum s(2);
    CHECK_THROWS(s.set(3, 1.0));
    CHECK_THROWS(s.set(1, -1.0));
    s.set(2, 1e-3);
    s.set(0, 1.0);
    CHECK(s.max_occupied_order(1e-4) == 2);
    CHECK(s.max_occupied_order(1e-2) == 0);
}

TEST_CASE("collective rotations") {
    const auto sys = SpinSystem::uncoupled(3);
    const Matrix iz = total_spin_op(sys, Axis::z).matrix;
    const Matrix ix = total_spin_op(sys, Axis::x).matrix;

    // Against the matrix exponential of the generator.
    const Matrix ref = (cplx(0, -0.7) * (std::cos(0.4) * ix + std::sin(0.4) * total_spin_op(sys, Axis::y).matrix)).exp();
    CHECK((collective_rotation(sys, Axis::x, 0.7, 0.4).matrix - ref).norm() < 1e-13);

    const Matrix full_turn = collective_rotation(sys, Axis::x, 2 * pi, 0.0).matrix;
    const cplx g = full_turn(0, 0);
    CHECK(std::abs(std::abs(g) - 1.0) < 1e-14);
    CHECK((full_turn - g * Matrix::Identity(8, 8)).norm() < 1e-13);

    const Matrix pi_x = collective_rotation(sys, Axis::x, pi, 0.0).matrix;
    CHECK((pi_x * iz * pi_x.adjoint() + iz).norm() < 1e-13);

    const Matrix y90 = collective_rotation(sys, Axis::y, pi / 2, 0.0).matrix;
    CHECK((y90 * iz * y90.adjoint() - ix).norm() < 1e-13);
    const Matrix x_phase90 = collective_rotation(sys, Axis::x, pi / 2, pi / 2).matrix;
    CHECK((x_phase90 - y90).norm() < 1e-14);

    const Matrix u = collective_rotation(sys, Axis::x, 1.1, 2.3).matrix;
    CHECK((u.adjoint() * u - Matrix::Identity(8, 8)).norm() / std::sqrt(8.0) < 1e-10);
}

TEST_CASE("normalized overlap") {
    const auto sys = SpinSystem::uncoupled(2);
    const Matrix iz = total_spin_op(sys, Axis::z).matrix;
    CHECK(normalized_overlap(iz, 3.0 * iz) == doctest::Approx(1.0));
    CHECK(normalized_overlap(iz, -iz) == doctest::Approx(-1.0));
    CHECK(std::abs(normalized_overlap(iz, total_spin_op(sys, Axis::x).matrix)) < 1e-15);
}
