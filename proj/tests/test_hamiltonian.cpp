#include "ddspin/hamiltonian.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>

using namespace ddspin;
using std::numbers::pi;

namespace {

oracle::Mat dipolar_oracle(const Eigen::MatrixXd& d) {
    const int m = static_cast<int>(d.rows());
    const auto dim = static_cast<Eigen::Index>(1) << m;
    oracle::Mat h = oracle::Mat::Zero(dim, dim);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const oracle::Mat zz = oracle::embed2(oracle::sz(), i, oracle::sz(), j, m);
            const oracle::Mat dot = oracle::embed2(oracle::sx(), i, oracle::sx(), j, m) +
                                    oracle::embed2(oracle::sy(), i, oracle::sy(), j, m) + zz;
            h += d(i, j) * (3.0 * zz - dot);
        }
    }
    return h;
}

}  // namespace

TEST_CASE("zeeman and dipolar against Kronecker construction") {
    const auto sys = SpinSystem::random_couplings(3, 2 * pi * 2e3, 4).with_offsets({10.0, -20.0, 35.0});
    oracle::Mat z = 10.0 * oracle::embed(oracle::sz(), 0, 3) - 20.0 * oracle::embed(oracle::sz(), 1, 3) +
                    35.0 * oracle::embed(oracle::sz(), 2, 3);
    CHECK((zeeman(sys).matrix - z).norm() < 1e-12);
    const oracle::Mat d = dipolar_oracle(sys.couplings());
    CHECK((dipolar(sys).matrix - d).norm() < 1e-12 * d.norm());
    CHECK((internal_hamiltonian(sys).matrix - z - d).norm() < 1e-12 * d.norm());

    CHECK_THROWS(dipolar(SpinSystem::uncoupled(1)));
    CHECK_THROWS(two_quantum_target(SpinSystem::uncoupled(1)));
    CHECK((internal_hamiltonian(SpinSystem::uncoupled(1).with_offsets({3.0})).matrix -
           3.0 * oracle::sz()).norm() < 1e-15);
}

TEST_CASE("zeeman spectrum") {
    CHECK(zeeman(SpinSystem::uncoupled(3)).matrix.norm() == 0.0);
    const Matrix one = zeeman(SpinSystem::uncoupled(1).with_offsets({2 * pi * 100})).matrix;
    CHECK(one(0, 0).real() == doctest::Approx(pi * 100));
    CHECK(one(1, 1).real() == doctest::Approx(-pi * 100));

    const std::vector<double> w{3.0, -7.0, 11.0};
    const Matrix z = zeeman(SpinSystem::uncoupled(3).with_offsets(w)).matrix;
    std::vector<double> expected, got;
    for (int pattern = 0; pattern < 8; ++pattern) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) e += ((pattern >> i) & 1 ? -0.5 : 0.5) * w[i];
        expected.push_back(e);
        got.push_back(z(pattern, pattern).real());
    }
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (int k = 0; k < 8; ++k) CHECK(got[k] == doctest::Approx(expected[k]));
}

TEST_CASE("two-spin dipolar eigenstates") {
    const double d = 2 * pi * 1e3;
    RealMatrix c = RealMatrix::Zero(2, 2);
    c(0, 1) = c(1, 0) = d;
    const SpinSystem sys({0.0, 0.0}, c);
    const Matrix h = dipolar(sys).matrix;
    Eigen::Vector4cd upup(1, 0, 0, 0), downdown(0, 0, 0, 1);
    Eigen::Vector4cd t0(0, 1, 1, 0), singlet(0, 1, -1, 0);
    t0 /= std::sqrt(2.0);
    singlet /= std::sqrt(2.0);
    CHECK((h * upup - 0.5 * d * upup).norm() < 1e-9);
    CHECK((h * downdown - 0.5 * d * downdown).norm() < 1e-9);
    CHECK((h * t0 + d * t0).norm() < 1e-9);
    CHECK((h * singlet).norm() < 1e-9);

    CHECK(dipolar(SpinSystem::uncoupled(3)).matrix.norm() == 0.0);

    const Matrix h1 = two_quantum_target(sys).matrix;
    CHECK(h1(0, 3).real() == doctest::Approx(d / 2));
    CHECK((h1 - h1.adjoint()).norm() == 0.0);
    for (Eigen::Index r = 0; r < 4; ++r) {
        for (Eigen::Index col = 0; col < 4; ++col) {
            if (h1(r, col) != cplx(0.0, 0.0)) {
                CHECK(std::abs(oracle::twice_m(r, 2) - oracle::twice_m(col, 2)) == 4);
            }
        }
    }
}

TEST_CASE("phase shift at a quarter turn") {
    const auto sys = SpinSystem::random_couplings(3, 2 * pi * 1e3, 8);
    const Matrix h = two_quantum_target(sys).matrix;
    const Matrix raise = coherence_block(sys, h, 2);
    const Matrix lower = coherence_block(sys, h, -2);
    const Matrix shifted = phase_shifted(two_quantum_target(sys), sys, pi / 4).matrix;
    CHECK((shifted - cplx(0, -1) * raise - cplx(0, 1) * lower).norm() < 1e-12 * h.norm());
    CHECK((phase_shifted(two_quantum_target(sys), sys, 0.0).matrix - h).norm() == 0.0);
    // Order-zero terms are untouched.
    const Matrix d = dipolar(sys).matrix;
    CHECK((phase_shifted(dipolar(sys), sys, 0.9).matrix - d).norm() < 1e-12 * d.norm());
}

TEST_CASE("CPMG cycle refocuses offsets") {
    const auto sys = SpinSystem::uncoupled(2).with_offsets({2 * pi * 3e3, -2 * pi * 5e3});
    const auto seq = as_ideal(gen_cpmg(DDScheme{SchemeName::cpmg, 2, 2e-6, {}, 4.3e-6, 1}));
    CHECK(average_hamiltonian(seq, sys).matrix.norm() < 1e-9);
}

TEST_CASE("dipolar Hamiltonian conserves total Iz") {
    const auto sys = SpinSystem::random_couplings(4, 2 * pi * 4e3, 1);
    const Matrix iz = total_spin_op(sys, Axis::z).matrix;
    const Matrix d = dipolar(sys).matrix;
    CHECK(commutator(d, iz).norm() < 1e-10 * d.norm());
    CHECK((d - d.adjoint()).norm() == 0.0);
}

TEST_CASE("two-quantum target") {
    const auto sys = SpinSystem::random_couplings(4, 2 * pi * 4e3, 2);
    const Matrix h = two_quantum_target(sys).matrix;
    CHECK((h - oracle::two_quantum(sys.couplings())).norm() < 1e-12 * h.norm());
    const auto spec = coherence_decompose(sys, {h, 1.0});
    CHECK(spec.at(2) + spec.at(-2) == doctest::Approx(spec.total()));

    // alpha = pi/2 flips the sign of the double-quantum terms.
    const Matrix flipped = phase_shifted(two_quantum_target(sys), sys, pi / 2).matrix;
    CHECK((flipped + h).norm() < 1e-12 * h.norm());
    const Matrix same = phase_shifted(two_quantum_target(sys), sys, pi).matrix;
    CHECK((same - h).norm() < 1e-12 * h.norm());
}

TEST_CASE("average Hamiltonian of simple cycles") {
    const auto sys = SpinSystem::random_couplings(2, 2 * pi * 4e3, 3).with_offsets({1e3, -2e3});

    // A bare delay averages to the internal Hamiltonian.
    const PulseSequence bare({SequenceEvent::delay(1e-5)});
    CHECK((average_hamiltonian(bare, sys).matrix - internal_hamiltonian(sys).matrix).norm() < 1e-9);

    // tau - pi_x - 2tau - pi_x - tau refocuses the offsets and keeps the dipolar term.
    PulseSequence echo;
    echo.append(SequenceEvent::delay(1e-5));
    echo.append(SequenceEvent::pulse(0.0, pi, 0.0));
    echo.append(SequenceEvent::delay(2e-5));
    echo.append(SequenceEvent::pulse(0.0, pi, 0.0));
    echo.append(SequenceEvent::delay(1e-5));
    const auto report = magnus0(echo, sys, dipolar(sys));
    CHECK(report.relative_error < 1e-12);

    PulseSequence finite;
    finite.append(SequenceEvent::pulse(1e-6, pi, 0.0));
    CHECK_THROWS(average_hamiltonian(finite, sys));
    CHECK_NOTHROW(average_hamiltonian(as_ideal(finite), sys));
}

TEST_CASE("two-quantum cycle averages to the target") {
    for (int m : {2, 3}) {
        const auto sys = SpinSystem::random_couplings(m, 2 * pi * 4e3, 40 + m);
        const auto plus = magnus0(gen_mqc_cycle(2e-6, 0.0, 0.0, 1), sys, two_quantum_target(sys));
        CHECK(plus.relative_error < 1e-12);
        const Operator minus{-two_quantum_target(sys).matrix, "-H2Q"};
        const auto reversed = magnus0(gen_mqc_cycle(2e-6, 0.0, pi / 2, 1), sys, minus);
        CHECK(reversed.relative_error < 1e-12);
    }
}
