#include "ddspin/sequence.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ddspin;
using std::numbers::pi;

namespace {

constexpr double us = 1e-6;

double event_sum(const PulseSequence& seq) {
    double s = 0.0;
    for (const auto& e : seq.events()) s += e.duration;
    return s;
}

std::vector<double> widths(const PulseSequence& seq) {
    std::vector<double> out;
    for (const auto& e : seq.events()) {
        if (e.is_pulse()) out.push_back(e.duration);
    }
    return out;
}

void check_flips(const PulseSequence& seq, double flip) {
    for (const auto& e : seq.events()) {
        if (!e.is_pulse()) continue;
        CHECK(e.flip == flip);
        if (e.duration > 0.0) CHECK(2 * pi * e.amplitude * e.duration == doctest::Approx(flip).epsilon(1e-14));
    }
}

}  // namespace

TEST_CASE("events") {
    CHECK_THROWS_AS(SequenceEvent::delay(-1e-9), NegativeDelay);
    CHECK_THROWS(SequenceEvent::pulse(-1.0, pi, 0.0));
    CHECK_THROWS(SequenceEvent::pulse(1e-6, 0.0, 0.0));
    const auto p = SequenceEvent::pulse(4.3 * us, pi, 0.0);
    CHECK(p.amplitude == doctest::Approx(1.0 / (2 * 4.3 * us)));
    CHECK(std::isinf(SequenceEvent::pulse(0.0, pi, 0.0).amplitude));
}

TEST_CASE("CPMG timing") {
    const DDScheme s{SchemeName::cpmg, 7, 2 * us, {}, 4.3 * us, 1};
    const auto seq = gen_cpmg(s);
    CHECK(seq.total_duration() == doctest::Approx(58.1 * us).epsilon(1e-15));
    CHECK(seq.pulse_count() == 7);
    CHECK(seq.size() == 21);
    check_flips(seq, pi);

    const auto one = gen_cpmg(DDScheme{SchemeName::cpmg, 1, 2 * us, {}, 4.3 * us, 1});
    REQUIRE(one.size() == 3);
    CHECK_FALSE(one.events()[0].is_pulse());
    CHECK(one.events()[1].is_pulse());
    CHECK(one.events()[1].phase == 0.0);
    CHECK(one.total_duration() == doctest::Approx(8.3 * us));

    const auto alt = gen_cpmg(DDScheme{SchemeName::cpmg_p, 4, 2 * us, {}, 4.3 * us, 1});
    std::vector<double> phases;
    for (const auto& e : alt.events()) {
        if (e.is_pulse()) phases.push_back(e.phase);
    }
    REQUIRE(phases.size() == 4);
    CHECK(phases[0] == 0.0);
    CHECK(phases[1] == doctest::Approx(pi));
    CHECK(phases[2] == 0.0);
    CHECK(phases[3] == doctest::Approx(pi));

    // tau and T parameterizations agree.
    const auto by_t = gen_cpmg(DDScheme{SchemeName::cpmg, 7, {}, 58.1 * us, 4.3 * us, 1});
    REQUIRE(by_t.size() == seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(by_t.events()[i].duration == doctest::Approx(seq.events()[i].duration).epsilon(1e-12));
    }
    CHECK_THROWS(gen_cpmg(DDScheme{SchemeName::udd, 7, {}, 58.1 * us, 4.3 * us, 1}));
    CHECK_THROWS_AS(gen_cpmg(DDScheme{SchemeName::cpmg, 7, {}, 20 * us, 4.3 * us, 1}), NegativeDelay);
}

TEST_CASE("UDD instants") {
    const auto one = udd_instants(1, 10.0);
    CHECK(one[0] == doctest::Approx(5.0));
    const auto two = udd_instants(2, 8.0);
    CHECK(two[0] == doctest::Approx(2.0));
    CHECK(two[1] == doctest::Approx(6.0));
    const double t = 58.1 * us;
    const auto seven = udd_instants(7, t);
    const auto ref = oracle::udd_instants(7, t);
    for (int j = 0; j < 7; ++j) {
        CHECK(seven[j] == doctest::Approx(ref[j]).epsilon(1e-15));
        CHECK(seven[j] + seven[6 - j] == doctest::Approx(t).epsilon(1e-15));
        if (j > 0) CHECK(seven[j] > seven[j - 1]);
    }
    CHECK_THROWS(udd_instants(0, t));
    CHECK_THROWS(udd_instants(3, 0.0));
}

TEST_CASE("UDD sequence") {
    const double t = 58.1 * us, tau_pi = 4.3 * us;
    const DDScheme s{SchemeName::udd, 7, {}, t, tau_pi, 1};
    const auto seq = gen_udd(s);
    CHECK(seq.pulse_count() == 7);
    CHECK(event_sum(seq) == doctest::Approx(t).epsilon(1e-15));
    const auto centers = seq.pulse_centers();
    const auto ref = oracle::udd_instants(7, t);
    for (int j = 0; j < 7; ++j) CHECK(std::abs(centers[j] - ref[j]) < 1e-12 * t);
    for (const auto& e : seq.events()) CHECK(e.duration >= 0.0);
    check_flips(seq, pi);

    // Delta-pulse limit: gaps are differences of instants.
    const auto ideal = gen_udd(DDScheme{SchemeName::udd, 5, {}, t, 0.0, 1});
    const auto inst = oracle::udd_instants(5, t);
    std::vector<double> gaps;
    for (const auto& e : ideal.events()) {
        if (!e.is_pulse()) gaps.push_back(e.duration);
    }
    REQUIRE(gaps.size() == 6);
    CHECK(gaps[0] == doctest::Approx(inst[0]));
    for (int j = 1; j < 5; ++j) CHECK(gaps[j] == doctest::Approx(inst[j] - inst[j - 1]));
    CHECK(gaps[5] == doctest::Approx(t - inst[4]));

    const double t8 = 8 * (2 * 2 * us + tau_pi);
    try {
        gen_udd(DDScheme{SchemeName::udd, 8, {}, t8, tau_pi, 1});
        FAIL("expected NegativeDelay");
    } catch (const NegativeDelay& e) {
        CHECK(e.value() < 0.0);
        CHECK(e.index() >= 1);
    }
    CHECK_THROWS_AS(gen_udd(DDScheme{SchemeName::udd, 8, {}, 58.1 * us, tau_pi, 1}), DomainError);

    // Phase alternation changes phases only.
    const auto alt = gen_udd(DDScheme{SchemeName::udd_p, 7, {}, t, tau_pi, 1});
    REQUIRE(alt.size() == seq.size());
    int pulse = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(alt.events()[i].duration == seq.events()[i].duration);
        if (alt.events()[i].is_pulse()) {
            CHECK(alt.events()[i].phase == doctest::Approx(pulse % 2 ? pi : 0.0));
            ++pulse;
        }
    }
}

TEST_CASE("RUDD theta and widths") {
    const double t = 58.1 * us, tau_pi = 4.3 * us;
    const double theta = rudd_theta(7, t, tau_pi);
    CHECK(std::sin(theta) == doctest::Approx(4.3 / (58.1 * std::sin(pi / 8))).epsilon(1e-12));
    CHECK(std::sin(theta) == doctest::Approx(0.1934).epsilon(1e-3));
    CHECK(rudd_theta(7, t, t * std::sin(pi / 8)) == doctest::Approx(pi / 2));
    CHECK_THROWS_AS(rudd_theta(7, t, 1.01 * t * std::sin(pi / 8)), Unrealizable);

    const auto w = rudd_widths(7, t, tau_pi);
    const auto ref = oracle::rudd_widths(7, t, tau_pi);
    REQUIRE(w.size() == 7);
    CHECK(w[0] == tau_pi);
    CHECK(w[6] == tau_pi);
    CHECK(w[3] == doctest::Approx(11.24 * us).epsilon(1e-3));
    for (int j = 0; j < 7; ++j) {
        CHECK(w[j] == doctest::Approx(ref[j]).epsilon(1e-14));
        CHECK(w[j] == doctest::Approx(w[6 - j]).epsilon(1e-14));
    }
}

TEST_CASE("RUDD sequence") {
    const double t = 58.1 * us, tau_pi = 4.3 * us;
    const auto seq = gen_rudd(DDScheme{SchemeName::rudd, 7, {}, t, tau_pi, 1});
    CHECK(seq.size() == 15);
    CHECK(event_sum(seq) == doctest::Approx(t).epsilon(1e-15));
    check_flips(seq, pi);
    const auto centers = seq.pulse_centers();
    const auto inst = oracle::udd_instants(7, t);
    for (int j = 0; j < 7; ++j) CHECK(std::abs(centers[j] - inst[j]) < 1e-12 * t);
    // Symmetric about T/2.
    const auto& ev = seq.events();
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(ev[i].duration == doctest::Approx(ev[ev.size() - 1 - i].duration).epsilon(1e-12));
    }
    const auto pw = widths(seq);
    const auto ref = oracle::rudd_widths(7, t, tau_pi);
    for (int j = 0; j < 7; ++j) CHECK(pw[j] == doctest::Approx(ref[j]).epsilon(1e-14));

    CHECK_THROWS(gen_rudd(DDScheme{SchemeName::rudd, 7, {}, t, 0.0, 1}));
    CHECK_THROWS_AS(gen_rudd(DDScheme{SchemeName::rudd, 7, {}, 20 * us, tau_pi, 1}), DomainError);
}

TEST_CASE("cycled blocks") {
    const DDScheme s{SchemeName::udd, 3, {}, 30 * us, 2 * us, 4};
    const auto block = gen_dd_block(s);
    const auto full = gen_dd(s);
    CHECK(full.size() == 4 * block.size());
    CHECK(full.total_duration() == doctest::Approx(4 * block.total_duration()).epsilon(1e-15));
    CHECK(full.pulse_count() == 12);

    DDScheme none;
    none.total = 10 * us;
    const auto idle = gen_dd_block(none);
    REQUIRE(idle.size() == 1);
    CHECK(idle.total_duration() == 10 * us);
    CHECK(idle.pulse_count() == 0);
}

TEST_CASE("scheme names") {
    CHECK(parse_scheme_name("cpmg") == SchemeName::cpmg);
    CHECK(parse_scheme_name("RUDDp") == SchemeName::rudd_p);
    CHECK(parse_scheme_name(scheme_label(SchemeName::udd_p)) == SchemeName::udd_p);
    CHECK(is_phase_alternating(SchemeName::cpmg_p));
    CHECK_FALSE(is_phase_alternating(SchemeName::rudd));
    CHECK_THROWS(parse_scheme_name("xy4"));
    CHECK_THROWS(DDScheme{SchemeName::cpmg, 0, 2 * us, {}, 4.3 * us, 1}.validate());
    CHECK_THROWS(DDScheme{SchemeName::cpmg, 2, {}, {}, 4.3 * us, 1}.validate());
    CHECK_THROWS(DDScheme{SchemeName::cpmg, 2, 2 * us, {}, 4.3 * us, 0}.validate());
    CHECK_THROWS(DDScheme{SchemeName::cpmg, 2, 2 * us, {}, -1.0, 1}.validate());
}

TEST_CASE("two-quantum cycle layout") {
    const double delta = 2 * us, tp = 2.15 * us;
    const auto one = gen_mqc_cycle(delta, tp, 0.0, 1);
    CHECK(one.pulse_count() == 8);
    CHECK(one.total_duration() == doctest::Approx(12 * delta + 12 * tp));
    check_flips(one, pi / 2);
    const auto two = gen_mqc_cycle(delta, tp, 0.0, 2);
    CHECK(two.total_duration() == doctest::Approx(2 * one.total_duration()).epsilon(1e-15));

    // alpha shifts every phase and nothing else.
    const auto shifted = gen_mqc_cycle(delta, tp, 0.3, 1);
    REQUIRE(shifted.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(shifted.events()[i].duration == one.events()[i].duration);
        if (one.events()[i].is_pulse()) {
            const double d = std::remainder(shifted.events()[i].phase - one.events()[i].phase - 0.3, 2 * pi);
            CHECK(std::abs(d) < 1e-12);
        }
    }
    CHECK_THROWS(gen_mqc_cycle(-1e-6, tp, 0.0, 1));
    CHECK_THROWS(gen_mqc_cycle(delta, tp, 0.0, 0));
}

TEST_CASE("as_ideal and dump") {
    const auto seq = gen_cpmg(DDScheme{SchemeName::cpmg, 1, 2 * us, {}, 4.3 * us, 1});
    const auto ideal = as_ideal(seq);
    CHECK(ideal.total_duration() == doctest::Approx(seq.total_duration()).epsilon(1e-15));
    CHECK(ideal.pulse_centers()[0] == doctest::Approx(seq.pulse_centers()[0]).epsilon(1e-15));
    for (const auto& e : ideal.events()) {
        if (e.is_pulse()) CHECK(e.duration == 0.0);
    }

    std::ostringstream out;
    dump(seq, out);
    std::istringstream in(out.str());
    std::string kind;
    double d = 0, phase = 0, amp = 0, sum = 0;
    int lines = 0;
    while (in >> kind >> d >> phase >> amp) {
        sum += d;
        ++lines;
        CHECK((kind == "delay" || kind == "pulse"));
    }
    CHECK(lines == 3);
    CHECK(sum == doctest::Approx(8.3 * us));
}
