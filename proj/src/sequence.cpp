#include "ddspin/sequence.hpp"

#include "ddspin/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace ddspin {

using std::numbers::pi;

NegativeDelay::NegativeDelay(int index, double value)
    : DomainError("negative delay tau_" + std::to_string(index) + " = " + format_number(value) +
                  " s; configuration is unrealizable"),
      index_(index),
      value_(value) {}

SequenceEvent SequenceEvent::delay(double duration) {
    if (!(duration >= 0.0)) throw NegativeDelay(0, duration);
    return {EventKind::delay, duration, 0.0, 0.0, 0.0};
}

SequenceEvent SequenceEvent::pulse(double duration, double flip, double phase) {
    if (!(duration >= 0.0)) throw std::invalid_argument("pulse duration must be >= 0");
    if (!(flip > 0.0)) throw std::invalid_argument("pulse flip angle must be > 0");
    const double amplitude = duration > 0.0 ? flip / (2.0 * pi * duration)
                                            : std::numeric_limits<double>::infinity();
    return {EventKind::pulse, duration, phase, amplitude, flip};
}

// ---------------------------------------------------------------------------

PulseSequence::PulseSequence(std::vector<SequenceEvent> events) : events_(std::move(events)) {}

void PulseSequence::append(const SequenceEvent& event) { events_.push_back(event); }

void PulseSequence::append(const PulseSequence& other) {
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
}

PulseSequence PulseSequence::repeated(int times) const {
    PulseSequence out;
    out.events_.reserve(events_.size() * std::max(times, 0));
    for (int k = 0; k < times; ++k) out.append(*this);
    return out;
}

double PulseSequence::total_duration() const noexcept {
    // Neumaier summation
    double sum = 0.0;
    double comp = 0.0;
    for (const auto& e : events_) {
        const double t = sum + e.duration;
        if (std::abs(sum) >= std::abs(e.duration)) {
            comp += (sum - t) + e.duration;
        } else {
            comp += (e.duration - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

int PulseSequence::pulse_count() const noexcept {
    int n = 0;
    for (const auto& e : events_) n += e.is_pulse() ? 1 : 0;
    return n;
}

std::vector<double> PulseSequence::pulse_centers() const {
    std::vector<double> centers;
    double t = 0.0;
    for (const auto& e : events_) {
        if (e.is_pulse()) centers.push_back(t + e.duration / 2);
        t += e.duration;
    }
    return centers;
}

double PulseSequence::min_positive_duration() const noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : events_) {
        if (e.duration > 0.0) best = std::min(best, e.duration);
    }
    return best;
}

// ---------------------------------------------------------------------------

std::string_view scheme_label(SchemeName name) {
    switch (name) {
    case SchemeName::none: return "none";
    case SchemeName::cpmg: return "cpmg";
    case SchemeName::cpmg_p: return "cpmgp";
    case SchemeName::udd: return "udd";
    case SchemeName::udd_p: return "uddp";
    case SchemeName::rudd: return "rudd";
    case SchemeName::rudd_p: return "ruddp";
    }
    return "?";
}

SchemeName parse_scheme_name(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto name : {SchemeName::none, SchemeName::cpmg, SchemeName::cpmg_p, SchemeName::udd,
                      SchemeName::udd_p, SchemeName::rudd, SchemeName::rudd_p}) {
        if (lower == scheme_label(name)) return name;
    }
    throw std::invalid_argument("unknown scheme '" + std::string(text) +
                                "' (expected none, cpmg, cpmgp, udd, uddp, rudd, ruddp)");
}

bool is_phase_alternating(SchemeName name) {
    return name == SchemeName::cpmg_p || name == SchemeName::udd_p || name == SchemeName::rudd_p;
}

double DDScheme::block_duration() const {
    if (total) return *total;
    if (tau) return pulses * (2.0 * *tau + tau_pi);
    throw std::invalid_argument("DDScheme: either tau or total duration is required");
}

double DDScheme::half_gap() const {
    if (tau) return *tau;
    if (total) return (*total / pulses - tau_pi) / 2.0;
    throw std::invalid_argument("DDScheme: either tau or total duration is required");
}

void DDScheme::validate() const {
    if (cycles < 1) throw std::invalid_argument("DDScheme: cycles must be >= 1");
    if (name == SchemeName::none) {
        if (!(block_duration() >= 0.0)) throw std::invalid_argument("DDScheme: duration must be >= 0");
        return;
    }
    if (pulses < 1) throw std::invalid_argument("DDScheme: pulse count N must be >= 1");
    if (!(tau_pi >= 0.0)) throw std::invalid_argument("DDScheme: tau_pi must be >= 0");
    if ((name == SchemeName::rudd || name == SchemeName::rudd_p) && tau_pi == 0.0) {
        throw std::invalid_argument("DDScheme: RUDD needs a finite tau_pi");
    }
    if (!tau && !total) throw std::invalid_argument("DDScheme: either tau or total duration is required");
    if (tau && !(*tau >= 0.0)) throw std::invalid_argument("DDScheme: tau must be >= 0");
    if (total && !(*total > 0.0)) throw std::invalid_argument("DDScheme: total duration must be > 0");
}

namespace {

double pulse_phase(SchemeName name, int j) {
    // alternation starts at +x
    return (is_phase_alternating(name) && j % 2 == 1) ? pi : 0.0;
}

void require(SchemeName name, std::initializer_list<SchemeName> allowed, const char* who) {
    for (auto a : allowed) {
        if (a == name) return;
    }
    throw std::invalid_argument(std::string(who) + ": scheme '" + std::string(scheme_label(name)) +
                                "' not handled here");
}

PulseSequence assemble(SchemeName name, const std::vector<double>& delays,
                       const std::vector<double>& widths) {
    PulseSequence seq;
    for (std::size_t j = 0; j < delays.size(); ++j) {
        if (delays[j] < 0.0) throw NegativeDelay(static_cast<int>(j) + 1, delays[j]);
    }
    for (std::size_t j = 0; j < widths.size(); ++j) {
        seq.append(SequenceEvent::delay(delays[j]));
        seq.append(SequenceEvent::pulse(widths[j], pi, pulse_phase(name, static_cast<int>(j))));
    }
    seq.append(SequenceEvent::delay(delays.back()));
    return seq;
}

}  // namespace

PulseSequence gen_cpmg(const DDScheme& scheme) {
    require(scheme.name, {SchemeName::cpmg, SchemeName::cpmg_p}, "gen_cpmg");
    scheme.validate();
    const double tau = scheme.half_gap();
    if (tau < 0.0) throw NegativeDelay(1, tau);
    PulseSequence seq;
    for (int j = 0; j < scheme.pulses; ++j) {
        seq.append(SequenceEvent::delay(tau));
        seq.append(SequenceEvent::pulse(scheme.tau_pi, pi, pulse_phase(scheme.name, j)));
        seq.append(SequenceEvent::delay(tau));
    }
    return seq;
}

std::vector<double> udd_instants(int pulses, double total) {
    if (pulses < 1) throw std::invalid_argument("udd_instants: N must be >= 1");
    if (!(total > 0.0)) throw std::invalid_argument("udd_instants: T must be > 0");
    std::vector<double> t(pulses);
    for (int j = 1; j <= pulses; ++j) {
        const double s = std::sin(pi * j / (2.0 * pulses + 2.0));
        t[j - 1] = total * s * s;
    }
    return t;
}

PulseSequence gen_udd(const DDScheme& scheme) {
    require(scheme.name, {SchemeName::udd, SchemeName::udd_p}, "gen_udd");
    scheme.validate();
    const int n = scheme.pulses;
    const double T = scheme.block_duration();
    const double w = scheme.tau_pi;
    const auto t = udd_instants(n, T);
    // tau_1 = tau_{N+1} = t_1 - w/2; interior gaps between consecutive centers minus w
    std::vector<double> delays(n + 1);
    delays[0] = delays[n] = t[0] - w / 2;
    for (int j = 1; j < n; ++j) delays[j] = t[j] - t[j - 1] - w;
    return assemble(scheme.name, delays, std::vector<double>(n, w));
}

double rudd_theta(int pulses, double total, double tau_pi) {
    if (pulses < 1) throw std::invalid_argument("rudd_theta: N must be >= 1");
    if (!(total > 0.0) || !(tau_pi > 0.0)) {
        throw std::invalid_argument("rudd_theta: T and tau_pi must be > 0");
    }
    const double s = tau_pi / (total * std::sin(pi / (pulses + 1.0)));
    if (s > 1.0) {
        throw Unrealizable("RUDD unrealizable: sin(theta_p) = " + format_number(s) +
                           " > 1 (tau_pi too long for N and T)");
    }
    return std::asin(s);
}

std::vector<double> rudd_widths(int pulses, double total, double tau_pi) {
    const double sin_theta = std::sin(rudd_theta(pulses, total, tau_pi));
    std::vector<double> widths(pulses);
    for (int j = 1; j <= pulses; ++j) {
        widths[j - 1] = total * std::sin(pi * j / (pulses + 1.0)) * sin_theta;
    }
    // Edge widths equal tau_pi by construction; pin them against rounding.
    widths.front() = widths.back() = tau_pi;
    return widths;
}

PulseSequence gen_rudd(const DDScheme& scheme) {
    require(scheme.name, {SchemeName::rudd, SchemeName::rudd_p}, "gen_rudd");
    scheme.validate();
    const int n = scheme.pulses;
    const double T = scheme.block_duration();
    const auto widths = rudd_widths(n, T, scheme.tau_pi);
    const auto t = udd_instants(n, T);
    std::vector<double> delays(n + 1);
    delays[0] = delays[n] = t[0] - scheme.tau_pi / 2;
    for (int j = 1; j < n; ++j) {
        delays[j] = t[j] - t[j - 1] - widths[j] / 2 - widths[j - 1] / 2;
    }
    return assemble(scheme.name, delays, widths);
}

PulseSequence gen_dd_block(const DDScheme& scheme) {
    switch (scheme.name) {
    case SchemeName::none: {
        scheme.validate();
        PulseSequence seq;
        const double d = scheme.block_duration();
        if (d > 0.0) seq.append(SequenceEvent::delay(d));
        return seq;
    }
    case SchemeName::cpmg:
    case SchemeName::cpmg_p: return gen_cpmg(scheme);
    case SchemeName::udd:
    case SchemeName::udd_p: return gen_udd(scheme);
    case SchemeName::rudd:
    case SchemeName::rudd_p: return gen_rudd(scheme);
    }
    throw std::invalid_argument("gen_dd_block: unknown scheme");
}

PulseSequence gen_dd(const DDScheme& scheme) {
    return gen_dd_block(scheme).repeated(scheme.cycles);
}

PulseSequence gen_mqc_cycle(double delta, double tau_half_pi, double alpha, int cycles) {
    if (!(delta >= 0.0)) throw NegativeDelay(0, delta);
    if (!(tau_half_pi >= 0.0)) throw std::invalid_argument("gen_mqc_cycle: tau_pi/2 must be >= 0");
    if (cycles < 1) throw std::invalid_argument("gen_mqc_cycle: cycles must be >= 1");
    const double delta_long = 2.0 * delta + tau_half_pi;
    const double plus = pi / 2 + alpha;
    const double minus = 3 * pi / 2 + alpha;
    const double phases[8] = {plus, plus, minus, minus, minus, minus, plus, plus};

    PulseSequence one;
    one.append(SequenceEvent::delay(delta / 2));
    for (int k = 0; k < 8; ++k) {
        one.append(SequenceEvent::pulse(tau_half_pi, pi / 2, phases[k]));
        if (k < 7) one.append(SequenceEvent::delay(k % 2 == 0 ? delta_long : delta));
    }
    one.append(SequenceEvent::delay(delta / 2));
    return one.repeated(cycles);
}

PulseSequence as_ideal(const PulseSequence& seq) {
    PulseSequence out;
    for (const auto& e : seq.events()) {
        if (!e.is_pulse() || e.duration == 0.0) {
            out.append(e);
            continue;
        }
        out.append(SequenceEvent::delay(e.duration / 2));
        out.append(SequenceEvent::pulse(0.0, e.flip, e.phase));
        out.append(SequenceEvent::delay(e.duration / 2));
    }
    return out;
}

void dump(const PulseSequence& seq, std::ostream& out) {
    for (const auto& e : seq.events()) {
        out << (e.is_pulse() ? "pulse" : "delay") << ' ' << format_number(e.duration) << ' '
            << format_number(e.phase) << ' ' << format_number(e.amplitude) << '\n';
    }
}

}  // namespace ddspin
