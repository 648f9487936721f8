// sequence.hpp: pulse-sequence generators: CPMG/UDD/RUDD decoupling blocks
// (with phase-alternating variants) and the 8-pulse two-quantum cycle.
//
// Times are seconds, phases radians, amplitudes Hz (rotation rate), so a pulse
// of duration d and amplitude a rotates by 2*pi*a*d.

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddspin {

// Configuration that cannot be realized as a sequence (negative delay,
// pulse longer than allowed bandwidth, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeDelay : public DomainError {
public:
    NegativeDelay(int index, double value);
    int index() const noexcept { return index_; }
    double value() const noexcept { return value_; }

private:
    int index_;
    double value_;
};

class Unrealizable : public DomainError {
public:
    using DomainError::DomainError;
};

enum class EventKind { delay, pulse };

struct SequenceEvent {
    EventKind kind = EventKind::delay;
    double duration = 0.0;
    double phase = 0.0;      // pulses only
    double amplitude = 0.0;  // pulses only; +inf for zero-width pulses
    double flip = 0.0;       // pulses only; nominal 2*pi*amplitude*duration

    static SequenceEvent delay(double duration);
    // Amplitude calibrated so that 2*pi*amplitude*duration == flip.
    static SequenceEvent pulse(double duration, double flip, double phase);

    bool is_pulse() const noexcept { return kind == EventKind::pulse; }
};

class PulseSequence {
public:
    PulseSequence() = default;
    explicit PulseSequence(std::vector<SequenceEvent> events);

    void append(const SequenceEvent& event);
    void append(const PulseSequence& other);
    PulseSequence repeated(int times) const;

    const std::vector<SequenceEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    // Compensated sum of event durations.
    double total_duration() const noexcept;
    int pulse_count() const noexcept;
    // Center time of every pulse, in order.
    std::vector<double> pulse_centers() const;
    double min_positive_duration() const noexcept;

private:
    std::vector<SequenceEvent> events_;
};

enum class SchemeName { none, cpmg, cpmg_p, udd, udd_p, rudd, rudd_p };

std::string_view scheme_label(SchemeName name);
SchemeName parse_scheme_name(std::string_view text);
bool is_phase_alternating(SchemeName name);

// A decoupling block. CPMG is parameterized by the half-gap tau; UDD/RUDD by
// the block duration T. Whichever is missing follows from T = N(2 tau + tau_pi).
struct DDScheme {
    SchemeName name = SchemeName::none;
    int pulses = 0;
    std::optional<double> tau;
    std::optional<double> total;
    double tau_pi = 0.0;
    int cycles = 1;

    double block_duration() const;
    double half_gap() const;
    void validate() const;
};

PulseSequence gen_cpmg(const DDScheme& scheme);
std::vector<double> udd_instants(int pulses, double total);
PulseSequence gen_udd(const DDScheme& scheme);
double rudd_theta(int pulses, double total, double tau_pi);
std::vector<double> rudd_widths(int pulses, double total, double tau_pi);
PulseSequence gen_rudd(const DDScheme& scheme);

// One block for any scheme; `none` yields a single delay of block_duration().
PulseSequence gen_dd_block(const DDScheme& scheme);
// gen_dd_block concatenated `cycles` times.
PulseSequence gen_dd(const DDScheme& scheme);

// m cycles of the two-quantum 8-pulse cycle, every pulse phase shifted by
// alpha. Layout per cycle:
//   D/2 P D' P D P- D' P- D P- D' P- D P D' P D/2,  D' = 2D + tau_half_pi
// with P = (pi/2) at phase pi/2 + alpha and P- at phase 3pi/2 + alpha.
// tau_half_pi = 0 gives the zero-width variant.
PulseSequence gen_mqc_cycle(double delta, double tau_half_pi, double alpha, int cycles);

// Replaces every finite pulse by delay(d/2), zero-width pulse, delay(d/2).
PulseSequence as_ideal(const PulseSequence& seq);

// One event per line: kind duration_s phase_rad amplitude_hz.
void dump(const PulseSequence& seq, std::ostream& out);

}  // namespace ddspin
