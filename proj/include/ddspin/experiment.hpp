// experiment.hpp: multiple-quantum spin-counting protocol:
//
//   thermal -> m two-quantum cycles (alpha = 0) -> DD block -> t1_k
//           -> m cycles at phase pi/2 + alpha_k (time-reversed mixing)
//           -> purge -> (pi/2)_y -> Tr(rho Ix_total)
//
// with alpha_k = k pi / n_max and t1_k = k alpha_step / encoding_omega for
// k = 0 .. 2 n_max - 1. The coherence-order spectrum is the cosine transform
// of the mean-subtracted signal over k.

#pragma once

#include "ddspin/noise.hpp"
#include "ddspin/propagate.hpp"
#include "ddspin/sequence.hpp"
#include "ddspin/spin_core.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddspin {

enum class PurgeMode { projection, evolve };

struct PurgeSettings {
    double t_r = 5e-3;      // s
    double rms = 0.0;       // correlated static dephasing during t_r; 0 picks 10 / t_r
    int n_traj = 256;
    std::uint64_t seed = 7;
};

struct MqcConfig {
    int cycles = 5;                      // m
    double delta = 2e-6;                 // s
    double tau_half_pi = 2.15e-6;        // s
    int n_max = 64;
    double encoding_omega = 2 * 3.14159265358979323846 * 200e3;  // rad/s
    DDScheme scheme;                     // name none with zero duration: no block
    PurgeMode purge_mode = PurgeMode::projection;
    PurgeSettings purge;
    bool t1_increment = true;
    bool dd_after_t1 = false;
    // Undo the sign flip of an odd number of pi pulses in the DD block.
    bool parity_correction = true;
    PropagationConfig prop;  // include_dipolar applies to the DD block only

    double phase_step() const;  // pi / n_max
    double t1_step() const;     // phase_step / encoding_omega
    int increments() const { return 2 * n_max; }
    void validate(const SpinSystem& sys, const NoiseModel& noise) const;
};

struct AlphaSample {
    int k = 0;
    double alpha = 0.0;
    double t1 = 0.0;
    double signal = 0.0;      // parity-corrected mean
    double stderr_ = 0.0;
    double raw_signal = 0.0;  // before parity correction
};

struct OrderIntensity {
    int order = 0;
    double intensity = 0.0;
    double stderr_ = 0.0;
};

struct MqcResult {
    std::vector<AlphaSample> sweep;
    std::vector<OrderIntensity> spectrum;  // orders 0 .. n_max
    std::vector<std::string> warnings;

    double intensity(int order) const;
    double stderr_of(int order) const;
};

// Folded cosine transform of the mean-subtracted signal, orders 0 .. n_max,
// where signal.size() == 2 n_max. A pure cos(n alpha) maps to 1 at bin n.
std::vector<double> cosine_transform(const std::vector<double>& signal, int n_max);

State purge(const SpinSystem& sys, const State& rho, PurgeMode mode,
            const PurgeSettings& settings = {});

MqcResult run_mqc(const SpinSystem& sys, const MqcConfig& cfg, const NoiseModel& noise);

// Encoding stage alone: inject `injected` in place of the prepared state and
// run t1/mixing/purge/detection for every k. No DD, no noise.
MqcResult encode_injected(const SpinSystem& sys, const MqcConfig& cfg, const State& injected);

// Pulse-count scan: for each N, a DD block of the family with
// T = N(2 tau + tau_pi) and a no-DD delay of the same T; row N = 0 is the
// no-delay reference. Intensities of `orders` are tabulated.
struct ScanEntry {
    int pulses = 0;
    SchemeName scheme = SchemeName::none;
    double block_duration = 0.0;
    std::map<int, OrderIntensity> intensity;
    std::optional<std::string> error;
};

std::vector<ScanEntry> dd_on_mqc_scan(const SpinSystem& sys, const MqcConfig& cfg,
                                      const NoiseModel& noise, const std::vector<int>& pulse_counts,
                                      SchemeName family, double tau,
                                      const std::vector<int>& orders = {2, 4, 6, 8});

// CSV: order, intensity, stderr.
void write_spectrum_csv(const MqcResult& result, std::ostream& out);
// CSV: k, alpha_rad, t1_s, signal.
void write_sweep_csv(const MqcResult& result, std::ostream& out);

}  // namespace ddspin
