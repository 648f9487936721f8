// noise.hpp: classical pure-dephasing noise beta_i(t), entering the
// Hamiltonian as sum_i beta_i(t) Iz^i.
//
// Spectral-density convention (used by the filter module as well):
//   C(s) = <beta(t) beta(t+s)>,  S(w) = (1/2pi) Int C(s) e^{iws} ds,
// evaluated for w >= 0, so Int_0^inf S(w) dw = C(0)/2 = b^2/2.
//   OU:          C(s) = b^2 exp(-|s|/tau_c),  S(w) = b^2 tau_c / (pi (1 + w^2 tau_c^2))
//   hard cutoff: C(s) = b^2 sin(w_c s)/(w_c s), S(w) = b^2 / (2 w_c) for w < w_c
// The phase accumulated by a switching function y(t) then has variance
// 2 Int_0^inf S(w) |Y(w)|^2 dw, Y(w) = Int y(t) e^{iwt} dt.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace ddspin {

enum class NoiseKind { none, static_gaussian, ornstein_uhlenbeck, hard_cutoff };

std::string_view noise_label(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double rms = 0.0;               // b, rad/s
    double correlation_time = 0.0;  // tau_c, s (OU)
    double cutoff = 0.0;            // w_c, rad/s (hard cutoff)
    std::uint64_t seed = 1;
    bool correlated = false;  // one path shared by all spins

    void validate() const;
    bool active() const noexcept { return kind != NoiseKind::none && rms > 0.0; }
    NoiseModel scaled(double factor) const;
};

// Number of cosine components in hard-cutoff paths.
inline constexpr int kCutoffComponents = 64;

// Piecewise-constant beta_i(t) on [k dt, (k+1) dt).
class NoiseTrajectory {
public:
    NoiseTrajectory(double dt, Eigen::MatrixXd values);

    double dt() const noexcept { return dt_; }
    int steps() const noexcept { return static_cast<int>(values_.rows()); }
    int spins() const noexcept { return static_cast<int>(values_.cols()); }
    double duration() const noexcept { return dt_ * steps(); }
    // Value in grid cell `step` (clamped to the last cell).
    double value(int step, int spin) const;
    auto row(int step) const { return values_.row(step); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

private:
    double dt_;
    Eigen::MatrixXd values_;  // steps x spins
};

// Deterministic in (model.seed, trajectory). Covers at least [0, total].
NoiseTrajectory sample_trajectory(const NoiseModel& model, double total, double dt, int spins,
                                  std::uint64_t trajectory = 0);

// One-sided S(w) per the convention above. Throws for static noise.
double spectral_density(const NoiseModel& model, double omega);

// C(s).
double autocorrelation(const NoiseModel& model, double lag);

// Largest grid step the model tolerates (tau_c/10 for OU, pi/(10 w_c) for hard
// cutoff, +inf otherwise).
double max_noise_dt(const NoiseModel& model);

// Static Gaussian rms giving exp(-b^2 t^2 / 2) = 1/e at t = decay_time.
double static_rms_for_decay(double decay_time);
// OU rms giving a free-evolution attenuation of 1/e at t = decay_time:
// b^2 tau_c^2 (t/tau_c - 1 + exp(-t/tau_c)) = 1.
double ou_rms_for_decay(double decay_time, double correlation_time);

}  // namespace ddspin
