// Analytic dephasing of a single spin under a pi-pulse sequence.
//
// The sequence defines a switching function y(t) = +-1 that flips sign at every
// pulse center. With Y(w) = Int_0^T y(t) e^{iwt} dt the filter function is
//   F(w) = w^2 |Y(w)|^2 / 2
// and the attenuation exponent, with S(w) as defined in noise.hpp, is
//   chi = Int_0^inf S(w) |Y(w)|^2 dw = 2 Int_0^inf S(w) F(w) / w^2 dw,
// so that a Gaussian-noise ensemble decays as exp(-chi).

#pragma once

#include "ddspin/noise.hpp"
#include "ddspin/sequence.hpp"

#include <iosfwd>
#include <vector>

namespace ddspin {

struct FilterPoint {
    double omega = 0.0;  // rad/s
    double value = 0.0;
};

struct FilterResult {
    double duration = 0.0;  // T, s
    double chi = 0.0;
    double predicted = 1.0;  // exp(-chi)
    std::vector<FilterPoint> grid;
};

// Sign-switching instants t_0 = 0, pulse centers, t_{N+1} = T. Throws
// std::invalid_argument if any pulse is not a pi rotation.
std::vector<double> switching_times(const PulseSequence& seq);

// |Y(w)|^2 for the switching function of `times`.
double switching_spectrum(const std::vector<double>& times, double omega);

double filter_function(const PulseSequence& seq, double omega);

// 400 log-spaced points over [1e-2/T, 1e3/T].
std::vector<FilterPoint> filter_grid(const PulseSequence& seq, int points = 400);

FilterResult chi(const PulseSequence& seq, const NoiseModel& model);

// CSV: omega_rad_s, F.
void write_filter_csv(const FilterResult& result, std::ostream& out);
// CSV: T_s, chi, predicted_signal.
void write_filter_summary_csv(const FilterResult& result, std::ostream& out);

}  // namespace ddspin
