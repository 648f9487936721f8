// propagate.hpp: time evolution through pulse sequences under
// H_Z + H_D + noise, single-trajectory unitaries and ensemble averages.

#pragma once

#include "ddspin/noise.hpp"
#include "ddspin/sequence.hpp"
#include "ddspin/spin_core.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace ddspin {

struct PropagationConfig {
    int n_traj = 1;
    double dt = 0.0;  // noise grid step; 0 selects the largest admissible step
    bool ideal_pulses = false;
    bool include_dipolar = true;  // H_D during the propagated sequence
    unsigned threads = 0;         // 0: hardware concurrency

    void validate(const NoiseModel& noise) const;
};

// Runs fn(k) for k in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Largest admissible grid step for a sequence under a noise model:
// min(shortest event / 4, model limit).
double admissible_dt(const PulseSequence& seq, const NoiseModel& model);

// Resolves cfg.dt against the sequence; throws std::invalid_argument when a
// requested step is coarser than admissible_dt().
double resolve_dt(const PulseSequence& seq, const NoiseModel& model, double requested);

// Builds sequence unitaries for one spin system. Internally works in a basis
// sorted by total magnetization, so free-evolution segments (which conserve
// Iz_total) are exponentiated one sector at a time.
class Propagator {
public:
    explicit Propagator(const SpinSystem& sys, bool include_dipolar = true);

    const SpinSystem& system() const noexcept { return sys_; }

    // Noise-free unitary (original basis).
    Matrix unitary(const PulseSequence& seq, bool ideal_pulses) const;

    // Unitary with the sequence starting at time t0 of `path` (original basis).
    Matrix unitary(const PulseSequence& seq, bool ideal_pulses, const NoiseTrajectory& path,
                   double t0) const;

    // U rho U^dagger.
    static Matrix apply(const Matrix& u, const Matrix& rho);

private:
    struct Work;
    void accumulate(const PulseSequence& seq, bool ideal_pulses, const NoiseTrajectory* path,
                    double t0, Matrix& u) const;
    void apply_delay(double length, const Eigen::VectorXd* noise, Work& work, Matrix& u) const;
    void apply_pulse(const SequenceEvent& e, double length, const Eigen::VectorXd* noise, Work& work,
                     Matrix& u) const;

    Matrix to_sorted(const Matrix& m) const;
    Matrix from_sorted(const Matrix& m) const;

    SpinSystem sys_;
    std::vector<Eigen::Index> order_;  // sorted position -> original index
    std::vector<Eigen::Index> sector_start_;
    Matrix h_free_;      // sorted basis
    bool free_diagonal_;
    Matrix ix_, iy_;     // sorted basis
    // per spin: (up, down) sorted-basis row pairs differing only in that spin
    std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> spin_pairs_;
    Eigen::VectorXd twice_m_;
    Eigen::MatrixXd iz_diag_;  // dim x spins, sorted basis
};

// Ensemble average of U rho U^dagger over cfg.n_traj noise trajectories
// (deterministic fixed-order reduction).
State propagate(const State& rho0, const PulseSequence& seq, const SpinSystem& sys,
                const NoiseModel& noise, const PropagationConfig& cfg);

// Mean and standard error over per-trajectory samples, reduced in index order.
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};
Estimate estimate(const std::vector<double>& samples);

struct SignalRow {
    double time = 0.0;
    int cycle = 0;
    double signal = 0.0;  // |mean of signed|
    double stderr_ = 0.0;
    double signed_signal = 0.0;
};

// (pi/2)_y on the thermal state, then `cycles` DD blocks; records
// Tr(rho Ix_tot)/Tr(rho0 Ix_tot) after every block (row 0 is t = 0). For the
// `none` scheme the readout instants come from `readout_times` when non-empty.
std::vector<SignalRow> sqc_dd_experiment(const SpinSystem& sys, const DDScheme& scheme,
                                         const NoiseModel& noise, const PropagationConfig& cfg,
                                         const std::vector<double>& readout_times = {});

// CSV columns: time_s, cycle_index, signal, stderr.
void write_signal_csv(const std::vector<SignalRow>& rows, std::ostream& out);

}  // namespace ddspin
