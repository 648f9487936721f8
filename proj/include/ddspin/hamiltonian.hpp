// hamiltonian.hpp: internal Hamiltonian (Zeeman offsets + secular dipolar),
// the two-quantum target Hamiltonian, and a zeroth-order average-Hamiltonian
// (toggling frame) evaluator for zero-width pulse cycles.

#pragma once

#include "ddspin/sequence.hpp"
#include "ddspin/spin_core.hpp"

namespace ddspin {

/// Sum_i w_i Iz^i.
Operator zeeman(const SpinSystem& sys);

/// Sum_{i<j} D_ij (3 Iz^i Iz^j - I^i . I^j). Requires M >= 2.
Operator dipolar(const SpinSystem& sys);

/// Sum_{i<j} (D_ij / 2)(I+^i I+^j + I-^i I-^j). Requires M >= 2.
Operator two_quantum_target(const SpinSystem& sys);

/// exp(-i alpha Iz_tot) H exp(+i alpha Iz_tot).
Operator phase_shifted(const Operator& h, const SpinSystem& sys, double alpha);

/// Zeeman plus (for M >= 2) dipolar.
Operator internal_hamiltonian(const SpinSystem& sys);

struct AverageHamiltonianReport {
    Operator average;
    Operator target;
    double relative_error = 0.0;  // ||average - target||_F / ||target||_F
};

/// Zeroth-order Magnus term (1/T) sum_k tau_k Q_k^dagger H_int Q_k, with Q_k the
/// product of all pulse rotations preceding interval k. Only zero-width pulses
/// are accepted; use as_ideal() on finite-width sequences first.
Operator average_hamiltonian(const PulseSequence& seq, const SpinSystem& sys);

AverageHamiltonianReport magnus0(const PulseSequence& seq, const SpinSystem& sys,
                                 const Operator& target);

}  // namespace ddspin
