#include "ddspin/hamiltonian.hpp"

#include <stdexcept>

namespace ddspin {

namespace {

void require_pairs(const SpinSystem& sys, const char* who) {
    if (sys.size() < 2) throw std::invalid_argument(std::string(who) + ": requires M >= 2");
}

}  // namespace

Operator zeeman(const SpinSystem& sys) {
    Matrix h = Matrix::Zero(sys.dim(), sys.dim());
    for (int i = 0; i < sys.size(); ++i) {
        if (sys.offsets()[i] != 0.0) h += sys.offsets()[i] * single_spin_op(sys, i, Axis::z).matrix;
    }
    return {std::move(h), "H_Z"};
}

Operator dipolar(const SpinSystem& sys) {
    require_pairs(sys, "dipolar");
    const int m = sys.size();
    std::vector<Matrix> ix, iy, iz;
    for (int i = 0; i < m; ++i) {
        ix.push_back(single_spin_op(sys, i, Axis::x).matrix);
        iy.push_back(single_spin_op(sys, i, Axis::y).matrix);
        iz.push_back(single_spin_op(sys, i, Axis::z).matrix);
    }
    Matrix h = Matrix::Zero(sys.dim(), sys.dim());
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double d = sys.coupling(i, j);
            if (d == 0.0) continue;
            h += d * (2.0 * iz[i] * iz[j] - ix[i] * ix[j] - iy[i] * iy[j]);
        }
    }
    return {std::move(h), "H_D"};
}

Operator two_quantum_target(const SpinSystem& sys) {
    require_pairs(sys, "two_quantum_target");
    const int m = sys.size();
    std::vector<Matrix> up, down;
    for (int i = 0; i < m; ++i) {
        up.push_back(single_spin_op(sys, i, Axis::plus).matrix);
        down.push_back(single_spin_op(sys, i, Axis::minus).matrix);
    }
    Matrix h = Matrix::Zero(sys.dim(), sys.dim());
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double d = sys.coupling(i, j);
            if (d == 0.0) continue;
            h += (d / 2.0) * (up[i] * up[j] + down[i] * down[j]);
        }
    }
    return {std::move(h), "H_1"};
}

Operator phase_shifted(const Operator& h, const SpinSystem& sys, double alpha) {
    if (static_cast<std::size_t>(h.matrix.rows()) != sys.dim()) {
        throw std::invalid_argument("phase_shifted: dimension mismatch");
    }
    return {conjugate_by_z_rotation(sys, h.matrix, alpha), h.label + "(alpha)"};
}

Operator internal_hamiltonian(const SpinSystem& sys) {
    Matrix h = zeeman(sys).matrix;
    if (sys.size() >= 2) h += dipolar(sys).matrix;
    return {std::move(h), "H_int"};
}

Operator average_hamiltonian(const PulseSequence& seq, const SpinSystem& sys) {
    const double period = seq.total_duration();
    if (!(period > 0.0)) throw std::invalid_argument("magnus0: cycle duration must be > 0");
    const Matrix h = internal_hamiltonian(sys).matrix;
    Matrix frame = Matrix::Identity(sys.dim(), sys.dim());
    Matrix sum = Matrix::Zero(sys.dim(), sys.dim());
    for (const auto& e : seq.events()) {
        if (e.is_pulse()) {
            if (e.duration != 0.0) {
                throw std::invalid_argument(
                    "magnus0: finite-width pulse present; only the zero-width limit is supported");
            }
            frame = collective_rotation(sys, Axis::x, e.flip, e.phase).matrix * frame;
        } else if (e.duration > 0.0) {
            sum += e.duration * (frame.adjoint() * h * frame);
        }
    }
    return {sum / period, "H_avg"};
}

AverageHamiltonianReport magnus0(const PulseSequence& seq, const SpinSystem& sys,
                                 const Operator& target) {
    AverageHamiltonianReport report{average_hamiltonian(seq, sys), target, 0.0};
    const double scale = target.matrix.norm();
    const double diff = (report.average.matrix - target.matrix).norm();
    report.relative_error = scale > 0.0 ? diff / scale : diff;
    return report;
}

}  // namespace ddspin
