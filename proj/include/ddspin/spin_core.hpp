// spin_core.hpp: spin-1/2 operator algebra on M-spin Hilbert spaces,
// deviation density matrices, and coherence-order bookkeeping.
//
// Basis convention: basis index bit (M-1-i) holds spin i, bit value 0 = |up>
// (m = +1/2), 1 = |down>. Spin 0 is the leftmost Kronecker factor.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ddspin {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr int kMaxSpins = 12;

enum class Axis { x, y, z, plus, minus };

// Offsets and couplings are angular frequencies (rad/s).
class SpinSystem {
public:
    SpinSystem(std::vector<double> offsets, RealMatrix couplings);

    // M spins, zero offsets, zero couplings.
    static SpinSystem uncoupled(int spins);

    // Zero offsets, couplings drawn uniformly from [-max_abs, max_abs] with a
    // fixed seed. This is the reproducible test system used throughout.
    static SpinSystem random_couplings(int spins, double max_abs, std::uint64_t seed);

    int size() const noexcept { return static_cast<int>(offsets_.size()); }
    std::size_t dim() const noexcept { return std::size_t{1} << offsets_.size(); }
    const std::vector<double>& offsets() const noexcept { return offsets_; }
    const RealMatrix& couplings() const noexcept { return couplings_; }
    double coupling(int i, int j) const { return couplings_(i, j); }
    bool has_couplings() const noexcept;

    SpinSystem with_offsets(std::vector<double> offsets) const;

private:
    std::vector<double> offsets_;
    RealMatrix couplings_;
};

struct Operator {
    Matrix matrix;
    std::string label;
};

// Deviation density matrix (traceless part, high-temperature convention).
// `scale` records the factor divided out during normalization.
struct State {
    Matrix rho;
    double scale = 1.0;
};

// Intensity per coherence order n in [-M, M].
class CoherenceSpectrum {
public:
    explicit CoherenceSpectrum(int spins);

    int spins() const noexcept { return spins_; }
    double at(int order) const;
    void set(int order, double intensity);
    double total() const;
    // Largest |n| whose intensity exceeds rel_threshold * total().
    int max_occupied_order(double rel_threshold) const;

private:
    int spins_;
    std::vector<double> intensity_;
};

// Twice the total magnetic quantum number of a basis state, i.e. M - 2*popcount.
int twice_magnetization(std::size_t basis_index, int spins) noexcept;

// Coherence order connecting row r and column c: m_r - m_c.
int coherence_order(std::size_t row, std::size_t col, int spins) noexcept;

Operator single_spin_op(const SpinSystem& sys, int spin, Axis axis);
Operator total_spin_op(const SpinSystem& sys, Axis axis);

State thermal_state(const SpinSystem& sys);

// Keeps only the elements of order n (zero elsewhere).
Matrix coherence_block(const SpinSystem& sys, const Matrix& rho, int order);
CoherenceSpectrum coherence_decompose(const SpinSystem& sys, const State& state);

// U = exp(-i angle (cos(phi) Ix + sin(phi) Iy)) with phi = phase (+pi/2 for Axis::y).
Operator collective_rotation(const SpinSystem& sys, Axis axis, double angle, double phase);

// exp(-i angle Iz_total); diagonal.
Eigen::VectorXcd z_rotation_diagonal(const SpinSystem& sys, double angle);

// R U R^dagger for R = exp(-i angle Iz_total), elementwise on U.
Matrix conjugate_by_z_rotation(const SpinSystem& sys, const Matrix& op, double angle);

Matrix commutator(const Matrix& a, const Matrix& b);

// Tr(a^dagger b) / (||a|| ||b||); 1 for identical non-zero operators.
double normalized_overlap(const Matrix& a, const Matrix& b);

}  // namespace ddspin
