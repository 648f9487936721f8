#include "ddspin/spin_core.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace ddspin {

namespace {

std::size_t spin_bit(int spin, int spins) {
    return std::size_t{1} << (spins - 1 - spin);
}

const char* axis_name(Axis axis) {
    switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
    case Axis::plus: return "+";
    case Axis::minus: return "-";
    }
    return "?";
}

}  // namespace

SpinSystem::SpinSystem(std::vector<double> offsets, RealMatrix couplings)
    : offsets_(std::move(offsets)), couplings_(std::move(couplings)) {
    const int m = size();
    if (m < 1 || m > kMaxSpins) {
        throw std::invalid_argument("SpinSystem: spin count must be in [1, " +
                                    std::to_string(kMaxSpins) + "], got " + std::to_string(m));
    }
    if (couplings_.rows() != m || couplings_.cols() != m) {
        throw std::invalid_argument("SpinSystem: coupling matrix must be M x M");
    }
    for (int i = 0; i < m; ++i) {
        if (couplings_(i, i) != 0.0) {
            throw std::invalid_argument("SpinSystem: coupling diagonal must be zero");
        }
        for (int j = i + 1; j < m; ++j) {
            if (couplings_(i, j) != couplings_(j, i)) {
                throw std::invalid_argument("SpinSystem: coupling matrix must be symmetric");
            }
        }
    }
}

SpinSystem SpinSystem::uncoupled(int spins) {
    if (spins < 1) throw std::invalid_argument("SpinSystem: spin count must be >= 1");
    return SpinSystem(std::vector<double>(spins, 0.0), RealMatrix::Zero(spins, spins));
}

SpinSystem SpinSystem::random_couplings(int spins, double max_abs, std::uint64_t seed) {
    if (spins < 1) throw std::invalid_argument("SpinSystem: spin count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-max_abs, max_abs);
    RealMatrix d = RealMatrix::Zero(spins, spins);
    for (int i = 0; i < spins; ++i) {
        for (int j = i + 1; j < spins; ++j) {
            d(i, j) = d(j, i) = dist(rng);
        }
    }
    return SpinSystem(std::vector<double>(spins, 0.0), std::move(d));
}

bool SpinSystem::has_couplings() const noexcept {
    return couplings_.size() > 0 && couplings_.cwiseAbs().maxCoeff() > 0.0;
}

SpinSystem SpinSystem::with_offsets(std::vector<double> offsets) const {
    return SpinSystem(std::move(offsets), couplings_);
}

// ---------------------------------------------------------------------------

CoherenceSpectrum::CoherenceSpectrum(int spins) : spins_(spins), intensity_(2 * spins + 1, 0.0) {}

double CoherenceSpectrum::at(int order) const {
    if (order < -spins_ || order > spins_) return 0.0;
    return intensity_[order + spins_];
}

void CoherenceSpectrum::set(int order, double intensity) {
    if (order < -spins_ || order > spins_) {
        throw std::out_of_range("CoherenceSpectrum: order outside [-M, M]");
    }
    if (!(intensity >= 0.0)) {
        throw std::invalid_argument("CoherenceSpectrum: intensity must be non-negative");
    }
    intensity_[order + spins_] = intensity;
}

double CoherenceSpectrum::total() const {
    double sum = 0.0;
    for (double v : intensity_) sum += v;
    return sum;
}

int CoherenceSpectrum::max_occupied_order(double rel_threshold) const {
    const double cut = rel_threshold * total();
    int best = 0;
    for (int n = -spins_; n <= spins_; ++n) {
        if (at(n) > cut && std::abs(n) > best) best = std::abs(n);
    }
    return best;
}

// ---------------------------------------------------------------------------

int twice_magnetization(std::size_t basis_index, int spins) noexcept {
    return spins - 2 * std::popcount(basis_index);
}

int coherence_order(std::size_t row, std::size_t col, int spins) noexcept {
    return (twice_magnetization(row, spins) - twice_magnetization(col, spins)) / 2;
}

Operator single_spin_op(const SpinSystem& sys, int spin, Axis axis) {
    const int m = sys.size();
    if (spin < 0 || spin >= m) {
        throw std::out_of_range("single_spin_op: spin index " + std::to_string(spin) +
                                " outside [0, " + std::to_string(m) + ")");
    }
    const std::size_t dim = sys.dim();
    const std::size_t bit = spin_bit(spin, m);
    Matrix op = Matrix::Zero(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const bool down = (c & bit) != 0;
        const std::size_t flipped = c ^ bit;
        switch (axis) {
        case Axis::z:
            op(c, c) = down ? -0.5 : 0.5;
            break;
        case Axis::plus:
            if (down) op(flipped, c) = 1.0;
            break;
        case Axis::minus:
            if (!down) op(flipped, c) = 1.0;
            break;
        case Axis::x:
            op(flipped, c) = 0.5;
            break;
        case Axis::y:
            // Iy = -i(I+ - I-)/2: <up|Iy|down> = -i/2, <down|Iy|up> = +i/2
            op(flipped, c) = down ? cplx(0.0, -0.5) : cplx(0.0, 0.5);
            break;
        }
    }
    return {std::move(op), std::string("I") + axis_name(axis) + "^" + std::to_string(spin)};
}

Operator total_spin_op(const SpinSystem& sys, Axis axis) {
    Matrix sum = Matrix::Zero(sys.dim(), sys.dim());
    for (int i = 0; i < sys.size(); ++i) sum += single_spin_op(sys, i, axis).matrix;
    return {std::move(sum), std::string("I") + axis_name(axis) + "_total"};
}

State thermal_state(const SpinSystem& sys) {
    Matrix iz = total_spin_op(sys, Axis::z).matrix;
    const double norm = iz.norm();
    return {iz / norm, norm};
}

Matrix coherence_block(const SpinSystem& sys, const Matrix& rho, int order) {
    if (static_cast<std::size_t>(rho.rows()) != sys.dim() ||
        static_cast<std::size_t>(rho.cols()) != sys.dim()) {
        throw std::invalid_argument("coherence_block: dimension mismatch");
    }
    const int m = sys.size();
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            if (coherence_order(r, c, m) == order) out(r, c) = rho(r, c);
        }
    }
    return out;
}

CoherenceSpectrum coherence_decompose(const SpinSystem& sys, const State& state) {
    const Matrix& rho = state.rho;
    if (static_cast<std::size_t>(rho.rows()) != sys.dim() ||
        static_cast<std::size_t>(rho.cols()) != sys.dim()) {
        throw std::invalid_argument("coherence_decompose: dimension mismatch");
    }
    const int m = sys.size();
    std::vector<double> acc(2 * m + 1, 0.0);
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            acc[coherence_order(r, c, m) + m] += std::norm(rho(r, c));
        }
    }
    CoherenceSpectrum spectrum(m);
    for (int n = -m; n <= m; ++n) spectrum.set(n, acc[n + m]);
    return spectrum;
}

Operator collective_rotation(const SpinSystem& sys, Axis axis, double angle, double phase) {
    if (axis != Axis::x && axis != Axis::y) {
        throw std::invalid_argument("collective_rotation: axis must be x or y");
    }
    const double phi = phase + (axis == Axis::y ? M_PI / 2 : 0.0);
    // single-spin exp(-i angle (cos phi sx + sin phi sy)/2)
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    const cplx off_up = cplx(0.0, -s) * std::polar(1.0, -phi);   // <up|U|down>
    const cplx off_down = cplx(0.0, -s) * std::polar(1.0, phi);  // <down|U|up>
    const std::size_t dim = sys.dim();
    const int m = sys.size();
    Matrix u(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t col = 0; col < dim; ++col) {
            cplx v = 1.0;
            for (int i = 0; i < m && v != 0.0; ++i) {
                const std::size_t bit = spin_bit(i, m);
                const bool rd = (r & bit) != 0;
                const bool cd = (col & bit) != 0;
                if (rd == cd) {
                    v *= c;
                } else {
                    v *= rd ? off_down : off_up;
                }
            }
            u(r, col) = v;
        }
    }
    return {std::move(u), "R(" + std::to_string(angle) + "," + std::to_string(phi) + ")"};
}

Eigen::VectorXcd z_rotation_diagonal(const SpinSystem& sys, double angle) {
    const std::size_t dim = sys.dim();
    Eigen::VectorXcd d(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        d(k) = std::polar(1.0, -angle * 0.5 * twice_magnetization(k, sys.size()));
    }
    return d;
}

Matrix conjugate_by_z_rotation(const SpinSystem& sys, const Matrix& op, double angle) {
    const Eigen::VectorXcd d = z_rotation_diagonal(sys, angle);
    return d.asDiagonal() * op * d.conjugate().asDiagonal();
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double normalized_overlap(const Matrix& a, const Matrix& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.conjugate().cwiseProduct(b).sum().real() / (na * nb);
}

}  // namespace ddspin
