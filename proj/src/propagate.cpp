#include "ddspin/propagate.hpp"

#include "ddspin/csv.hpp"
#include "ddspin/hamiltonian.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ddspin {

using std::numbers::pi;

void PropagationConfig::validate(const NoiseModel& noise) const {
    if (n_traj < 1) throw std::invalid_argument("PropagationConfig: n_traj must be >= 1");
    if (noise.kind == NoiseKind::none && n_traj != 1) {
        throw std::invalid_argument("PropagationConfig: n_traj must be 1 when noise is none");
    }
    if (dt < 0.0) throw std::invalid_argument("PropagationConfig: dt must be >= 0");
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double admissible_dt(const PulseSequence& seq, const NoiseModel& model) {
    return std::min(seq.min_positive_duration() / 4.0, max_noise_dt(model));
}

double resolve_dt(const PulseSequence& seq, const NoiseModel& model, double requested) {
    const double total = seq.total_duration();
    if (model.kind == NoiseKind::none || model.kind == NoiseKind::static_gaussian) {
        // time-independent paths need a single cell
        return total > 0.0 ? total : 1.0;
    }
    const double limit = admissible_dt(seq, model);
    if (requested == 0.0) return limit;
    if (requested > limit * (1.0 + 1e-12)) {
        throw std::invalid_argument("noise grid too coarse: dt = " + format_number(requested) +
                                    " s exceeds admissible " + format_number(limit) + " s");
    }
    return requested;
}

// ---------------------------------------------------------------------------

struct Propagator::Work {
    std::map<double, std::vector<Matrix>> delay_cache;
    std::map<std::pair<double, double>, Matrix> pulse_cache;
};

namespace {

Matrix expm_hermitian(const Matrix& h, double length) {
    const Matrix a = cplx(0.0, -length) * h;
    return a.exp();
}

}  // namespace

Propagator::Propagator(const SpinSystem& sys, bool include_dipolar) : sys_(sys) {
    const std::size_t dim = sys.dim();
    const int m = sys.size();
    order_.resize(dim);
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    std::stable_sort(order_.begin(), order_.end(), [](Eigen::Index a, Eigen::Index b) {
        return std::popcount(static_cast<std::size_t>(a)) < std::popcount(static_cast<std::size_t>(b));
    });
    for (std::size_t k = 0; k < dim; ++k) {
        if (k == 0 || std::popcount(static_cast<std::size_t>(order_[k])) !=
                          std::popcount(static_cast<std::size_t>(order_[k - 1]))) {
            sector_start_.push_back(static_cast<Eigen::Index>(k));
        }
    }
    sector_start_.push_back(static_cast<Eigen::Index>(dim));

    Matrix h = zeeman(sys).matrix;
    if (include_dipolar && m >= 2 && sys.has_couplings()) h += dipolar(sys).matrix;
    h_free_ = to_sorted(h);
    free_diagonal_ = (h_free_ - Matrix(h_free_.diagonal().asDiagonal())).norm() == 0.0;
    ix_ = to_sorted(total_spin_op(sys, Axis::x).matrix);
    iy_ = to_sorted(total_spin_op(sys, Axis::y).matrix);
    std::vector<Eigen::Index> position(dim);
    for (std::size_t k = 0; k < dim; ++k) position[order_[k]] = static_cast<Eigen::Index>(k);
    spin_pairs_.resize(m);
    for (int i = 0; i < m; ++i) {
        const std::size_t bit = std::size_t{1} << (m - 1 - i);
        for (std::size_t b = 0; b < dim; ++b) {
            if (!(b & bit)) spin_pairs_[i].emplace_back(position[b], position[b | bit]);
        }
    }
    twice_m_.resize(dim);
    iz_diag_.resize(dim, m);
    for (std::size_t k = 0; k < dim; ++k) {
        const auto orig = static_cast<std::size_t>(order_[k]);
        twice_m_(k) = twice_magnetization(orig, m);
        for (int i = 0; i < m; ++i) {
            iz_diag_(k, i) = (orig >> (m - 1 - i)) & 1u ? -0.5 : 0.5;
        }
    }
}

Matrix Propagator::to_sorted(const Matrix& in) const {
    const auto dim = static_cast<Eigen::Index>(order_.size());
    Matrix out(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) out(r, c) = in(order_[r], order_[c]);
    }
    return out;
}

Matrix Propagator::from_sorted(const Matrix& in) const {
    const auto dim = static_cast<Eigen::Index>(order_.size());
    Matrix out(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) out(order_[r], order_[c]) = in(r, c);
    }
    return out;
}

void Propagator::apply_delay(double length, const Eigen::VectorXd* noise, Work& work,
                             Matrix& u) const {
    if (free_diagonal_) {
        Eigen::VectorXd diag = h_free_.diagonal().real();
        if (noise) diag += *noise;
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            u.row(r) *= std::polar(1.0, -diag(r) * length);
        }
        return;
    }
    std::vector<Matrix> local;
    const std::vector<Matrix>* blocks = nullptr;
    if (!noise) {
        auto it = work.delay_cache.find(length);
        if (it == work.delay_cache.end()) {
            std::vector<Matrix> fresh;
            for (std::size_t s = 0; s + 1 < sector_start_.size(); ++s) {
                const Eigen::Index b = sector_start_[s];
                const Eigen::Index n = sector_start_[s + 1] - b;
                fresh.push_back(expm_hermitian(h_free_.block(b, b, n, n), length));
            }
            it = work.delay_cache.emplace(length, std::move(fresh)).first;
        }
        blocks = &it->second;
    } else {
        for (std::size_t s = 0; s + 1 < sector_start_.size(); ++s) {
            const Eigen::Index b = sector_start_[s];
            const Eigen::Index n = sector_start_[s + 1] - b;
            Matrix hb = h_free_.block(b, b, n, n);
            hb.diagonal() += noise->segment(b, n).cast<cplx>();
            local.push_back(expm_hermitian(hb, length));
        }
        blocks = &local;
    }
    for (std::size_t s = 0; s + 1 < sector_start_.size(); ++s) {
        const Eigen::Index b = sector_start_[s];
        const Eigen::Index n = sector_start_[s + 1] - b;
        u.middleRows(b, n) = ((*blocks)[s] * u.middleRows(b, n)).eval();
    }
}

void Propagator::apply_pulse(const SequenceEvent& e, double length, const Eigen::VectorXd* noise,
                             Work& work, Matrix& u) const {
    if (e.duration == 0.0) {
        // Collective rotation as M one-spin factors acting on row pairs.
        const double c = std::cos(0.5 * e.flip);
        const cplx s_up = cplx(0.0, -1.0) * std::polar(std::sin(0.5 * e.flip), -e.phase);
        const cplx s_down = cplx(0.0, -1.0) * std::polar(std::sin(0.5 * e.flip), e.phase);
        for (Eigen::Index col = 0; col < u.cols(); ++col) {
            cplx* v = u.col(col).data();
            for (const auto& pairs : spin_pairs_) {
                for (const auto& [up, down] : pairs) {
                    const cplx a = v[up], b = v[down];
                    v[up] = c * a + s_up * b;
                    v[down] = s_down * a + c * b;
                }
            }
        }
        return;
    }
    const double rate = 2.0 * pi * e.amplitude;
    if (!noise) {
        // phase-0 propagator, rotated about z by the pulse phase
        const auto key = std::make_pair(length, e.amplitude);
        auto it = work.pulse_cache.find(key);
        if (it == work.pulse_cache.end()) {
            it = work.pulse_cache.emplace(key, expm_hermitian(h_free_ + rate * ix_, length)).first;
        }
        Matrix rotated = it->second;
        for (Eigen::Index c = 0; c < rotated.cols(); ++c) {
            for (Eigen::Index r = 0; r < rotated.rows(); ++r) {
                rotated(r, c) *= std::polar(1.0, -e.phase * 0.5 * (twice_m_(r) - twice_m_(c)));
            }
        }
        u = rotated * u;
        return;
    }
    Matrix h = h_free_ + rate * (std::cos(e.phase) * ix_ + std::sin(e.phase) * iy_);
    h.diagonal() += noise->cast<cplx>();
    u = expm_hermitian(h, length) * u;
}

void Propagator::accumulate(const PulseSequence& seq, bool ideal_pulses,
                            const NoiseTrajectory* path, double t0, Matrix& u) const {
    const PulseSequence effective = ideal_pulses ? as_ideal(seq) : seq;
    Work work;
    const bool constant_path = path && path->steps() <= 1;
    Eigen::VectorXd noise;
    if (constant_path) noise = iz_diag_ * path->row(0).transpose();

    double t = t0;
    for (const auto& e : effective.events()) {
        if (e.duration == 0.0) {
            if (e.is_pulse()) apply_pulse(e, 0.0, nullptr, work, u);
            continue;
        }
        if (!path || constant_path) {
            const Eigen::VectorXd* nz = constant_path ? &noise : nullptr;
            if (e.is_pulse()) {
                apply_pulse(e, e.duration, nz, work, u);
            } else {
                apply_delay(e.duration, nz, work, u);
            }
            t += e.duration;
            continue;
        }
        const double dt = path->dt();
        const double end = t + e.duration;
        double s = t;
        while (s < end) {
            auto cell = static_cast<long long>(std::floor(s / dt));
            double cell_end = static_cast<double>(cell + 1) * dt;
            if (cell_end <= s) cell_end = static_cast<double>(++cell + 1) * dt;
            const double piece_end = std::min(end, cell_end);
            const double piece = piece_end - s;
            const int row = static_cast<int>(std::min<long long>(cell, path->steps() - 1));
            noise = iz_diag_ * path->row(row).transpose();
            if (e.is_pulse()) {
                apply_pulse(e, piece, &noise, work, u);
            } else {
                apply_delay(piece, &noise, work, u);
            }
            s = piece_end;
        }
        t = end;
    }
}

Matrix Propagator::unitary(const PulseSequence& seq, bool ideal_pulses) const {
    Matrix u = Matrix::Identity(sys_.dim(), sys_.dim());
    accumulate(seq, ideal_pulses, nullptr, 0.0, u);
    return from_sorted(u);
}

Matrix Propagator::unitary(const PulseSequence& seq, bool ideal_pulses, const NoiseTrajectory& path,
                           double t0) const {
    if (path.spins() != sys_.size()) {
        throw std::invalid_argument("Propagator: noise path spin count mismatch");
    }
    Matrix u = Matrix::Identity(sys_.dim(), sys_.dim());
    accumulate(seq, ideal_pulses, &path, t0, u);
    return from_sorted(u);
}

Matrix Propagator::apply(const Matrix& u, const Matrix& rho) { return u * rho * u.adjoint(); }

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kReductionBlock = 16;

}  // namespace

State propagate(const State& rho0, const PulseSequence& seq, const SpinSystem& sys,
                const NoiseModel& noise, const PropagationConfig& cfg) {
    cfg.validate(noise);
    noise.validate();
    if (static_cast<std::size_t>(rho0.rho.rows()) != sys.dim() ||
        static_cast<std::size_t>(rho0.rho.cols()) != sys.dim()) {
        throw std::invalid_argument("propagate: state dimension does not match the spin system");
    }
    const PulseSequence effective = cfg.ideal_pulses ? as_ideal(seq) : seq;
    const double total = effective.total_duration();
    const Propagator prop(sys, cfg.include_dipolar);
    if (noise.kind == NoiseKind::none || total == 0.0) {
        const Matrix u = prop.unitary(effective, false);
        return {Propagator::apply(u, rho0.rho), rho0.scale};
    }
    const double dt = resolve_dt(effective, noise, cfg.dt);
    const auto n = static_cast<std::size_t>(cfg.n_traj);
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<Matrix> partial(blocks);
    parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        Matrix sum = Matrix::Zero(sys.dim(), sys.dim());
        for (std::size_t j = b * kReductionBlock; j < std::min(n, (b + 1) * kReductionBlock); ++j) {
            const auto path = sample_trajectory(noise, total, dt, sys.size(), j);
            sum += Propagator::apply(prop.unitary(effective, false, path, 0.0), rho0.rho);
        }
        partial[b] = std::move(sum);
    });
    Matrix mean = Matrix::Zero(sys.dim(), sys.dim());
    for (const auto& p : partial) mean += p;
    return {mean / static_cast<double>(n), rho0.scale};
}

Estimate estimate(const std::vector<double>& samples) {
    Estimate e;
    if (samples.empty()) return e;
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    e.mean = sum / n;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - e.mean) * (v - e.mean);
        e.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

std::vector<SignalRow> sqc_dd_experiment(const SpinSystem& sys, const DDScheme& scheme,
                                         const NoiseModel& noise, const PropagationConfig& cfg,
                                         const std::vector<double>& readout_times) {
    cfg.validate(noise);
    noise.validate();
    scheme.validate();

    // segments between consecutive readouts
    std::vector<PulseSequence> segments;
    if (scheme.name == SchemeName::none && !readout_times.empty()) {
        double prev = 0.0;
        for (double t : readout_times) {
            if (t < prev) throw std::invalid_argument("sqc: readout times must be non-decreasing and >= 0");
            PulseSequence seg;
            if (t > prev) seg.append(SequenceEvent::delay(t - prev));
            segments.push_back(std::move(seg));
            prev = t;
        }
    } else {
        const PulseSequence block = gen_dd_block(scheme);
        segments.assign(static_cast<std::size_t>(scheme.cycles), block);
    }
    PulseSequence whole;
    for (const auto& s : segments) whole.append(cfg.ideal_pulses ? as_ideal(s) : s);

    const Propagator prop(sys, cfg.include_dipolar);
    const Matrix ix = total_spin_op(sys, Axis::x).matrix;
    const Matrix prep = collective_rotation(sys, Axis::y, pi / 2, 0.0).matrix;
    const Matrix rho0 = Propagator::apply(prep, thermal_state(sys).rho);
    const double reference = ix.conjugate().cwiseProduct(rho0).sum().real();

    const std::size_t n_seg = segments.size();
    const auto n_traj = static_cast<std::size_t>(cfg.n_traj);
    std::vector<std::vector<double>> samples(n_seg, std::vector<double>(n_traj, 0.0));
    std::vector<double> seg_start(n_seg, 0.0);
    for (std::size_t s = 1; s < n_seg; ++s) {
        seg_start[s] = seg_start[s - 1] + segments[s - 1].total_duration();
    }
    const double total = whole.total_duration();

    auto signal_of = [&](const Matrix& rho) {
        return ix.conjugate().cwiseProduct(rho).sum().real() / reference;
    };

    if (noise.kind == NoiseKind::none || total == 0.0) {
        Matrix rho = rho0;
        Matrix cached_block;  // identical DD blocks share one unitary
        for (std::size_t s = 0; s < n_seg; ++s) {
            Matrix u;
            if (scheme.name != SchemeName::none || readout_times.empty()) {
                if (cached_block.size() == 0) cached_block = prop.unitary(segments[s], cfg.ideal_pulses);
                u = cached_block;
            } else {
                u = prop.unitary(segments[s], cfg.ideal_pulses);
            }
            rho = Propagator::apply(u, rho);
            samples[s][0] = signal_of(rho);
        }
    } else {
        const double dt = resolve_dt(whole, noise, cfg.dt);
        parallel_for(n_traj, cfg.threads, [&](std::size_t j) {
            const auto path = sample_trajectory(noise, total, dt, sys.size(), j);
            Matrix rho = rho0;
            for (std::size_t s = 0; s < n_seg; ++s) {
                rho = Propagator::apply(prop.unitary(segments[s], cfg.ideal_pulses, path, seg_start[s]), rho);
                samples[s][j] = signal_of(rho);
            }
        });
    }

    std::vector<SignalRow> rows;
    rows.push_back({0.0, 0, 1.0, 0.0, 1.0});
    for (std::size_t s = 0; s < n_seg; ++s) {
        const Estimate e = estimate(samples[s]);
        rows.push_back({seg_start[s] + segments[s].total_duration(), static_cast<int>(s + 1),
                        std::abs(e.mean), e.stderr_, e.mean});
    }
    return rows;
}

void write_signal_csv(const std::vector<SignalRow>& rows, std::ostream& out) {
    CsvWriter csv(out, {"time_s", "cycle_index", "signal", "stderr"});
    for (const auto& r : rows) {
        csv.cell(r.time).cell(r.cycle).cell(r.signal).cell(r.stderr_);
        csv.end_row();
    }
}

}  // namespace ddspin
