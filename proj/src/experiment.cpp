#include "ddspin/experiment.hpp"

#include "ddspin/csv.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace ddspin {

using std::numbers::pi;

double MqcConfig::phase_step() const { return pi / n_max; }

double MqcConfig::t1_step() const { return phase_step() / encoding_omega; }

void MqcConfig::validate(const SpinSystem& sys, const NoiseModel& noise) const {
    if (cycles < 1) throw std::invalid_argument("MqcConfig: preparation cycles m must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("MqcConfig: delta must be >= 0");
    if (!(tau_half_pi >= 0.0)) throw std::invalid_argument("MqcConfig: tau_pi/2 must be >= 0");
    if (n_max < 1) throw std::invalid_argument("MqcConfig: n_max must be >= 1");
    if (!(encoding_omega > 0.0)) throw std::invalid_argument("MqcConfig: encoding frequency must be > 0");
    if (sys.size() < 2) throw std::invalid_argument("MqcConfig: MQC experiments need M >= 2");
    scheme.validate();
    prop.validate(noise);
}

double MqcResult::intensity(int order) const {
    for (const auto& o : spectrum) {
        if (o.order == order) return o.intensity;
    }
    return 0.0;
}

double MqcResult::stderr_of(int order) const {
    for (const auto& o : spectrum) {
        if (o.order == order) return o.stderr_;
    }
    return 0.0;
}

std::vector<double> cosine_transform(const std::vector<double>& signal, int n_max) {
    const auto k_count = static_cast<std::size_t>(2 * n_max);
    if (n_max < 1 || signal.size() != k_count) {
        throw std::invalid_argument("cosine_transform: expected 2 n_max samples");
    }
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(k_count);
    std::vector<double> out(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            // reduce n k mod 2 n_max so the cosine argument stays exact
            const auto r = static_cast<double>((static_cast<std::size_t>(n) * k) % k_count);
            acc += (signal[k] - mean) * std::cos(pi * r / n_max);
        }
        const double weight = (n == n_max) ? 1.0 : 2.0;
        out[n] = weight * acc / static_cast<double>(k_count);
    }
    return out;
}

State purge(const SpinSystem& sys, const State& rho, PurgeMode mode, const PurgeSettings& settings) {
    if (mode == PurgeMode::projection) {
        return {coherence_block(sys, rho.rho, 0), rho.scale};
    }
    if (!(settings.t_r > 0.0)) throw std::invalid_argument("purge: t_R must be > 0");
    NoiseModel dephasing;
    dephasing.kind = NoiseKind::static_gaussian;
    dephasing.rms = settings.rms > 0.0 ? settings.rms : 10.0 / settings.t_r;
    dephasing.correlated = true;
    dephasing.seed = settings.seed;
    PropagationConfig pc;
    pc.n_traj = settings.n_traj;
    pc.threads = 1;
    PulseSequence wait;
    wait.append(SequenceEvent::delay(settings.t_r));
    return propagate(rho, wait, sys, dephasing, pc);
}

namespace {

struct Pipeline {
    const SpinSystem& sys;
    const MqcConfig& cfg;
    Propagator full;
    Propagator dd_prop;
    PulseSequence prep;
    PulseSequence dd;
    Matrix detect_rot;
    Matrix ix;
    double reference = 1.0;
    double parity = 1.0;

    Pipeline(const SpinSystem& s, const MqcConfig& c)
        : sys(s),
          cfg(c),
          full(s, true),
          dd_prop(s, c.prop.include_dipolar),
          prep(gen_mqc_cycle(c.delta, c.tau_half_pi, 0.0, c.cycles)) {
        if (c.scheme.name != SchemeName::none || c.scheme.block_duration() > 0.0) {
            dd = gen_dd(c.scheme);
        }
        detect_rot = collective_rotation(s, Axis::y, pi / 2, 0.0).matrix;
        ix = total_spin_op(s, Axis::x).matrix;
        const Matrix rho_ref = Propagator::apply(detect_rot, thermal_state(s).rho);
        reference = overlap(rho_ref);
        if (c.parity_correction && dd.pulse_count() % 2 == 1) parity = -1.0;
    }

    double overlap(const Matrix& rho) const { return ix.conjugate().cwiseProduct(rho).sum().real(); }

    double alpha(int k) const { return k * cfg.phase_step(); }
    double t1(int k) const { return cfg.t1_increment ? k * cfg.t1_step() : 0.0; }

    PulseSequence mixing(int k) const {
        return gen_mqc_cycle(cfg.delta, cfg.tau_half_pi, pi / 2 + alpha(k), cfg.cycles);
    }

    static PulseSequence wait(double t) {
        PulseSequence s;
        if (t > 0.0) s.append(SequenceEvent::delay(t));
        return s;
    }

    double detect(const Matrix& rho) const {
        const State purged = purge(sys, State{rho, 1.0}, cfg.purge_mode, cfg.purge);
        return overlap(Propagator::apply(detect_rot, purged.rho)) / reference;
    }
};

MqcResult assemble(const Pipeline& p, const std::vector<std::vector<double>>& samples) {
    const MqcConfig& cfg = p.cfg;
    const int k_count = cfg.increments();
    const std::size_t n_traj = samples.front().size();
    MqcResult result;
    std::vector<double> mean_signal(k_count);
    for (int k = 0; k < k_count; ++k) {
        const Estimate e = estimate(samples[k]);
        mean_signal[k] = p.parity * e.mean;
        result.sweep.push_back({k, p.alpha(k), p.t1(k), p.parity * e.mean, e.stderr_, e.mean});
    }
    const auto intensity = cosine_transform(mean_signal, cfg.n_max);
    std::vector<std::vector<double>> per_traj(cfg.n_max + 1, std::vector<double>(n_traj, 0.0));
    if (n_traj > 1) {
        std::vector<double> column(k_count);
        for (std::size_t j = 0; j < n_traj; ++j) {
            for (int k = 0; k < k_count; ++k) column[k] = p.parity * samples[k][j];
            const auto t = cosine_transform(column, cfg.n_max);
            for (int n = 0; n <= cfg.n_max; ++n) per_traj[n][j] = t[n];
        }
    }
    for (int n = 0; n <= cfg.n_max; ++n) {
        const double se = n_traj > 1 ? estimate(per_traj[n]).stderr_ : 0.0;
        result.spectrum.push_back({n, intensity[n], se});
    }
    if (p.sys.size() > cfg.n_max) {
        result.warnings.push_back("aliasing: M = " + std::to_string(p.sys.size()) +
                                  " exceeds n_max = " + std::to_string(cfg.n_max));
    }
    return result;
}

}  // namespace

MqcResult run_mqc(const SpinSystem& sys, const MqcConfig& cfg, const NoiseModel& noise) {
    cfg.validate(sys, noise);
    noise.validate();
    const Pipeline p(sys, cfg);
    const bool ideal = cfg.prop.ideal_pulses;
    const int k_count = cfg.increments();
    const auto n_traj = static_cast<std::size_t>(cfg.prop.n_traj);
    std::vector<std::vector<double>> samples(k_count, std::vector<double>(n_traj, 0.0));
    const Matrix rho0 = thermal_state(sys).rho;

    if (noise.kind == NoiseKind::none) {
        Matrix rho_pre = Propagator::apply(p.full.unitary(p.prep, ideal), rho0);
        const Matrix u_dd = p.dd_prop.unitary(p.dd, ideal);
        if (!cfg.dd_after_t1) rho_pre = Propagator::apply(u_dd, rho_pre);
        parallel_for(k_count, cfg.prop.threads, [&](std::size_t k) {
            Matrix rho = Propagator::apply(p.full.unitary(Pipeline::wait(p.t1(k)), false), rho_pre);
            if (cfg.dd_after_t1) rho = Propagator::apply(u_dd, rho);
            rho = Propagator::apply(p.full.unitary(p.mixing(static_cast<int>(k)), ideal), rho);
            samples[k][0] = p.detect(rho);
        });
        return assemble(p, samples);
    }

    // One noise path per trajectory spans the whole protocol; the t1 wait is
    // split on the same grid but does not constrain its step.
    auto stage = [&](const PulseSequence& s) { return ideal ? as_ideal(s) : s; };
    const PulseSequence mix0 = stage(p.mixing(0));
    double dt = resolve_dt(stage(p.prep), noise, cfg.prop.dt);
    dt = std::min(dt, resolve_dt(mix0, noise, cfg.prop.dt));
    if (!p.dd.empty()) dt = std::min(dt, resolve_dt(stage(p.dd), noise, cfg.prop.dt));
    const double t_prep = p.prep.total_duration();
    const double t_dd = p.dd.total_duration();
    const double total = t_prep + t_dd + p.t1(k_count - 1) + mix0.total_duration();
    if (noise.kind == NoiseKind::static_gaussian) dt = total;

    parallel_for(n_traj, cfg.prop.threads, [&](std::size_t j) {
        const auto path = sample_trajectory(noise, total, dt, sys.size(), j);
        Matrix rho_pre = Propagator::apply(p.full.unitary(p.prep, ideal, path, 0.0), rho0);
        double t_pre = t_prep;
        if (!cfg.dd_after_t1 && !p.dd.empty()) {
            rho_pre = Propagator::apply(p.dd_prop.unitary(p.dd, ideal, path, t_pre), rho_pre);
            t_pre += t_dd;
        }
        for (int k = 0; k < k_count; ++k) {
            double t = t_pre;
            Matrix rho = rho_pre;
            const double t1 = p.t1(k);
            if (t1 > 0.0) {
                rho = Propagator::apply(p.full.unitary(Pipeline::wait(t1), false, path, t), rho);
                t += t1;
            }
            if (cfg.dd_after_t1 && !p.dd.empty()) {
                rho = Propagator::apply(p.dd_prop.unitary(p.dd, ideal, path, t), rho);
                t += t_dd;
            }
            rho = Propagator::apply(p.full.unitary(p.mixing(k), ideal, path, t), rho);
            samples[k][j] = p.detect(rho);
        }
    });
    return assemble(p, samples);
}

MqcResult encode_injected(const SpinSystem& sys, const MqcConfig& cfg, const State& injected) {
    MqcConfig plain = cfg;
    plain.scheme = DDScheme{};
    plain.scheme.total = 0.0;
    plain.prop.n_traj = 1;
    const NoiseModel quiet;
    plain.validate(sys, quiet);
    const Pipeline p(sys, plain);
    const int k_count = plain.increments();
    std::vector<std::vector<double>> samples(k_count, std::vector<double>(1, 0.0));
    parallel_for(k_count, plain.prop.threads, [&](std::size_t k) {
        Matrix rho = Propagator::apply(p.full.unitary(Pipeline::wait(p.t1(k)), false), injected.rho);
        rho = Propagator::apply(p.full.unitary(p.mixing(static_cast<int>(k)), plain.prop.ideal_pulses), rho);
        samples[k][0] = p.detect(rho);
    });
    return assemble(p, samples);
}

std::vector<ScanEntry> dd_on_mqc_scan(const SpinSystem& sys, const MqcConfig& cfg,
                                      const NoiseModel& noise, const std::vector<int>& pulse_counts,
                                      SchemeName family, double tau, const std::vector<int>& orders) {
    auto tabulate = [&](ScanEntry entry, const MqcConfig& c) {
        try {
            const MqcResult r = run_mqc(sys, c, noise);
            for (int n : orders) entry.intensity[n] = {n, r.intensity(n), r.stderr_of(n)};
        } catch (const DomainError& err) {
            entry.error = err.what();
        }
        return entry;
    };
    std::vector<ScanEntry> table;
    MqcConfig reference = cfg;
    reference.scheme = DDScheme{};
    reference.scheme.total = 0.0;
    table.push_back(tabulate(ScanEntry{0, SchemeName::none, 0.0, {}, {}}, reference));

    for (int n : pulse_counts) {
        MqcConfig with_dd = cfg;
        with_dd.scheme = DDScheme{family, n, tau, std::nullopt, cfg.scheme.tau_pi, 1};
        const double block = n * (2.0 * tau + cfg.scheme.tau_pi);
        table.push_back(tabulate(ScanEntry{n, family, block, {}, {}}, with_dd));

        MqcConfig delay_only = cfg;
        delay_only.scheme = DDScheme{};
        delay_only.scheme.total = block;
        table.push_back(tabulate(ScanEntry{n, SchemeName::none, block, {}, {}}, delay_only));
    }
    return table;
}

void write_spectrum_csv(const MqcResult& result, std::ostream& out) {
    CsvWriter csv(out, {"order", "intensity", "stderr"});
    for (const auto& o : result.spectrum) {
        csv.cell(o.order).cell(o.intensity).cell(o.stderr_);
        csv.end_row();
    }
}

void write_sweep_csv(const MqcResult& result, std::ostream& out) {
    CsvWriter csv(out, {"k", "alpha_rad", "t1_s", "signal"});
    for (const auto& s : result.sweep) {
        csv.cell(s.k).cell(s.alpha).cell(s.t1).cell(s.signal);
        csv.end_row();
    }
}

}  // namespace ddspin
