#include "ddspin/noise.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddspin {

using std::numbers::pi;

std::string_view noise_label(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::static_gaussian: return "static";
    case NoiseKind::ornstein_uhlenbeck: return "ou";
    case NoiseKind::hard_cutoff: return "hard_cutoff";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view text) {
    for (auto k : {NoiseKind::none, NoiseKind::static_gaussian, NoiseKind::ornstein_uhlenbeck,
                   NoiseKind::hard_cutoff}) {
        if (text == noise_label(k)) return k;
    }
    throw std::invalid_argument("unknown noise kind '" + std::string(text) +
                                "' (expected none, static, ou, hard_cutoff)");
}

void NoiseModel::validate() const {
    if (!(rms >= 0.0)) throw std::invalid_argument("NoiseModel: rms amplitude must be >= 0");
    if (kind == NoiseKind::ornstein_uhlenbeck && !(correlation_time > 0.0)) {
        throw std::invalid_argument("NoiseModel: OU correlation time must be > 0");
    }
    if (kind == NoiseKind::hard_cutoff && !(cutoff > 0.0)) {
        throw std::invalid_argument("NoiseModel: hard-cutoff frequency must be > 0");
    }
}

NoiseModel NoiseModel::scaled(double factor) const {
    NoiseModel out = *this;
    out.rms *= factor;
    return out;
}

NoiseTrajectory::NoiseTrajectory(double dt, Eigen::MatrixXd values)
    : dt_(dt), values_(std::move(values)) {}

double NoiseTrajectory::value(int step, int spin) const {
    if (values_.rows() == 0) return 0.0;
    if (step >= values_.rows()) step = static_cast<int>(values_.rows()) - 1;
    return values_(step, spin);
}

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t column) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trajectory),
                      static_cast<std::uint32_t>(trajectory >> 32),
                      static_cast<std::uint32_t>(column)};
    return std::mt19937_64(seq);
}

void fill_column(const NoiseModel& model, double dt, std::mt19937_64& rng,
                 Eigen::Ref<Eigen::VectorXd> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index steps = out.size();
    const double b = model.rms;
    switch (model.kind) {
    case NoiseKind::none:
        out.setZero();
        return;
    case NoiseKind::static_gaussian:
        out.setConstant(b * normal(rng));
        return;
    case NoiseKind::ornstein_uhlenbeck: {
        // exact Gauss-Markov update, stationary start
        const double decay = std::exp(-dt / model.correlation_time);
        const double kick = b * std::sqrt(-std::expm1(-2.0 * dt / model.correlation_time));
        double x = b * normal(rng);
        for (Eigen::Index k = 0; k < steps; ++k) {
            out(k) = x;
            x = x * decay + kick * normal(rng);
        }
        return;
    }
    case NoiseKind::hard_cutoff: {
        // sum of stratified-frequency cosines with Gaussian quadratures
        const int n = kCutoffComponents;
        const double sigma = b / std::sqrt(static_cast<double>(n));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::vector<std::complex<double>> phasor(n), step(n), weight(n);
        for (int k = 0; k < n; ++k) {
            const double w = model.cutoff * (k + uniform(rng)) / n;
            const double a = sigma * normal(rng);
            const double s = sigma * normal(rng);
            // Re[(a - i s) e^{iwt}] = a cos(wt) + s sin(wt); sample at cell midpoints
            weight[k] = {a, -s};
            phasor[k] = std::polar(1.0, w * dt / 2);
            step[k] = std::polar(1.0, w * dt);
        }
        for (Eigen::Index t = 0; t < steps; ++t) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) {
                v += (weight[k] * phasor[k]).real();
                phasor[k] *= step[k];
            }
            out(t) = v;
        }
        return;
    }
    }
}

}  // namespace

NoiseTrajectory sample_trajectory(const NoiseModel& model, double total, double dt, int spins,
                                  std::uint64_t trajectory) {
    model.validate();
    if (!(total > 0.0)) throw std::invalid_argument("sample_trajectory: T_total must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("sample_trajectory: dt must be > 0");
    if (spins < 1) throw std::invalid_argument("sample_trajectory: spins must be >= 1");
    const auto steps = static_cast<Eigen::Index>(std::ceil(total / dt * (1.0 - 1e-12)));
    Eigen::MatrixXd values(std::max<Eigen::Index>(steps, 1), spins);
    if (model.correlated) {
        auto rng = stream_for(model.seed, trajectory, 0);
        fill_column(model, dt, rng, values.col(0));
        for (int i = 1; i < spins; ++i) values.col(i) = values.col(0);
    } else {
        for (int i = 0; i < spins; ++i) {
            auto rng = stream_for(model.seed, trajectory, static_cast<std::uint64_t>(i));
            fill_column(model, dt, rng, values.col(i));
        }
    }
    return NoiseTrajectory(dt, std::move(values));
}

double spectral_density(const NoiseModel& model, double omega) {
    model.validate();
    if (omega < 0.0) throw std::invalid_argument("spectral_density: omega must be >= 0");
    const double b2 = model.rms * model.rms;
    switch (model.kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::static_gaussian:
        throw std::invalid_argument("spectral_density: static noise has no finite density");
    case NoiseKind::ornstein_uhlenbeck: {
        const double tc = model.correlation_time;
        return b2 * tc / (pi * (1.0 + omega * omega * tc * tc));
    }
    case NoiseKind::hard_cutoff:
        return omega <= model.cutoff ? b2 / (2.0 * model.cutoff) : 0.0;
    }
    return 0.0;
}

double autocorrelation(const NoiseModel& model, double lag) {
    const double b2 = model.rms * model.rms;
    switch (model.kind) {
    case NoiseKind::none: return 0.0;
    case NoiseKind::static_gaussian: return b2;
    case NoiseKind::ornstein_uhlenbeck: return b2 * std::exp(-std::abs(lag) / model.correlation_time);
    case NoiseKind::hard_cutoff: {
        const double x = model.cutoff * lag;
        return x == 0.0 ? b2 : b2 * std::sin(x) / x;
    }
    }
    return 0.0;
}

double max_noise_dt(const NoiseModel& model) {
    switch (model.kind) {
    case NoiseKind::ornstein_uhlenbeck: return model.correlation_time / 10.0;
    case NoiseKind::hard_cutoff: return pi / (10.0 * model.cutoff);
    default: return std::numeric_limits<double>::infinity();
    }
}

double static_rms_for_decay(double decay_time) {
    if (!(decay_time > 0.0)) throw std::invalid_argument("decay time must be > 0");
    return std::sqrt(2.0) / decay_time;
}

double ou_rms_for_decay(double decay_time, double correlation_time) {
    if (!(decay_time > 0.0) || !(correlation_time > 0.0)) {
        throw std::invalid_argument("decay and correlation times must be > 0");
    }
    const double x = decay_time / correlation_time;
    const double shape = x + std::expm1(-x);  // x - 1 + e^{-x}
    return 1.0 / (correlation_time * std::sqrt(shape));
}

}  // namespace ddspin
