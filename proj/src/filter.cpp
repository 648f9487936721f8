#include "ddspin/filter.hpp"

#include "ddspin/csv.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace ddspin {

using std::numbers::pi;

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

// Globally adaptive Gauss-Kronrod: the panel with the largest error estimate
// is bisected until the summed error is below rel_tol * |integral|.
template <class F>
Integral integrate_panels(F&& f, const std::vector<double>& breaks, double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto rule = [&](double a, double b) {
        double err = 0.0;
        const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
        return Panel{a, b, v, err};
    };
    std::priority_queue<Panel> queue;
    Integral total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Panel p = rule(breaks[i], breaks[i + 1]);
        total.value += p.value;
        total.error += p.error;
        queue.push(p);
    }
    for (int split = 0; split < 200000 && total.error > rel_tol * std::abs(total.value); ++split) {
        const Panel worst = queue.top();
        if (worst.error <= std::numeric_limits<double>::min()) break;
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = rule(worst.a, mid), right = rule(mid, worst.b);
        total.value += left.value + right.value - worst.value;
        total.error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    // Re-sum to drop the drift of the running updates.
    total = {};
    while (!queue.empty()) {
        total.value += queue.top().value;
        total.error += queue.top().error;
        queue.pop();
    }
    if (total.error > rel_tol * std::abs(total.value)) {
        throw std::runtime_error("filter: quadrature did not reach the requested tolerance");
    }
    return total;
}

}  // namespace

std::vector<double> switching_times(const PulseSequence& seq) {
    std::vector<double> times{0.0};
    for (const auto& e : seq.events()) {
        if (e.is_pulse() && std::abs(e.flip - pi) > 1e-9) {
            throw std::invalid_argument("filter: only pi pulses have a switching-function model");
        }
    }
    for (double c : seq.pulse_centers()) times.push_back(c);
    times.push_back(seq.total_duration());
    return times;
}

double switching_spectrum(const std::vector<double>& times, double omega) {
    std::complex<double> y{0.0, 0.0};
    double sign = 1.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        const double length = times[j + 1] - times[j];
        const double mid = 0.5 * (times[j + 1] + times[j]);
        y += sign * length * sinc(0.5 * omega * length) * std::polar(1.0, omega * mid);
        sign = -sign;
    }
    return std::norm(y);
}

double filter_function(const PulseSequence& seq, double omega) {
    return 0.5 * omega * omega * switching_spectrum(switching_times(seq), omega);
}

std::vector<FilterPoint> filter_grid(const PulseSequence& seq, int points) {
    const auto times = switching_times(seq);
    const double t = times.back();
    if (!(t > 0.0)) throw std::invalid_argument("filter: sequence has zero duration");
    if (points < 2) throw std::invalid_argument("filter: grid needs at least 2 points");
    std::vector<FilterPoint> grid;
    grid.reserve(points);
    const double lo = std::log(1e-2 / t);
    const double hi = std::log(1e3 / t);
    for (int i = 0; i < points; ++i) {
        const double w = std::exp(lo + (hi - lo) * i / (points - 1));
        grid.push_back({w, 0.5 * w * w * switching_spectrum(times, w)});
    }
    return grid;
}

FilterResult chi(const PulseSequence& seq, const NoiseModel& model) {
    model.validate();
    if (model.kind == NoiseKind::static_gaussian) {
        throw std::invalid_argument("filter: static noise has no finite spectral density");
    }
    const auto times = switching_times(seq);
    const double t = times.back();
    if (!(t > 0.0)) throw std::invalid_argument("filter: sequence has zero duration");

    FilterResult result;
    result.duration = t;
    result.grid = filter_grid(seq);
    if (!model.active()) return result;

    double min_gap = t;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        const double gap = times[j + 1] - times[j];
        if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
    const double slow = model.kind == NoiseKind::ornstein_uhlenbeck
                            ? std::min(1.0 / t, 1.0 / model.correlation_time)
                            : 1.0 / t;
    double upper = 0.0;
    if (model.kind == NoiseKind::hard_cutoff) {
        upper = model.cutoff;
    } else {
        upper = std::max(200.0 / min_gap, 100.0 / model.correlation_time);
    }

    // Log-spaced breaks resolve the low-frequency structure, uniform breaks
    // of about half an oscillation of |Y|^2 cover the rest.
    std::vector<double> breaks{0.0};
    const double knee = std::min(pi / t, upper);
    for (double w = 1e-4 * slow; w < knee; w *= std::pow(10.0, 0.1)) breaks.push_back(w);
    const double step = std::max(pi / t, (upper - knee) / 20000.0);
    for (double w = knee; w < upper; w += step) breaks.push_back(w);
    breaks.push_back(upper);
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto integrand = [&](double w) { return spectral_density(model, w) * switching_spectrum(times, w); };
    const Integral body = integrate_panels(integrand, breaks, 1e-6);
    if (!std::isfinite(body.value)) throw std::runtime_error("filter: quadrature failed");

    double tail = 0.0;
    if (model.kind == NoiseKind::ornstein_uhlenbeck) {
        // Beyond `upper`, S ~ b^2/(pi tau_c w^2) and |Y|^2 averages to
        // (sum of squared jump sizes)/w^2 = (2 + 4N)/w^2.
        const double jumps = 2.0 + 4.0 * static_cast<double>(times.size() - 2);
        tail = model.rms * model.rms * jumps / (3.0 * pi * model.correlation_time * std::pow(upper, 3));
    }
    result.chi = std::max(0.0, body.value + tail);
    result.predicted = std::exp(-result.chi);
    return result;
}

void write_filter_csv(const FilterResult& result, std::ostream& out) {
    CsvWriter csv(out, {"omega_rad_s", "F"});
    for (const auto& p : result.grid) {
        csv.cell(p.omega).cell(p.value);
        csv.end_row();
    }
}

void write_filter_summary_csv(const FilterResult& result, std::ostream& out) {
    CsvWriter csv(out, {"T_s", "chi", "predicted_signal"});
    csv.cell(result.duration).cell(result.chi).cell(result.predicted);
    csv.end_row();
}

}  // namespace ddspin
