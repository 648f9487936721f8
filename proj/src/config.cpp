#include "ddspin/config.hpp"

#include "ddspin/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace ddspin {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string text = "invalid configuration:";
    for (const auto& p : problems) text += "\n  " + p;
    return text;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// The single place where configuration units become SI.
double to_si(const std::string& key, double value) {
    if (ends_with(key, "_us")) return value / 1e6;
    if (ends_with(key, "_ms")) return value / 1e3;
    if (ends_with(key, "_khz")) return value * 2.0 * std::numbers::pi * 1e3;
    return value;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "spins", "offsets_khz", "couplings_khz", "coupling_max_khz", "coupling_seed",
        "scheme", "pulses", "tau_us", "total_us", "tau_pi_us", "cycles",
        "noise", "noise_rms_rad_s", "noise_decay_us", "noise_tau_c_us", "noise_cutoff_rad_s",
        "noise_correlated", "seed", "n_traj", "dt_us", "ideal_pulses", "dipolar_during_dd",
        "mqc_cycles", "delta_us", "tau_half_pi_us", "n_max", "encoding_khz", "purge", "t_r_ms",
        "purge_n_traj", "t1_increment", "dd_after_t1", "parity_correction", "readout_us"};
    return keys;
}

class Document {
public:
    Document(std::istream& in, std::vector<std::string>& problems) : problems_(problems) {
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                problems_.push_back("line " + std::to_string(number) + ": expected key = value");
                continue;
            }
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string value = trim(std::string_view(line).substr(eq + 1));
            if (!known_keys().count(key)) {
                problems_.push_back(key + ": unknown key");
            } else if (values_.count(key)) {
                problems_.push_back(key + ": given more than once");
            } else if (value.empty()) {
                problems_.push_back(key + ": empty value");
            } else {
                values_[key] = value;
            }
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void require(const std::string& key) {
        if (!has(key)) problems_.push_back(key + ": required key missing");
    }

    std::optional<std::string> text(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    // Value in SI units.
    std::optional<double> number(const std::string& key) {
        const auto raw = text(key);
        if (!raw) return std::nullopt;
        const auto v = parse_double(*raw);
        if (!v) {
            problems_.push_back(key + ": not a number: '" + *raw + "'");
            return std::nullopt;
        }
        return to_si(key, *v);
    }

    std::optional<long long> integer(const std::string& key) {
        const auto raw = text(key);
        if (!raw) return std::nullopt;
        long long v = 0;
        const auto* end = raw->data() + raw->size();
        const auto [ptr, ec] = std::from_chars(raw->data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            problems_.push_back(key + ": not an integer: '" + *raw + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> flag(const std::string& key) {
        const auto raw = text(key);
        if (!raw) return std::nullopt;
        if (*raw == "true" || *raw == "yes" || *raw == "1") return true;
        if (*raw == "false" || *raw == "no" || *raw == "0") return false;
        problems_.push_back(key + ": expected true or false, got '" + *raw + "'");
        return std::nullopt;
    }

    std::optional<std::vector<double>> list(const std::string& key) {
        const auto raw = text(key);
        if (!raw) return std::nullopt;
        std::string s = *raw;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<double> out;
        std::string item;
        while (in >> item) {
            const auto v = parse_double(item);
            if (!v) {
                problems_.push_back(key + ": not a number: '" + item + "'");
                return std::nullopt;
            }
            out.push_back(to_si(key, *v));
        }
        return out;
    }

private:
    static std::optional<double> parse_double(const std::string& s) {
        double v = 0.0;
        const auto* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
        return v;
    }

    std::vector<std::string>& problems_;
    std::map<std::string, std::string> values_;
};

template <class F>
void check(std::vector<std::string>& problems, const std::string& key, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        problems.push_back(key + ": " + e.what());
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

RunConfig parse_config(std::istream& in, ConfigPurpose purpose) {
    std::vector<std::string> problems;
    Document doc(in, problems);
    RunConfig cfg;

    const bool needs_spins = purpose != ConfigPurpose::filter;
    if (needs_spins) doc.require("spins");
    if (purpose != ConfigPurpose::mqc) doc.require("scheme");
    if (purpose == ConfigPurpose::filter) doc.require("noise");

    // Spin system.
    int spins = purpose == ConfigPurpose::filter ? 1 : 0;
    if (const auto m = doc.integer("spins")) {
        if (*m < 1 || *m > kMaxSpins) {
            problems.push_back("spins: must be in [1, " + std::to_string(kMaxSpins) + "]");
        } else if (purpose == ConfigPurpose::mqc && *m < 2) {
            problems.push_back("spins: MQC experiments need at least 2 spins");
        } else if (purpose == ConfigPurpose::filter && *m != 1) {
            problems.push_back("spins: the filter analysis describes a single spin");
        } else {
            spins = static_cast<int>(*m);
        }
    }
    if (spins > 0) {
        std::vector<double> offsets(spins, 0.0);
        if (const auto o = doc.list("offsets_khz")) {
            if (static_cast<int>(o->size()) != spins) {
                problems.push_back("offsets_khz: expected " + std::to_string(spins) + " values");
            } else {
                offsets = *o;
            }
        }
        RealMatrix couplings = RealMatrix::Zero(spins, spins);
        const auto explicit_d = doc.list("couplings_khz");
        const auto max_d = doc.number("coupling_max_khz");
        const auto seed_d = doc.integer("coupling_seed");
        if (explicit_d && (max_d || seed_d)) {
            problems.push_back("couplings_khz: conflicts with coupling_max_khz/coupling_seed");
        } else if (explicit_d) {
            const auto pairs = static_cast<std::size_t>(spins * (spins - 1) / 2);
            if (explicit_d->size() != pairs) {
                problems.push_back("couplings_khz: expected " + std::to_string(pairs) +
                                   " upper-triangle values (row-major)");
            } else {
                std::size_t k = 0;
                for (int i = 0; i < spins; ++i) {
                    for (int j = i + 1; j < spins; ++j) {
                        couplings(i, j) = couplings(j, i) = (*explicit_d)[k++];
                    }
                }
            }
        } else if (max_d || seed_d) {
            if (!max_d) {
                problems.push_back("coupling_max_khz: required with coupling_seed");
            } else if (*max_d < 0.0) {
                problems.push_back("coupling_max_khz: must be >= 0");
            } else if (seed_d && *seed_d < 0) {
                problems.push_back("coupling_seed: must be >= 0");
            } else {
                couplings = SpinSystem::random_couplings(spins, *max_d, seed_d ? *seed_d : 1).couplings();
            }
        }
        check(problems, "spins", [&] { cfg.system = SpinSystem(offsets, couplings); });
    }

    // Decoupling block.
    if (const auto s = doc.text("scheme")) {
        check(problems, "scheme", [&] { cfg.scheme.name = parse_scheme_name(*s); });
    }
    if (const auto n = doc.integer("pulses")) {
        if (*n < 0) problems.push_back("pulses: must be >= 0");
        else cfg.scheme.pulses = static_cast<int>(*n);
    }
    if (const auto v = doc.number("tau_us")) cfg.scheme.tau = *v;
    if (const auto v = doc.number("total_us")) cfg.scheme.total = *v;
    if (const auto v = doc.number("tau_pi_us")) cfg.scheme.tau_pi = *v;
    if (const auto n = doc.integer("cycles")) {
        if (*n < 1) problems.push_back("cycles: must be >= 1");
        else cfg.scheme.cycles = static_cast<int>(*n);
    }
    if (purpose == ConfigPurpose::mqc && !doc.has("scheme") && !doc.has("total_us")) {
        cfg.scheme.total = 0.0;
    }
    if (doc.has("scheme") || purpose == ConfigPurpose::mqc) {
        check(problems, "scheme", [&] { cfg.scheme.validate(); });
    }

    // Noise.
    if (const auto s = doc.text("noise")) {
        check(problems, "noise", [&] { cfg.noise.kind = parse_noise_kind(*s); });
    }
    if (const auto v = doc.number("noise_tau_c_us")) cfg.noise.correlation_time = *v;
    if (const auto v = doc.number("noise_cutoff_rad_s")) cfg.noise.cutoff = *v;
    if (const auto b = doc.flag("noise_correlated")) cfg.noise.correlated = *b;
    if (const auto seed = doc.integer("seed")) {
        if (*seed < 0) problems.push_back("seed: must be >= 0");
        else cfg.noise.seed = static_cast<std::uint64_t>(*seed);
    }
    const auto rms = doc.number("noise_rms_rad_s");
    const auto decay = doc.number("noise_decay_us");
    if (rms && decay) {
        problems.push_back("noise_rms_rad_s: conflicts with noise_decay_us");
    } else if (rms) {
        cfg.noise.rms = *rms;
    } else if (decay) {
        check(problems, "noise_decay_us", [&] {
            if (cfg.noise.kind == NoiseKind::static_gaussian) {
                cfg.noise.rms = static_rms_for_decay(*decay);
            } else if (cfg.noise.kind == NoiseKind::ornstein_uhlenbeck) {
                cfg.noise.rms = ou_rms_for_decay(*decay, cfg.noise.correlation_time);
            } else {
                throw std::invalid_argument("calibration is defined for static and ou noise only");
            }
        });
    } else if (cfg.noise.kind != NoiseKind::none) {
        problems.push_back("noise_rms_rad_s: required unless noise_decay_us is given");
    }
    check(problems, "noise", [&] { cfg.noise.validate(); });

    // Propagation.
    if (const auto n = doc.integer("n_traj")) {
        if (*n < 1) problems.push_back("n_traj: must be >= 1");
        else cfg.prop.n_traj = static_cast<int>(*n);
    }
    if (const auto v = doc.number("dt_us")) cfg.prop.dt = *v;
    if (const auto b = doc.flag("ideal_pulses")) cfg.prop.ideal_pulses = *b;
    if (const auto b = doc.flag("dipolar_during_dd")) cfg.prop.include_dipolar = *b;
    check(problems, "n_traj", [&] { cfg.prop.validate(cfg.noise); });

    // MQC protocol.
    if (const auto n = doc.integer("mqc_cycles")) cfg.mqc.cycles = static_cast<int>(*n);
    if (const auto v = doc.number("delta_us")) cfg.mqc.delta = *v;
    if (const auto v = doc.number("tau_half_pi_us")) cfg.mqc.tau_half_pi = *v;
    if (const auto n = doc.integer("n_max")) cfg.mqc.n_max = static_cast<int>(*n);
    if (const auto v = doc.number("encoding_khz")) cfg.mqc.encoding_omega = *v;
    if (const auto s = doc.text("purge")) {
        if (*s == "projection") cfg.mqc.purge_mode = PurgeMode::projection;
        else if (*s == "evolve") cfg.mqc.purge_mode = PurgeMode::evolve;
        else problems.push_back("purge: expected projection or evolve, got '" + *s + "'");
    }
    if (const auto v = doc.number("t_r_ms")) cfg.mqc.purge.t_r = *v;
    if (const auto n = doc.integer("purge_n_traj")) {
        if (*n < 1) problems.push_back("purge_n_traj: must be >= 1");
        else cfg.mqc.purge.n_traj = static_cast<int>(*n);
    }
    if (const auto b = doc.flag("t1_increment")) cfg.mqc.t1_increment = *b;
    if (const auto b = doc.flag("dd_after_t1")) cfg.mqc.dd_after_t1 = *b;
    if (const auto b = doc.flag("parity_correction")) cfg.mqc.parity_correction = *b;
    cfg.mqc.scheme = cfg.scheme;
    cfg.mqc.prop = cfg.prop;
    cfg.mqc.purge.seed = cfg.noise.seed;
    if (purpose == ConfigPurpose::mqc && spins >= 2) {
        check(problems, "mqc", [&] { cfg.mqc.validate(cfg.system, cfg.noise); });
    }

    if (const auto r = doc.list("readout_us")) {
        if (!std::is_sorted(r->begin(), r->end()) || (!r->empty() && r->front() <= 0.0)) {
            problems.push_back("readout_us: must be positive and increasing");
        } else {
            cfg.readout_times = *r;
        }
    }

    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, ConfigPurpose purpose) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
    return parse_config(in, purpose);
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg, ConfigPurpose purpose) {
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&](std::string key, std::string value) { out.emplace_back(std::move(key), std::move(value)); };
    auto num = [](double v) { return format_number(v); };
    auto list = [](const auto& values) {
        std::string s;
        for (double v : values) s += (s.empty() ? "" : ",") + format_number(v);
        return s;
    };

    const SpinSystem& sys = cfg.system;
    add("spins", std::to_string(sys.size()));
    add("offsets_rad_s", list(sys.offsets()));
    std::vector<double> upper;
    for (int i = 0; i < sys.size(); ++i) {
        for (int j = i + 1; j < sys.size(); ++j) upper.push_back(sys.coupling(i, j));
    }
    add("couplings_rad_s", list(upper));

    const DDScheme& s = cfg.scheme;
    add("scheme", std::string(scheme_label(s.name)));
    add("pulses", std::to_string(s.pulses));
    add("tau_s", s.tau ? num(*s.tau) : "");
    add("total_s", s.total ? num(*s.total) : "");
    add("tau_pi_s", num(s.tau_pi));
    add("cycles", std::to_string(s.cycles));

    const NoiseModel& n = cfg.noise;
    add("noise", std::string(noise_label(n.kind)));
    add("noise_rms_rad_s", num(n.rms));
    add("noise_tau_c_s", num(n.correlation_time));
    add("noise_cutoff_rad_s", num(n.cutoff));
    add("noise_correlated", n.correlated ? "true" : "false");
    add("seed", std::to_string(n.seed));
    add("n_traj", std::to_string(cfg.prop.n_traj));
    add("dt_s", num(cfg.prop.dt));
    add("ideal_pulses", cfg.prop.ideal_pulses ? "true" : "false");
    add("dipolar_during_dd", cfg.prop.include_dipolar ? "true" : "false");

    if (purpose == ConfigPurpose::mqc) {
        const MqcConfig& m = cfg.mqc;
        add("mqc_cycles", std::to_string(m.cycles));
        add("delta_s", num(m.delta));
        add("tau_half_pi_s", num(m.tau_half_pi));
        add("n_max", std::to_string(m.n_max));
        add("encoding_rad_s", num(m.encoding_omega));
        add("purge", m.purge_mode == PurgeMode::projection ? "projection" : "evolve");
        add("t_r_s", num(m.purge.t_r));
        add("purge_n_traj", std::to_string(m.purge.n_traj));
        add("t1_increment", m.t1_increment ? "true" : "false");
        add("dd_after_t1", m.dd_after_t1 ? "true" : "false");
        add("parity_correction", m.parity_correction ? "true" : "false");
    }
    if (purpose == ConfigPurpose::sqc) add("readout_s", list(cfg.readout_times));
    return out;
}

}  // namespace ddspin
