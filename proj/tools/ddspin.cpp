// ddspin: command-line front end.
//
//   ddspin dump   --scheme udd --n 7 --t 58.1us --tau-pi 4.3us
//   ddspin sqc    --config run.cfg --out results/
//   ddspin mqc    --config run.cfg --out results/
//   ddspin filter --config run.cfg --out results/
//
// Exit status: 0 success, 1 unrealizable configuration, 2 usage or config error.

#include "ddspin/config.hpp"
#include "ddspin/csv.hpp"
#include "ddspin/experiment.hpp"
#include "ddspin/filter.hpp"
#include "ddspin/propagate.hpp"
#include "ddspin/sequence.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ddspin;

namespace {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "58.1us", "4.3 us", "2ms", "10ns", "1e-6" (seconds).
double parse_duration(const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{}) throw UsageError("not a duration: '" + text + "'");
    std::string unit(ptr, end);
    unit.erase(0, unit.find_first_not_of(' '));
    if (unit.empty() || unit == "s") return value;
    if (unit == "ms") return value / 1e3;
    if (unit == "us") return value / 1e6;
    if (unit == "ns") return value / 1e9;
    throw UsageError("unknown time unit '" + unit + "' in '" + text + "' (use s, ms, us, ns)");
}

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

struct Outputs {
    fs::path dir;
    bool force;

    // Refuses to touch anything unless every target is writable.
    void claim(const std::vector<std::string>& names) const {
        fs::create_directories(dir);
        if (force) return;
        for (const auto& n : names) {
            if (fs::exists(dir / n)) {
                throw UsageError("refusing to overwrite " + (dir / n).string() + " (use --force)");
            }
        }
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    }
};

RunConfig load(const Common& c, ConfigPurpose purpose, unsigned threads) {
    RunConfig cfg = load_config(c.config, purpose);
    if (c.seed) {
        cfg.noise.seed = *c.seed;
        cfg.mqc.purge.seed = *c.seed;
    }
    cfg.prop.threads = threads;
    cfg.mqc.prop.threads = threads;
    return cfg;
}

void write_manifest(const Outputs& out, const std::string& subcommand, const Common& c, int verbosity,
                    const RunConfig& cfg, ConfigPurpose purpose) {
    auto f = out.open("manifest.txt");
    f << "subcommand = " << subcommand << '\n';
    f << "config = " << c.config << '\n';
    f << "output_dir = " << out.dir.string() << '\n';
    f << "seed_override = " << (c.seed ? std::to_string(*c.seed) : std::string("none")) << '\n';
    f << "verbosity = " << verbosity << '\n';
    for (const auto& [key, value] : describe(cfg, purpose)) f << key << " = " << value << '\n';
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory")->required();
    cmd->add_option("--seed", c.seed, "override the configured noise seed");
    cmd->add_flag("--force", c.force, "overwrite existing output files");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dipolar spin clusters under dynamical decoupling"};
    app.require_subcommand(1);
    unsigned threads = 0;
    int verbosity = 0;
    app.add_option("--threads", threads, "worker thread cap (0: all cores)");
    app.add_flag("-v,--verbose", verbosity, "report progress on stderr");

    auto* dump_cmd = app.add_subcommand("dump", "print the event list of a decoupling block");
    std::string scheme_text;
    int pulses = 0;
    std::string total_text, tau_text, tau_pi_text = "0";
    int cycles = 1;
    dump_cmd->add_option("--scheme", scheme_text, "none, cpmg, cpmgp, udd, uddp, rudd, ruddp")->required();
    dump_cmd->add_option("--n", pulses, "number of pi pulses")->required();
    dump_cmd->add_option("--t", total_text, "block duration, e.g. 58.1us");
    dump_cmd->add_option("--tau", tau_text, "CPMG half gap, e.g. 2us");
    dump_cmd->add_option("--tau-pi", tau_pi_text, "pi pulse width, e.g. 4.3us");
    dump_cmd->add_option("--cycles", cycles, "block repetitions");

    Common sqc_opts, mqc_opts, filter_opts;
    auto* sqc_cmd = app.add_subcommand("sqc", "single-quantum signal under repeated DD blocks");
    add_common(sqc_cmd, sqc_opts);
    auto* mqc_cmd = app.add_subcommand("mqc", "multiple-quantum spin-counting spectrum");
    add_common(mqc_cmd, mqc_opts);
    auto* filter_cmd = app.add_subcommand("filter", "filter function and attenuation of one block");
    add_common(filter_cmd, filter_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*dump_cmd) {
            DDScheme s;
            s.name = parse_scheme_name(scheme_text);
            s.pulses = pulses;
            s.tau_pi = parse_duration(tau_pi_text);
            s.cycles = cycles;
            if (!total_text.empty()) s.total = parse_duration(total_text);
            if (!tau_text.empty()) s.tau = parse_duration(tau_text);
            const PulseSequence seq = gen_dd(s);
            dump(seq, std::cout);
            if (verbosity > 0) {
                std::cerr << seq.size() << " events, total " << format_number(seq.total_duration()) << " s\n";
            }
        } else if (*sqc_cmd) {
            const RunConfig cfg = load(sqc_opts, ConfigPurpose::sqc, threads);
            const Outputs out{sqc_opts.out, sqc_opts.force};
            out.claim({"signal.csv", "manifest.txt"});
            const auto rows = sqc_dd_experiment(cfg.system, cfg.scheme, cfg.noise, cfg.prop, cfg.readout_times);
            auto f = out.open("signal.csv");
            write_signal_csv(rows, f);
            write_manifest(out, "sqc", sqc_opts, verbosity, cfg, ConfigPurpose::sqc);
            if (verbosity > 0) std::cerr << rows.size() << " readouts written\n";
        } else if (*mqc_cmd) {
            const RunConfig cfg = load(mqc_opts, ConfigPurpose::mqc, threads);
            const Outputs out{mqc_opts.out, mqc_opts.force};
            out.claim({"spectrum.csv", "sweep.csv", "manifest.txt"});
            const MqcResult r = run_mqc(cfg.system, cfg.mqc, cfg.noise);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            auto spectrum = out.open("spectrum.csv");
            write_spectrum_csv(r, spectrum);
            auto sweep = out.open("sweep.csv");
            write_sweep_csv(r, sweep);
            write_manifest(out, "mqc", mqc_opts, verbosity, cfg, ConfigPurpose::mqc);
            if (verbosity > 0) std::cerr << r.sweep.size() << " phase increments written\n";
        } else if (*filter_cmd) {
            const RunConfig cfg = load(filter_opts, ConfigPurpose::filter, threads);
            const Outputs out{filter_opts.out, filter_opts.force};
            out.claim({"filter.csv", "filter_summary.csv", "manifest.txt"});
            const FilterResult r = chi(gen_dd(cfg.scheme), cfg.noise);
            auto grid = out.open("filter.csv");
            write_filter_csv(r, grid);
            auto summary = out.open("filter_summary.csv");
            write_filter_summary_csv(r, summary);
            write_manifest(out, "filter", filter_opts, verbosity, cfg, ConfigPurpose::filter);
            if (verbosity > 0) std::cerr << "chi = " << format_number(r.chi) << '\n';
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
