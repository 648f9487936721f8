// Experiment configuration documents: one `key = value` per line, `#` starts a
// comment, lists are comma or space separated. Units are part of the key name
// (_us, _ms, _khz, _rad_s) and are converted to SI on parsing; frequencies
// given in kHz are cyclic and become angular (2 pi 1e3 x) rad/s.

#pragma once

#include "ddspin/experiment.hpp"
#include "ddspin/noise.hpp"
#include "ddspin/propagate.hpp"
#include "ddspin/sequence.hpp"
#include "ddspin/spin_core.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddspin {

// Every offending key is collected before throwing.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class ConfigPurpose { sqc, mqc, filter };

struct RunConfig {
    SpinSystem system = SpinSystem::uncoupled(1);
    DDScheme scheme;
    NoiseModel noise;
    PropagationConfig prop;
    MqcConfig mqc;  // mqc.scheme and mqc.prop mirror `scheme` and `prop`
    std::vector<double> readout_times;  // s
};

RunConfig parse_config(std::istream& in, ConfigPurpose purpose);
RunConfig load_config(const std::filesystem::path& path, ConfigPurpose purpose);

// Resolved parameters in SI units, in a fixed order, for run manifests.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg, ConfigPurpose purpose);

}  // namespace ddspin
