#pragma once

#include "hplab/series.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hplab::cli {

using Json = nlohmann::ordered_json;

/// Thrown for malformed configuration input; reported under the "config" stage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Default float precision: HP_LAB_PRECISION_BITS if set, else 256.
int default_precision_bits();

struct ExperimentConfig {
    std::string command;
    std::vector<std::string> points;     // exact point strings
    std::vector<std::string> exponents;  // rationals
    std::vector<int> n;                  // indices to run, ascending
    int bits = 0;                        // float precision
    std::string arithmetic = "exact";    // "exact" or "float"
    std::string out_dir = ".";
    int jobs = 1;
    Json options = Json::object();       // subcommand-specific settings

    BranchConfig branch() const;
    int n_max() const;

    Json to_json() const;
    static ExperimentConfig from_json(const Json& j);
};

/// "20", "10:40", "10:40:10" or "10,20,40".
std::vector<int> parse_n_list(const std::string& text);

/// "re,im" or a bare real number.
std::complex<double> parse_complex(const std::string& text);
/// "x,y;x,y;...".
std::vector<std::complex<double>> parse_path(const std::string& text);

Json complex_json(std::complex<double> z);
std::complex<double> complex_from_json(const Json& j);

/// Fills `cfg.options` defaults for the subcommand and validates their types.
void normalize_options(ExperimentConfig& cfg);

}  // namespace hplab::cli
