#include "hplab_cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <sstream>

namespace hplab::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

int to_int(const std::string& s, const char* what)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("expected an integer for ") + what + ", got '" + s + "'");
    }
}

double to_double(const std::string& s, const char* what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("expected a number for ") + what + ", got '" + s + "'");
    }
}

void reject_float_point(const std::string& p)
{
    static const std::regex floaty(R"([0-9]\.|\.[0-9]|[0-9][eE][-+]?[0-9])");
    if (std::regex_search(p, floaty)) throw ConfigError("branch point '" + p + "' looks like a float; use an exact form such as p/q+r/s*sqrt(d)");
}

std::vector<std::string> string_list(const Json& j, const char* key)
{
    if (!j.contains(key)) return {};
    const Json& v = j.at(key);
    if (v.is_string()) return split(v.get<std::string>(), ',');
    if (!v.is_array()) throw ConfigError(std::string(key) + " must be a string or an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw ConfigError(std::string(key) + " entries must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

struct OptionSpec {
    const char* key;
    enum Type { integer, number, text, complex, path } type;
    Json fallback;
};

std::vector<OptionSpec> option_specs(const std::string& command)
{
    if (command == "series") return {{"order", OptionSpec::integer, 20}};
    if (command == "zeros") return {{"kind", OptionSpec::text, "hp"}, {"poly", OptionSpec::integer, 0}, {"stats", OptionSpec::text, "auto"}};
    if (command == "ode-recover") return {{"order", OptionSpec::integer, 3}};
    if (command == "ode-verify") return {{"constants", OptionSpec::text, "annihilating"}};
    if (command == "trace") return {{"step", OptionSpec::number, 0.01}};
    if (command == "density") return {{"grid", OptionSpec::integer, 200}, {"r_max", OptionSpec::number, 1e4}};
    if (command == "lg")
        return {{"z", OptionSpec::complex, Json::array({2.5, 0.1})},
                {"cubic", OptionSpec::text, "limit"},
                {"variant", OptionSpec::text, "second"},
                {"path", OptionSpec::path, Json::array()},
                {"max_step", OptionSpec::number, 0.01}};
    if (command == "figure4") return {{"probe_offset", OptionSpec::number, 0.05}};
    return {};
}

}  // namespace

int default_precision_bits()
{
    const char* env = std::getenv("HP_LAB_PRECISION_BITS");
    if (env == nullptr || *env == '\0') return 256;
    const int bits = to_int(trim(env), "HP_LAB_PRECISION_BITS");
    if (bits < 64 || bits > 65536) throw ConfigError("HP_LAB_PRECISION_BITS must lie in [64, 65536]");
    return bits;
}

BranchConfig ExperimentConfig::branch() const
{
    if (points.empty()) throw ConfigError("no branch points given (use --points/--exponents or --alpha)");
    if (points.size() != exponents.size()) throw ConfigError("points and exponents differ in number");
    std::string p, e;
    for (std::size_t k = 0; k < points.size(); ++k) {
        reject_float_point(points[k]);
        p += (k ? "," : "") + points[k];
        e += (k ? "," : "") + exponents[k];
    }
    try {
        BranchConfig cfg = BranchConfig::parse(p, e);
        cfg.validate();
        return cfg;
    } catch (const hplab::Error& err) {
        throw ConfigError(std::string("invalid branch configuration: ") + err.what());
    }
}

int ExperimentConfig::n_max() const
{
    if (n.empty()) throw ConfigError("no index n given");
    return *std::max_element(n.begin(), n.end());
}

Json ExperimentConfig::to_json() const
{
    Json j;
    j["command"] = command;
    j["points"] = points;
    j["exponents"] = exponents;
    if (n.size() == 1)
        j["n"] = n.front();
    else
        j["n"] = n;
    j["bits"] = bits;
    j["arithmetic"] = arithmetic;
    j["out"] = out_dir;
    j["jobs"] = jobs;
    j["options"] = options;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j)
{
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    static const std::vector<std::string> known{"command", "points", "exponents", "alpha", "n", "bits", "arithmetic", "out", "jobs", "options"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown configuration key '" + key + "'");

    ExperimentConfig c;
    try {
        if (j.contains("command")) c.command = j.at("command").get<std::string>();
        c.points = string_list(j, "points");
        c.exponents = string_list(j, "exponents");
        if (j.contains("alpha")) {
            const std::string a = j.at("alpha").is_string() ? j.at("alpha").get<std::string>() : throw ConfigError("alpha must be a string such as \"1/4\"");
            c.points = {"1", "-1"};
            c.exponents = {a, hplab::to_string(Rational(-parse_rational(a)))};
        }
        if (j.contains("n")) {
            const Json& n = j.at("n");
            if (n.is_number_integer())
                c.n = {n.get<int>()};
            else if (n.is_string())
                c.n = parse_n_list(n.get<std::string>());
            else if (n.is_array())
                for (const auto& x : n) c.n.push_back(x.get<int>());
            else
                throw ConfigError("n must be an integer, an array or a range string");
        }
        if (j.contains("bits")) c.bits = j.at("bits").get<int>();
        if (j.contains("arithmetic")) c.arithmetic = j.at("arithmetic").get<std::string>();
        if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
        if (j.contains("options")) {
            if (!j.at("options").is_object()) throw ConfigError("options must be an object");
            c.options = j.at("options");
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("configuration type error: ") + e.what());
    } catch (const hplab::Error& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::vector<int> parse_n_list(const std::string& text)
{
    std::vector<int> out;
    const std::string t = trim(text);
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() < 2 || parts.size() > 3) throw ConfigError("range must be a:b or a:b:step");
        const int a = to_int(parts[0], "n"), b = to_int(parts[1], "n");
        const int step = parts.size() == 3 ? to_int(parts[2], "n step") : 1;
        if (step <= 0 || b < a) throw ConfigError("empty or reversed n range");
        for (int k = a; k <= b; k += step) out.push_back(k);
    } else {
        for (const auto& s : split(t, ',')) out.push_back(to_int(s, "n"));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) throw ConfigError("empty n list");
    return out;
}

std::complex<double> parse_complex(const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() == 1) return {to_double(parts[0], "complex value"), 0.0};
    if (parts.size() == 2) return {to_double(parts[0], "real part"), to_double(parts[1], "imaginary part")};
    throw ConfigError("complex value must be 're,im'");
}

std::vector<std::complex<double>> parse_path(const std::string& text)
{
    std::vector<std::complex<double>> out;
    for (const auto& v : split(text, ';'))
        if (!v.empty()) out.push_back(parse_complex(v));
    return out;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const Json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("complex value must be [re, im]");
}

void normalize_options(ExperimentConfig& cfg)
{
    const auto specs = option_specs(cfg.command);
    for (const auto& [key, value] : cfg.options.items()) {
        const bool known = std::any_of(specs.begin(), specs.end(), [&](const OptionSpec& s) { return key == s.key; });
        if (!known) throw ConfigError("option '" + key + "' does not apply to " + cfg.command);
    }
    Json out = Json::object();
    for (const auto& s : specs) {
        Json v = cfg.options.contains(s.key) ? cfg.options.at(s.key) : s.fallback;
        switch (s.type) {
        case OptionSpec::integer:
            if (v.is_string()) v = to_int(v.get<std::string>(), s.key);
            if (!v.is_number_integer()) throw ConfigError(std::string(s.key) + " must be an integer");
            break;
        case OptionSpec::number:
            if (v.is_string()) v = to_double(v.get<std::string>(), s.key);
            if (!v.is_number()) throw ConfigError(std::string(s.key) + " must be a number");
            v = v.get<double>();
            break;
        case OptionSpec::text:
            if (!v.is_string()) throw ConfigError(std::string(s.key) + " must be a string");
            break;
        case OptionSpec::complex:
            v = complex_json(complex_from_json(v));
            break;
        case OptionSpec::path: {
            Json arr = Json::array();
            if (v.is_string()) {
                for (const auto& z : parse_path(v.get<std::string>())) arr.push_back(complex_json(z));
            } else if (v.is_array()) {
                for (const auto& z : v) arr.push_back(complex_json(complex_from_json(z)));
            } else {
                throw ConfigError(std::string(s.key) + " must be a list of points");
            }
            v = arr;
            break;
        }
        }
        out[s.key] = v;
    }
    cfg.options = out;
}

}  // namespace hplab::cli
