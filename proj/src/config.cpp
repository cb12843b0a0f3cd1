#include "fsiplate/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fsiplate {

namespace {

const std::vector<std::string> kKeys = {
    "n", "plate_elements", "dt", "T", "initial", "seed", "eta",
    "beta_min", "beta_max", "beta_count", "snapshot_times", "out", "workers"};

bool known_key(const std::string& k) {
    return std::find(kKeys.begin(), kKeys.end(), k) != kKeys.end();
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_integer(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed integer for key '" + key + "': '" + v + "'");
    }
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed real for key '" + key + "': '" + v + "'");
    }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        unsigned long long out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed unsigned integer for key '" + key + "': '" +
                                    v + "'");
    }
}

// apply one key=value assignment onto the config
void apply(SimulationConfig& cfg, bool& plate_explicit, const std::string& key,
           const std::string& value) {
    if (key == "n") cfg.n = static_cast<int>(parse_integer(key, value));
    else if (key == "plate_elements") {
        cfg.plate_elements = static_cast<int>(parse_integer(key, value));
        plate_explicit = true;
    } else if (key == "dt") cfg.dt = parse_real(key, value);
    else if (key == "T") cfg.T = parse_real(key, value);
    else if (key == "initial") cfg.initial = value;
    else if (key == "seed") cfg.seed = parse_unsigned(key, value);
    else if (key == "eta") cfg.eta = parse_real(key, value);
    else if (key == "beta_min") cfg.beta_min = parse_real(key, value);
    else if (key == "beta_max") cfg.beta_max = parse_real(key, value);
    else if (key == "beta_count") cfg.beta_count = static_cast<int>(parse_integer(key, value));
    else if (key == "out") cfg.out = value;
    else if (key == "workers") cfg.workers = static_cast<int>(parse_integer(key, value));
    else if (key == "snapshot_times") {
        cfg.snapshot_times.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            cfg.snapshot_times.push_back(parse_real(key, trim(item)));
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open config file '" + path + "'");
    std::map<std::string, std::string> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " of '" + path +
                                        "' is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_key(key))
            throw std::invalid_argument("config: unknown key '" + key + "' in '" + path + "'");
        entries[key] = value;
    }
    return entries;
}

std::string flag_to_key(const std::string& flag) {
    std::string key = flag.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

}  // namespace

SimulationConfig parse_config(const std::vector<std::string>& args) {
    // collect flag assignments first so they can override the file
    std::map<std::string, std::string> flags;
    std::string config_file;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0)
            throw std::invalid_argument("config: unexpected argument '" + a + "'");
        if (i + 1 >= args.size())
            throw std::invalid_argument("config: flag '" + a + "' is missing a value");
        const std::string value = args[++i];
        if (a == "--config") {
            config_file = value;
            continue;
        }
        const std::string key = flag_to_key(a);
        if (!known_key(key)) throw std::invalid_argument("config: unknown flag '" + a + "'");
        flags[key] = value;
    }

    SimulationConfig cfg;
    bool plate_explicit = false;
    if (!config_file.empty())
        for (const auto& [k, v] : read_config_file(config_file)) apply(cfg, plate_explicit, k, v);
    for (const auto& [k, v] : flags) apply(cfg, plate_explicit, k, v);
    if (!plate_explicit) cfg.plate_elements = cfg.n;
    if (cfg.snapshot_times.empty()) cfg.snapshot_times = {0.0, cfg.T};
    validate_config(cfg);
    return cfg;
}

void validate_config(const SimulationConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (cfg.plate_elements < 1) throw std::invalid_argument("config: plate_elements must be >= 1");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
    if (!(cfg.T >= 0.0)) throw std::invalid_argument("config: T must be nonnegative");
    if (cfg.eta && !(*cfg.eta > 0.0 && *cfg.eta <= 1.0))
        throw std::invalid_argument("config: eta must lie in (0, 1]");
    if (!(cfg.beta_min > 0.0) || !(cfg.beta_max > cfg.beta_min))
        throw std::invalid_argument("config: beta window must satisfy 0 < beta_min < beta_max");
    if (cfg.beta_count < 5) throw std::invalid_argument("config: beta_count must be >= 5");
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    for (double t : cfg.snapshot_times)
        if (t < 0.0 || t > cfg.T + 1e-12)
            throw std::invalid_argument("config: snapshot time outside [0, T]");

    const std::string& init = cfg.initial;
    const bool sawtooth = init.rfind("sawtooth(", 0) == 0 && init.back() == ')';
    const bool randomized = init.rfind("randomized(", 0) == 0 && init.back() == ')';
    if (!(sawtooth || randomized || init == "hat" || init == "zero"))
        throw std::invalid_argument("config: unknown initial data spec '" + init + "'");
    if (sawtooth) {
        const long k = parse_integer("initial", init.substr(9, init.size() - 10));
        if (k < 1) throw std::invalid_argument("config: sawtooth tooth count must be >= 1");
    }
    if (randomized) parse_unsigned("initial", init.substr(11, init.size() - 12));
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string serialize_config(const SimulationConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["n"] = std::to_string(cfg.n);
    kv["plate_elements"] = std::to_string(cfg.plate_elements);
    kv["dt"] = format_g17(cfg.dt);
    kv["T"] = format_g17(cfg.T);
    kv["initial"] = cfg.initial;
    kv["seed"] = std::to_string(cfg.seed);
    kv["eta"] = cfg.eta ? format_g17(*cfg.eta) : "none";
    kv["beta_min"] = format_g17(cfg.beta_min);
    kv["beta_max"] = format_g17(cfg.beta_max);
    kv["beta_count"] = std::to_string(cfg.beta_count);
    std::string snaps;
    for (size_t i = 0; i < cfg.snapshot_times.size(); ++i)
        snaps += (i ? "," : "") + format_g17(cfg.snapshot_times[i]);
    kv["snapshot_times"] = snaps;
    kv["out"] = cfg.out;
    kv["workers"] = std::to_string(cfg.workers);

    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const SimulationConfig& cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_help() {
    return
        "options (defaults in brackets):\n"
        "  --n N               fluid grid subdivisions per side [8]\n"
        "  --plate-elements L  plate elements [tracks --n]\n"
        "  --dt DT             time step [1e-5]\n"
        "  --T T               final time [1e-3]\n"
        "  --initial SPEC      sawtooth(k) | hat | randomized(seed) | zero [sawtooth(5)]\n"
        "  --seed S            seed for randomized fields [0]\n"
        "  --eta ETA           fractional plate damping exponent in (0,1] [off]\n"
        "  --beta-min B        lower end of the frequency window [10]\n"
        "  --beta-max B        upper end of the frequency window [200]\n"
        "  --beta-count K      sweep points, log-spaced [48]\n"
        "  --snapshot-times T1,T2,...   field snapshot times [0,T]\n"
        "  --out DIR           output directory [.]\n"
        "  --workers W         sweep worker threads [1]\n"
        "  --config FILE      key=value file; flags override file values\n";
}

}  // namespace fsiplate
