#include "vdm/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "vdm/evolution.hpp"
#include "vdm/labels.hpp"

namespace vdm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: value for '" + key + "' is not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config: trailing characters in value for '" + key + "': '" + v + "'");
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long x;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: value for '" + key + "' is not an integer: '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config: trailing characters in value for '" + key + "': '" + v + "'");
    return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

const std::map<std::string, Experiment> kExperiments = {
    {"decay", Experiment::Decay},
    {"driven", Experiment::Driven},
    {"correlation", Experiment::Correlation},
    {"spectrum", Experiment::Spectrum},
    {"validate-cavity", Experiment::ValidateCavity},
    {"validate-decay", Experiment::ValidateDecay},
    {"markov-limit", Experiment::MarkovLimit},
    {"convergence", Experiment::Convergence},
};

const std::map<std::string, KernelKind> kKernels = {
    {"cavity", KernelKind::Cavity},
    {"bandgap", KernelKind::Bandgap},
    {"flat", KernelKind::Flat},
};

}  // namespace

KernelSpec RunConfig::kernel_spec() const {
    switch (kernel) {
        case KernelKind::Cavity: return CavityKernel{gamma, delta_c, kappa2};
        case KernelKind::Bandgap: return BandgapKernel{beta_for_rate(gamma, lambda), lambda, delta};
        case KernelKind::Flat: return FlatKernel{gamma};
    }
    throw ConfigError("config: bad kernel kind");
}

std::vector<double> RunConfig::deltas() const {
    if (!delta_list.empty() && kernel == KernelKind::Bandgap) return delta_list;
    return {delta};
}

double RunConfig::resolved_omega_max() const {
    if (omega_max > 0.0) return omega_max;
    return omega > 0.0 ? 2.5 * omega : 12.0 * gamma;
}

double RunConfig::resolved_omega_step() const {
    if (omega_step > 0.0) return omega_step;
    return omega > 0.0 ? omega / 40.0 : gamma / 40.0;
}

std::string RunConfig::experiment_name() const {
    for (const auto& [name, e] : kExperiments)
        if (e == experiment) return name;
    return "unknown";
}

std::int64_t memory_cap_bytes() {
    const char* env = std::getenv("VDM_MEMORY_CAP_MB");
    std::int64_t mb = 2048;
    if (env != nullptr) {
        try {
            mb = std::stoll(env);
        } catch (const std::exception&) {
            throw ConfigError("VDM_MEMORY_CAP_MB is not an integer");
        }
        if (mb <= 0) throw ConfigError("VDM_MEMORY_CAP_MB must be positive");
    }
    return mb * 1024 * 1024;
}

RunConfig parse_config(const std::string& text) {
    return parse_config(text, memory_cap_bytes());
}

RunConfig parse_config(const std::string& text, std::int64_t cap_bytes) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        if (kv.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    RunConfig cfg;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto require_key = [&](const char* key) -> std::string {
        auto v = take(key);
        if (!v) throw ConfigError(std::string("config: missing required key '") + key + "'");
        return *v;
    };

    {
        const std::string name = require_key("experiment");
        const auto it = kExperiments.find(name);
        if (it == kExperiments.end())
            throw ConfigError("config: unknown experiment '" + name + "'");
        cfg.experiment = it->second;
    }
    {
        const std::string name = require_key("kernel");
        const auto it = kKernels.find(name);
        if (it == kKernels.end())
            throw ConfigError("config: unknown kernel '" + name + "'");
        cfg.kernel = it->second;
    }

    if (auto v = take("gamma")) cfg.gamma = parse_double("gamma", *v);
    if (cfg.gamma <= 0.0) throw ConfigError("config: gamma must be positive");

    if (cfg.kernel == KernelKind::Cavity) {
        cfg.delta_c = parse_double("delta_c", require_key("delta_c"));
        cfg.kappa2 = parse_double("kappa2", require_key("kappa2"));
        if (cfg.kappa2 <= 0.0) throw ConfigError("config: kappa2 must be positive");
    } else if (cfg.kernel == KernelKind::Bandgap) {
        cfg.lambda = parse_double("lambda", require_key("lambda"));
        if (cfg.lambda <= 0.0) throw ConfigError("config: lambda must be positive");
        if (auto v = take("delta")) cfg.delta = parse_double("delta", *v);
        if (auto v = take("delta_list")) cfg.delta_list = parse_list("delta_list", *v);
    }

    if (auto v = take("omega")) cfg.omega = parse_double("omega", *v);

    cfg.m = static_cast<int>(parse_int("M", require_key("M")));
    if (cfg.m < 1) throw ConfigError("config: M must be >= 1");
    cfg.dt = parse_double("dt", require_key("dt"));
    if (cfg.dt <= 0.0) throw ConfigError("config: dt must be positive");

    const bool needs_steps = cfg.experiment != Experiment::Correlation
                          && cfg.experiment != Experiment::Spectrum;
    if (auto v = take("n_steps")) {
        cfg.n_steps = parse_int("n_steps", *v);
        if (cfg.n_steps < 0) throw ConfigError("config: n_steps must be >= 0");
    } else if (needs_steps) {
        throw ConfigError("config: missing required key 'n_steps'");
    }

    if (auto v = take("record_every")) {
        cfg.record_every = parse_int("record_every", *v);
        if (cfg.record_every < 1) throw ConfigError("config: record_every must be >= 1");
    }
    if (auto v = take("steady_tol")) cfg.steady_tol = parse_double("steady_tol", *v);
    if (auto v = take("steady_window")) cfg.steady_window = parse_double("steady_window", *v);
    if (auto v = take("steady_max_time")) cfg.steady_max_time = parse_double("steady_max_time", *v);
    if (auto v = take("tau_max")) cfg.tau_max = parse_double("tau_max", *v);
    if (auto v = take("omega_max")) cfg.omega_max = parse_double("omega_max", *v);
    if (auto v = take("omega_step")) cfg.omega_step = parse_double("omega_step", *v);
    if (auto v = take("fit_t_min")) cfg.fit_t_min = parse_double("fit_t_min", *v);
    if (auto v = take("fit_t_max")) cfg.fit_t_max = parse_double("fit_t_max", *v);
    if (auto v = take("fock_cutoff")) cfg.fock_cutoff = static_cast<int>(parse_int("fock_cutoff", *v));
    if (auto v = take("baseline_substeps"))
        cfg.baseline_substeps = static_cast<int>(parse_int("baseline_substeps", *v));
    if (auto v = take("dt_ladder")) cfg.dt_ladder = static_cast<int>(parse_int("dt_ladder", *v));
    if (auto v = take("truncation_warn")) cfg.truncation_warn = parse_double("truncation_warn", *v);

    if (!kv.empty())
        throw ConfigError("config: unknown key '" + kv.begin()->first + "'");

    if (cfg.m > 25)
        throw MemoryCapExceeded("config: M = " + std::to_string(cfg.m)
                                + " is far beyond any feasible 3^M ladder");
    const std::int64_t estimate = ensemble_memory_estimate(cfg.m);
    if (estimate > cap_bytes) {
        throw MemoryCapExceeded(
            "config: M = " + std::to_string(cfg.m) + " needs about "
            + std::to_string(estimate / (1024 * 1024)) + " MB ("
            + std::to_string(pow3(cfg.m)) + " blocks), over the cap of "
            + std::to_string(cap_bytes / (1024 * 1024))
            + " MB (set VDM_MEMORY_CAP_MB to raise)");
    }

    if (cfg.kernel != KernelKind::Flat && cfg.m < 2)
        throw ConfigError("config: structured kernels need M >= 2");
    if (cfg.experiment == Experiment::ValidateCavity && cfg.kernel != KernelKind::Cavity)
        throw ConfigError("config: validate-cavity requires kernel = cavity");
    if (cfg.experiment == Experiment::MarkovLimit && cfg.kernel != KernelKind::Bandgap)
        throw ConfigError("config: markov-limit requires kernel = bandgap");
    return cfg;
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
    std::string out = text;
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override is not key=value: '" + ov + "'");
        const std::string key = trim(ov.substr(0, eq));
        // drop any previous assignment of the key, then append
        std::stringstream ss(out);
        std::string line, rebuilt;
        while (std::getline(ss, line)) {
            std::string stripped = line;
            const auto hash = stripped.find('#');
            if (hash != std::string::npos) stripped = stripped.substr(0, hash);
            const auto e2 = stripped.find('=');
            if (e2 != std::string::npos && trim(stripped.substr(0, e2)) == key) continue;
            rebuilt += line;
            rebuilt += '\n';
        }
        rebuilt += ov;
        rebuilt += '\n';
        out = rebuilt;
    }
    return out;
}

}  // namespace vdm
