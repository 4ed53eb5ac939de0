#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vdm/errors.hpp"
#include "vdm/kernels.hpp"

namespace vdm {

enum class Experiment {
    Decay, Driven, Correlation, Spectrum,
    ValidateCavity, ValidateDecay, MarkovLimit, Convergence,
};

enum class KernelKind { Cavity, Bandgap, Flat };

/// Everything a run needs, in units of the Born-Markov rate gamma (times in
/// 1/gamma). Fully deterministic: there is no seed anywhere.
struct RunConfig {
    Experiment experiment = Experiment::Decay;
    KernelKind kernel = KernelKind::Cavity;

    double gamma = 1.0;
    double delta_c = 0.0;   // cavity: omega_0 - nu
    double kappa2 = 0.0;    // cavity: energy decay rate
    double lambda = 0.0;    // bandgap: cutoff
    double delta = 0.0;     // bandgap: omega_0 - omega_g
    std::vector<double> delta_list;  // optional multi-run detunings (bandgap)

    double omega = 0.0;     // drive
    int m = 0;
    double dt = 0.0;
    std::int64_t n_steps = 0;
    std::int64_t record_every = 1;

    double steady_tol = 1e-4;
    double steady_window = 1.0;
    double steady_max_time = 60.0;
    double tau_max = 25.0;
    double omega_max = 0.0;   // 0 = auto
    double omega_step = 0.0;  // 0 = auto
    double fit_t_min = 0.5;
    double fit_t_max = 6.0;
    int fock_cutoff = 10;
    int baseline_substeps = 10;
    int dt_ladder = 3;
    double truncation_warn = 0.02;

    KernelSpec kernel_spec() const;
    std::vector<double> deltas() const;  // delta_list if set, else {delta}
    double resolved_omega_max() const;
    double resolved_omega_step() const;
    std::string experiment_name() const;
};

/// Memory cap for the 3^M ladder, from VDM_MEMORY_CAP_MB (default 2048 MB).
std::int64_t memory_cap_bytes();

/// Parse "key = value" lines with '#' comments. Unknown keys, missing
/// required keys, malformed values and over-cap M are errors.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const std::string& text, std::int64_t cap_bytes);

/// Apply one "key=value" override on top of a parsed config (revalidates).
std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides);

}  // namespace vdm
