#pragma once

#include <string>
#include <vector>

#include "vdm/config.hpp"

namespace vdm {

struct RunOutputs {
    std::vector<std::string> files;  // CSV paths written (sidecars not listed)
};

/// Execute one experiment, writing CSV data files plus a .meta.json sidecar
/// per file into out_dir (created if missing). Identical configs produce
/// byte-identical CSVs. Throws ConfigError / NotConverged / CutoffExceeded.
RunOutputs run_experiment(const RunConfig& cfg, const std::string& out_dir);

/// Log-linear least-squares fit of P(t) over [t_min, t_max]; returns the
/// decay rate (positive for decay) and R^2 of the fit.
struct RateFit {
    double rate = 0.0;
    double r_squared = 0.0;
};
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& p,
                       double t_min, double t_max);

}  // namespace vdm
