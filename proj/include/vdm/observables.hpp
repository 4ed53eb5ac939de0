#pragma once

#include <optional>
#include <vector>

#include "vdm/core.hpp"
#include "vdm/ensemble.hpp"
#include "vdm/errors.hpp"

namespace vdm {

/// Re rho(excited, excited). The value is reported as-is; use
/// population_physical to flag values outside [−eps, 1+eps].
double excited_population(const Mat2& rho);
bool population_physical(double p, double eps = 1e-9);

/// Tr(A rho).
Complex expectation(const Mat2& a, const Mat2& rho);

struct SteadyState {
    std::int64_t index = 0;   // first trajectory index after which the window test holds
    Mat2 rho;
    double residual = 0.0;    // max elementwise change over the trailing window
};

/// Earliest trajectory index after which the max elementwise change of rho
/// over a trailing window of length window_time stays below rel_tol.
/// Throws NotConverged with the final residual if never reached.
SteadyState detect_steady_state(const std::vector<TrajectoryPoint>& traj,
                                double rel_tol, double window_time);

struct CorrelationTrace {
    std::vector<double> tau;
    std::vector<Complex> values;
    bool subtracted_coherent = true;
};

struct CorrelationSettings {
    double steady_rel_tol = 1e-4;
    double steady_window = 1.0;
    double steady_max_time = 60.0;
    double tau_max = 25.0;
    Backend backend = Backend::OpenMP;
};

struct CorrelationResult {
    CorrelationTrace trace;
    Mat2 rho_ss;
    double t_steady = 0.0;        // time at which the lowering was applied
    double steady_residual = 0.0;
    Complex sdag_ss;              // <sigma^dag> at the snapshot
    Complex s_ss;                 // <sigma>
    double n_ss = 0.0;            // <sigma^dag sigma>
};

/// Steady-state two-time correlation <sigma^dag(tau) sigma>_ss minus
/// <sigma^dag>_ss <sigma>_ss, computed by propagating the ensemble to the
/// steady state, applying the lowering operator to every block, and
/// propagating again while recording Tr(sigma^dag rho^0). No quantum
/// regression is involved; the ensemble carries the memory across the
/// lowering.
CorrelationResult correlation_function(const EvolutionOperator& op, const Mat2& rho0,
                                       const CorrelationSettings& settings);

struct Spectrum {
    std::vector<double> omega;   // relative to the atomic frequency
    std::vector<double> values;
};

enum class SpectrumWindow { None, Hann };

/// One-sided transform with doubled real part and trapezoid end weights:
/// S(w) = 2 Re sum_k W_k C(tau_k) exp(-i w tau_k) dtau. A component of C
/// rotating as exp(+i W tau) lands at omega = +W.
Spectrum spectrum(const CorrelationTrace& trace, double omega_max, double omega_step,
                  SpectrumWindow window = SpectrumWindow::None);

struct SidePeaks {
    double omega_plus = 0.0, height_plus = 0.0;
    double omega_minus = 0.0, height_minus = 0.0;
    double ratio() const { return height_plus / height_minus; }
};

/// Highest point on each side of |omega| > omega_split.
SidePeaks side_peaks(const Spectrum& s, double omega_split);

}  // namespace vdm
