#pragma once

#include <vector>

#include "vdm/core.hpp"
#include "vdm/errors.hpp"
#include "vdm/kernels.hpp"
#include "vdm/observables.hpp"

namespace vdm {

// Independent reference implementations used to validate the main algorithm.

struct DecayAmplitude {
    std::vector<double> t;
    std::vector<Complex> a;         // direct windowed-convolution Euler form
    std::vector<Complex> a_ladder;  // equivalent Markovian auxiliary-variable form
    std::vector<double> population() const;
};

/// Undriven single-excitation amplitude, da/dt = -int_0^t f(t-s) a(s) ds,
/// stepped with Euler and the same weighted window samples F as the main
/// algorithm: a_{n+1} = a_n - dt^2 sum_j F_j a_{n-j}. Also computes the
/// explicitly Markovian rewrite with auxiliaries b^k; the two sequences agree
/// to rounding.
DecayAmplitude decay_amplitude(const KernelSamples& samples, std::int64_t n_steps);

/// Atom plus single cavity mode with a Markovian output coupling; the kernel
/// match g^2 exp(i delta_c tau - kappa_c tau / 2) = cavity_kernel(...) makes
/// it an exact reference for the cavity-kernel non-Markovian runs.
struct LindbladSystem {
    int fock_cutoff = 10;       // photon number cutoff N_c (basis size N_c + 1)
    double rabi = 0.0;          // atomic drive Omega
    double g_ac = 1.0;          // atom-cavity coupling, g_ac^2 = gamma
    double delta_c = 0.0;       // omega_0 - nu
    double kappa_c = 1.0;       // cavity energy decay rate = kappa^2
    double top_population_tol = 1e-6;
};

class LindbladBaseline {
public:
    explicit LindbladBaseline(const LindbladSystem& sys);

    /// Full-system density matrix for atom (x) cavity product states.
    Eigen::MatrixXcd product_state(const Mat2& atom, int photons) const;

    /// Fixed-step RK4 trajectory of the reduced atomic state on the dt grid,
    /// substeps RK4 stages per dt. Throws CutoffExceeded if the top Fock level
    /// populates beyond tolerance.
    std::vector<TrajectoryPoint> trajectory(const Eigen::MatrixXcd& rho0, double dt,
                                            std::int64_t n_steps, int substeps = 10);

    /// Steady state by propagation until the reduced state settles.
    Eigen::MatrixXcd steady_state(const Eigen::MatrixXcd& rho0, double dt, double rel_tol,
                                  double window_time, double max_time, int substeps = 10);

    /// Propagate the full system state without recording.
    Eigen::MatrixXcd evolve(Eigen::MatrixXcd rho, double dt, std::int64_t n_steps,
                            int substeps = 10) const;

    double mean_photons(const Eigen::MatrixXcd& rho) const;

    /// <sigma^dag(tau) sigma>_ss - <sigma^dag>_ss <sigma>_ss via quantum
    /// regression (valid here: the extended system is Markovian).
    CorrelationTrace correlation(const Eigen::MatrixXcd& rho_ss, double dt,
                                 std::int64_t n_tau, int substeps = 10);

    Mat2 reduce(const Eigen::MatrixXcd& rho) const;
    double top_fock_population(const Eigen::MatrixXcd& rho) const;
    const LindbladSystem& system() const { return sys_; }

private:
    Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho) const;
    Eigen::MatrixXcd rk4_step(Eigen::MatrixXcd rho, double h) const;

    LindbladSystem sys_;
    Eigen::MatrixXcd h_;      // Hamiltonian in the rotating frame
    Eigen::MatrixXcd a_;      // cavity annihilation on the product space
    Eigen::MatrixXcd ada_;
    Eigen::MatrixXcd sm_, sp_;
    int dim_;
};

struct DiscreteModeSettings {
    int n_modes = 360;
    double band = 700.0;        // modes uniform over [-band, band] around the atom
    double t_final = 1.0;
    double dt = 0.025;          // output grid
    int substeps = 24;          // RK4 substeps per output step
    double rabi = 0.0;
    int excitation_cutoff = 2;  // total excitations kept (atom + photons), <= 2
    double fit_tau_step_factor = 0.25;  // kernel fit grid = dt * factor
    double fit_residual_tol = 0.05;     // relative to |f(0)|
};

struct DiscreteModeResult {
    std::vector<double> t;
    std::vector<double> population;
    double fit_residual = 0.0;      // max |sum w_k e^{-i w_k tau} - f(tau)| / |f(0)|
    int n_modes = 0;
};

/// Brute-force Schrodinger evolution of the atom coupled to a uniform comb of
/// discrete field modes whose couplings are least-squares fitted so that
/// sum_k |g_k|^2 exp(-i w_k tau) reproduces the kernel on [0, t_final].
/// Truncated to at most excitation_cutoff total excitations; the initial
/// state is the excited atom in the field vacuum.
DiscreteModeResult discrete_mode_oracle(const KernelSpec& spec, const DiscreteModeSettings& s);

}  // namespace vdm
