#pragma once

#include <variant>
#include <vector>

#include "vdm/core.hpp"

namespace vdm {

// Reservoir memory functions in the frame rotating at the atomic frequency.
// All rates are in whatever unit system the caller uses; the CLI works in
// units of the Born-Markov rate gamma.

/// Lorentzian reservoir seen through a leaky single-mode cavity.
/// delta_c = omega_0 - nu (atom minus cavity), kappa2 = cavity energy decay.
struct CavityKernel {
    double gamma;
    double delta_c;
    double kappa2;
};

/// Anisotropic band-edge reservoir with a high-frequency cutoff lambda.
/// delta = omega_0 - omega_g (detuning of the atom from the band edge).
struct BandgapKernel {
    double beta;
    double lambda;
    double delta;
};

/// Constant kernel over the window; reduces to Markovian decay at rate gamma.
/// Test and limit-check variant.
struct FlatKernel {
    double gamma;
};

using KernelSpec = std::variant<CavityKernel, BandgapKernel, FlatKernel>;

/// f(tau) = gamma * exp(i delta_c tau - kappa2/2 tau), tau >= 0.
Complex cavity_kernel(const CavityKernel& k, double tau);

/// f(tau) = beta lambda^{3/2} exp(i(delta tau + pi/4)) / (1 + lambda tau)^{3/2}.
Complex bandgap_kernel(const BandgapKernel& k, double tau);

Complex kernel_value(const KernelSpec& spec, double tau);

/// Born-Markov damping rate of the band-gap kernel: 2^{3/2} beta sqrt(lambda).
double born_markov_rate(double beta, double lambda);

/// For a band-gap spec, the coupling beta that yields Born-Markov rate gamma.
double beta_for_rate(double gamma, double lambda);

/// Trapezoidal weights over M samples: 1/2 at n = 0 and n = M-1, else 1.
std::vector<double> trapezoid_weights(int m);

/// Extended two-point product-quadrature weights for the weight function
/// (1 + lambda tau)^{-3/2} on a uniform mesh of M points. The returned W_n
/// carry units of time; sum(W) equals the exact integral of the weight
/// function over [0, (M-1) dt].
std::vector<double> moment_weights(double lambda, double dt, int m);

/// Weighted kernel coefficients over one memory window. The consumer applies
/// exactly one factor of dt per coefficient, so dt * F[n] approximates the
/// integral of f over the n-th mesh cell regardless of the quadrature scheme.
struct KernelSamples {
    std::vector<Complex> F;
    double dt = 0.0;
    int size() const { return static_cast<int>(F.size()); }
    /// Memory window covered by the samples, (M-1) dt.
    double window() const { return dt * static_cast<double>(F.size() - 1); }
};

/// Cavity/Flat use the trapezoidal rule; Bandgap uses moment_weights with the
/// semi-singular factor absorbed into the weights (and the dt pre-divided).
KernelSamples sample_kernel(const KernelSpec& spec, double dt, int m);

/// |f(T)| / |f(0)|, the kernel magnitude left out by a window of length T.
double truncation_ratio(const KernelSpec& spec, double t_window);

}  // namespace vdm
