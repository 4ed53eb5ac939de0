#pragma once

// Test-only reference machinery. Everything here is deliberately independent
// of the library's superoperator/CSR code paths: direct 2x2 matrix algebra,
// brute-force quadrature, and scalar recursions.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "vdm/core.hpp"
#include "vdm/kernels.hpp"
#include "vdm/labels.hpp"

namespace oracle {

using vdm::Complex;
using vdm::Mat2;

// ---------------------------------------------------------------- quadrature

template <typename F>
Complex simpson(F&& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

template <typename F>
Complex adaptive_simpson_rec(F&& f, double a, double b, Complex whole, double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const Complex left = simpson(f, a, mid);
    const Complex right = simpson(f, mid, b);
    const Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, mid, left, 0.5 * tol, depth - 1)
         + adaptive_simpson_rec(f, mid, b, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson with an interval pre-split so oscillations are resolved.
template <typename F>
Complex adaptive_quad(F&& f, double a, double b, double tol, int presplit = 64) {
    Complex total(0, 0);
    const double h = (b - a) / presplit;
    for (int k = 0; k < presplit; ++k) {
        const double x0 = a + k * h;
        const double x1 = x0 + h;
        total += adaptive_simpson_rec(f, x0, x1, simpson(f, x0, x1), tol / presplit, 40);
    }
    return total;
}

/// Fourier transform of the Lorentzian coupling density:
/// (gamma/2pi) Int k2 / (x^2 + (k2/2)^2) exp(-i x tau) dx * exp(i delta_c tau),
/// evaluated by brute-force quadrature over [-X, X] plus a two-term
/// integration-by-parts tail correction. Good to ~1e-9 for tau >= 0.05.
inline Complex lorentzian_transform(double gamma, double delta_c, double kappa2, double tau) {
    const double b = 0.5 * kappa2;
    auto g = [&](double x) { return kappa2 / (x * x + b * b); };
    auto gp = [&](double x) { return -2.0 * kappa2 * x / std::pow(x * x + b * b, 2); };

    const double target = 1e-10;
    double X = std::cbrt(2.0 * kappa2 / (6.28 * tau * tau * target));
    X = std::max({X, 40.0 * b, 50.0 / tau});

    auto integrand = [&](double x) { return g(x) * std::exp(Complex(0, -x * tau)); };
    const int cells = std::max(256, static_cast<int>(2.0 * X * tau / 3.0));
    Complex core = adaptive_quad(integrand, -X, X, 1e-12, cells);

    // Two integrations by parts on each tail:
    //   int_X^inf g e^{-ix tau} dx  ~  e^{-iX tau} [ g(X)/(i tau) + g'(X)/(i tau)^2 ]
    //   int_-inf^-X g e^{-ix tau} dx ~ e^{+iX tau} [ -g(-X)/(i tau) - g'(-X)/(i tau)^2 ]
    const Complex itau(0, tau);
    const Complex tail_hi = std::exp(Complex(0, -X * tau))
                          * (g(X) / itau + gp(X) / (itau * itau));
    const Complex tail_lo = std::exp(Complex(0, X * tau))
                          * (-g(-X) / itau - gp(-X) / (itau * itau));
    const Complex integral = core + tail_hi + tail_lo;
    return gamma / (2.0 * M_PI) * integral * std::exp(Complex(0, delta_c * tau));
}

// ------------------------------------------------------- reference dynamics

/// Plain scalar Euler recursion of the windowed amplitude equation (written
/// here again so the library's oracle has an independent twin).
inline std::vector<Complex> amplitude_euler(const vdm::KernelSamples& s, int n_steps) {
    const int m = s.size();
    std::vector<Complex> a(n_steps + 1, Complex(1, 0));
    for (int k = 0; k < n_steps; ++k) {
        Complex acc(0, 0);
        for (int j = 0; j < m && j <= k; ++j) acc += s.F[j] * a[k - j];
        a[k + 1] = a[k] - s.dt * s.dt * acc;
    }
    return a;
}

/// Hand-derived single-excitation recursion for the M = 2 undriven ensemble:
/// p_n = p_{n-1} - 2 dt^2 sum_j Re(F_j) p_{n-1-j}. Exact for M = 2 (the only
/// virtual blocks are the two single-trit labels, each alive for one step).
inline std::vector<double> m2_population_recursion(const vdm::KernelSamples& s, int n_steps) {
    const int m = s.size();
    std::vector<double> p(n_steps + 1, 1.0);
    for (int k = 0; k < n_steps; ++k) {
        double acc = 0;
        for (int j = 0; j < m && j <= k; ++j) acc += 2.0 * s.F[j].real() * p[k - j];
        p[k + 1] = p[k] - s.dt * s.dt * acc;
    }
    return p;
}

/// Reference one-step update of the whole virtual ensemble by direct 2x2
/// matrix products over a dense dictionary of labels. Follows the update rule
/// clause by clause; no superoperators, no sparse storage.
inline std::vector<Mat2> reference_step(const std::vector<Mat2>& blocks,
                                        const vdm::KernelSamples& s, double rabi, int m) {
    const double dt = s.dt;
    const Mat2 u = vdm::u0_propagator(rabi, dt);
    const Mat2 sm = vdm::sigma_minus();
    const Mat2 sp = vdm::sigma_plus();
    const std::int64_t n = vdm::pow3(m);

    auto shifted = [&](std::int64_t t, int fresh_digit) -> std::int64_t {
        // all slots age by one; slot 1 of the source holds fresh_digit
        return 3 * t + fresh_digit;
    };

    std::vector<Mat2> next(n, Mat2::Zero());
    for (std::int64_t t = 0; t < n; ++t) {
        if (vdm::label_digit(t, m) != vdm::Trit::X) continue;  // needs age past M
        Mat2 acc = Mat2::Zero();

        auto rotated = [&](std::int64_t source) -> Mat2 {
            return u * blocks[source] * u.adjoint();
        };

        {   // diagonal source with the dt^2 F0 correction
            const Mat2 r = rotated(shifted(t, 0));
            acc += r;
            acc += dt * dt * s.F[0] * (sm * r * sp - sp * sm * r);
            acc += dt * dt * std::conj(s.F[0]) * (sm * r * sp - r * sp * sm);
        }
        {   // closers: sources carry one extra age-1 trit
            const Mat2 ry = rotated(shifted(t, 1));
            acc += dt * (ry * sp - sp * ry);
            const Mat2 rz = rotated(shifted(t, 2));
            acc += dt * (sm * rz - rz * sm);
        }
        // openers: the target's own trit at age a, kernel factor F_a
        std::int64_t rest = t;
        for (int a = 1; a <= m; ++a) {
            const auto d = static_cast<int>(rest % 3);
            rest /= 3;
            if (d == 0 || a == m) continue;  // F_m lies outside the window
            const std::int64_t without = t - d * vdm::pow3(a - 1);
            const Mat2 r = rotated(shifted(without, 0));
            if (d == 1) acc += dt * s.F[a] * (sm * r);
            else acc += dt * std::conj(s.F[a]) * (r * sp);
        }
        next[t] = acc;
    }
    return next;
}

// -------------------------------------------- Markovian two-level reference

/// Plain two-level resonance fluorescence: d rho/dt = -i[H, rho] + gamma D[sigma],
/// H = (rabi/2) sigma_x, integrated with RK4. Returns the steady-state
/// correlation <sigma^dag(tau) sigma>_ss - <sigma^dag>_ss <sigma>_ss via
/// quantum regression (valid, the model is Markovian).
inline std::vector<Complex> markov_resonance_correlation(double gamma, double rabi,
                                                         double dt, int n_tau,
                                                         int substeps = 20) {
    const Mat2 sm = vdm::sigma_minus();
    const Mat2 sp = vdm::sigma_plus();
    const Mat2 h = 0.5 * rabi * vdm::sigma_x();
    auto rhs = [&](const Mat2& r) -> Mat2 {
        return Complex(0, -1) * (h * r - r * h) + gamma * (sm * r * sp)
             - 0.5 * gamma * (sp * sm * r + r * sp * sm);
    };
    auto rk4 = [&](Mat2 r, double hh) {
        const Mat2 k1 = rhs(r);
        const Mat2 k2 = rhs(r + 0.5 * hh * k1);
        const Mat2 k3 = rhs(r + 0.5 * hh * k2);
        const Mat2 k4 = rhs(r + hh * k3);
        return Mat2(r + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    Mat2 rho = Mat2::Zero();
    rho(0, 0) = 1.0;
    const double hh = dt / substeps;
    for (int k = 0; k < static_cast<int>(40.0 / hh); ++k) rho = rk4(rho, hh);

    const Complex sdag = (sp * rho).trace();
    const Complex s = (sm * rho).trace();
    Mat2 x = sm * rho;
    std::vector<Complex> c;
    c.reserve(n_tau + 1);
    c.push_back((sp * x).trace() - sdag * s);
    for (int k = 1; k <= n_tau; ++k) {
        for (int q = 0; q < substeps; ++q) x = rk4(x, hh);
        c.push_back((sp * x).trace() - sdag * s);
    }
    return c;
}

// ---------------------------------------------------------------- utilities

inline Mat2 random_hermitian(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat2 h;
    h(0, 0) = u(rng);
    h(1, 1) = u(rng);
    const Complex off(u(rng), u(rng));
    h(0, 1) = off;
    h(1, 0) = std::conj(off);
    return h;
}

inline Mat2 random_matrix(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat2 a;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = Complex(u(rng), u(rng));
    return a;
}

}  // namespace oracle
