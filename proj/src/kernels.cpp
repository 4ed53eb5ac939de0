#include "vdm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace vdm {

namespace {
const Complex kI(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Antiderivative pieces for the moments of (1 + lambda tau)^{-3/2}.
// w0(n) = int_{n dt}^{(n+1) dt} (1+lambda tau)^{-3/2} dtau
double moment0(double lambda, double dt, int n) {
    const double u0 = 1.0 + lambda * n * dt;
    const double u1 = 1.0 + lambda * (n + 1) * dt;
    return (2.0 / lambda) * (1.0 / std::sqrt(u0) - 1.0 / std::sqrt(u1));
}

// w1(n) = (1/dt) int tau (1+lambda tau)^{-3/2} dtau over the same cell
double moment1(double lambda, double dt, int n) {
    const double u0 = 1.0 + lambda * n * dt;
    const double u1 = 1.0 + lambda * (n + 1) * dt;
    auto anti = [&](double u) { return (2.0 / (lambda * lambda)) * (std::sqrt(u) + 1.0 / std::sqrt(u)); };
    return (anti(u1) - anti(u0)) / dt;
}
}  // namespace

Complex cavity_kernel(const CavityKernel& k, double tau) {
    require(tau >= 0.0, "cavity_kernel: tau must be >= 0");
    return k.gamma * std::exp((kI * k.delta_c - 0.5 * k.kappa2) * tau);
}

Complex bandgap_kernel(const BandgapKernel& k, double tau) {
    require(tau >= 0.0, "bandgap_kernel: tau must be >= 0");
    const double mag = k.beta * std::pow(k.lambda, 1.5) / std::pow(1.0 + k.lambda * tau, 1.5);
    return mag * std::exp(kI * (k.delta * tau + kPi / 4.0));
}

Complex kernel_value(const KernelSpec& spec, double tau) {
    return std::visit([tau](const auto& k) -> Complex {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CavityKernel>) return cavity_kernel(k, tau);
        else if constexpr (std::is_same_v<T, BandgapKernel>) return bandgap_kernel(k, tau);
        else return Complex(k.gamma, 0.0);
    }, spec);
}

double born_markov_rate(double beta, double lambda) {
    require(beta > 0.0 && lambda > 0.0, "born_markov_rate: beta, lambda must be positive");
    return std::pow(2.0, 1.5) * beta * std::sqrt(lambda);
}

double beta_for_rate(double gamma, double lambda) {
    require(gamma > 0.0 && lambda > 0.0, "beta_for_rate: gamma, lambda must be positive");
    return gamma / (std::pow(2.0, 1.5) * std::sqrt(lambda));
}

std::vector<double> trapezoid_weights(int m) {
    require(m >= 2, "trapezoid_weights: M must be >= 2");
    std::vector<double> w(m, 1.0);
    w.front() = 0.5;
    w.back() = 0.5;
    return w;
}

std::vector<double> moment_weights(double lambda, double dt, int m) {
    require(lambda > 0.0, "moment_weights: lambda must be positive");
    require(dt > 0.0, "moment_weights: dt must be positive");
    require(m >= 2, "moment_weights: M must be >= 2");
    std::vector<double> w(m);
    w[0] = moment0(lambda, dt, 0) - moment1(lambda, dt, 0);
    w[m - 1] = -(m - 2) * moment0(lambda, dt, m - 2) + moment1(lambda, dt, m - 2);
    for (int n = 1; n <= m - 2; ++n) {
        w[n] = (n + 1) * moment0(lambda, dt, n) - moment1(lambda, dt, n)
             - (n - 1) * moment0(lambda, dt, n - 1) + moment1(lambda, dt, n - 1);
    }
    return w;
}

KernelSamples sample_kernel(const KernelSpec& spec, double dt, int m) {
    require(dt > 0.0, "sample_kernel: dt must be positive");
    require(m >= 1, "sample_kernel: M must be >= 1");
    KernelSamples out;
    out.dt = dt;
    out.F.resize(m);

    if (const auto* flat = std::get_if<FlatKernel>(&spec)) {
        require(flat->gamma > 0.0, "sample_kernel: flat gamma must be positive");
        if (m == 1) {
            // Degenerate window: a single sample with dt * F0 = gamma / 2.
            out.F[0] = Complex(flat->gamma / (2.0 * dt), 0.0);
            return out;
        }
        const auto w = trapezoid_weights(m);
        const double value = flat->gamma / (2.0 * (m - 1) * dt);
        for (int n = 0; n < m; ++n) out.F[n] = Complex(w[n] * value, 0.0);
        return out;
    }

    require(m >= 2, "sample_kernel: M must be >= 2 for structured kernels");

    if (const auto* cav = std::get_if<CavityKernel>(&spec)) {
        require(cav->gamma > 0.0 && cav->kappa2 > 0.0,
                "sample_kernel: cavity gamma, kappa2 must be positive");
        const auto w = trapezoid_weights(m);
        for (int n = 0; n < m; ++n) out.F[n] = w[n] * cavity_kernel(*cav, n * dt);
        return out;
    }

    const auto& bg = std::get<BandgapKernel>(spec);
    require(bg.beta > 0.0 && bg.lambda > 0.0,
            "sample_kernel: bandgap beta, lambda must be positive");
    const auto w = moment_weights(bg.lambda, dt, m);
    // The (1 + lambda tau)^{-3/2} factor lives in the weights; the smooth part
    // is sampled at the nodes and the consumer-side dt is divided out here.
    const double amp = bg.beta * std::pow(bg.lambda, 1.5);
    for (int n = 0; n < m; ++n) {
        const double tau = n * dt;
        out.F[n] = (w[n] / dt) * amp * std::exp(kI * (bg.delta * tau + kPi / 4.0));
    }
    return out;
}

double truncation_ratio(const KernelSpec& spec, double t_window) {
    const double f0 = std::abs(kernel_value(spec, 0.0));
    if (f0 == 0.0) return 0.0;
    return std::abs(kernel_value(spec, t_window)) / f0;
}

}  // namespace vdm
