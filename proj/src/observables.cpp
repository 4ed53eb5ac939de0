#include "vdm/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace vdm {

double excited_population(const Mat2& rho) {
    return rho(0, 0).real();
}

bool population_physical(double p, double eps) {
    return p >= -eps && p <= 1.0 + eps;
}

Complex expectation(const Mat2& a, const Mat2& rho) {
    return (a * rho).trace();
}

SteadyState detect_steady_state(const std::vector<TrajectoryPoint>& traj,
                                double rel_tol, double window_time) {
    if (traj.empty()) throw std::invalid_argument("detect_steady_state: empty trajectory");
    const std::size_t n = traj.size();
    if (traj.back().t - traj.front().t < window_time)
        throw NotConverged("detect_steady_state: trajectory shorter than one window", 0.0);

    // q[j] = largest elementwise change between sample j and any sample in its
    // trailing window [t_j - window, t_j].
    std::vector<double> q(n, 0.0);
    std::size_t lo = 0;
    for (std::size_t j = 1; j < n; ++j) {
        while (traj[j].t - traj[lo].t > window_time) ++lo;
        double worst = 0.0;
        for (std::size_t k = lo; k < j; ++k)
            worst = std::max(worst, (traj[j].rho - traj[k].rho).cwiseAbs().maxCoeff());
        q[j] = worst;
    }

    // Earliest index after which every window stays quiet to the end, with at
    // least one full window of evidence beyond it.
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) suffix[j] = std::max(q[j], suffix[j + 1]);
    for (std::size_t i = 0; i < n; ++i) {
        if (traj.back().t - traj[i].t < window_time) break;
        if (suffix[i + 1] <= rel_tol)
            return SteadyState{static_cast<std::int64_t>(i), traj.back().rho, suffix[i + 1]};
    }
    throw NotConverged("steady state not reached", q[n - 1]);
}

CorrelationResult correlation_function(const EvolutionOperator& op, const Mat2& rho0,
                                       const CorrelationSettings& s) {
    VirtualEnsemble ens(rho0, op.m, op.dt);
    const double dt = op.dt;
    const std::int64_t window_steps = std::max<std::int64_t>(1, std::llround(s.steady_window / dt));
    const std::int64_t max_steps = std::llround(s.steady_max_time / dt);

    // Streaming steady-state detection over a ring buffer one window long.
    std::vector<Mat2> ring(window_steps + 1, ens.project());
    bool settled = false;
    double resid = 0.0;
    std::int64_t quiet = 0;
    for (std::int64_t k = 1; k <= max_steps && !settled; ++k) {
        ens.step(op, s.backend);
        const Mat2 rho = ens.project();
        const Mat2& old = ring[k % (window_steps + 1)];
        if (k >= window_steps) {
            resid = (rho - old).cwiseAbs().maxCoeff();
            quiet = resid <= s.steady_rel_tol ? quiet + 1 : 0;
            // a full window of quiet one-window changes
            if (quiet >= window_steps) settled = true;
        }
        ring[k % (window_steps + 1)] = rho;
    }
    if (!settled) throw NotConverged("correlation_function: no steady state", resid);

    CorrelationResult out;
    out.rho_ss = ens.project();
    out.t_steady = ens.time();
    out.steady_residual = resid;
    out.sdag_ss = expectation(sigma_plus(), out.rho_ss);
    out.s_ss = expectation(sigma_minus(), out.rho_ss);
    out.n_ss = expectation(sigma_plus() * sigma_minus(), out.rho_ss).real();

    ens.apply_lowering();
    const Complex coherent = out.sdag_ss * out.s_ss;
    const std::int64_t n_tau = std::llround(s.tau_max / dt);
    out.trace.tau.reserve(n_tau + 1);
    out.trace.values.reserve(n_tau + 1);
    out.trace.tau.push_back(0.0);
    out.trace.values.push_back(expectation(sigma_plus(), ens.project()) - coherent);
    for (std::int64_t k = 1; k <= n_tau; ++k) {
        ens.step(op, s.backend);
        out.trace.tau.push_back(k * dt);
        out.trace.values.push_back(expectation(sigma_plus(), ens.project()) - coherent);
    }
    out.trace.subtracted_coherent = true;
    return out;
}

Spectrum spectrum(const CorrelationTrace& trace, double omega_max, double omega_step,
                  SpectrumWindow window) {
    const std::size_t n = trace.tau.size();
    if (n < 2) throw std::invalid_argument("spectrum: need at least two tau samples");
    const double dtau = trace.tau[1] - trace.tau[0];
    for (std::size_t k = 1; k < n; ++k) {
        if (std::abs(trace.tau[k] - trace.tau[k - 1] - dtau) > 1e-9 * dtau)
            throw std::invalid_argument("spectrum: tau grid must be uniform");
    }
    std::vector<double> w(n, 1.0);
    w.front() = 0.5;
    w.back() = 0.5;
    if (window == SpectrumWindow::Hann) {
        for (std::size_t k = 0; k < n; ++k)
            w[k] *= 0.5 * (1.0 + std::cos(M_PI * trace.tau[k] / trace.tau.back()));
    }

    const auto half = static_cast<std::int64_t>(std::floor(omega_max / omega_step + 1e-9));
    Spectrum s;
    s.omega.reserve(2 * half + 1);
    s.values.reserve(2 * half + 1);
    for (std::int64_t q = -half; q <= half; ++q) {
        const double om = q * omega_step;
        Complex acc(0, 0);
        for (std::size_t k = 0; k < n; ++k)
            acc += w[k] * trace.values[k] * std::exp(Complex(0, -om * trace.tau[k]));
        s.omega.push_back(om);
        s.values.push_back(2.0 * (acc * dtau).real());
    }
    return s;
}

SidePeaks side_peaks(const Spectrum& s, double omega_split) {
    SidePeaks p;
    p.height_plus = p.height_minus = -1e300;
    for (std::size_t k = 0; k < s.omega.size(); ++k) {
        if (s.omega[k] > omega_split && s.values[k] > p.height_plus) {
            p.height_plus = s.values[k];
            p.omega_plus = s.omega[k];
        }
        if (s.omega[k] < -omega_split && s.values[k] > p.height_minus) {
            p.height_minus = s.values[k];
            p.omega_minus = s.omega[k];
        }
    }
    return p;
}

}  // namespace vdm
