#include "vdm/oracles.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace vdm {

namespace {
const Complex kI(0.0, 1.0);
}

std::vector<double> DecayAmplitude::population() const {
    std::vector<double> p(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) p[k] = std::norm(a[k]);
    return p;
}

DecayAmplitude decay_amplitude(const KernelSamples& samples, std::int64_t n_steps) {
    const int m = samples.size();
    const double dt = samples.dt;
    const auto& F = samples.F;

    DecayAmplitude out;
    out.t.resize(n_steps + 1);
    out.a.assign(n_steps + 1, Complex(1, 0));
    out.a_ladder.assign(n_steps + 1, Complex(1, 0));
    for (std::int64_t k = 0; k <= n_steps; ++k) out.t[k] = k * dt;

    // direct windowed convolution
    for (std::int64_t k = 0; k < n_steps; ++k) {
        Complex acc(0, 0);
        for (int j = 0; j < m && j <= k; ++j) acc += F[j] * out.a[k - j];
        out.a[k + 1] = out.a[k] - dt * dt * acc;
    }

    // Markovian rewrite: b^q accumulates the pending window contributions,
    // b^q_{n+1} = b^{q+1}_n - dt^2 F_q a_n, resolving through b^1.
    std::vector<Complex> b(m, Complex(0, 0)), nb(m);
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const Complex an = out.a_ladder[k];
        out.a_ladder[k + 1] = an - dt * dt * F[0] * an + (m > 1 ? b[1] : Complex(0, 0));
        std::fill(nb.begin(), nb.end(), Complex(0, 0));
        for (int q = 1; q + 1 < m; ++q) nb[q] = b[q + 1] - dt * dt * F[q] * an;
        if (m > 1) nb[m - 1] = -dt * dt * F[m - 1] * an;
        b.swap(nb);
    }
    return out;
}

LindbladBaseline::LindbladBaseline(const LindbladSystem& sys) : sys_(sys) {
    if (sys.fock_cutoff < 4)
        throw std::invalid_argument("LindbladBaseline: fock_cutoff must be >= 4");
    const int nc = sys.fock_cutoff + 1;
    dim_ = 2 * nc;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nc, nc);
    for (int n = 1; n < nc; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXcd ic = Eigen::MatrixXcd::Identity(nc, nc);

    auto kron = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
        Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    };

    sm_ = kron(sigma_minus(), ic);
    sp_ = kron(sigma_plus(), ic);
    a_ = kron(Eigen::MatrixXcd(identity2()), a);
    ada_ = a_.adjoint() * a_;

    // Rotating frame at the atomic frequency; the cavity term -delta_c a^dag a
    // reproduces the kernel phase exp(+i delta_c tau).
    h_ = 0.5 * sys.rabi * (sm_ + sp_) - sys.delta_c * ada_
       + kI * sys.g_ac * (a_.adjoint() * sm_ - sp_ * a_);
}

Eigen::MatrixXcd LindbladBaseline::product_state(const Mat2& atom, int photons) const {
    const int nc = sys_.fock_cutoff + 1;
    if (photons < 0 || photons >= nc)
        throw std::invalid_argument("product_state: photon number outside cutoff");
    Eigen::MatrixXcd cav = Eigen::MatrixXcd::Zero(nc, nc);
    cav(photons, photons) = 1.0;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            rho.block(i * nc, j * nc, nc, nc) = atom(i, j) * cav;
    return rho;
}

Eigen::MatrixXcd LindbladBaseline::lindblad_rhs(const Eigen::MatrixXcd& rho) const {
    return -kI * (h_ * rho - rho * h_)
         + sys_.kappa_c * (a_ * rho * a_.adjoint())
         - 0.5 * sys_.kappa_c * (ada_ * rho + rho * ada_);
}

Eigen::MatrixXcd LindbladBaseline::rk4_step(Eigen::MatrixXcd rho, double h) const {
    const Eigen::MatrixXcd k1 = lindblad_rhs(rho);
    const Eigen::MatrixXcd k2 = lindblad_rhs(rho + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = lindblad_rhs(rho + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = lindblad_rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return rho;
}

Mat2 LindbladBaseline::reduce(const Eigen::MatrixXcd& rho) const {
    const int nc = sys_.fock_cutoff + 1;
    Mat2 red = Mat2::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            red(i, j) = rho.block(i * nc, j * nc, nc, nc).trace();
    return red;
}

double LindbladBaseline::top_fock_population(const Eigen::MatrixXcd& rho) const {
    const int nc = sys_.fock_cutoff + 1;
    double p = 0.0;
    for (int i = 0; i < 2; ++i) p += rho(i * nc + nc - 1, i * nc + nc - 1).real();
    return p;
}

std::vector<TrajectoryPoint> LindbladBaseline::trajectory(const Eigen::MatrixXcd& rho0,
                                                          double dt, std::int64_t n_steps,
                                                          int substeps) {
    Eigen::MatrixXcd rho = rho0;
    std::vector<TrajectoryPoint> traj;
    traj.reserve(n_steps + 1);
    traj.push_back({0.0, reduce(rho)});
    const double h = dt / substeps;
    for (std::int64_t k = 1; k <= n_steps; ++k) {
        for (int s = 0; s < substeps; ++s) rho = rk4_step(std::move(rho), h);
        const double top = top_fock_population(rho);
        if (top > sys_.top_population_tol)
            throw CutoffExceeded("LindbladBaseline: top Fock level population "
                                 + std::to_string(top));
        traj.push_back({k * dt, reduce(rho)});
    }
    return traj;
}

Eigen::MatrixXcd LindbladBaseline::steady_state(const Eigen::MatrixXcd& rho0, double dt,
                                                double rel_tol, double window_time,
                                                double max_time, int substeps) {
    Eigen::MatrixXcd rho = rho0;
    const double h = dt / substeps;
    const auto window_steps = std::max<std::int64_t>(1, std::llround(window_time / dt));
    const auto max_steps = std::llround(max_time / dt);
    std::vector<Mat2> ring(window_steps + 1, reduce(rho));
    std::int64_t quiet = 0;
    double resid = 0.0;
    for (std::int64_t k = 1; k <= max_steps; ++k) {
        for (int s = 0; s < substeps; ++s) rho = rk4_step(std::move(rho), h);
        const Mat2 red = reduce(rho);
        if (k >= window_steps) {
            resid = (red - ring[k % (window_steps + 1)]).cwiseAbs().maxCoeff();
            quiet = resid <= rel_tol ? quiet + 1 : 0;
            if (quiet >= window_steps) return rho;
        }
        ring[k % (window_steps + 1)] = red;
    }
    throw NotConverged("LindbladBaseline: no steady state", resid);
}

Eigen::MatrixXcd LindbladBaseline::evolve(Eigen::MatrixXcd rho, double dt,
                                          std::int64_t n_steps, int substeps) const {
    const double h = dt / substeps;
    for (std::int64_t k = 0; k < n_steps; ++k)
        for (int s = 0; s < substeps; ++s) rho = rk4_step(std::move(rho), h);
    return rho;
}

double LindbladBaseline::mean_photons(const Eigen::MatrixXcd& rho) const {
    return (ada_ * rho).trace().real();
}

CorrelationTrace LindbladBaseline::correlation(const Eigen::MatrixXcd& rho_ss, double dt,
                                               std::int64_t n_tau, int substeps) {
    const Mat2 red = reduce(rho_ss);
    const Complex sdag = expectation(sigma_plus(), red);
    const Complex s = expectation(sigma_minus(), red);
    const Complex coherent = sdag * s;

    Eigen::MatrixXcd x = sm_ * rho_ss;
    CorrelationTrace trace;
    trace.tau.reserve(n_tau + 1);
    trace.values.reserve(n_tau + 1);
    trace.tau.push_back(0.0);
    trace.values.push_back((sp_ * x).trace() - coherent);
    const double h = dt / substeps;
    for (std::int64_t k = 1; k <= n_tau; ++k) {
        for (int s2 = 0; s2 < substeps; ++s2) x = rk4_step(std::move(x), h);
        trace.tau.push_back(k * dt);
        trace.values.push_back((sp_ * x).trace() - coherent);
    }
    trace.subtracted_coherent = true;
    return trace;
}

namespace {

// Uniform comb with least-squares couplings: min-norm solution of
// sum_k w_k exp(-i w_k tau_j) = f(tau_j); negatives are clamped and the
// residual is recomputed afterwards.
struct ModeFit {
    std::vector<double> omega;
    std::vector<double> weight;
    double residual_rel = 0.0;
};

ModeFit fit_modes(const KernelSpec& spec, const DiscreteModeSettings& s) {
    ModeFit fit;
    fit.omega.resize(s.n_modes);
    for (int k = 0; k < s.n_modes; ++k)
        fit.omega[k] = -s.band + 2.0 * s.band * k / (s.n_modes - 1);

    const double dtau = s.dt * s.fit_tau_step_factor;
    const auto n_tau = static_cast<int>(std::floor(s.t_final / dtau)) + 1;
    Eigen::MatrixXd A(2 * n_tau, s.n_modes);
    Eigen::VectorXd b(2 * n_tau);
    for (int j = 0; j < n_tau; ++j) {
        const double tau = j * dtau;
        const Complex f = kernel_value(spec, tau);
        b(j) = f.real();
        b(n_tau + j) = f.imag();
        for (int k = 0; k < s.n_modes; ++k) {
            A(j, k) = std::cos(fit.omega[k] * tau);
            A(n_tau + j, k) = -std::sin(fit.omega[k] * tau);
        }
    }
    Eigen::VectorXd w = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    fit.weight.resize(s.n_modes);
    for (int k = 0; k < s.n_modes; ++k) fit.weight[k] = std::max(w(k), 0.0);

    const double f0 = std::abs(kernel_value(spec, 0.0));
    double worst = 0.0;
    for (int j = 0; j < n_tau; ++j) {
        const double tau = j * dtau;
        Complex acc(0, 0);
        for (int k = 0; k < s.n_modes; ++k)
            acc += fit.weight[k] * std::exp(Complex(0, -fit.omega[k] * tau));
        worst = std::max(worst, std::abs(acc - kernel_value(spec, tau)));
    }
    fit.residual_rel = f0 > 0.0 ? worst / f0 : worst;
    return fit;
}

}  // namespace

DiscreteModeResult discrete_mode_oracle(const KernelSpec& spec, const DiscreteModeSettings& s) {
    if (s.excitation_cutoff < 1 || s.excitation_cutoff > 2)
        throw std::invalid_argument("discrete_mode_oracle: excitation_cutoff must be 1 or 2");
    const ModeFit fit = fit_modes(spec, s);
    if (fit.residual_rel > s.fit_residual_tol)
        throw CutoffExceeded("discrete_mode_oracle: kernel fit residual "
                             + std::to_string(fit.residual_rel));

    const int K = s.n_modes;
    std::vector<double> g(K);
    for (int k = 0; k < K; ++k) g[k] = std::sqrt(fit.weight[k]);

    // State ordering: |g,0>, |e,0>, |g,1_k>, |e,1_k>, |g,1_k 1_l> (k <= l).
    const bool pairs = s.excitation_cutoff == 2;
    const int iG0 = 0, iE0 = 1, iG1 = 2, iE1 = 2 + K, iG2 = 2 + 2 * K;
    const int n_pair = pairs ? K * (K + 1) / 2 : 0;
    const int dim = iG2 + n_pair;

    auto pair_index = [K](int k, int l) {
        if (k > l) std::swap(k, l);
        return k * K - k * (k - 1) / 2 + (l - k);
    };

    // Sparse Hamiltonian in triplet arrays (fixed structure, applied manually).
    std::vector<double> diag(dim, 0.0);
    for (int k = 0; k < K; ++k) {
        diag[iG1 + k] = fit.omega[k];
        diag[iE1 + k] = fit.omega[k];
    }
    if (pairs)
        for (int k = 0; k < K; ++k)
            for (int l = k; l < K; ++l)
                diag[iG2 + pair_index(k, l)] = fit.omega[k] + fit.omega[l];

    const double half_rabi = 0.5 * s.rabi;
    std::vector<Complex> psi(dim, Complex(0, 0));
    psi[iE0] = 1.0;

    auto apply_h = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
        for (int i = 0; i < dim; ++i) y[i] = diag[i] * x[i];
        // drive
        y[iE0] += half_rabi * x[iG0];
        y[iG0] += half_rabi * x[iE0];
        for (int k = 0; k < K; ++k) {
            y[iE1 + k] += half_rabi * x[iG1 + k];
            y[iG1 + k] += half_rabi * x[iE1 + k];
        }
        // i g_k (b_k^dag sigma - sigma^dag b_k) within one excitation
        for (int k = 0; k < K; ++k) {
            y[iG1 + k] += kI * g[k] * x[iE0];
            y[iE0] -= kI * g[k] * x[iG1 + k];
        }
        if (pairs) {
            // |e,1_l> <-> |g,1_k 1_l>, bosonic sqrt(2) on the diagonal pair
            for (int l = 0; l < K; ++l) {
                const Complex xe = x[iE1 + l];
                Complex acc(0, 0);
                for (int k = 0; k < K; ++k) {
                    const int p = iG2 + pair_index(k, l);
                    const double amp = (k == l) ? g[k] * std::sqrt(2.0) : g[k];
                    y[p] += kI * amp * xe;
                    acc += amp * x[p];
                }
                y[iE1 + l] -= kI * acc;
            }
        }
    };

    const auto n_steps = std::llround(s.t_final / s.dt);
    const double h = s.dt / s.substeps;
    std::vector<Complex> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    auto deriv = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
        apply_h(x, y);
        for (int i = 0; i < dim; ++i) y[i] *= -kI;
    };

    DiscreteModeResult out;
    out.fit_residual = fit.residual_rel;
    out.n_modes = K;
    out.t.reserve(n_steps + 1);
    out.population.reserve(n_steps + 1);

    auto record = [&](double t) {
        double p = std::norm(psi[iE0]);
        for (int k = 0; k < K; ++k) p += std::norm(psi[iE1 + k]);
        out.t.push_back(t);
        out.population.push_back(p);
    };
    record(0.0);

    for (std::int64_t step = 1; step <= n_steps; ++step) {
        for (int sub = 0; sub < s.substeps; ++sub) {
            deriv(psi, k1);
            for (int i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
            deriv(tmp, k2);
            for (int i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
            deriv(tmp, k3);
            for (int i = 0; i < dim; ++i) tmp[i] = psi[i] + h * k3[i];
            deriv(tmp, k4);
            for (int i = 0; i < dim; ++i)
                psi[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        record(step * s.dt);
    }
    return out;
}

}  // namespace vdm
