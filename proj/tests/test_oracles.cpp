#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle_helpers.hpp"
#include "vdm/oracles.hpp"

using namespace vdm;

namespace {

Mat2 excited() {
    Mat2 rho = Mat2::Zero();
    rho(0, 0) = 1.0;
    return rho;
}

Mat2 ground() {
    Mat2 rho = Mat2::Zero();
    rho(1, 1) = 1.0;
    return rho;
}

}  // namespace

TEST_CASE("decay_amplitude: direct and Markovian-rewrite forms coincide") {
    for (int m : {1, 2, 5, 11}) {
        const KernelSamples s = sample_kernel(
            m == 1 ? KernelSpec(FlatKernel{1.0}) : KernelSpec(CavityKernel{1.0, 4.0, 8.0}),
            0.02, m);
        const DecayAmplitude amp = decay_amplitude(s, 400);
        double worst = 0;
        for (std::size_t k = 0; k < amp.a.size(); ++k)
            worst = std::max(worst, std::abs(amp.a[k] - amp.a_ladder[k]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("decay_amplitude: zero kernel freezes the amplitude") {
    KernelSamples zero;
    zero.dt = 0.05;
    zero.F.assign(4, Complex(0, 0));
    const DecayAmplitude amp = decay_amplitude(zero, 100);
    for (const auto& a : amp.a) CHECK(a == Complex(1, 0));
}

TEST_CASE("decay_amplitude: flat single-sample window approaches exp(-gamma t / 2)") {
    double prev = 0;
    for (double dt : {0.05, 0.025, 0.0125}) {
        const KernelSamples s = sample_kernel(FlatKernel{1.0}, dt, 1);
        const auto n = std::llround(4.0 / dt);
        const DecayAmplitude amp = decay_amplitude(s, n);
        double worst = 0;
        for (std::int64_t k = 0; k <= n; ++k)
            worst = std::max(worst, std::abs(amp.a[k] - std::exp(-0.5 * k * dt)));
        CHECK(worst < 2e-2);
        if (prev > 0) CHECK(prev / worst > 1.5);
        prev = worst;
    }
}

TEST_CASE("decay_amplitude matches an independent scalar recursion") {
    const KernelSamples s = sample_kernel(BandgapKernel{beta_for_rate(1.0, 300.0), 300.0, 10.0},
                                          0.02, 11);
    const auto twin = oracle::amplitude_euler(s, 300);
    const DecayAmplitude amp = decay_amplitude(s, 300);
    for (std::size_t k = 0; k < twin.size(); ++k)
        CHECK(std::abs(twin[k] - amp.a[k]) < 1e-14);
}

TEST_CASE("band-gap decay rates vary with the detuning") {
    const double dt = 0.02;
    const auto n = std::llround(8.0 / dt);
    std::vector<double> rates;
    for (double delta : {10.0, 0.0, -10.0}) {
        const KernelSamples s = sample_kernel(
            BandgapKernel{beta_for_rate(1.0, 300.0), 300.0, delta}, dt, 11);
        const DecayAmplitude amp = decay_amplitude(s, n);
        const auto pop = amp.population();
        // crude rate from two points well inside the exponential regime
        const auto i1 = std::llround(1.0 / dt), i2 = std::llround(5.0 / dt);
        rates.push_back(std::log(pop[i1] / pop[i2]) / (amp.t[i2] - amp.t[i1]));
    }
    CHECK(std::abs(rates[0] - rates[1]) / rates[1] > 0.05);
    CHECK(std::abs(rates[1] - rates[2]) / rates[1] > 0.05);
    CHECK(rates[0] < rates[1]);  // detuning above the edge decays slower
    CHECK(rates[1] < rates[2]);
}

TEST_CASE("lindblad baseline: bare cavity decay, trace and positivity") {
    LindbladSystem sys;
    sys.fock_cutoff = 6;
    sys.rabi = 0.0;
    sys.g_ac = 0.0;
    sys.delta_c = 0.0;
    sys.kappa_c = 2.0;
    LindbladBaseline baseline(sys);

    // one photon, uncoupled atom in the ground state: <n>(t) = exp(-kappa_c t)
    Eigen::MatrixXcd rho = baseline.product_state(ground(), 1);
    const double dt = 0.02;
    for (int k = 1; k <= 100; ++k) {
        rho = baseline.evolve(std::move(rho), dt, 1, 10);
        const double t = k * dt;
        CHECK(baseline.mean_photons(rho)
              == doctest::Approx(std::exp(-sys.kappa_c * t)).epsilon(1e-8));
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
        for (int d = 0; d < rho.rows(); ++d) CHECK(rho(d, d).real() > -1e-12);
    }
}

TEST_CASE("cross-oracle: undriven cavity decay, lindblad vs amplitude equation") {
    // atom excited, field empty; both oracles integrate the same physics
    LindbladSystem sys;
    sys.fock_cutoff = 6;
    sys.rabi = 0.0;
    sys.g_ac = 1.0;        // g^2 = gamma = 1
    sys.delta_c = 4.0;
    sys.kappa_c = 8.0;
    LindbladBaseline baseline(sys);
    const double dt = 0.005;  // fine grid: the Euler oracle is first order
    const auto n = std::llround(4.0 / dt);
    const auto traj = baseline.trajectory(baseline.product_state(excited(), 0), dt, n, 4);

    const KernelSamples s = sample_kernel(CavityKernel{1.0, 4.0, 8.0}, dt, 241);
    const DecayAmplitude amp = decay_amplitude(s, n);
    const auto pop = amp.population();
    double worst = 0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        worst = std::max(worst, std::abs(excited_population(traj[k].rho) - pop[k]));
    CHECK(worst < 5e-3);
}

TEST_CASE("discrete-mode oracle: single-excitation sector against the amplitude equation") {
    DiscreteModeSettings s;
    s.n_modes = 360;
    s.band = 700.0;
    s.t_final = 1.0;
    s.dt = 0.025;
    s.substeps = 24;
    s.rabi = 0.0;
    s.excitation_cutoff = 1;
    const KernelSpec spec = CavityKernel{1.0, 0.0, 100.0};
    const DiscreteModeResult res = discrete_mode_oracle(spec, s);
    CHECK(res.fit_residual < 0.01);

    // reference on a fine grid: same kernel, near-converged window sum
    const double fine = 0.0025;
    const KernelSamples samples = sample_kernel(spec, fine, 241);
    const DecayAmplitude amp = decay_amplitude(samples, std::llround(s.t_final / fine));
    const auto pop = amp.population();
    double worst = 0;
    for (std::size_t k = 0; k < res.t.size(); ++k) {
        const auto idx = std::llround(res.t[k] / fine);
        worst = std::max(worst, std::abs(res.population[k] - pop[idx]));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("discrete-mode oracle: no coupling leaves the Rabi oscillation") {
    DiscreteModeSettings s;
    s.n_modes = 40;
    s.band = 50.0;
    s.t_final = 2.0;
    s.dt = 0.02;
    s.substeps = 8;
    s.rabi = 1.3;
    s.excitation_cutoff = 2;
    const DiscreteModeResult res = discrete_mode_oracle(KernelSpec(FlatKernel{0.0}), s);
    for (std::size_t k = 0; k < res.t.size(); ++k)
        CHECK(res.population[k]
              == doctest::Approx(std::pow(std::cos(0.5 * s.rabi * res.t[k]), 2)).epsilon(1e-8));
}

TEST_CASE("discrete-mode oracle rejects a hopeless fit") {
    DiscreteModeSettings s;
    s.n_modes = 6;
    s.band = 3.0;
    s.t_final = 1.0;
    s.dt = 0.05;
    s.fit_residual_tol = 1e-3;
    CHECK_THROWS_AS(discrete_mode_oracle(KernelSpec(CavityKernel{1.0, 0.0, 80.0}), s),
                    CutoffExceeded);
}
