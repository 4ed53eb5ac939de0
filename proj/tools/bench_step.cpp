// Timing harness for the one-step block matvec: serial reference vs the
// OpenMP kernel, with a bitwise equality check between the two.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vdm/core.hpp"
#include "vdm/ensemble.hpp"
#include "vdm/evolution.hpp"
#include "vdm/kernels.hpp"
#include "vdm/labels.hpp"

using namespace vdm;

int main(int argc, char** argv) {
    int m = 11;
    double dt = 1.0 / 14.0;
    int steps = 100;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--m") m = std::atoi(argv[i + 1]);
        else if (key == "--dt") dt = std::atof(argv[i + 1]);
        else if (key == "--steps") steps = std::atoi(argv[i + 1]);
        else {
            std::fprintf(stderr, "usage: bench_step [--m M] [--dt DT] [--steps N]\n");
            return 1;
        }
    }

    const KernelSpec spec = CavityKernel{1.0, 4.0, 8.0};
    const KernelSamples samples = sample_kernel(spec, dt, m);
    const EvolutionOperator op = build_evolution_operator(samples, 4.0, m);

    std::printf("M=%d  blocks=%lld  active rows=%lld  block entries=%lld  scalar nnz=%lld\n",
                m, static_cast<long long>(op.n_blocks), static_cast<long long>(op.n_rows),
                static_cast<long long>(op.entries()),
                static_cast<long long>(op.scalar_nonzeros()));
    std::printf("operator memory: %.1f MB, state vector: %.1f MB\n",
                op.memory_bytes() / 1048576.0, 4.0 * op.n_blocks * sizeof(Complex) / 1048576.0);
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: not enabled\n");
#endif

    Mat2 rho0 = Mat2::Zero();
    rho0(0, 0) = 1.0;

    auto time_run = [&](Backend backend, std::vector<Complex>& final_state) {
        VirtualEnsemble ens(rho0, m, dt);
        const auto start = std::chrono::steady_clock::now();
        for (int k = 0; k < steps; ++k) ens.step(op, backend);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        final_state.assign(ens.state().begin(), ens.state().end());
        return secs;
    };

    std::vector<Complex> serial_state, parallel_state;
    const double t_serial = time_run(Backend::Serial, serial_state);
    const double t_parallel = time_run(Backend::OpenMP, parallel_state);

    const bool identical = serial_state.size() == parallel_state.size()
        && std::memcmp(serial_state.data(), parallel_state.data(),
                       serial_state.size() * sizeof(Complex)) == 0;

    const double flop = 2.0 * 8.0 * static_cast<double>(op.scalar_nonzeros()) * steps;
    std::printf("serial : %8.3f s  (%.2f Gflop/s)\n", t_serial, flop / t_serial / 1e9);
    std::printf("openmp : %8.3f s  (%.2f Gflop/s, speedup %.2fx)\n", t_parallel,
                flop / t_parallel / 1e9, t_serial / t_parallel);
    std::printf("bitwise identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
