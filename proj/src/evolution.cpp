#include "vdm/evolution.hpp"

#include <stdexcept>

#include "vdm/labels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vdm {

std::int64_t EvolutionOperator::scalar_nonzeros() const {
    std::int64_t count = 0;
    std::vector<std::int64_t> per_block(dict.size(), 0);
    for (std::size_t d = 0; d < dict.size(); ++d) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (dict[d](i, j) != Complex(0, 0)) ++per_block[d];
    }
    for (std::int32_t id : block_id) count += per_block[id];
    return count;
}

std::int64_t EvolutionOperator::memory_bytes() const {
    return static_cast<std::int64_t>(row_ptr.capacity() * sizeof(std::int64_t)
         + src.capacity() * sizeof(std::int64_t)
         + block_id.capacity() * sizeof(std::int32_t)
         + dict.capacity() * sizeof(Mat4));
}

EvolutionOperator build_evolution_operator(const KernelSamples& samples, double rabi,
                                           int m, const BuildOptions& opt) {
    if (samples.size() != m)
        throw std::invalid_argument("build_evolution_operator: samples length must equal M");
    if (m < 1) throw std::invalid_argument("build_evolution_operator: M must be >= 1");

    const double dt = samples.dt;
    const auto& F = samples.F;

    EvolutionOperator op;
    op.m = m;
    op.dt = dt;
    op.rabi = rabi;
    op.n_blocks = pow3(m);
    op.n_rows = pow3(m - 1);

    const Mat4 uf = free_rotation_super(rabi, dt);
    const Mat4 close_y = right_super(sigma_plus()) - left_super(sigma_plus());
    const Mat4 close_z = left_super(sigma_minus()) - right_super(sigma_minus());
    const Mat4 corr = Mat4::Identity()
        + dt * dt * F[0] * close_y * left_super(sigma_minus())
        + dt * dt * std::conj(F[0]) * close_z * right_super(sigma_plus());

    // Dictionary layout: [0] diagonal, [1] close-Y, [2] close-Z,
    // [3 .. M+1] open-Y at age a = 1..M-1, [M+2 .. 2M] open-Z.
    op.dict.reserve(2 * m + 1);
    op.dict.push_back(corr * uf);
    op.dict.push_back(dt * close_y * (opt.diagonal_correction_on_fresh ? Mat4(corr * uf) : uf));
    op.dict.push_back(dt * close_z * (opt.diagonal_correction_on_fresh ? Mat4(corr * uf) : uf));
    for (int a = 1; a < m; ++a)
        op.dict.push_back(dt * F[a] * left_super(sigma_minus()) * uf);
    for (int a = 1; a < m; ++a)
        op.dict.push_back(dt * std::conj(F[a]) * right_super(sigma_plus()) * uf);

    op.row_ptr.resize(op.n_rows + 1, 0);

    std::vector<std::int64_t> place(m + 1);
    for (int s = 0; s <= m; ++s) place[s] = pow3(s);

    // Counting pass, then fill.
    for (std::int64_t t = 0; t < op.n_rows; ++t) {
        int extra = 0;
        std::int64_t rest = t;
        for (int a = 1; a < m; ++a) {
            if (rest % 3 != 0) ++extra;
            rest /= 3;
        }
        op.row_ptr[t + 1] = op.row_ptr[t] + 3 + extra;
    }
    op.src.resize(op.row_ptr[op.n_rows]);
    op.block_id.resize(op.row_ptr[op.n_rows]);

    for (std::int64_t t = 0; t < op.n_rows; ++t) {
        std::int64_t k = op.row_ptr[t];
        op.src[k] = 3 * t;
        op.block_id[k++] = 0;
        op.src[k] = 3 * t + 1;
        op.block_id[k++] = 1;
        op.src[k] = 3 * t + 2;
        op.block_id[k++] = 2;
        std::int64_t rest = t;
        for (int a = 1; a < m; ++a) {
            const int d = static_cast<int>(rest % 3);
            rest /= 3;
            if (d == 1) {
                op.src[k] = 3 * (t - place[a - 1]);
                op.block_id[k++] = 2 + a;
            } else if (d == 2) {
                op.src[k] = 3 * (t - 2 * place[a - 1]);
                op.block_id[k++] = 2 + (m - 1) + a;
            }
        }
    }
    return op;
}

namespace {

inline void apply_row(const EvolutionOperator& op, const Complex* in, Complex* out,
                      std::int64_t t) {
    Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
    for (std::int64_t k = op.row_ptr[t]; k < op.row_ptr[t + 1]; ++k) {
        const Eigen::Map<const Eigen::Vector4cd> x(in + 4 * op.src[k]);
        acc.noalias() += op.dict[op.block_id[k]] * x;
    }
    Eigen::Map<Eigen::Vector4cd>(out + 4 * t) = acc;
}

}  // namespace

void apply(const EvolutionOperator& op, std::span<const Complex> in,
           std::span<Complex> out, Backend backend) {
    const std::int64_t n = 4 * op.n_blocks;
    if (static_cast<std::int64_t>(in.size()) != n || static_cast<std::int64_t>(out.size()) != n)
        throw std::invalid_argument("apply: state size must be 4 * 3^M");
    const Complex* pin = in.data();
    Complex* pout = out.data();

    if (backend == Backend::OpenMP) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t t = 0; t < op.n_rows; ++t) apply_row(op, pin, pout, t);
    } else {
        for (std::int64_t t = 0; t < op.n_rows; ++t) apply_row(op, pin, pout, t);
    }
    // Rows past 3^(M-1) have no sources; their blocks are zero by invariant.
    std::fill(pout + 4 * op.n_rows, pout + n, Complex(0, 0));
}

std::int64_t ensemble_memory_estimate(int m) {
    const std::int64_t blocks = pow3(m);
    const std::int64_t rows = pow3(m - 1);
    const std::int64_t state = 2 * blocks * 4 * static_cast<std::int64_t>(sizeof(Complex));
    // 3 fixed entries per row plus two thirds of the M-1 inner slots.
    const std::int64_t entries = rows * (3 + (2 * (m - 1)) / 3 + 1);
    const std::int64_t oper = entries * (sizeof(std::int64_t) + sizeof(std::int32_t))
                            + (rows + 1) * sizeof(std::int64_t);
    return state + oper;
}

}  // namespace vdm
