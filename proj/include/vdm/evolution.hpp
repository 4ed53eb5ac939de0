#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vdm/core.hpp"
#include "vdm/kernels.hpp"

namespace vdm {

enum class Backend { Serial, OpenMP };

struct BuildOptions {
    // Literal reading of the update rule: the dt^2 F0 correction multiplies
    // only the age-shifted diagonal source. The alternative also applies it
    // to the two fresh-emission sources; both agree to the scheme's order.
    bool diagonal_correction_on_fresh = false;
};

/// One-step evolution superoperator for the full virtual ensemble, stored as
/// a block-sparse matrix: a CSR layout over 4x4 blocks whose values live in a
/// small dictionary (the same few blocks repeat across the whole ladder).
///
/// Block rows above 3^(M-1) have no entries: a label whose oldest slot is not
/// X would need a source outside the truncated memory window, so it receives
/// nothing and stays zero for all time.
struct EvolutionOperator {
    int m = 0;
    double dt = 0.0;
    double rabi = 0.0;
    std::int64_t n_blocks = 0;          // 3^M
    std::int64_t n_rows = 0;            // 3^(M-1), rows that carry entries
    std::vector<std::int64_t> row_ptr;  // size n_rows + 1
    std::vector<std::int64_t> src;      // source block index per entry
    std::vector<std::int32_t> block_id; // dictionary index per entry
    std::vector<Mat4> dict;

    std::int64_t entries() const { return static_cast<std::int64_t>(src.size()); }
    /// Scalar nonzeros if the blocks were expanded (for the sparsity bound).
    std::int64_t scalar_nonzeros() const;
    std::int64_t memory_bytes() const;
};

/// Assemble the one-step operator for window samples F, drive rabi and the
/// sample spacing dt. Built once; time independent.
///
/// For a target label with trit set {B; C} (Y slots B, Z slots C), the
/// contributions are, with every block right-multiplied by the one-step free
/// rotation rho -> U0 rho U0^dag:
///   1. diagonal source {B+1; C+1} with factor
///      1 + dt^2 F0 (sigma' dag - sigma dag) sigma
///        + dt^2 conj(F0) (sigma - sigma') sigma' dag;
///   2. for each a in B, source {B+1 \ a+1; C+1}, factor dt F_a sigma (left);
///   3. for each a in C, source {B+1; C+1 \ a+1}, factor dt conj(F_a) applied
///      as rho sigma dag (right);
///   4. source {1, B+1; C+1}, factor dt (sigma' dag - sigma dag);
///   5. source {B+1; 1, C+1}, factor dt (sigma - sigma').
/// A source slot that would age past M lies outside the memory window and
/// contributes nothing.
EvolutionOperator build_evolution_operator(const KernelSamples& samples, double rabi,
                                           int m, const BuildOptions& opt = {});

/// out = D * in over the block structure. Deterministic: each block row is
/// accumulated in entry order, so serial and OpenMP results are bit-identical.
void apply(const EvolutionOperator& op, std::span<const Complex> in,
           std::span<Complex> out, Backend backend = Backend::OpenMP);

/// Estimated resident bytes for a run at given M (two state vectors plus the
/// operator), used for the memory-cap check before allocation.
std::int64_t ensemble_memory_estimate(int m);

}  // namespace vdm
