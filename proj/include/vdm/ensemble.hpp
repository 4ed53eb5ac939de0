#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vdm/core.hpp"
#include "vdm/evolution.hpp"

namespace vdm {

struct TrajectoryPoint {
    double t = 0.0;
    Mat2 rho;
};

/// The 3^M flattened virtual density matrices as one contiguous vector.
/// Block 0 (the all-X label) approximates the physical reduced state; at
/// initialization every other block is zero.
class VirtualEnsemble {
public:
    VirtualEnsemble(const Mat2& rho0, int m, double dt);

    void step(const EvolutionOperator& op, Backend backend = Backend::OpenMP);
    /// Physical reduced state: unflatten(block 0).
    Mat2 project() const;
    /// Left-multiply every block by sigma; starts a correlation-function run.
    void apply_lowering();

    int window_slots() const { return m_; }
    double dt() const { return dt_; }
    std::int64_t step_index() const { return step_; }
    double time() const { return static_cast<double>(step_) * dt_; }
    std::span<const Complex> state() const { return state_; }
    Mat2 block(std::int64_t label) const;

private:
    std::vector<Complex> state_;
    std::vector<Complex> scratch_;
    int m_;
    double dt_;
    std::int64_t step_ = 0;
};

/// Step n_steps times, sampling project() every record_every steps (the
/// initial state is always included). The ensemble is left at the final step
/// so the run can be continued.
std::vector<TrajectoryPoint> propagate(VirtualEnsemble& ens, const EvolutionOperator& op,
                                       std::int64_t n_steps, std::int64_t record_every = 1,
                                       Backend backend = Backend::OpenMP);

}  // namespace vdm
