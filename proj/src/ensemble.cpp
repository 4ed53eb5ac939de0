#include "vdm/ensemble.hpp"

#include <stdexcept>

#include "vdm/labels.hpp"

namespace vdm {

VirtualEnsemble::VirtualEnsemble(const Mat2& rho0, int m, double dt)
    : state_(4 * pow3(m), Complex(0, 0)),
      scratch_(4 * pow3(m)),
      m_(m),
      dt_(dt) {
    const Vec4 v = flatten(rho0);
    for (int i = 0; i < 4; ++i) state_[i] = v(i);
}

void VirtualEnsemble::step(const EvolutionOperator& op, Backend backend) {
    if (op.m != m_) throw std::invalid_argument("step: operator window does not match ensemble");
    apply(op, state_, scratch_, backend);
    state_.swap(scratch_);
    ++step_;
}

Mat2 VirtualEnsemble::project() const {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = state_[i];
    return unflatten(v);
}

void VirtualEnsemble::apply_lowering() {
    const Mat4 ls = left_super(sigma_minus());
    const std::int64_t blocks = pow3(m_);
    for (std::int64_t b = 0; b < blocks; ++b) {
        Eigen::Map<Eigen::Vector4cd> x(state_.data() + 4 * b);
        x = (ls * x).eval();
    }
}

Mat2 VirtualEnsemble::block(std::int64_t label) const {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = state_[4 * label + i];
    return unflatten(v);
}

std::vector<TrajectoryPoint> propagate(VirtualEnsemble& ens, const EvolutionOperator& op,
                                       std::int64_t n_steps, std::int64_t record_every,
                                       Backend backend) {
    if (n_steps < 0) throw std::invalid_argument("propagate: n_steps must be >= 0");
    if (record_every < 1) record_every = 1;
    std::vector<TrajectoryPoint> traj;
    traj.reserve(static_cast<std::size_t>(n_steps / record_every) + 2);
    traj.push_back({ens.time(), ens.project()});
    for (std::int64_t k = 1; k <= n_steps; ++k) {
        ens.step(op, backend);
        if (k % record_every == 0) traj.push_back({ens.time(), ens.project()});
    }
    return traj;
}

}  // namespace vdm
