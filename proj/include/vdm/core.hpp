#pragma once

#include <Eigen/Dense>
#include <complex>

namespace vdm {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec4 = Eigen::Vector4cd;
using Mat4 = Eigen::Matrix4cd;

// Basis order is (excited, ground): index 0 = excited, 1 = ground.
// sigma_minus() lowers, |g><e|; population of the excited state is rho(0,0).
const Mat2& sigma_minus();
const Mat2& sigma_plus();
const Mat2& sigma_x();
const Mat2& sigma_z();
const Mat2& identity2();

/// Column-stack a 2x2 matrix: vec index 2j+i holds rho(i,j).
Vec4 flatten(const Mat2& rho);
Mat2 unflatten(const Vec4& v);

/// Superoperator acting as A * rho on the flattened state.
Mat4 left_super(const Mat2& a);
/// Superoperator acting as rho * A on the flattened state.
Mat4 right_super(const Mat2& a);

/// Free propagator of the resonantly driven atom over one step:
/// exp(-i rabi dt sigma_x / 2).
Mat2 u0_propagator(double rabi, double dt);

/// Superoperator of rho -> U0 rho U0^dag for one step.
Mat4 free_rotation_super(double rabi, double dt);

}  // namespace vdm
