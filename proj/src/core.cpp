#include "vdm/core.hpp"

namespace vdm {

namespace {
const Complex kI(0.0, 1.0);
}

const Mat2& sigma_minus() {
    static const Mat2 m = (Mat2() << 0, 0, 1, 0).finished();
    return m;
}

const Mat2& sigma_plus() {
    static const Mat2 m = (Mat2() << 0, 1, 0, 0).finished();
    return m;
}

const Mat2& sigma_x() {
    static const Mat2 m = (Mat2() << 0, 1, 1, 0).finished();
    return m;
}

const Mat2& sigma_z() {
    static const Mat2 m = (Mat2() << 1, 0, 0, -1).finished();
    return m;
}

const Mat2& identity2() {
    static const Mat2 m = Mat2::Identity();
    return m;
}

Vec4 flatten(const Mat2& rho) {
    Vec4 v;
    v << rho(0, 0), rho(1, 0), rho(0, 1), rho(1, 1);
    return v;
}

Mat2 unflatten(const Vec4& v) {
    Mat2 rho;
    rho << v(0), v(2), v(1), v(3);
    return rho;
}

Mat4 left_super(const Mat2& a) {
    // vec(A rho) = (I (x) A) vec(rho) under column stacking
    Mat4 s = Mat4::Zero();
    s.block<2, 2>(0, 0) = a;
    s.block<2, 2>(2, 2) = a;
    return s;
}

Mat4 right_super(const Mat2& a) {
    // vec(rho A) = (A^T (x) I) vec(rho)
    Mat4 s = Mat4::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            s.block<2, 2>(2 * i, 2 * j) = a(j, i) * Mat2::Identity();
    return s;
}

Mat2 u0_propagator(double rabi, double dt) {
    const double half = 0.5 * rabi * dt;
    return std::cos(half) * identity2() - kI * std::sin(half) * sigma_x();
}

Mat4 free_rotation_super(double rabi, double dt) {
    const Mat2 u = u0_propagator(rabi, dt);
    return left_super(u) * right_super(u.adjoint());
}

}  // namespace vdm
