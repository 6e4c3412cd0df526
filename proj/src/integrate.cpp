#include "trom/integrate.hpp"

#include <Eigen/LU>
#include <cmath>

#include "trom/errors.hpp"

namespace trom {

namespace {

void check_grid(const TimeGrid& grid) {
    // negative dt is allowed here (reverse-time integration); zero is not
    if (grid.steps < 1 || grid.dt() == 0.0 || !std::isfinite(grid.dt()))
        throw UsageError("time grid must have a positive step count and nonzero dt");
}

Eigen::PartialPivLU<Matrix> factor_step_matrix(const Matrix& m, const char* scheme) {
    Eigen::PartialPivLU<Matrix> lu(m);
    // PartialPivLU has no rank signal; probe with a solve
    const Vector probe = lu.solve(Vector::Ones(m.rows()));
    if (!probe.allFinite())
        throw NumericalError(std::string("singular step matrix in ") + scheme);
    return lu;
}

}  // namespace

Matrix implicit_euler_linear(const Matrix& a_hat, const ForcingFn& forcing, const Vector& x0,
                             const TimeGrid& grid) {
    if (a_hat.rows() != a_hat.cols()) throw UsageError("implicit Euler needs a square operator");
    if (x0.size() != a_hat.rows()) throw UsageError("initial state dimension mismatch");
    check_grid(grid);

    const Index n = a_hat.rows();
    const double dt = grid.dt();
    const auto lu = factor_step_matrix(Matrix::Identity(n, n) - dt * a_hat, "implicit Euler");

    Matrix traj(n, grid.snapshots());
    traj.col(0) = x0;
    for (Index k = 0; k < grid.steps; ++k) {
        Vector rhs = traj.col(k);
        if (forcing) rhs += dt * forcing(grid.node(k + 1));
        traj.col(k + 1) = lu.solve(rhs);
    }
    return traj;
}

Matrix implicit_midpoint_linear(const Matrix& l, const ForcingFn& forcing, const Vector& y0,
                                const TimeGrid& grid) {
    if (l.rows() != l.cols()) throw UsageError("implicit midpoint needs a square operator");
    if (y0.size() != l.rows()) throw UsageError("initial state dimension mismatch");
    check_grid(grid);

    const Index n = l.rows();
    const double dt = grid.dt();
    const Matrix plus = Matrix::Identity(n, n) + 0.5 * dt * l;
    const auto lu = factor_step_matrix(Matrix::Identity(n, n) - 0.5 * dt * l,
                                       "implicit midpoint");

    Matrix traj(n, grid.snapshots());
    traj.col(0) = y0;
    for (Index k = 0; k < grid.steps; ++k) {
        Vector rhs = plus * traj.col(k);
        if (forcing) rhs += dt * forcing(0.5 * (grid.node(k) + grid.node(k + 1)));
        traj.col(k + 1) = lu.solve(rhs);
    }
    return traj;
}

VerletTrajectories velocity_verlet_skew(const Matrix& d1, const ForcingFn& j_e,
                                        const Vector& e0, const Vector& b0,
                                        const TimeGrid& grid) {
    if (d1.cols() != e0.size() || d1.rows() != b0.size())
        throw UsageError("skew operator shape does not match the states");
    check_grid(grid);

    const double dt = grid.dt();
    VerletTrajectories out;
    out.e.resize(e0.size(), grid.snapshots());
    out.b.resize(b0.size(), grid.snapshots());
    out.e.col(0) = e0;
    out.b.col(0) = b0;

    Vector e = e0, b = b0;
    for (Index k = 0; k < grid.steps; ++k) {
        Vector rhs = d1.transpose() * b;
        if (j_e) rhs -= j_e(grid.node(k));
        const Vector e_half = e + 0.5 * dt * rhs;
        b -= dt * (d1 * e_half);
        Vector rhs2 = d1.transpose() * b;
        if (j_e) rhs2 -= j_e(grid.node(k + 1));
        e = e_half + 0.5 * dt * rhs2;
        out.e.col(k + 1) = e;
        out.b.col(k + 1) = b;
    }
    return out;
}

}  // namespace trom
