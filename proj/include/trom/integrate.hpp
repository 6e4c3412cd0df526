#pragma once

#include <functional>

#include "trom/types.hpp"

namespace trom {

/// Uniform time grid over [t0, tau] with nodes t_k = t0 + k*dt computed from
/// the formula each time (no accumulation).
struct TimeGrid {
    double t0 = 0.0;
    double tau = 1.0;
    Index steps = 1;

    double dt() const { return (tau - t0) / static_cast<double>(steps); }
    double node(Index k) const { return t0 + static_cast<double>(k) * dt(); }
    Index snapshots() const { return steps + 1; }
};

using ForcingFn = std::function<Vector(double)>;  // may be empty (unforced)

/// x_{k+1} solves (I - dt A) x_{k+1} = x_k + dt f(t_{k+1}). Returns the
/// n x (steps+1) trajectory including the initial state.
Matrix implicit_euler_linear(const Matrix& a_hat, const ForcingFn& forcing, const Vector& x0,
                             const TimeGrid& grid);

/// y_{k+1} solves (I - dt/2 L) y_{k+1} = (I + dt/2 L) y_k + dt F(t_{k+1/2}).
Matrix implicit_midpoint_linear(const Matrix& l, const ForcingFn& forcing, const Vector& y0,
                                const TimeGrid& grid);

struct VerletTrajectories {
    Matrix e;
    Matrix b;
};

/// Leap-frog update for the identity-mass skew pair
///   e' = d1^T b - j_e(t),  b' = -d1 e,
/// staged as half-step e, full-step b, half-step e.
VerletTrajectories velocity_verlet_skew(const Matrix& d1, const ForcingFn& j_e,
                                        const Vector& e0, const Vector& b0,
                                        const TimeGrid& grid);

}  // namespace trom
