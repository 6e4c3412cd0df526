#include <doctest.h>

#include <cmath>

#include "trom/errors.hpp"
#include "trom/integrate.hpp"
#include "test_support.hpp"

using namespace trom;
using namespace trom::testsupport;

TEST_CASE("time grid nodes come from the closed formula") {
    const TimeGrid grid{0.0, 1.0, 10};
    CHECK(grid.dt() == doctest::Approx(0.1));
    CHECK(grid.node(0) == 0.0);
    CHECK(grid.node(10) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(grid.node(7) == 0.0 + 7 * grid.dt());
}

TEST_CASE("implicit euler scalar step") {
    const Matrix a = Matrix::Constant(1, 1, -1.0);
    const TimeGrid grid{0.0, 0.1, 1};
    const Matrix traj = implicit_euler_linear(a, nullptr, Vector::Ones(1), grid);
    CHECK(traj(0, 1) == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
}

TEST_CASE("implicit euler with zero operator accumulates the forcing") {
    const Matrix a = Matrix::Zero(1, 1);
    const Vector c = Vector::Constant(1, 2.5);
    const TimeGrid grid{0.0, 1.0, 10};
    const Matrix traj =
        implicit_euler_linear(a, [&](double) { return c; }, Vector::Zero(1), grid);
    for (Index k = 0; k <= 10; ++k)
        CHECK(traj(0, k) == doctest::Approx(2.5 * grid.dt() * k).epsilon(1e-13));
}

TEST_CASE("implicit euler decays for dissipative operators") {
    std::mt19937_64 rng(81);
    const SpdOperator spd = random_spd(rng, 5);
    const Matrix a = -spd.full();
    const TimeGrid grid{0.0, 2.0, 40};
    const Matrix traj = implicit_euler_linear(a, nullptr, random_vector(rng, 5), grid);
    for (Index k = 0; k < 40; ++k)
        CHECK(traj.col(k + 1).norm() <= traj.col(k).norm() + 1e-14);
}

TEST_CASE("implicit midpoint scalar step") {
    const Matrix l = Matrix::Constant(1, 1, -2.0);
    const TimeGrid grid{0.0, 0.1, 1};
    const Matrix traj = implicit_midpoint_linear(l, nullptr, Vector::Ones(1), grid);
    const double dt = 0.1;
    CHECK(traj(0, 1) ==
          doctest::Approx((1.0 - dt) / (1.0 + dt)).epsilon(1e-15));  // lambda dt / 2 = -0.1
}

TEST_CASE("implicit midpoint conserves the oscillator invariant") {
    Matrix l(2, 2);
    l << 0, 1, -1, 0;
    Vector y0(2);
    y0 << 1.0, 0.25;
    const TimeGrid grid{0.0, 50.0, 500};
    const Matrix traj = implicit_midpoint_linear(l, nullptr, y0, grid);
    const double h0 = y0.squaredNorm();
    for (Index k = 0; k <= 500; ++k)
        CHECK(std::abs(traj.col(k).squaredNorm() - h0) <= 1e-12 * h0 * (k + 1));
}

TEST_CASE("implicit midpoint quadrature of pure forcing") {
    const Matrix l = Matrix::Zero(1, 1);
    const TimeGrid grid{0.0, 1.0, 10};
    const Matrix traj = implicit_midpoint_linear(
        l, [](double t) { return Vector::Constant(1, t); }, Vector::Zero(1), grid);
    double acc = 0.0;
    for (Index k = 0; k < 10; ++k) {
        acc += grid.dt() * 0.5 * (grid.node(k) + grid.node(k + 1));
        CHECK(traj(0, k + 1) == doctest::Approx(acc).epsilon(1e-14));
    }
}

TEST_CASE("velocity verlet zero data stays zero") {
    Matrix d1 = Matrix::Constant(1, 1, 2.0);
    const TimeGrid grid{0.0, 1.0, 20};
    const VerletTrajectories tr =
        velocity_verlet_skew(d1, nullptr, Vector::Zero(1), Vector::Zero(1), grid);
    CHECK(max_abs(tr.e) == 0.0);
    CHECK(max_abs(tr.b) == 0.0);
}

TEST_CASE("velocity verlet with zero coupling decouples the fields") {
    const Matrix d1 = Matrix::Zero(2, 2);
    const TimeGrid grid{0.0, 1.0, 10};
    Vector e0(2), b0(2);
    e0 << 0.0, 0.0;
    b0 << 1.0, -2.0;
    const VerletTrajectories tr = velocity_verlet_skew(
        d1, [](double t) { return Vector::Constant(2, -t); }, e0, b0, grid);
    for (Index k = 0; k <= 10; ++k) CHECK(max_abs(tr.b.col(k) - b0) == 0.0);
    // e accumulates the trapezoid-in-time quadrature of -j
    double acc = 0.0;
    for (Index k = 0; k < 10; ++k) {
        acc += grid.dt() * 0.5 * (grid.node(k) + grid.node(k + 1));
        CHECK(tr.e(0, k + 1) == doctest::Approx(acc).epsilon(1e-13));
    }
}

TEST_CASE("velocity verlet energy has no secular drift") {
    std::mt19937_64 rng(82);
    const Matrix d1 = random_matrix(rng, 3, 4);
    Eigen::BDCSVD<Matrix> svd(d1);
    const double omega_max = svd.singularValues()(0);
    const Index steps = 2000;
    const double dt = 1e-4 / omega_max;
    const TimeGrid grid{0.0, dt * steps, steps};
    const Vector e0 = random_vector(rng, 4);
    const Vector b0 = random_vector(rng, 3);
    const VerletTrajectories tr = velocity_verlet_skew(d1, nullptr, e0, b0, grid);

    // least-squares slope of the relative energy against the step index
    const double h0 = e0.squaredNorm() + b0.squaredNorm();
    double sxx = 0.0, sxy = 0.0;
    const double kbar = 0.5 * steps;
    for (Index k = 0; k <= steps; ++k) {
        const double energy = (tr.e.col(k).squaredNorm() + tr.b.col(k).squaredNorm()) / h0;
        sxx += (k - kbar) * (k - kbar);
        sxy += (k - kbar) * (energy - 1.0);
    }
    CHECK(std::abs(sxy / sxx) <= 1e-10);
}

TEST_CASE("convergence orders on a manufactured linear problem") {
    // x' = A x + f with A = [[0, 1], [-1, 0]], f = (cos t, 0); the reference
    // solution comes from a very fine midpoint grid instead of a formula
    Matrix a(2, 2);
    a << 0, 1, -1, 0;
    auto forcing = [](double t) { return (Vector(2) << std::cos(t), 0.0).finished(); };
    Vector x0(2);
    x0 << 1.0, 0.0;
    const double tau = 2.0;

    const Matrix fine = implicit_midpoint_linear(a, forcing, x0, TimeGrid{0.0, tau, 1 << 15});
    const Vector ref = fine.col(fine.cols() - 1);

    auto final_error = [&](auto integrator, Index steps) {
        const Matrix traj = integrator(a, forcing, x0, TimeGrid{0.0, tau, steps});
        return (traj.col(traj.cols() - 1) - ref).norm();
    };

    auto slope_of = [&](auto integrator) {
        std::vector<double> errs;
        for (Index steps : {64, 128, 256, 512})
            errs.push_back(final_error(integrator, steps));
        // mean slope over the halving levels
        double acc = 0.0;
        for (size_t i = 0; i + 1 < errs.size(); ++i) acc += std::log2(errs[i] / errs[i + 1]);
        return acc / 3.0;
    };

    const double euler_slope = slope_of(implicit_euler_linear);
    CHECK(euler_slope == doctest::Approx(1.0).epsilon(0.15));
    const double midpoint_slope = slope_of(implicit_midpoint_linear);
    CHECK(midpoint_slope == doctest::Approx(2.0).epsilon(0.15));

    // verlet on the skew rotation e' = w b, b' = -w e with forcing
    auto verlet = [](const Matrix& op, const ForcingFn& f, const Vector& y0,
                     const TimeGrid& grid) {
        const Matrix d1 = Matrix::Constant(1, 1, 1.0);
        ForcingFn je = [f](double t) { return Vector::Constant(1, -f(t)[0]); };
        const VerletTrajectories tr = velocity_verlet_skew(
            d1, je, Vector::Constant(1, y0[0]), Vector::Constant(1, y0[1]), grid);
        Matrix traj(2, tr.e.cols());
        traj.row(0) = tr.e.row(0);
        traj.row(1) = tr.b.row(0);
        (void)op;
        return traj;
    };
    const double verlet_slope = slope_of(verlet);
    CHECK(verlet_slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("midpoint and verlet are time reversible") {
    std::mt19937_64 rng(83);
    Matrix l(4, 4);
    {
        const Matrix k = random_spd(rng, 2).full();
        l.setZero();
        l.topRightCorner(2, 2) = Matrix::Identity(2, 2);
        l.bottomLeftCorner(2, 2) = -k;
    }
    const Vector y0 = random_vector(rng, 4);
    const TimeGrid fwd{0.0, 3.0, 150};
    const TimeGrid bwd{3.0, 0.0, 150};  // negative dt runs the scheme backwards
    const Matrix forward = implicit_midpoint_linear(l, nullptr, y0, fwd);
    const Matrix back = implicit_midpoint_linear(l, nullptr, forward.col(150), bwd);
    CHECK((back.col(150) - y0).norm() <= 1e-9 * y0.norm());

    const Matrix d1 = random_matrix(rng, 3, 3);
    const Vector e0 = random_vector(rng, 3), b0 = random_vector(rng, 3);
    const TimeGrid vfwd{0.0, 1.0, 200};
    const TimeGrid vbwd{1.0, 0.0, 200};
    const VerletTrajectories ftr = velocity_verlet_skew(d1, nullptr, e0, b0, vfwd);
    const VerletTrajectories btr =
        velocity_verlet_skew(d1, nullptr, ftr.e.col(200), ftr.b.col(200), vbwd);
    CHECK((btr.e.col(200) - e0).norm() <= 1e-9 * e0.norm());
    CHECK((btr.b.col(200) - b0).norm() <= 1e-9 * b0.norm());
}

TEST_CASE("grid validation") {
    const Matrix a = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(implicit_euler_linear(a, nullptr, Vector::Zero(1), TimeGrid{0.0, 1.0, 0}),
                    UsageError);
    CHECK_THROWS_AS(implicit_euler_linear(a, nullptr, Vector::Zero(2), TimeGrid{0.0, 1.0, 5}),
                    UsageError);
}
