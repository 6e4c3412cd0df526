#include "trom/rom.hpp"

#include <Eigen/LU>
#include <cmath>
#include <set>

#include "trom/errors.hpp"

namespace trom {

namespace {

void check_m_orthonormal(const Matrix& u, const SpdOperator& m, const char* what) {
    const double dev = (u.transpose() * m.apply(u) - Matrix::Identity(u.cols(), u.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-8)
        throw NumericalError(std::string(what) + " basis is not mass-orthonormal (deviation " +
                             std::to_string(dev) + ")");
}

Matrix reduce_operator(const Matrix& a, const Matrix& u, const Matrix* u_core,
                       const Matrix* a_hat_full) {
    if (u_core && a_hat_full && u_core->rows() == a_hat_full->rows())
        return u_core->transpose() * (*a_hat_full) * (*u_core);
    return u.transpose() * a * u;
}

ReducedModel make_heat(const LinearFom& fom, Matrix u, Matrix a_hat) {
    // enforce the inherited symmetry exactly; the gradient-flow energy
    // argument relies on it
    a_hat = 0.5 * (a_hat + a_hat.transpose());
    ReducedModel model;
    model.kind = ReducedModel::Kind::heat;
    model.a_hat = std::move(a_hat);
    model.u = std::move(u);
    model.m = fom.m;
    const Matrix& ub = model.u;
    if (fom.load_for) {
        model.reduced_load_for = [ub, load = fom.load_for](const Vector& mu) -> ForcingFn {
            ForcingFn f = load(mu);
            if (!f) return nullptr;
            return [ub, f](double t) -> Vector { return ub.transpose() * f(t); };
        };
    }
    if (fom.x0_for) {
        auto m = fom.m;
        model.reduced_x0 = [ub, m, x0 = fom.x0_for](const Vector& mu) -> Vector {
            return ub.transpose() * m->apply(x0(mu));  // M-adjoint restriction
        };
    }
    return model;
}

ReducedModel make_wave(const HamiltonianFom& fom, Matrix u, Matrix a_hat) {
    a_hat = 0.5 * (a_hat + a_hat.transpose());
    ReducedModel model;
    model.kind = ReducedModel::Kind::wave;
    model.a_hat = std::move(a_hat);
    model.u = std::move(u);
    model.m = fom.m_w;
    const Matrix& ub = model.u;
    if (fom.load_for) {
        model.reduced_load_for = [ub, load = fom.load_for](const Vector& mu) -> ForcingFn {
            ForcingFn f = load(mu);
            if (!f) return nullptr;
            return [ub, f](double t) -> Vector { return ub.transpose() * f(t); };
        };
    }
    auto mw = fom.m_w;
    model.reduced_x0 = [ub, mw, q0 = fom.q0_for, p0 = fom.p0_for](const Vector& mu) -> Vector {
        Vector y = Vector::Zero(2 * ub.cols());
        if (q0) y.head(ub.cols()) = ub.transpose() * mw->apply(q0(mu));
        if (p0) y.tail(ub.cols()) = ub.transpose() * mw->apply(p0(mu));
        return y;
    };
    return model;
}

}  // namespace

Matrix precompute_reduced_operator(const Matrix& a, const TuckerFactors& f) {
    if (a.rows() != f.w.rows() || a.cols() != f.w.rows())
        throw UsageError("operator dimension does not match the factor basis");
    return f.w.transpose() * a * f.w;
}

ReducedModel reduce_heat(const LinearFom& fom, const LocalBasis& basis,
                         const Matrix* a_hat_full) {
    check_m_orthonormal(basis.u, *fom.m, "heat");
    return make_heat(fom, basis.u,
                     reduce_operator(fom.a, basis.u, &basis.u_core, a_hat_full));
}

ReducedModel reduce_heat(const LinearFom& fom, const MonolithicBasis& basis) {
    check_m_orthonormal(basis.u, *fom.m, "heat");
    return make_heat(fom, basis.u, reduce_operator(fom.a, basis.u, nullptr, nullptr));
}

ReducedModel reduce_wave(const HamiltonianFom& fom, const LocalBasis& basis,
                         const Matrix* k_hat_full) {
    check_m_orthonormal(basis.u, *fom.m_w, "wave");
    return make_wave(fom, basis.u,
                     reduce_operator(fom.stiffness, basis.u, &basis.u_core, k_hat_full));
}

ReducedModel reduce_wave(const HamiltonianFom& fom, const MonolithicBasis& basis) {
    check_m_orthonormal(basis.u, *fom.m_w, "wave");
    return make_wave(fom, basis.u, reduce_operator(fom.stiffness, basis.u, nullptr, nullptr));
}

ReducedModel reduce_maxwell(const MaxwellFom& fom, const Matrix& u_e, const Matrix& u_b,
                            std::optional<QdeimData> qdeim) {
    check_m_orthonormal(u_e, *fom.m_e, "electric");
    check_m_orthonormal(u_b, *fom.m_b, "magnetic");

    ReducedModel model;
    model.kind = ReducedModel::Kind::maxwell;
    model.u = u_e;
    model.u_b = u_b;
    model.m = fom.m_e;
    model.m_b = fom.m_b;
    model.delta1_hat = u_b.transpose() * fom.m_b->apply(Matrix(fom.delta * u_e));

    if (qdeim) {
        qdeim->c_j = (u_e.transpose() * qdeim->u_j) * qdeim->puj_inv;
        model.qdeim = std::move(qdeim);
        const QdeimData& qd = *model.qdeim;
        auto entries = fom.j_sp_entries;
        auto envelope = fom.envelope;
        const Matrix c_j = qd.c_j;
        const std::vector<Index> idx = qd.indices;
        model.reduced_load_for = [entries, envelope, c_j, idx](const Vector& mu) -> ForcingFn {
            const Vector sampled = c_j * entries(mu, idx);
            return [envelope, sampled](double t) -> Vector { return envelope(t) * sampled; };
        };
    } else if (fom.j_sp_for) {
        const Matrix ue = u_e;
        auto j_sp = fom.j_sp_for;
        auto envelope = fom.envelope;
        model.reduced_load_for = [ue, j_sp, envelope](const Vector& mu) -> ForcingFn {
            const Vector jhat = ue.transpose() * j_sp(mu);
            return [envelope, jhat](double t) -> Vector { return envelope(t) * jhat; };
        };
    }
    return model;
}

QdeimData qdeim_offline(const Matrix& j_snapshots, Index m,
                        const std::vector<std::vector<Index>>& dof_to_elements) {
    if (m < 1 || m > std::min(j_snapshots.rows(), j_snapshots.cols()))
        throw UsageError("Q-DEIM rank outside [1, min(dims)]");

    const ThinSvd svd = thin_svd(j_snapshots);
    QdeimData qd;
    qd.u_j = svd.u.leftCols(m);

    // cumulative captured spectral energy per candidate rank
    const Index nsv = svd.sigma.size();
    Vector energy(nsv);
    double total = 0.0;
    for (Index i = 0; i < nsv; ++i) total += svd.sigma[i] * svd.sigma[i];
    double run = 0.0;
    for (Index i = 0; i < nsv; ++i) {
        run += svd.sigma[i] * svd.sigma[i];
        energy[i] = (total > 0.0) ? run / total : 1.0;
    }
    qd.energy_fraction = energy;

    const PivotedQr qr = pivoted_qr(Matrix(qd.u_j.transpose()));
    qd.indices.assign(qr.pivots.begin(), qr.pivots.begin() + m);

    Matrix puj(m, m);
    for (Index r = 0; r < m; ++r) puj.row(r) = qd.u_j.row(qd.indices[static_cast<size_t>(r)]);
    const ThinSvd psvd = thin_svd(puj);
    const double smin = psvd.sigma[m - 1];
    if (smin <= rank_tolerance(m, m, psvd.sigma[0]))
        throw NumericalError("Q-DEIM selection matrix is numerically singular (condition " +
                             std::to_string(psvd.sigma[0] / std::max(smin, 1e-300)) + ")");
    qd.cond_puj = psvd.sigma[0] / smin;
    qd.puj_inv = Eigen::PartialPivLU<Matrix>(puj).inverse();

    if (!dof_to_elements.empty()) {
        std::set<Index> support;
        for (Index i : qd.indices)
            for (Index el : dof_to_elements[static_cast<size_t>(i)]) support.insert(el);
        qd.element_support.assign(support.begin(), support.end());
    }
    return qd;
}

RomSolution rom_solve(const ReducedModel& model, const Vector& mu, const TimeGrid& grid,
                      bool lift) {
    RomSolution sol;
    switch (model.kind) {
        case ReducedModel::Kind::heat: {
            const Index n = model.a_hat.rows();
            const Vector x0 = model.reduced_x0 ? model.reduced_x0(mu) : Vector::Zero(n);
            const ForcingFn f = model.reduced_load_for ? model.reduced_load_for(mu) : nullptr;
            sol.reduced = implicit_euler_linear(model.a_hat, f, x0, grid);
            if (lift) sol.lifted = model.u * sol.reduced;
            break;
        }
        case ReducedModel::Kind::wave: {
            const Index n = model.a_hat.rows();
            Matrix l = Matrix::Zero(2 * n, 2 * n);
            l.topRightCorner(n, n) = Matrix::Identity(n, n);
            l.bottomLeftCorner(n, n) = -model.a_hat;
            const Vector y0 = model.reduced_x0 ? model.reduced_x0(mu) : Vector::Zero(2 * n);
            ForcingFn f;
            if (model.reduced_load_for) {
                ForcingFn fp = model.reduced_load_for(mu);
                if (fp)
                    f = [fp, n](double t) -> Vector {
                        Vector rhs = Vector::Zero(2 * n);
                        rhs.tail(n) = fp(t);  // load enters the momentum block only
                        return rhs;
                    };
            }
            sol.reduced = implicit_midpoint_linear(l, f, y0, grid);
            if (lift) {
                sol.lifted = model.u * sol.reduced.topRows(n);
                sol.lifted_b = model.u * sol.reduced.bottomRows(n);
            }
            break;
        }
        case ReducedModel::Kind::maxwell: {
            const Index re = model.delta1_hat.cols();
            const Index rb = model.delta1_hat.rows();
            const Vector e0 = model.reduced_x0 ? model.reduced_x0(mu) : Vector::Zero(re);
            const Vector b0 = model.reduced_b0 ? model.reduced_b0(mu) : Vector::Zero(rb);
            const ForcingFn j = model.reduced_load_for ? model.reduced_load_for(mu) : nullptr;
            const VerletTrajectories tr = velocity_verlet_skew(model.delta1_hat, j, e0, b0, grid);
            sol.reduced = tr.e;
            sol.reduced_b = tr.b;
            if (lift) {
                sol.lifted = model.u * tr.e;
                sol.lifted_b = model.u_b * tr.b;
            }
            break;
        }
    }
    return sol;
}

Matrix heat_fom_solve(const LinearFom& fom, const Vector& mu, const TimeGrid& grid) {
    const CholeskyFactor& chol = fom.m->cholesky();
    const Matrix minv_a = chol.solve(chol.solve_transpose(fom.a));
    ForcingFn f;
    if (fom.load_for) {
        ForcingFn raw = fom.load_for(mu);
        if (raw) f = [&chol, raw](double t) -> Vector { return chol.solve(chol.solve_transpose(raw(t))); };
    }
    const Vector x0 = fom.x0_for ? fom.x0_for(mu) : Vector::Zero(fom.m->dim());
    return implicit_euler_linear(minv_a, f, x0, grid);
}

std::pair<Matrix, Matrix> wave_fom_solve(const HamiltonianFom& fom, const Vector& mu,
                                         const TimeGrid& grid) {
    const Index n = fom.m_w->dim();
    const CholeskyFactor& chol = fom.m_w->cholesky();
    Matrix l = Matrix::Zero(2 * n, 2 * n);
    l.topRightCorner(n, n) = Matrix::Identity(n, n);
    l.bottomLeftCorner(n, n) = -chol.solve(chol.solve_transpose(fom.stiffness));
    ForcingFn f;
    if (fom.load_for) {
        ForcingFn raw = fom.load_for(mu);
        if (raw)
            f = [&chol, raw, n](double t) -> Vector {
                Vector rhs = Vector::Zero(2 * n);
                rhs.tail(n) = chol.solve(chol.solve_transpose(raw(t)));
                return rhs;
            };
    }
    Vector y0 = Vector::Zero(2 * n);
    if (fom.q0_for) y0.head(n) = fom.q0_for(mu);
    if (fom.p0_for) y0.tail(n) = fom.p0_for(mu);
    const Matrix traj = implicit_midpoint_linear(l, f, y0, grid);
    return {traj.topRows(n), traj.bottomRows(n)};
}

std::pair<Matrix, Matrix> maxwell_fom_solve(const MaxwellFom& fom, const Vector& mu,
                                            const TimeGrid& grid) {
    const Index ne = fom.m_e->dim();
    const Index nb = fom.m_b->dim();
    const CholeskyFactor& chol = fom.m_e->cholesky();
    const Vector j_sp = fom.j_sp_for ? fom.j_sp_for(mu) : Vector::Zero(ne);
    const double dt = grid.dt();

    Matrix e_traj(ne, grid.snapshots()), b_traj(nb, grid.snapshots());
    Vector e = Vector::Zero(ne), b = Vector::Zero(nb);
    e_traj.col(0) = e;
    b_traj.col(0) = b;

    auto accel = [&](const Vector& bb, double t) -> Vector {
        Vector rhs = fom.delta.transpose() * fom.m_b->apply(bb) - fom.envelope(t) * j_sp;
        return chol.solve(chol.solve_transpose(rhs));
    };
    for (Index k = 0; k < grid.steps; ++k) {
        const Vector e_half = e + 0.5 * dt * accel(b, grid.node(k));
        b -= dt * (fom.delta * e_half);  // M_B cancels: bdot = -delta e
        e = e_half + 0.5 * dt * accel(b, grid.node(k + 1));
        e_traj.col(k + 1) = e;
        b_traj.col(k + 1) = b;
    }
    return {e_traj, b_traj};
}

}  // namespace trom
