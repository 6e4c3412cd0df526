#include "trom/problems.hpp"

#include <cmath>
#include <random>

#include "trom/errors.hpp"

namespace trom {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 53-bit uniform in [0,1); independent of std::uniform_real_distribution
// internals so streams are reproducible everywhere
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * uniform01(rng);
}

// 3-point Gauss-Legendre on [a, b]
void gauss3(double a, double b, double* x, double* w) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double r = std::sqrt(3.0 / 5.0);
    x[0] = c - r * h;
    x[1] = c;
    x[2] = c + r * h;
    w[0] = w[2] = 5.0 / 9.0 * h;
    w[1] = 8.0 / 9.0 * h;
}

Matrix restrict_interior(const Matrix& full, const std::vector<Index>& interior) {
    Matrix out(static_cast<Index>(interior.size()), static_cast<Index>(interior.size()));
    for (size_t a = 0; a < interior.size(); ++a)
        for (size_t b = 0; b < interior.size(); ++b)
            out(static_cast<Index>(a), static_cast<Index>(b)) = full(interior[a], interior[b]);
    return out;
}

Vector restrict_interior(const Vector& full, const std::vector<Index>& interior) {
    Vector out(static_cast<Index>(interior.size()));
    for (size_t a = 0; a < interior.size(); ++a) out[static_cast<Index>(a)] = full[interior[a]];
    return out;
}

}  // namespace

Mesh1D uniform_mesh_1d(double length, Index elements) {
    if (elements < 2 || !(length > 0.0)) throw UsageError("bad 1D mesh parameters");
    Mesh1D mesh;
    mesh.nodes = Vector::LinSpaced(elements + 1, 0.0, length);
    return mesh;
}

Mesh2D structured_mesh_2d(double lx, double ly, Index nodes_per_side) {
    if (nodes_per_side < 3 || !(lx > 0.0) || !(ly > 0.0))
        throw UsageError("bad 2D mesh parameters");
    const Index m = nodes_per_side;
    Mesh2D mesh;
    mesh.nodes.resize(2, m * m);
    mesh.boundary.assign(static_cast<size_t>(m * m), false);
    for (Index iy = 0; iy < m; ++iy) {
        for (Index ix = 0; ix < m; ++ix) {
            const Index id = ix + iy * m;
            mesh.nodes(0, id) = lx * static_cast<double>(ix) / static_cast<double>(m - 1);
            mesh.nodes(1, id) = ly * static_cast<double>(iy) / static_cast<double>(m - 1);
            if (ix == 0 || iy == 0 || ix == m - 1 || iy == m - 1)
                mesh.boundary[static_cast<size_t>(id)] = true;
        }
    }
    mesh.tris.resize(3, 2 * (m - 1) * (m - 1));
    Index e = 0;
    for (Index iy = 0; iy + 1 < m; ++iy) {
        for (Index ix = 0; ix + 1 < m; ++ix) {
            const Index v00 = ix + iy * m, v10 = v00 + 1;
            const Index v01 = v00 + m, v11 = v01 + 1;
            mesh.tris.col(e++) << v00, v10, v11;
            mesh.tris.col(e++) << v00, v11, v01;
        }
    }
    for (Index id = 0; id < m * m; ++id)
        if (!mesh.boundary[static_cast<size_t>(id)]) mesh.interior.push_back(id);
    return mesh;
}

P1System assemble_p1_1d(const Mesh1D& mesh) {
    const Index nv = mesh.nodes.size();
    P1System sys{Matrix::Zero(nv, nv), Matrix::Zero(nv, nv)};
    for (Index e = 0; e < mesh.elements(); ++e) {
        const double h = mesh.h(e);
        if (!(h > 0.0)) throw InvalidDataError("degenerate 1D element " + std::to_string(e));
        const Index l = e, r = e + 1;
        sys.mass(l, l) += h / 3.0;
        sys.mass(r, r) += h / 3.0;
        sys.mass(l, r) += h / 6.0;
        sys.mass(r, l) += h / 6.0;
        sys.stiffness(l, l) += 1.0 / h;
        sys.stiffness(r, r) += 1.0 / h;
        sys.stiffness(l, r) -= 1.0 / h;
        sys.stiffness(r, l) -= 1.0 / h;
    }
    return sys;
}

P1System assemble_p1_2d(const Mesh2D& mesh) {
    const Index nv = mesh.nodes.cols();
    P1System sys{Matrix::Zero(nv, nv), Matrix::Zero(nv, nv)};
    for (Index e = 0; e < mesh.tris.cols(); ++e) {
        const Index v[3] = {mesh.tris(0, e), mesh.tris(1, e), mesh.tris(2, e)};
        const double x1 = mesh.nodes(0, v[0]), y1 = mesh.nodes(1, v[0]);
        const double x2 = mesh.nodes(0, v[1]), y2 = mesh.nodes(1, v[1]);
        const double x3 = mesh.nodes(0, v[2]), y3 = mesh.nodes(1, v[2]);
        const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
        const double area = 0.5 * det;
        if (!(area > 0.0)) throw InvalidDataError("degenerate triangle " + std::to_string(e));
        const double b[3] = {y2 - y3, y3 - y1, y1 - y2};
        const double c[3] = {x3 - x2, x1 - x3, x2 - x1};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                sys.mass(v[i], v[j]) += area / 12.0 * (i == j ? 2.0 : 1.0);
                sys.stiffness(v[i], v[j]) += (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            }
        }
    }
    return sys;
}

Vector assemble_load_1d(const Mesh1D& mesh, const std::function<double(double)>& f) {
    const Index nv = mesh.nodes.size();
    Vector load = Vector::Zero(nv);
    double xq[3], wq[3];
    for (Index e = 0; e < mesh.elements(); ++e) {
        const double xl = mesh.nodes[e], xr = mesh.nodes[e + 1];
        gauss3(xl, xr, xq, wq);
        const double h = xr - xl;
        for (int q = 0; q < 3; ++q) {
            const double fv = f(xq[q]);
            load[e] += wq[q] * fv * (xr - xq[q]) / h;
            load[e + 1] += wq[q] * fv * (xq[q] - xl) / h;
        }
    }
    return load;
}

Vector assemble_load_2d(const Mesh2D& mesh, const std::function<double(double, double)>& f) {
    const Index nv = mesh.nodes.cols();
    Vector load = Vector::Zero(nv);
    for (Index e = 0; e < mesh.tris.cols(); ++e) {
        const Index v[3] = {mesh.tris(0, e), mesh.tris(1, e), mesh.tris(2, e)};
        const double x1 = mesh.nodes(0, v[0]), y1 = mesh.nodes(1, v[0]);
        const double x2 = mesh.nodes(0, v[1]), y2 = mesh.nodes(1, v[1]);
        const double x3 = mesh.nodes(0, v[2]), y3 = mesh.nodes(1, v[2]);
        const double area = 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
        // edge-midpoint rule, exact for quadratics; phi_i = 1/2 on the two
        // midpoints adjacent to vertex i
        const double mx[3] = {0.5 * (x1 + x2), 0.5 * (x2 + x3), 0.5 * (x3 + x1)};
        const double my[3] = {0.5 * (y1 + y2), 0.5 * (y2 + y3), 0.5 * (y3 + y1)};
        const double fv[3] = {f(mx[0], my[0]), f(mx[1], my[1]), f(mx[2], my[2])};
        const double w = area / 3.0;
        load[v[0]] += w * 0.5 * (fv[0] + fv[2]);
        load[v[1]] += w * 0.5 * (fv[0] + fv[1]);
        load[v[2]] += w * 0.5 * (fv[1] + fv[2]);
    }
    return load;
}

HeatProblem build_heat_fom(const Mesh2D& mesh, const ForcingSpec& spec) {
    if (!(spec.sigma > 0.0)) throw UsageError("forcing width must be positive");
    HeatProblem pb;
    pb.mesh = std::make_shared<Mesh2D>(mesh);
    const P1System sys = assemble_p1_2d(*pb.mesh);
    const auto& interior = pb.mesh->interior;
    pb.fom.m = std::make_shared<SpdOperator>(
        SpdOperator::dense(restrict_interior(sys.mass, interior)));
    pb.fom.a = -restrict_interior(sys.stiffness, interior);

    auto mesh_ptr = pb.mesh;
    const double sigma = spec.sigma;
    pb.fom.load_for = [mesh_ptr, sigma](const Vector& mu) -> ForcingFn {
        if (mu.size() != 3) throw UsageError("heat parameter must be (amplitude, cx, cy)");
        const double amp = mu[0], cx = mu[1], cy = mu[2];
        auto spatial = [amp, cx, cy, sigma](double x, double y) {
            const double g = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) /
                                      (2.0 * sigma * sigma));
            return amp * g * std::sin(0.5 * x) * std::sin(0.5 * y);
        };
        const Vector g_vec =
            restrict_interior(assemble_load_2d(*mesh_ptr, spatial), mesh_ptr->interior);
        return [g_vec](double t) -> Vector { return std::exp(-t) * g_vec; };
    };
    pb.fom.x0_for = nullptr;  // benchmarks start from rest
    return pb;
}

StateFactory heat_bump_initial_state(std::shared_ptr<const Mesh2D> mesh, double sigma) {
    return [mesh, sigma](const Vector& mu) -> Vector {
        if (mu.size() != 3) throw UsageError("heat parameter must be (amplitude, cx, cy)");
        Vector x0(static_cast<Index>(mesh->interior.size()));
        for (size_t a = 0; a < mesh->interior.size(); ++a) {
            const double x = mesh->nodes(0, mesh->interior[a]);
            const double y = mesh->nodes(1, mesh->interior[a]);
            const double g = std::exp(-((x - mu[1]) * (x - mu[1]) + (y - mu[2]) * (y - mu[2])) /
                                      (2.0 * sigma * sigma));
            x0[static_cast<Index>(a)] = mu[0] * g * std::sin(0.5 * x) * std::sin(0.5 * y);
        }
        return x0;
    };
}

WaveProblem build_wave_fom(const Mesh1D& mesh, const ForcingSpec& spec) {
    if (!(spec.sigma > 0.0)) throw UsageError("forcing width must be positive");
    WaveProblem pb;
    pb.mesh = std::make_shared<Mesh1D>(mesh);
    const P1System sys = assemble_p1_1d(*pb.mesh);
    const Index nv = pb.mesh->nodes.size();
    std::vector<Index> interior;
    for (Index i = 1; i + 1 < nv; ++i) interior.push_back(i);
    pb.fom.m_w = std::make_shared<SpdOperator>(
        SpdOperator::dense(restrict_interior(sys.mass, interior)));
    pb.fom.stiffness = restrict_interior(sys.stiffness, interior);

    auto mesh_ptr = pb.mesh;
    const double sigma = spec.sigma;
    pb.fom.load_for = [mesh_ptr, sigma, interior](const Vector& mu) -> ForcingFn {
        if (mu.size() != 2) throw UsageError("wave parameter must be (frequency, center)");
        const double omega = mu[0], cx = mu[1];
        auto spatial = [cx, sigma](double x) {
            return std::exp(-(x - cx) * (x - cx) / (2.0 * sigma * sigma)) * std::sin(0.5 * x);
        };
        const Vector g_vec = restrict_interior(assemble_load_1d(*mesh_ptr, spatial), interior);
        return [g_vec, omega](double t) -> Vector { return std::cos(omega * t) * g_vec; };
    };
    pb.fom.q0_for = nullptr;
    pb.fom.p0_for = nullptr;
    return pb;
}

MaxwellProblem build_maxwell_fom(const Mesh1D& mesh, const ForcingSpec& spec) {
    if (!(spec.sigma > 0.0)) throw UsageError("forcing width must be positive");
    if (!(spec.period > 0.0)) throw UsageError("envelope period must be positive");
    MaxwellProblem pb;
    pb.mesh = std::make_shared<Mesh1D>(mesh);
    const P1System sys = assemble_p1_1d(*pb.mesh);
    const Index nv = pb.mesh->nodes.size();
    const Index ne = pb.mesh->elements();
    std::vector<Index> interior;
    for (Index i = 1; i + 1 < nv; ++i) interior.push_back(i);
    const Index n_e = static_cast<Index>(interior.size());

    pb.fom.m_e = std::make_shared<SpdOperator>(
        SpdOperator::dense(restrict_interior(sys.mass, interior)));
    Vector hvec(ne);
    for (Index e = 0; e < ne; ++e) hvec[e] = pb.mesh->h(e);
    pb.fom.m_b = std::make_shared<SpdOperator>(SpdOperator::diagonal(hvec));

    // elementwise derivative of the nodal field, boundary values pinned to 0
    Matrix delta = Matrix::Zero(ne, n_e);
    for (Index e = 0; e < ne; ++e) {
        const Index gl = e, gr = e + 1;  // global end nodes of the element
        if (gl >= 1 && gl + 1 < nv) delta(e, gl - 1) -= 1.0 / pb.mesh->h(e);
        if (gr >= 1 && gr + 1 < nv) delta(e, gr - 1) += 1.0 / pb.mesh->h(e);
    }
    pb.fom.delta = std::move(delta);

    const double period = spec.period;
    pb.fom.envelope = [period](double t) { return 0.5 * (1.0 - std::cos(2.0 * kPi * t / period)); };

    auto mesh_ptr = pb.mesh;
    const double sigma = spec.sigma;
    const double direction = spec.direction;
    auto gaussian = [sigma, direction](double z, double center) {
        return direction * std::exp(-(z - center) * (z - center) / (2.0 * sigma * sigma));
    };
    pb.fom.j_sp_for = [mesh_ptr, gaussian, interior](const Vector& mu) -> Vector {
        if (mu.size() != 1) throw UsageError("maxwell parameter must be the scalar source center");
        const double c = mu[0];
        return restrict_interior(
            assemble_load_1d(*mesh_ptr, [&](double z) { return gaussian(z, c); }), interior);
    };

    // interior DOF i sits at global node i+1, touching elements i and i+1
    pb.fom.dof_elements.resize(static_cast<size_t>(n_e));
    for (Index i = 0; i < n_e; ++i)
        pb.fom.dof_elements[static_cast<size_t>(i)] = {i, i + 1};

    pb.fom.j_sp_entries = [mesh_ptr, gaussian](const Vector& mu,
                                               const std::vector<Index>& idx) -> Vector {
        const double c = mu[0];
        Vector out(static_cast<Index>(idx.size()));
        double xq[3], wq[3];
        for (size_t k = 0; k < idx.size(); ++k) {
            const Index g = idx[k] + 1;  // global node of the interior DOF
            double acc = 0.0;
            for (Index e : {g - 1, g}) {  // only the two touching elements
                const double xl = mesh_ptr->nodes[e], xr = mesh_ptr->nodes[e + 1];
                gauss3(xl, xr, xq, wq);
                for (int q = 0; q < 3; ++q) {
                    const double hat = (e == g - 1) ? (xq[q] - xl) / (xr - xl)
                                                    : (xr - xq[q]) / (xr - xl);
                    acc += wq[q] * gaussian(xq[q], c) * hat;
                }
            }
            out[static_cast<Index>(k)] = acc;
        }
        return out;
    };
    return pb;
}

std::pair<ParameterSet, ParameterSet> sample_parameters(ProblemKind kind, Index count,
                                                        std::pair<Index, Index> split,
                                                        std::uint64_t seed) {
    if (count < 1 || split.first < 1 || split.second < 0 || split.first + split.second != count)
        throw UsageError("parameter split must be positive and sum to the sample count");
    std::mt19937_64 rng(seed);
    Index dim = (kind == ProblemKind::heat) ? 3 : (kind == ProblemKind::wave) ? 2 : 1;
    Matrix q(dim, count);
    for (Index s = 0; s < count; ++s) {
        switch (kind) {
            case ProblemKind::heat:
                q(0, s) = uniform(rng, 0.0, 1.0);        // amplitude
                q(1, s) = uniform(rng, 0.0, 2.0 * kPi);  // center x
                q(2, s) = uniform(rng, 0.0, 2.0 * kPi);  // center y
                break;
            case ProblemKind::wave:
                q(0, s) = uniform(rng, 0.01, 0.05);      // temporal frequency
                q(1, s) = uniform(rng, 0.0, 2.0 * kPi);  // center
                break;
            case ProblemKind::maxwell:
                q(0, s) = uniform(rng, 0.5, 1.5);  // source center
                break;
        }
    }
    return {ParameterSet(q.leftCols(split.first)),
            ParameterSet(q.rightCols(split.second))};
}

Tensor3 generate_heat_snapshots(const HeatProblem& pb, const ParameterSet& params,
                                const TimeGrid& grid) {
    const Index n = pb.fom.m->dim();
    const Index t = grid.snapshots();
    const Index p = params.count();
    std::vector<double> data(static_cast<size_t>(n * t * p));
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (Index s = 0; s < p; ++s) {
        try {
            const Matrix traj = heat_fom_solve(pb.fom, params.sample(s), grid);
            std::copy(traj.data(), traj.data() + n * t, data.begin() + n * t * s);
        } catch (const std::exception& ex) {
#pragma omp critical
            failure = "parameter " + std::to_string(s) + ": " + ex.what();
        }
    }
    if (!failure.empty()) throw NumericalError("snapshot generation failed at " + failure);
    return Tensor3(n, t, p, std::move(data));
}

Tensor3 generate_wave_snapshots(const WaveProblem& pb, const ParameterSet& params,
                                const TimeGrid& grid) {
    const Index n = pb.fom.m_w->dim();
    const Index t = grid.snapshots();
    const Index p = params.count();
    std::vector<double> data(static_cast<size_t>(n * 2 * t * p));
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (Index s = 0; s < p; ++s) {
        try {
            const auto [q, mom] = wave_fom_solve(pb.fom, params.sample(s), grid);
            const Matrix lifted = cotangent_lift_snapshots(q, mom);
            std::copy(lifted.data(), lifted.data() + n * 2 * t, data.begin() + n * 2 * t * s);
        } catch (const std::exception& ex) {
#pragma omp critical
            failure = "parameter " + std::to_string(s) + ": " + ex.what();
        }
    }
    if (!failure.empty()) throw NumericalError("snapshot generation failed at " + failure);
    return Tensor3(n, 2 * t, p, std::move(data));
}

MaxwellSnapshots generate_maxwell_snapshots(const MaxwellProblem& pb,
                                            const ParameterSet& params, const TimeGrid& grid) {
    const Index ne = pb.fom.m_e->dim();
    const Index nb = pb.fom.m_b->dim();
    const Index t = grid.snapshots();
    const Index p = params.count();
    std::vector<double> data_e(static_cast<size_t>(ne * t * p));
    std::vector<double> data_b(static_cast<size_t>(nb * t * p));
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (Index s = 0; s < p; ++s) {
        try {
            const auto [e, b] = maxwell_fom_solve(pb.fom, params.sample(s), grid);
            std::copy(e.data(), e.data() + ne * t, data_e.begin() + ne * t * s);
            std::copy(b.data(), b.data() + nb * t, data_b.begin() + nb * t * s);
        } catch (const std::exception& ex) {
#pragma omp critical
            failure = "parameter " + std::to_string(s) + ": " + ex.what();
        }
    }
    if (!failure.empty()) throw NumericalError("snapshot generation failed at " + failure);
    return {Tensor3(ne, t, p, std::move(data_e)), Tensor3(nb, t, p, std::move(data_b))};
}

}  // namespace trom
