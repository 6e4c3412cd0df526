#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "trom/interp.hpp"
#include "trom/rom.hpp"
#include "trom/tensor.hpp"

namespace trom {

struct Mesh1D {
    Vector nodes;  // ascending, uniform
    Index elements() const { return nodes.size() - 1; }
    double h(Index e) const { return nodes[e + 1] - nodes[e]; }
    double length() const { return nodes[nodes.size() - 1] - nodes[0]; }
};

Mesh1D uniform_mesh_1d(double length, Index elements);

/// Structured triangulation of [0, lx] x [0, ly]: a regular node grid with
/// each cell split into two right triangles.
struct Mesh2D {
    Matrix nodes;                              // 2 x V
    Eigen::Matrix<Index, 3, Eigen::Dynamic> tris;  // 3 x E, CCW
    std::vector<bool> boundary;                // per node
    std::vector<Index> interior;               // ascending interior node ids
};

Mesh2D structured_mesh_2d(double lx, double ly, Index nodes_per_side);

/// Consistent P1 mass and stiffness over all nodes (no boundary elimination).
struct P1System {
    Matrix mass;
    Matrix stiffness;
};

P1System assemble_p1_1d(const Mesh1D& mesh);
P1System assemble_p1_2d(const Mesh2D& mesh);

/// Load vector (f, phi_i) over all nodes; 3-point Gauss per interval in 1D,
/// edge-midpoint rule per triangle in 2D.
Vector assemble_load_1d(const Mesh1D& mesh, const std::function<double(double)>& f);
Vector assemble_load_2d(const Mesh2D& mesh, const std::function<double(double, double)>& f);

struct ForcingSpec {
    double sigma = 0.4;    // Gaussian width of the source
    double direction = 1.0;  // polarization scalar (maxwell)
    double period = 2.5;   // envelope period T in s(t) = (1 - cos(2 pi t / T))/2
};

struct HeatProblem {
    std::shared_ptr<const Mesh2D> mesh;
    LinearFom fom;  // interior DOFs, A = -K, homogeneous Dirichlet eliminated
};

struct WaveProblem {
    std::shared_ptr<const Mesh1D> mesh;
    HamiltonianFom fom;
};

struct MaxwellProblem {
    std::shared_ptr<const Mesh1D> mesh;
    MaxwellFom fom;  // E: interior P1 (PEC ends), B: P0 element averages
};

HeatProblem build_heat_fom(const Mesh2D& mesh, const ForcingSpec& spec);
WaveProblem build_wave_fom(const Mesh1D& mesh, const ForcingSpec& spec);
MaxwellProblem build_maxwell_fom(const Mesh1D& mesh, const ForcingSpec& spec);

/// Gaussian-bump interior state with amplitude mu_1 centered at (mu_2, mu_3);
/// used as a nontrivial initial condition for unforced studies.
StateFactory heat_bump_initial_state(std::shared_ptr<const Mesh2D> mesh, double sigma);

enum class ProblemKind { heat, wave, maxwell };

/// Deterministic uniform sampling over each problem's parameter ranges
/// (heat: amplitude (0,1) and center [0, 2pi]^2; wave: frequency (0.01, 0.05)
/// and center [0, 2pi]; maxwell: scalar center [0.5, 1.5]). The first
/// split.first draws form the training set, the next split.second the test set.
std::pair<ParameterSet, ParameterSet> sample_parameters(ProblemKind kind, Index count,
                                                        std::pair<Index, Index> split,
                                                        std::uint64_t seed);

Tensor3 generate_heat_snapshots(const HeatProblem& pb, const ParameterSet& params,
                                const TimeGrid& grid);

/// Lifted snapshots [Q | P] per parameter, stacked into an N x 2T x P tensor.
Tensor3 generate_wave_snapshots(const WaveProblem& pb, const ParameterSet& params,
                                const TimeGrid& grid);

struct MaxwellSnapshots {
    Tensor3 e;
    Tensor3 b;
};

MaxwellSnapshots generate_maxwell_snapshots(const MaxwellProblem& pb,
                                            const ParameterSet& params, const TimeGrid& grid);

}  // namespace trom
