#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "trom/basis.hpp"
#include "trom/hosvd.hpp"
#include "trom/integrate.hpp"
#include "trom/linalg.hpp"

namespace trom {

/// mu -> time closure for the load vector; an empty function means unforced.
using LoadFactory = std::function<ForcingFn(const Vector& mu)>;
using StateFactory = std::function<Vector(const Vector& mu)>;

/// M qdot = A q + f(mu; t). For the heat benchmark -A is the SPSD stiffness.
struct LinearFom {
    std::shared_ptr<const SpdOperator> m;
    Matrix a;
    LoadFactory load_for;
    StateFactory x0_for;  // empty = zero initial state
};

/// Canonical pair (q, p): qdot = p, M_W pdot = -K q + f(mu; t).
struct HamiltonianFom {
    std::shared_ptr<const SpdOperator> m_w;
    Matrix stiffness;  // SPSD wave operator K
    LoadFactory load_for;
    StateFactory q0_for, p0_for;
};

/// M_E edot = delta^T M_B b - j(mu; t), M_B bdot = -M_B delta e, with the
/// separable current j(mu; t) = s(t) j_sp(mu).
struct MaxwellFom {
    std::shared_ptr<const SpdOperator> m_e, m_b;
    Matrix delta;  // N_B x N_E combinatorial curl
    std::function<double(double)> envelope;  // s(t)
    StateFactory j_sp_for;
    /// Selected entries of j_sp(mu) only (hyper-reduction path).
    std::function<Vector(const Vector& mu, const std::vector<Index>&)> j_sp_entries;
    std::vector<std::vector<Index>> dof_elements;  // DOF -> touching mesh elements
};

struct QdeimData {
    Matrix u_j;                  // N_E x m load-subspace basis
    std::vector<Index> indices;  // m distinct interpolation DOFs
    Matrix c_j;                  // r x m, filled when a query basis is attached
    Matrix puj_inv;              // (P^T U_J)^{-1}
    double cond_puj = 0.0;
    Vector energy_fraction;      // cumulative captured energy by rank
    std::vector<Index> element_support;  // elements touching the indices
};

struct ReducedModel {
    enum class Kind { heat, wave, maxwell };
    Kind kind;
    Matrix a_hat;       // heat: U^T A U (sym nsd); wave: U^T K U (sym psd)
    Matrix delta1_hat;  // maxwell: U_B^T M_B delta U_E
    Matrix u;           // primary basis (heat/wave: U; maxwell: U_E)
    Matrix u_b;         // maxwell magnetic basis
    std::shared_ptr<const SpdOperator> m, m_b;
    LoadFactory reduced_load_for;   // heat/maxwell: state-size; wave: p-block only
    StateFactory reduced_x0;        // heat: n; wave: stacked (q, p)
    StateFactory reduced_b0;        // maxwell
    std::optional<QdeimData> qdeim;
};

struct RomSolution {
    Matrix reduced;    // heat: n x T, wave: 2n x T, maxwell: electric block
    Matrix reduced_b;  // maxwell magnetic block
    Matrix lifted;     // heat: N x T; wave: displacement; maxwell: electric
    Matrix lifted_b;   // wave: momentum; maxwell: magnetic
};

/// A_hat_full = W^T A W; the online reduction for any query is then
/// u_core^T A_hat_full u_core with no dimension-N work.
Matrix precompute_reduced_operator(const Matrix& a, const TuckerFactors& f);

ReducedModel reduce_heat(const LinearFom& fom, const LocalBasis& basis,
                         const Matrix* a_hat_full = nullptr);
ReducedModel reduce_heat(const LinearFom& fom, const MonolithicBasis& basis);

ReducedModel reduce_wave(const HamiltonianFom& fom, const LocalBasis& basis,
                         const Matrix* k_hat_full = nullptr);
ReducedModel reduce_wave(const HamiltonianFom& fom, const MonolithicBasis& basis);

/// u_e / u_b are the (possibly curl-enriched) field bases, M_E/M_B
/// orthonormal respectively.
ReducedModel reduce_maxwell(const MaxwellFom& fom, const Matrix& u_e, const Matrix& u_b,
                            std::optional<QdeimData> qdeim = std::nullopt);

QdeimData qdeim_offline(const Matrix& j_snapshots, Index m,
                        const std::vector<std::vector<Index>>& dof_to_elements = {});

RomSolution rom_solve(const ReducedModel& model, const Vector& mu, const TimeGrid& grid,
                      bool lift = true);

/// Full-order reference solvers (same schemes as the reduced models).
Matrix heat_fom_solve(const LinearFom& fom, const Vector& mu, const TimeGrid& grid);
std::pair<Matrix, Matrix> wave_fom_solve(const HamiltonianFom& fom, const Vector& mu,
                                         const TimeGrid& grid);
std::pair<Matrix, Matrix> maxwell_fom_solve(const MaxwellFom& fom, const Vector& mu,
                                            const TimeGrid& grid);

}  // namespace trom
