#pragma once

#include <functional>
#include <string>
#include <vector>

#include "trom/linalg.hpp"
#include "trom/types.hpp"

namespace trom {

/// ||Q||_M = sqrt(sum_alpha q_alpha^T M q_alpha) over trajectory columns.
double trajectory_norm(const Matrix& q, const SpdOperator& m);

/// trajectory_norm(fom - rom) / trajectory_norm(fom).
double relative_rom_error(const Matrix& fom_traj, const Matrix& rom_traj_lifted,
                          const SpdOperator& m);

/// Linear interpolation between order statistics, inclusive convention:
/// h = (n-1) q, value = v[floor(h)] + frac(h) * (v[floor(h)+1] - v[floor(h)]).
double percentile(std::vector<double> values, double q);

struct SweepRow {
    std::string method;
    Index rank = 0;
    Index param_index = 0;
    double projection_error = 0.0;
    double rom_error = 0.0;
};

struct SweepAggregate {
    std::string method;
    Index rank = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> failures;  // "(method, rank, param): message"
};

/// Evaluate fn over the (method, rank, param) grid; rows keep grid order.
/// Failed cells are recorded and skipped, partial results retained.
using SweepFn = std::function<std::pair<double, double>(const std::string& method, Index rank,
                                                        Index param)>;
SweepResult rank_sweep(const std::vector<std::string>& methods, const std::vector<Index>& ranks,
                       Index param_count, const SweepFn& fn);

/// Median and quartiles of the ROM error per (method, rank), in input order.
std::vector<SweepAggregate> aggregate_sweep(const std::vector<SweepRow>& rows);

/// Terms of the local-basis representation error budget at a training
/// parameter (the interpolation term vanishes there and is not estimated).
struct RepresentationErrorBudget {
    double tucker_term = 0.0;  // epsilon^2 |X|_M^2
    double interp_term = 0.0;  // placeholder: never estimated (needs smoothness
                               // seminorms of the parameter-to-state map)
    double svd_tail = 0.0;     // sum of squared discarded local singular values
    double measured = 0.0;     // actual squared projection error
    bool interp_term_estimated = false;
    double slack = 1e-8;
    bool holds() const { return measured <= tucker_term + svd_tail + slack; }
};

RepresentationErrorBudget check_representation_bound(double measured_sq, double epsilon_trunc,
                                                     double x_norm_m, double sigma_tail_sq,
                                                     double slack = 1e-8);

/// ROM error bound factor (1 + L_f C(tau) sqrt(tau)) with
/// C(tau) = sqrt((exp(2 L_f tau) - 1) / (2 L_f)), checked against the
/// time-integrated projection error with a multiplicative slack.
struct RomErrorBound {
    double l_f = 0.0;
    double c_tau = 0.0;
    double factor = 0.0;
    double projection_norm = 0.0;
    double rom_error = 0.0;
    double slack_factor = 1.1;
    bool holds() const { return rom_error <= factor * projection_norm * slack_factor; }
};

RomErrorBound check_rom_bound(double l_f, double tau, double projection_norm, double rom_error,
                              double slack_factor = 1.1);

}  // namespace trom
