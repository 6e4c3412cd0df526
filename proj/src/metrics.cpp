#include "trom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "trom/errors.hpp"

namespace trom {

double trajectory_norm(const Matrix& q, const SpdOperator& m) {
    if (q.rows() != m.dim()) throw UsageError("trajectory dimension mismatch");
    return m.cholesky().apply(q).norm();
}

double relative_rom_error(const Matrix& fom_traj, const Matrix& rom_traj_lifted,
                          const SpdOperator& m) {
    if (fom_traj.rows() != rom_traj_lifted.rows() || fom_traj.cols() != rom_traj_lifted.cols())
        throw UsageError("trajectory shapes do not match");
    const double ref = trajectory_norm(fom_traj, m);
    if (ref == 0.0)
        throw NumericalError("relative error undefined: reference trajectory has zero norm");
    return trajectory_norm(fom_traj - rom_traj_lifted, m) / ref;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw UsageError("percentile of an empty sample");
    if (q < 0.0 || q > 1.0) throw UsageError("percentile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

SweepResult rank_sweep(const std::vector<std::string>& methods, const std::vector<Index>& ranks,
                       Index param_count, const SweepFn& fn) {
    SweepResult result;
    const Index total = static_cast<Index>(methods.size() * ranks.size()) * param_count;
    result.rows.resize(static_cast<size_t>(total));
    std::vector<char> ok(static_cast<size_t>(total), 0);
    std::vector<std::string> errors(static_cast<size_t>(total));

#pragma omp parallel for schedule(dynamic)
    for (Index task = 0; task < total; ++task) {
        const Index per_method = static_cast<Index>(ranks.size()) * param_count;
        const size_t mi = static_cast<size_t>(task / per_method);
        const size_t ri = static_cast<size_t>((task % per_method) / param_count);
        const Index param = task % param_count;
        SweepRow row;
        row.method = methods[mi];
        row.rank = ranks[ri];
        row.param_index = param;
        try {
            const auto [proj, rom] = fn(methods[mi], ranks[ri], param);
            row.projection_error = proj;
            row.rom_error = rom;
            ok[static_cast<size_t>(task)] = 1;
        } catch (const std::exception& ex) {
            errors[static_cast<size_t>(task)] = "(" + methods[mi] + ", " +
                                                std::to_string(ranks[ri]) + ", " +
                                                std::to_string(param) + "): " + ex.what();
        }
        result.rows[static_cast<size_t>(task)] = std::move(row);
    }

    std::vector<SweepRow> kept;
    kept.reserve(result.rows.size());
    for (size_t i = 0; i < result.rows.size(); ++i) {
        if (ok[i])
            kept.push_back(std::move(result.rows[i]));
        else
            result.failures.push_back(errors[i]);
    }
    result.rows = std::move(kept);
    return result;
}

std::vector<SweepAggregate> aggregate_sweep(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<std::string, Index>> order;
    std::map<std::pair<std::string, Index>, std::vector<double>> groups;
    for (const auto& row : rows) {
        const auto key = std::make_pair(row.method, row.rank);
        if (groups.find(key) == groups.end()) order.push_back(key);
        groups[key].push_back(row.rom_error);
    }
    std::vector<SweepAggregate> out;
    out.reserve(order.size());
    for (const auto& key : order) {
        SweepAggregate agg;
        agg.method = key.first;
        agg.rank = key.second;
        agg.median = percentile(groups[key], 0.5);
        agg.q25 = percentile(groups[key], 0.25);
        agg.q75 = percentile(groups[key], 0.75);
        out.push_back(std::move(agg));
    }
    return out;
}

RepresentationErrorBudget check_representation_bound(double measured_sq, double epsilon_trunc,
                                                     double x_norm_m, double sigma_tail_sq,
                                                     double slack) {
    RepresentationErrorBudget budget;
    budget.tucker_term = epsilon_trunc * epsilon_trunc * x_norm_m * x_norm_m;
    budget.svd_tail = sigma_tail_sq;
    budget.measured = measured_sq;
    budget.slack = slack;
    return budget;
}

RomErrorBound check_rom_bound(double l_f, double tau, double projection_norm, double rom_error,
                              double slack_factor) {
    if (!(l_f > 0.0) || !(tau > 0.0)) throw UsageError("bound constants must be positive");
    RomErrorBound bound;
    bound.l_f = l_f;
    bound.c_tau = std::sqrt((std::expm1(2.0 * l_f * tau)) / (2.0 * l_f));
    bound.factor = 1.0 + l_f * bound.c_tau * std::sqrt(tau);
    bound.projection_norm = projection_norm;
    bound.rom_error = rom_error;
    bound.slack_factor = slack_factor;
    return bound;
}

}  // namespace trom
