#include "trom/interp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "trom/delaunay.hpp"
#include "trom/errors.hpp"

namespace trom {

ParameterSet::ParameterSet(Matrix q) : q_(std::move(q)) {
    if (q_.cols() < 1 || q_.rows() < 1)
        throw UsageError("parameter set needs at least one sample and one coordinate");
    if (!q_.allFinite()) throw InvalidDataError("parameter set has non-finite entries");
    for (Index a = 0; a < q_.cols(); ++a)
        for (Index b = a + 1; b < q_.cols(); ++b)
            if ((q_.col(a) - q_.col(b)).norm() <= 1e-12)
                throw InvalidDataError("duplicate parameter samples " + std::to_string(a) +
                                       " and " + std::to_string(b));
}

ParameterSet ParameterSet::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open parameter CSV " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged parameter CSV " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty parameter CSV " + path);
    Matrix q(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
    for (size_t s = 0; s < rows.size(); ++s)
        for (size_t i = 0; i < rows[s].size(); ++i)
            q(static_cast<Index>(i), static_cast<Index>(s)) = rows[s][i];
    return ParameterSet(std::move(q));
}

void ParameterSet::to_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write parameter CSV " + path);
    char buf[64];
    for (Index s = 0; s < count(); ++s) {
        for (Index i = 0; i < dim(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", q_(i, s));
            out << buf << (i + 1 < dim() ? "," : "\n");
        }
    }
}

GeneralizedIndex GeneralizedIndex::unit(Index length, Index s) {
    GeneralizedIndex e;
    e.length = length;
    e.weights = {{s, 1.0}};
    return e;
}

Vector GeneralizedIndex::dense() const {
    Vector v = Vector::Zero(length);
    for (const auto& [s, w] : weights) v[s] += w;
    return v;
}

double GeneralizedIndex::sum() const {
    double total = 0.0;
    for (const auto& [s, w] : weights) total += w;
    return total;
}

std::optional<Index> exact_hit(const ParameterSet& ps, const Vector& mu) {
    const double tol = 1e-13 * (1.0 + mu.norm());
    for (Index s = 0; s < ps.count(); ++s)
        if ((ps.matrix().col(s) - mu).norm() <= tol) return s;
    return std::nullopt;
}

std::vector<Index> knn(const ParameterSet& ps, const Vector& mu, Index k) {
    if (mu.size() != ps.dim()) throw UsageError("query dimension mismatch");
    if (k < 1 || k > ps.count())
        throw UsageError("neighbor count " + std::to_string(k) + " outside [1, " +
                         std::to_string(ps.count()) + "]");
    std::vector<Index> idx(static_cast<size_t>(ps.count()));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::vector<double> d2(idx.size());
    for (Index s = 0; s < ps.count(); ++s)
        d2[static_cast<size_t>(s)] = (ps.matrix().col(s) - mu).squaredNorm();
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        const double da = d2[static_cast<size_t>(a)], db = d2[static_cast<size_t>(b)];
        if (da != db) return da < db;
        return a < b;  // tie toward the lower slice index
    });
    idx.resize(static_cast<size_t>(k));
    return idx;
}

GeneralizedIndex barycentric_index(const ParameterSet& ps, const Vector& mu) {
    if (mu.size() != ps.dim()) throw UsageError("query dimension mismatch");
    if (ps.dim() > 3)
        throw UsageError("barycentric interpolation supports parameter dimension <= 3");

    if (auto hit = exact_hit(ps, mu)) return GeneralizedIndex::unit(ps.count(), *hit);

    delaunay::Triangulation tri(ps.matrix());
    const auto loc = tri.locate(mu);

    GeneralizedIndex e;
    e.length = ps.count();
    double total = 0.0;
    for (size_t j = 0; j < loc.vertices.size(); ++j) {
        const double w = std::max(loc.coords[static_cast<Index>(j)], 0.0);
        total += w;
        e.weights.emplace_back(loc.vertices[j], w);
    }
    for (auto& [s, w] : e.weights) w /= total;  // renormalize after clamping
    std::sort(e.weights.begin(), e.weights.end());
    return e;
}

GeneralizedIndex mo_index(const ParameterSet& ps, const Vector& mu, Index k) {
    const Index p = ps.dim();
    if (mu.size() != p) throw UsageError("query dimension mismatch");
    if (k <= p)
        throw UsageError("weighted least-squares interpolation needs more than p=" +
                         std::to_string(p) + " neighbors, got " + std::to_string(k));
    if (k > ps.count()) throw UsageError("neighbor count exceeds sample count");

    const std::vector<Index> nb = knn(ps, mu, k);
    Vector dist(k);
    for (Index j = 0; j < k; ++j) dist[j] = (ps.matrix().col(nb[static_cast<size_t>(j)]) - mu).norm();
    const double hit_tol = 1e-13 * (1.0 + mu.norm());
    if (dist[0] <= hit_tol) return GeneralizedIndex::unit(ps.count(), nb[0]);

    // abar = D (Qbar D)^+ c  with  D = Diag(d)^{-1}, c = (mu^T, 1)^T
    Matrix qbar(p + 1, k);
    for (Index j = 0; j < k; ++j) {
        qbar.col(j).head(p) = ps.matrix().col(nb[static_cast<size_t>(j)]);
        qbar(p, j) = 1.0;
    }
    const Vector dinv = dist.cwiseInverse();
    const Matrix b = qbar * dinv.asDiagonal();
    Vector c(p + 1);
    c.head(p) = mu;
    c(p) = 1.0;

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(b);
    cod.setThreshold(1e-12);
    const Vector z = cod.solve(c);
    const Vector abar = dinv.asDiagonal() * z;

    GeneralizedIndex e;
    e.length = ps.count();
    e.rank_deficient = cod.rank() < p + 1;
    for (Index j = 0; j < k; ++j) e.weights.emplace_back(nb[static_cast<size_t>(j)], abar[j]);
    std::sort(e.weights.begin(), e.weights.end());
    return e;
}

GeneralizedIndex grbf_index(const ParameterSet& ps, const Vector& mu, const GrbfConfig& cfg) {
    if (mu.size() != ps.dim()) throw UsageError("query dimension mismatch");
    if (!(cfg.shape_param > 0.0)) throw UsageError("GRBF shape parameter must be positive");
    if (cfg.neighbors && (*cfg.neighbors < 1 || *cfg.neighbors > ps.count()))
        throw UsageError("GRBF neighbor count outside [1, P]");

    std::vector<Index> nb;
    if (cfg.neighbors) {
        nb = knn(ps, mu, *cfg.neighbors);
    } else {
        nb.resize(static_cast<size_t>(ps.count()));
        std::iota(nb.begin(), nb.end(), Index{0});
    }
    const Index k = static_cast<Index>(nb.size());
    const double eps = cfg.shape_param;
    auto phi = [eps](double r) { return std::exp(-(eps * r) * (eps * r)); };

    Matrix kmat(k, k);
    for (Index a = 0; a < k; ++a) {
        for (Index b = a; b < k; ++b) {
            const double v = phi((ps.matrix().col(nb[static_cast<size_t>(a)]) -
                                  ps.matrix().col(nb[static_cast<size_t>(b)]))
                                     .norm());
            kmat(a, b) = v;
            kmat(b, a) = v;
        }
    }
    const double nugget =
        cfg.nugget.value_or(1e-12 * kmat.trace() / static_cast<double>(k));
    if (nugget < 0.0) throw UsageError("GRBF nugget must be nonnegative");
    kmat.diagonal().array() += nugget;

    Vector kvec(k);
    for (Index a = 0; a < k; ++a)
        kvec[a] = phi((ps.matrix().col(nb[static_cast<size_t>(a)]) - mu).norm());

    Eigen::LLT<Matrix> llt(kmat);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(kmat, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
        const double lmin = es.eigenvalues().minCoeff();
        const double cond = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
        throw IllConditionedKernelError(
            cond, "GRBF kernel matrix is numerically singular (condition estimate " +
                      std::to_string(cond) + "); increase the nugget or drop duplicate neighbors");
    }
    const Vector eloc = llt.solve(kvec);

    GeneralizedIndex e;
    e.length = ps.count();
    for (Index j = 0; j < k; ++j) e.weights.emplace_back(nb[static_cast<size_t>(j)], eloc[j]);
    std::sort(e.weights.begin(), e.weights.end());
    return e;
}

}  // namespace trom
