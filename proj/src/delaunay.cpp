#include "trom/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "trom/errors.hpp"

namespace trom::delaunay {

namespace {

double det3(const double m[3][3], double* mag) {
    const double c0 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c1 = m[1][0] * m[2][2] - m[1][2] * m[2][0];
    const double c2 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    if (mag) {
        const double a0 = std::abs(m[1][1] * m[2][2]) + std::abs(m[1][2] * m[2][1]);
        const double a1 = std::abs(m[1][0] * m[2][2]) + std::abs(m[1][2] * m[2][0]);
        const double a2 = std::abs(m[1][0] * m[2][1]) + std::abs(m[1][1] * m[2][0]);
        *mag = std::abs(m[0][0]) * a0 + std::abs(m[0][1]) * a1 + std::abs(m[0][2]) * a2;
    }
    return m[0][0] * c0 - m[0][1] * c1 + m[0][2] * c2;
}

double det4(const double m[4][4], double* mag) {
    double total = 0.0, amag = 0.0;
    for (int j = 0; j < 4; ++j) {
        double sub[3][3];
        for (int r = 1; r < 4; ++r) {
            int cc = 0;
            for (int c = 0; c < 4; ++c) {
                if (c == j) continue;
                sub[r - 1][cc++] = m[r][c];
            }
        }
        double smag = 0.0;
        const double sdet = det3(sub, &smag);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        total += sign * m[0][j] * sdet;
        amag += std::abs(m[0][j]) * smag;
    }
    if (mag) *mag = amag;
    return total;
}

struct Predicates {
    int dim;
    const std::vector<Vector>* pts;

    // orientation determinant of the simplex (positive for one handedness);
    // mag receives a magnitude estimate for epsilon guards
    double orient(const std::array<Index, 4>& v, double* mag) const {
        const auto& p = *pts;
        if (dim == 2) {
            double m[3][3] = {{1, 1, 1}, {0, 0, 0}, {0, 0, 0}};
            for (int j = 0; j < 3; ++j) {
                m[1][j] = p[static_cast<size_t>(v[static_cast<size_t>(j)])](0);
                m[2][j] = p[static_cast<size_t>(v[static_cast<size_t>(j)])](1);
            }
            return det3(m, mag);
        }
        double m[4][4];
        for (int j = 0; j < 4; ++j) {
            m[0][j] = 1.0;
            for (int r = 0; r < 3; ++r)
                m[r + 1][j] = p[static_cast<size_t>(v[static_cast<size_t>(j)])](r);
        }
        return det4(m, mag);
    }

    // insphere test for a positively oriented simplex, guarded by the
    // magnitude estimate. With rows (v_i - q, |v_i - q|^2) the determinant is
    // positive for interior q in 2d and negative in 3d.
    bool in_circumsphere(const std::array<Index, 4>& v, const Vector& q) const {
        const auto& p = *pts;
        if (dim == 2) {
            double m[3][3];
            for (int i = 0; i < 3; ++i) {
                const Vector d = p[static_cast<size_t>(v[static_cast<size_t>(i)])] - q;
                m[i][0] = d(0);
                m[i][1] = d(1);
                m[i][2] = d.squaredNorm();
            }
            double mag = 0.0;
            const double det = det3(m, &mag);
            return det > 1e-13 * mag;
        }
        double m[4][4];
        for (int i = 0; i < 4; ++i) {
            const Vector d = p[static_cast<size_t>(v[static_cast<size_t>(i)])] - q;
            m[i][0] = d(0);
            m[i][1] = d(1);
            m[i][2] = d(2);
            m[i][3] = d.squaredNorm();
        }
        double mag = 0.0;
        const double det = det4(m, &mag);
        return det < -1e-13 * mag;
    }
};

using Facet = std::array<Index, 3>;  // sorted vertex ids, dim entries used

Facet facet_of(const std::array<Index, 4>& v, int skip, int dim) {
    Facet f{-1, -1, -1};
    int c = 0;
    for (int j = 0; j <= dim; ++j) {
        if (j == skip) continue;
        f[static_cast<size_t>(c++)] = v[static_cast<size_t>(j)];
    }
    std::sort(f.begin(), f.begin() + dim);
    return f;
}

}  // namespace

Triangulation::Triangulation(const Matrix& points) : points_(points) {
    dim_ = static_cast<int>(points.rows());
    if (dim_ < 1 || dim_ > 3)
        throw UsageError("triangulation supports parameter dimension 1..3, got " +
                         std::to_string(dim_));
    if (points.cols() < dim_ + 1)
        throw DegenerateGeometryError("need at least dim+1 points, got " +
                                      std::to_string(points.cols()));
    if (dim_ == 1)
        build_1d(points);
    else
        build_nd(points);
}

void Triangulation::build_1d(const Matrix& points) {
    order_.resize(static_cast<size_t>(points.cols()));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::sort(order_.begin(), order_.end(),
              [&](Index a, Index b) { return points(0, a) < points(0, b); });
}

void Triangulation::build_nd(const Matrix& points) {
    const Index np = points.cols();
    const int d = dim_;

    std::vector<Vector> pts;
    pts.reserve(static_cast<size_t>(np + d + 1));
    for (Index j = 0; j < np; ++j) pts.push_back(points.col(j));

    Vector lo = points.rowwise().minCoeff();
    Vector hi = points.rowwise().maxCoeff();
    const Vector center = 0.5 * (lo + hi);
    const double radius = std::max((hi - lo).norm(), 1e-12) * 64.0;

    // super-simplex vertices, slightly perturbed to avoid symmetric ties
    std::array<Index, 4> super{};
    if (d == 2) {
        const double angles[3] = {0.31, 0.31 + 2.0943951023931953, 0.31 + 4.1887902047863905};
        for (int k = 0; k < 3; ++k) {
            Vector v(2);
            const double r = radius * (1.0 + 0.013 * k);
            v << center(0) + r * std::cos(angles[k]), center(1) + r * std::sin(angles[k]);
            super[static_cast<size_t>(k)] = static_cast<Index>(pts.size());
            pts.push_back(v);
        }
    } else {
        const double verts[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
        for (int k = 0; k < 4; ++k) {
            Vector v(3);
            const double r = radius * (1.0 + 0.013 * k);
            for (int c = 0; c < 3; ++c)
                v(c) = center(c) + r * verts[k][c] / std::sqrt(3.0);
            super[static_cast<size_t>(k)] = static_cast<Index>(pts.size());
            pts.push_back(v);
        }
    }

    Predicates pred{d, &pts};
    auto orient_fix = [&](std::array<Index, 4>& v) {
        double mag = 0.0;
        const double det = pred.orient(v, &mag);
        if (det < 0.0) std::swap(v[static_cast<size_t>(d - 1)], v[static_cast<size_t>(d)]);
        return std::abs(det) > 1e-14 * std::max(mag, 1e-300);
    };

    std::vector<std::array<Index, 4>> cells;
    {
        std::array<Index, 4> c0{};
        for (int k = 0; k <= d; ++k) c0[static_cast<size_t>(k)] = super[static_cast<size_t>(k)];
        orient_fix(c0);
        cells.push_back(c0);
    }

    for (Index ip = 0; ip < np; ++ip) {
        const Vector& q = pts[static_cast<size_t>(ip)];
        std::vector<size_t> bad;
        for (size_t c = 0; c < cells.size(); ++c)
            if (pred.in_circumsphere(cells[c], q)) bad.push_back(c);
        if (bad.empty())
            throw DegenerateGeometryError(
                "insertion failed (no containing circumsphere) at point " + std::to_string(ip));

        std::map<Facet, int> facet_count;
        for (size_t b : bad)
            for (int j = 0; j <= d; ++j) ++facet_count[facet_of(cells[b], j, d)];

        std::vector<std::array<Index, 4>> next;
        next.reserve(cells.size());
        for (size_t c = 0; c < cells.size(); ++c)
            if (!std::binary_search(bad.begin(), bad.end(), c)) next.push_back(cells[c]);
        for (const auto& [facet, count] : facet_count) {
            if (count != 1) continue;  // interior facet of the cavity
            std::array<Index, 4> cell{};
            for (int j = 0; j < d; ++j) cell[static_cast<size_t>(j)] = facet[static_cast<size_t>(j)];
            cell[static_cast<size_t>(d)] = ip;
            orient_fix(cell);
            next.push_back(cell);
        }
        cells.swap(next);
    }

    for (const auto& cell : cells) {
        bool has_super = false;
        for (int j = 0; j <= d; ++j)
            if (cell[static_cast<size_t>(j)] >= np) has_super = true;
        if (has_super) continue;
        std::array<Index, 4> keep = cell;
        double mag = 0.0;
        if (std::abs(pred.orient(keep, &mag)) <= 1e-14 * std::max(mag, 1e-300))
            continue;  // flat sliver
        cells_.push_back(keep);
    }
    if (cells_.empty())
        throw DegenerateGeometryError(
            "point set is affinely degenerate (no full-dimensional simplices)");
}

Triangulation::Location Triangulation::locate(const Vector& mu) const {
    if (mu.size() != dim_) throw UsageError("query dimension mismatch");

    if (dim_ == 1) {
        const double x = mu(0);
        const size_t np = order_.size();
        const double xmin = points_(0, order_.front());
        const double xmax = points_(0, order_.back());
        const double span = std::max(xmax - xmin, 1e-300);
        if (x < xmin - 1e-12 * span || x > xmax + 1e-12 * span)
            throw OutOfHullError("query " + std::to_string(x) + " outside [" +
                                 std::to_string(xmin) + ", " + std::to_string(xmax) + "]");
        size_t k = 0;
        while (k + 2 < np && points_(0, order_[k + 1]) < x) ++k;
        const Index a = order_[k], b = order_[k + 1];
        const double xa = points_(0, a), xb = points_(0, b);
        const double theta = std::clamp((x - xa) / (xb - xa), 0.0, 1.0);
        Location loc;
        loc.vertices = {a, b};
        loc.coords = Vector(2);
        loc.coords << 1.0 - theta, theta;
        return loc;
    }

    const int d = dim_;
    double best_min = -std::numeric_limits<double>::infinity();
    Location best;
    for (const auto& cell : cells_) {
        Matrix a(d + 1, d + 1);
        Vector rhs(d + 1);
        for (int j = 0; j <= d; ++j) {
            for (int r = 0; r < d; ++r)
                a(r, j) = points_(r, cell[static_cast<size_t>(j)]);
            a(d, j) = 1.0;
        }
        rhs.head(d) = mu;
        rhs(d) = 1.0;
        Eigen::PartialPivLU<Matrix> lu(a);
        const Vector lambda = lu.solve(rhs);
        if (!lambda.allFinite()) continue;
        const double mn = lambda.minCoeff();
        if (mn > best_min) {
            best_min = mn;
            best.coords = lambda;
            best.vertices.assign(cell.begin(), cell.begin() + d + 1);
        }
    }
    if (best.vertices.empty() || best_min < -1e-7)
        throw OutOfHullError("query point lies outside the convex hull of the samples");
    return best;
}

}  // namespace trom::delaunay
